#pragma once

#include <stdexcept>
#include <string>

namespace taman {

/// What went wrong, in terms callers can dispatch on.
enum class ErrorKind {
  Shape,            // tensor dimensions do not line up
  Scale,            // temporal scale outside [2, h]
  Index,            // frame/clip index out of range
  Label,            // class label out of range
  Cache,            // backward called with a stale or foreign forward cache
  Normalization,    // weights expected to sum to 1 do not
  Config,           // invalid or inconsistent configuration
  Batch,            // empty or malformed batch
  Data,             // manifest/data contract violated
  Divergence,       // non-finite loss during training
  Format,           // malformed binary or text file
  Compatibility,    // checkpoint does not match the data it is applied to
  Completeness,     // a benchmark class has no videos in some domain
  DegenerateClass,  // fewer than two classes
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace taman
