#include "taman/errors.hpp"

namespace taman {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Scale: return "scale error";
    case ErrorKind::Index: return "index error";
    case ErrorKind::Label: return "label error";
    case ErrorKind::Cache: return "cache error";
    case ErrorKind::Normalization: return "normalization error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Batch: return "batch error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Divergence: return "divergence error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Compatibility: return "compatibility error";
    case ErrorKind::Completeness: return "completeness error";
    case ErrorKind::DegenerateClass: return "degenerate-class error";
  }
  return "error";
}

}  // namespace taman
