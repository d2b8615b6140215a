#pragma once

#include <filesystem>
#include <string>

#include "taman/matrix.hpp"

namespace taman {

/// One video's frame-level feature matrix (h x d, temporal row order).
struct VideoFeatures {
  std::string id;  // manifest path string; keys deterministic eval sampling
  MatF frames;
};

/// TMNF container: magic "TMNF", then u32le version (=1), u32le h, u32le d,
/// then h*d float32le values row-major. Round-trips are bit-exact.
void write_features(const std::filesystem::path& path, const MatF& frames);
MatF load_features(const std::filesystem::path& path);

}  // namespace taman
