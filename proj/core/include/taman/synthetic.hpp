#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "taman/manifest.hpp"

namespace taman {

struct SyntheticDomain {
  std::string name;
  double bias_scale = 0.0;   // magnitude of the per-domain feature offset
  double noise_sigma = 0.5;  // per-frame gaussian noise
};

/// Desk-scale stand-in for the video benchmarks. Each base class c is a pair
/// of frame prototypes (u_c, v_c): its videos show u_c for the first half of
/// the frames and v_c for the second. Class c + class_pairs is the confuser
/// of c - same prototypes in reverse order - so frame-pooled features cannot
/// tell them apart and classification has to read temporal order.
struct SyntheticSpec {
  int class_pairs = 4;  // emitted label space is 2 * class_pairs
  std::vector<SyntheticDomain> domains;
  int frame_count = 6;
  int feature_dim = 8;
  int videos_per_class = 200;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;

  int label_count() const { return 2 * class_pairs; }
  void validate() const;
};

struct SyntheticDomainFiles {
  std::filesystem::path train;            // labeled
  std::filesystem::path train_unlabeled;  // same videos, labels stripped to -1
  std::filesystem::path test;             // labeled
};

/// Writes per-domain TMNF feature files plus train/train-unlabeled/test
/// manifests under out_dir. Fully deterministic in spec.seed.
std::map<std::string, SyntheticDomainFiles> generate_synthetic(
    const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace taman
