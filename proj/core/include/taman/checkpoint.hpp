#pragma once

#include <filesystem>
#include <vector>

#include "taman/config.hpp"
#include "taman/model.hpp"

namespace taman {

/// Everything needed to evaluate: the parameters, the per-scale weights the
/// target aggregation uses at test time (averaged over the final training
/// epoch), and the resolved configuration for the record.
struct Checkpoint {
  ModelF model;
  std::vector<double> target_scale_weights;  // parallel to model.cfg.scales
  Variant variant = Variant::Full;
  RunConfig config;
};

/// Binary container: magic "TMNC", u32le version, a JSON metadata block,
/// then a named tensor directory; each tensor is stored as u32le rows,
/// u32le cols, row-major float32le - the same numeric layout as TMNF files.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace taman
