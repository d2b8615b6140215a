#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace taman {

enum class Variant {
  Full,
  NoConfidence,       // equal confidence for every scale
  NoDominance,        // confidence only, renormalized; target uses uniform weights
  NoLocalAttention,   // global feature is the plain additive aggregate
  DominanceMin,       // all dominance mass on the scale with minimal local discrepancy
  DominanceMax,       // all dominance mass on the scale with maximal local discrepancy
  EnsembleAvg,        // training as Full; uniform ensemble at evaluation
  EnsembleSrcAccuracy,// training as Full; ensemble weighted by source-only accuracies
  SourceOnly,         // no alignment terms, uniform attention
};

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

struct RunConfig {
  double lr = 0.001;
  double momentum = 0.9;
  double weight_decay = 0.0001;
  int epochs = 100;
  int batch_size = 32;
  double lambda_df = 0.005;
  double lambda_dt = 0.01;
  std::vector<int> scales;        // empty means all of {2, ..., h}
  int clips_per_scale = 3;
  std::vector<int> moment_orders = {1, 2};
  std::uint64_t seed = 0;
  Variant variant = Variant::Full;
  int temporal_dim = 256;
  int hidden_dim = 256;

  /// Scale set actually used for h frames per video.
  std::vector<int> effective_scales(int frame_count) const;

  void validate() const;
};

std::string to_json_string(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

}  // namespace taman
