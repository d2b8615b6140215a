#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taman/alignment.hpp"
#include "taman/checkpoint.hpp"
#include "taman/config.hpp"
#include "taman/gradcheck.hpp"
#include "taman/manifest.hpp"

namespace taman {

struct MetricsRecord {
  int epoch = 0;
  std::vector<std::pair<std::string, double>> cls_loss;  // per source domain
  double d_f = 0.0;
  double d_t = 0.0;
  double total = 0.0;
  double lr = 0.0;
  std::int64_t wall_ms = 0;
};

std::string to_json_line(const MetricsRecord& rec);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<MetricsRecord> metrics;
  bool diverged = false;
  std::string divergence_message;
};

/// Runs the training loop. Every epoch walks the largest source once;
/// smaller domains are resampled to fill equal-size per-domain batches.
/// On a non-finite loss the loop stops and the checkpoint holds the last
/// epoch that completed cleanly.
TrainResult train(const RunConfig& cfg, std::span<const Dataset> sources,
                  const Dataset& target_train);

/// Configuration of the small full-pipeline gradient verification. The
/// whole objective is rebuilt in double precision on fixed batches with a
/// frozen clip draw and frozen attention weights, then every parameter is
/// probed with central differences.
struct PipelineCheckSpec {
  int feature_dim = 6;
  int frame_count = 4;
  std::vector<int> scales = {2, 3};
  int clips_per_scale = 2;
  int class_count = 3;
  int source_count = 2;
  int batch_size = 8;
  int temporal_dim = 8;
  int hidden_dim = 8;
  double lambda_df = 0.005;
  double lambda_dt = 0.01;
  double eps = 3e-4;
  double tolerance = 1e-3;
  std::uint64_t seed = 0;
};

GradCheckReport full_pipeline_grad_check(const PipelineCheckSpec& spec = {});

}  // namespace taman
