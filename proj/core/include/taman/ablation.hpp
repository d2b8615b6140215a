#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "taman/config.hpp"
#include "taman/evaluator.hpp"
#include "taman/manifest.hpp"
#include "taman/trainer.hpp"

namespace taman {

struct AblationRow {
  Variant variant = Variant::Full;
  std::vector<double> per_seed_accuracy;
  double mean = 0.0;
  double stddev = 0.0;
};

struct AblationConfig {
  RunConfig base;                  // seed/variant fields are overridden per run
  std::vector<Variant> variants;
  std::vector<std::uint64_t> seeds;
};

/// Trains and evaluates every (variant, seed) pair on the given benchmark.
/// Runs whose training is identical (full vs the ensemble-only variants)
/// share checkpoints, and the source-only-per-pair runs needed by the
/// source-accuracy schema are scheduled automatically.
std::vector<AblationRow> run_ablation(const AblationConfig& cfg, std::span<const Dataset> sources,
                                      const Dataset& target_train, const Dataset& target_test);

std::string format_ablation_table(std::span<const AblationRow> rows);

}  // namespace taman
