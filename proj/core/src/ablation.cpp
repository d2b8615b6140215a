#include "taman/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace taman {

namespace {

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<AblationRow> run_ablation(const AblationConfig& cfg, std::span<const Dataset> sources,
                                      const Dataset& target_train, const Dataset& target_test) {
  if (cfg.variants.empty()) fail(ErrorKind::Config, "no ablation variants requested");
  if (cfg.seeds.empty()) fail(ErrorKind::Config, "no seeds requested");

  // Checkpoints for variants that train identically to Full are shared.
  std::map<std::uint64_t, Checkpoint> full_checkpoints;
  auto full_checkpoint = [&](std::uint64_t seed) -> const Checkpoint& {
    auto it = full_checkpoints.find(seed);
    if (it == full_checkpoints.end()) {
      RunConfig rc = cfg.base;
      rc.seed = seed;
      rc.variant = Variant::Full;
      it = full_checkpoints.emplace(seed, train(rc, sources, target_train).checkpoint).first;
    }
    return it->second;
  };

  // Source-only accuracy of each individual source->target pair, needed by
  // the source-accuracy ensemble schema.
  std::map<std::uint64_t, std::vector<double>> pair_accuracies;
  auto source_pair_accuracies = [&](std::uint64_t seed) -> const std::vector<double>& {
    auto it = pair_accuracies.find(seed);
    if (it == pair_accuracies.end()) {
      std::vector<double> acc;
      for (std::size_t j = 0; j < sources.size(); ++j) {
        RunConfig rc = cfg.base;
        rc.seed = seed;
        rc.variant = Variant::SourceOnly;
        auto result = train(rc, sources.subspan(j, 1), target_train);
        acc.push_back(evaluate(result.checkpoint, target_test, EnsembleMode::Certainty).top1);
      }
      it = pair_accuracies.emplace(seed, std::move(acc)).first;
    }
    return it->second;
  };

  std::vector<AblationRow> rows;
  for (Variant variant : cfg.variants) {
    AblationRow row;
    row.variant = variant;
    for (std::uint64_t seed : cfg.seeds) {
      double accuracy = 0.0;
      switch (variant) {
        case Variant::EnsembleAvg:
          accuracy = evaluate(full_checkpoint(seed), target_test, EnsembleMode::Average).top1;
          break;
        case Variant::EnsembleSrcAccuracy: {
          const auto& acc = source_pair_accuracies(seed);
          accuracy = evaluate(full_checkpoint(seed), target_test, EnsembleMode::SourceAccuracy, acc).top1;
          break;
        }
        case Variant::Full:
          accuracy = evaluate(full_checkpoint(seed), target_test, EnsembleMode::Certainty).top1;
          break;
        default: {
          RunConfig rc = cfg.base;
          rc.seed = seed;
          rc.variant = variant;
          auto result = train(rc, sources, target_train);
          accuracy = evaluate(result.checkpoint, target_test, EnsembleMode::Certainty).top1;
          break;
        }
      }
      row.per_seed_accuracy.push_back(accuracy);
    }
    row.mean = mean_of(row.per_seed_accuracy);
    row.stddev = stddev_of(row.per_seed_accuracy, row.mean);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_ablation_table(std::span<const AblationRow> rows) {
  std::string out = "variant                    accuracy (mean +- std)\n";
  for (const auto& row : rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-26s %6.2f +- %.2f\n", to_string(row.variant),
                  100.0 * row.mean, 100.0 * row.stddev);
    out += line;
  }
  return out;
}

}  // namespace taman
