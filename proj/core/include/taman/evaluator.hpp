#pragma once

#include <span>
#include <vector>

#include "taman/checkpoint.hpp"
#include "taman/ensemble.hpp"
#include "taman/manifest.hpp"

namespace taman {

struct EvalReport {
  double top1 = 0.0;
  std::vector<double> per_class;             // accuracy per class index
  std::vector<double> mean_ensemble_weight;  // per source classifier
  int video_count = 0;
  int class_count = 0;
};

/// Per-video prediction with deterministic clip sampling keyed off the video
/// id, so repeated evaluations are bit-identical. `source_accuracies` is
/// only read in SourceAccuracy mode.
EvalReport evaluate(const Checkpoint& cp, const Dataset& target_test, EnsembleMode mode,
                    std::span<const double> source_accuracies = {});

}  // namespace taman
