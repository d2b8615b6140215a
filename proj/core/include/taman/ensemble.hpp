#pragma once

#include <span>
#include <string>
#include <vector>

namespace taman {

enum class EnsembleMode { Certainty, Average, SourceAccuracy };

const char* to_string(EnsembleMode mode);
EnsembleMode parse_ensemble_mode(const std::string& name);

/// Softmax across classifiers of each classifier's negative entropy
/// (natural log, 0*ln 0 = 0): certain classifiers get more say.
std::vector<double> prediction_weights(std::span<const std::vector<double>> predictions);

struct EnsemblePrediction {
  std::vector<double> probs;
  int label = 0;  // argmax, ties broken toward the lowest class index
};

EnsemblePrediction ensemble_predict(std::span<const std::vector<double>> predictions,
                                    std::span<const double> weights);

/// `certainty` delegates to prediction_weights; `average` weighs uniformly;
/// `source_accuracy` normalizes the given per-source accuracies to sum 1.
EnsemblePrediction ensemble_variant(std::span<const std::vector<double>> predictions,
                                    EnsembleMode mode,
                                    std::span<const double> source_accuracies = {});

}  // namespace taman
