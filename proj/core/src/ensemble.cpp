#include "taman/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taman/errors.hpp"

namespace taman {

const char* to_string(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::Certainty: return "certainty";
    case EnsembleMode::Average: return "average";
    case EnsembleMode::SourceAccuracy: return "source_accuracy";
  }
  return "certainty";
}

EnsembleMode parse_ensemble_mode(const std::string& name) {
  for (EnsembleMode m : {EnsembleMode::Certainty, EnsembleMode::Average, EnsembleMode::SourceAccuracy})
    if (name == to_string(m)) return m;
  fail(ErrorKind::Config, "unknown ensemble mode '" + name + "'");
}

namespace {
void check_predictions(std::span<const std::vector<double>> predictions) {
  if (predictions.empty()) fail(ErrorKind::Config, "no classifier predictions");
  const std::size_t k = predictions.front().size();
  for (const auto& p : predictions) {
    if (p.size() != k)
      fail(ErrorKind::Shape, "prediction lengths differ: " + std::to_string(p.size()) + " vs " +
                                 std::to_string(k));
    double sum = 0.0;
    for (double x : p) {
      if (x < 0.0 || !std::isfinite(x)) fail(ErrorKind::Config, "invalid probability");
      sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-5)
      fail(ErrorKind::Normalization, "prediction sums to " + std::to_string(sum));
  }
}
}  // namespace

std::vector<double> prediction_weights(std::span<const std::vector<double>> predictions) {
  check_predictions(predictions);
  std::vector<double> neg_entropy(predictions.size(), 0.0);
  for (std::size_t j = 0; j < predictions.size(); ++j)
    for (double p : predictions[j])
      if (p > 0.0) neg_entropy[j] += p * std::log(p);
  const double mx = *std::max_element(neg_entropy.begin(), neg_entropy.end());
  double denom = 0.0;
  for (double e : neg_entropy) denom += std::exp(e - mx);
  std::vector<double> out(neg_entropy.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(neg_entropy[j] - mx) / denom;
  return out;
}

EnsemblePrediction ensemble_predict(std::span<const std::vector<double>> predictions,
                                    std::span<const double> weights) {
  check_predictions(predictions);
  if (weights.size() != predictions.size())
    fail(ErrorKind::Shape, std::to_string(weights.size()) + " weights for " +
                               std::to_string(predictions.size()) + " classifiers");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-6)
    fail(ErrorKind::Normalization, "ensemble weights sum to " + std::to_string(wsum));

  EnsemblePrediction out;
  out.probs.assign(predictions.front().size(), 0.0);
  for (std::size_t j = 0; j < predictions.size(); ++j)
    for (std::size_t c = 0; c < out.probs.size(); ++c)
      out.probs[c] += weights[j] * predictions[j][c];
  out.label = 0;
  for (std::size_t c = 1; c < out.probs.size(); ++c)
    if (out.probs[c] > out.probs[static_cast<std::size_t>(out.label)]) out.label = static_cast<int>(c);
  return out;
}

EnsemblePrediction ensemble_variant(std::span<const std::vector<double>> predictions,
                                    EnsembleMode mode, std::span<const double> source_accuracies) {
  switch (mode) {
    case EnsembleMode::Certainty:
      return ensemble_predict(predictions, prediction_weights(predictions));
    case EnsembleMode::Average: {
      std::vector<double> w(predictions.size(), 1.0 / static_cast<double>(predictions.size()));
      return ensemble_predict(predictions, w);
    }
    case EnsembleMode::SourceAccuracy: {
      if (source_accuracies.size() != predictions.size())
        fail(ErrorKind::Config, "source_accuracy mode needs one accuracy per classifier");
      double sum = 0.0;
      for (double a : source_accuracies) {
        if (a < 0.0 || !std::isfinite(a)) fail(ErrorKind::Config, "invalid source accuracy");
        sum += a;
      }
      if (sum <= 0.0) fail(ErrorKind::Config, "source accuracies sum to zero");
      std::vector<double> w(source_accuracies.size());
      for (std::size_t j = 0; j < w.size(); ++j) w[j] = source_accuracies[j] / sum;
      return ensemble_predict(predictions, w);
    }
  }
  fail(ErrorKind::Config, "unknown ensemble mode");
}

}  // namespace taman
