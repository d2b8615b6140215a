#include "taman/attention.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taman/errors.hpp"

namespace taman {

double confidence_weight(std::span<const double> probs) {
  const std::size_t k = probs.size();
  if (k < 2) fail(ErrorKind::DegenerateClass, "confidence needs at least 2 classes");
  double sum = 0.0;
  double plogp = 0.0;
  for (double p : probs) {
    if (p < 0.0 || !std::isfinite(p))
      fail(ErrorKind::Config, "probability " + std::to_string(p) + " invalid");
    sum += p;
    if (p > 0.0) plogp += p * std::log(p);
  }
  if (std::fabs(sum - 1.0) > 1e-5)
    fail(ErrorKind::Normalization, "probabilities sum to " + std::to_string(sum));
  double c = plogp / std::log(static_cast<double>(k));
  c = std::clamp(c, -1.0, 0.0);  // rounding can push the normalized entropy past 1
  return std::tanh(1.0 + c);
}

std::vector<double> dominance_weights(double d_global, std::span<const double> d_local) {
  if (d_local.empty()) fail(ErrorKind::Config, "no scales for dominance weights");
  if (!std::isfinite(d_global) || d_global < 0.0)
    fail(ErrorKind::Config, "global discrepancy " + std::to_string(d_global) + " invalid");
  std::vector<double> disparity(d_local.size());
  for (std::size_t i = 0; i < d_local.size(); ++i) {
    if (!std::isfinite(d_local[i]) || d_local[i] < 0.0)
      fail(ErrorKind::Config, "local discrepancy " + std::to_string(d_local[i]) + " invalid");
    disparity[i] = std::fabs(d_global - d_local[i]);
  }
  const double mx = *std::max_element(disparity.begin(), disparity.end());
  double denom = 0.0;
  for (double d : disparity) denom += std::exp(d - mx);
  std::vector<double> out(disparity.size());
  for (std::size_t i = 0; i < disparity.size(); ++i) out[i] = std::exp(disparity[i] - mx) / denom;
  return out;
}

std::vector<double> combine_weights(std::span<const double> confidence,
                                    std::span<const double> dominance) {
  if (confidence.size() != dominance.size())
    fail(ErrorKind::Config, "confidence covers " + std::to_string(confidence.size()) +
                                " scales, dominance " + std::to_string(dominance.size()));
  if (confidence.empty()) fail(ErrorKind::Config, "no scales to combine");
  std::vector<double> out(confidence.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = confidence[i] * dominance[i];
    sum += out[i];
  }
  if (sum < 1e-12) return target_weights(dominance);
  for (double& w : out) w /= sum;
  return out;
}

std::vector<double> target_weights(std::span<const double> dominance) {
  return {dominance.begin(), dominance.end()};
}

}  // namespace taman
