#pragma once

#include <span>
#include <vector>

namespace taman {

/// Certainty of one local prediction. Entropy is normalized by ln(K) so the
/// result stays in [0, tanh(1)] for any class count:
///   C = (sum_c p_c ln p_c) / ln K  in [-1, 0],  weight = tanh(1 + C).
double confidence_weight(std::span<const double> probs);

/// Softmax over per-scale disparities |d_global - d_local|, max-shifted.
/// Shared across all domains; sums to 1.
std::vector<double> dominance_weights(double d_global, std::span<const double> d_local);

/// Per-scale product of confidence and dominance, renormalized to sum 1.
/// Falls back to the dominance weights alone when every confidence is 0.
std::vector<double> combine_weights(std::span<const double> confidence,
                                    std::span<const double> dominance);

/// Target-domain rule: the dominance weights verbatim.
std::vector<double> target_weights(std::span<const double> dominance);

/// Normalized per-scale weights for every domain in a step; target last.
struct AttentionWeights {
  std::vector<std::vector<double>> source;  // [domain][scale index]
  std::vector<double> target;               // [scale index]
};

}  // namespace taman
