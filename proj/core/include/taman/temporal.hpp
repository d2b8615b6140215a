#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "taman/mlp.hpp"
#include "taman/rng.hpp"

namespace taman {

/// One clip: `scale` strictly increasing frame indices. Frames need not be
/// consecutive, only time ordered.
struct ClipIndex {
  int scale = 0;
  std::vector<int> frames;
};

enum class SamplingMode { TrainRandom, EvalDeterministic, Exhaustive };

struct ScaleConfig {
  std::vector<int> scales;
  int clips_per_scale = 3;
  SamplingMode mode = SamplingMode::TrainRandom;
};

struct ClipSample {
  std::vector<ClipIndex> clips;
  bool clamped = false;  // set when clips_per_scale exceeded the number of subsets
};

/// Number of strictly increasing `scale`-subsets of [0, frame_count).
/// Saturates at 2^62 rather than overflowing.
std::uint64_t clip_count(int frame_count, int scale);

/// Draws clips of one scale from a video of `frame_count` frames.
///
/// Exhaustive mode returns all subsets in lexicographic order. TrainRandom
/// draws distinct subsets uniformly from the given seed. EvalDeterministic
/// does the same but the caller must pass a seed derived only from the video
/// id (e.g. fnv1a64(id)); the scale is mixed in here, so repeated evaluation
/// of the same video is bit-identical regardless of call order.
ClipSample sample_clips(int frame_count, int scale, const ScaleConfig& cfg, std::uint64_t seed);

/// Sum over clips of the integration net applied to the clip's frame rows
/// concatenated in temporal order. Result has g.out_dim() entries.
template <class T>
std::vector<T> local_temporal_feature(const Mat<T>& frames, const std::vector<ClipIndex>& clips,
                                      const Mlp<T>& g) {
  const int d = frames.cols;
  if (clips.empty()) fail(ErrorKind::Batch, "no clips given");
  const int r = clips.front().scale;
  if (g.in_dim() != r * d)
    fail(ErrorKind::Shape, "integration net expects " + std::to_string(g.in_dim()) +
                               " inputs, clip provides " + std::to_string(r * d));
  Mat<T> input(static_cast<int>(clips.size()), r * d);
  for (std::size_t z = 0; z < clips.size(); ++z) {
    const ClipIndex& clip = clips[z];
    if (clip.scale != r) fail(ErrorKind::Scale, "mixed clip scales in one batch");
    for (int k = 0; k < r; ++k) {
      const int f = clip.frames[k];
      if (f < 0 || f >= frames.rows)
        fail(ErrorKind::Index, "clip frame " + std::to_string(f) + " outside [0, " +
                                   std::to_string(frames.rows) + ")");
      auto src = frames.row(f);
      std::copy(src.begin(), src.end(), input.row(static_cast<int>(z)).begin() + static_cast<std::ptrdiff_t>(k) * d);
    }
  }
  Mat<T> rows = mlp_forward(g, input);
  Mat<T> summed = column_sums(rows);
  return {summed.v.begin(), summed.v.end()};
}

/// Per-scale local temporal features of one video, all of one shared dimension.
template <class T>
struct LocalFeatureBank {
  std::vector<int> scales;
  std::vector<std::vector<T>> features;  // parallel to scales

  void validate() const {
    if (scales.empty() || scales.size() != features.size())
      fail(ErrorKind::Config, "empty or inconsistent feature bank");
    for (const auto& f : features)
      if (f.size() != features.front().size())
        fail(ErrorKind::Shape, "local features disagree on dimension: " +
                                   std::to_string(f.size()) + " vs " +
                                   std::to_string(features.front().size()));
  }
};

/// Plain additive aggregation across scales.
template <class T>
std::vector<T> raw_global_feature(const LocalFeatureBank<T>& bank) {
  bank.validate();
  std::vector<double> acc(bank.features.front().size(), 0.0);
  for (const auto& f : bank.features)
    for (std::size_t i = 0; i < f.size(); ++i) acc[i] += static_cast<double>(f[i]);
  std::vector<T> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<T>(acc[i]);
  return out;
}

/// Convex combination across scales; weights must cover the bank's scales
/// and sum to 1 within 1e-6.
template <class T>
std::vector<T> attentive_global_feature(const LocalFeatureBank<T>& bank,
                                        std::span<const double> weights) {
  bank.validate();
  if (weights.size() != bank.scales.size())
    fail(ErrorKind::Config, "weight count " + std::to_string(weights.size()) + " for " +
                                std::to_string(bank.scales.size()) + " scales");
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::fabs(sum - 1.0) > 1e-6)
    fail(ErrorKind::Normalization, "attention weights sum to " + std::to_string(sum));
  std::vector<double> acc(bank.features.front().size(), 0.0);
  for (std::size_t s = 0; s < bank.features.size(); ++s)
    for (std::size_t i = 0; i < bank.features[s].size(); ++i)
      acc[i] += weights[s] * static_cast<double>(bank.features[s][i]);
  std::vector<T> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<T>(acc[i]);
  return out;
}

}  // namespace taman
