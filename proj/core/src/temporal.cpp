#include "taman/temporal.hpp"

#include <algorithm>
#include <set>

namespace taman {

namespace {
constexpr std::uint64_t kCountCap = 1ull << 62;

// Advances `c` to the next lexicographic scale-subset of [0, n). Returns
// false after the last one.
bool next_combination(std::vector<int>& c, int n) {
  const int r = static_cast<int>(c.size());
  int i = r - 1;
  while (i >= 0 && c[i] == n - r + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < r; ++j) c[j] = c[j - 1] + 1;
  return true;
}

std::vector<std::vector<int>> enumerate_combinations(int n, int r) {
  std::vector<std::vector<int>> all;
  std::vector<int> c(r);
  for (int i = 0; i < r; ++i) c[i] = i;
  do {
    all.push_back(c);
  } while (next_combination(c, n));
  return all;
}

std::vector<int> random_sorted_subset(Rng& rng, int n, int r) {
  // Partial Fisher-Yates over 0..n-1, then sort to restore temporal order.
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < r; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> pick(pool.begin(), pool.begin() + r);
  std::sort(pick.begin(), pick.end());
  return pick;
}
}  // namespace

std::uint64_t clip_count(int frame_count, int scale) {
  if (scale < 0 || scale > frame_count) return 0;
  std::uint64_t c = 1;
  const int r = std::min(scale, frame_count - scale);
  for (int i = 1; i <= r; ++i) {
    if (c > kCountCap / static_cast<std::uint64_t>(frame_count)) return kCountCap;
    c = c * static_cast<std::uint64_t>(frame_count - r + i) / static_cast<std::uint64_t>(i);
    if (c >= kCountCap) return kCountCap;
  }
  return c;
}

ClipSample sample_clips(int frame_count, int scale, const ScaleConfig& cfg, std::uint64_t seed) {
  if (scale < 2 || scale > frame_count)
    fail(ErrorKind::Scale, "scale " + std::to_string(scale) + " outside [2, " +
                               std::to_string(frame_count) + "]");
  if (cfg.clips_per_scale < 1) fail(ErrorKind::Config, "clips_per_scale must be >= 1");

  const std::uint64_t total = clip_count(frame_count, scale);
  ClipSample out;

  auto push = [&](std::vector<int> frames) {
    out.clips.push_back(ClipIndex{scale, std::move(frames)});
  };

  if (cfg.mode == SamplingMode::Exhaustive) {
    if (total >= kCountCap || total > 1000000)
      fail(ErrorKind::Config, "exhaustive enumeration of " + std::to_string(total) + " clips");
    for (auto& c : enumerate_combinations(frame_count, scale)) push(std::move(c));
    return out;
  }

  const std::uint64_t want = static_cast<std::uint64_t>(cfg.clips_per_scale);
  Rng rng(hash_mix({seed, static_cast<std::uint64_t>(scale),
                    static_cast<std::uint64_t>(cfg.mode == SamplingMode::EvalDeterministic ? 1 : 0)}));

  if (want >= total) {
    out.clamped = want > total;
    for (auto& c : enumerate_combinations(frame_count, scale)) push(std::move(c));
    return out;
  }

  if (total <= 4096) {
    auto all = enumerate_combinations(frame_count, scale);
    const int n = static_cast<int>(all.size());
    for (std::uint64_t i = 0; i < want; ++i) {
      const int j = static_cast<int>(i) +
                    static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n) - i));
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
      push(std::move(all[static_cast<std::size_t>(i)]));
    }
    return out;
  }

  // total is huge relative to want: rejection sampling terminates fast.
  std::set<std::vector<int>> seen;
  while (seen.size() < want) {
    auto pick = random_sorted_subset(rng, frame_count, scale);
    if (seen.insert(pick).second) push(std::move(pick));
  }
  return out;
}

}  // namespace taman
