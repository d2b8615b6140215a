#include <doctest.h>

#include "taman/rng.hpp"
#include "taman/temporal.hpp"

using namespace taman;

TEST_CASE("sample_clips: exhaustive enumeration is lexicographic") {
  ScaleConfig cfg{{2}, 3, SamplingMode::Exhaustive};
  auto sample = sample_clips(4, 2, cfg, 0);
  REQUIRE(sample.clips.size() == 6);
  const std::vector<std::vector<int>> expected = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(sample.clips[i].frames == expected[i]);
  CHECK_FALSE(sample.clamped);
}

TEST_CASE("sample_clips: full-length scale yields the single clip in every mode") {
  for (auto mode : {SamplingMode::TrainRandom, SamplingMode::EvalDeterministic, SamplingMode::Exhaustive}) {
    ScaleConfig cfg{{4}, 1, mode};
    auto sample = sample_clips(4, 4, cfg, 99);
    REQUIRE(sample.clips.size() == 1);
    CHECK(sample.clips[0].frames == std::vector<int>{0, 1, 2, 3});
  }
}

TEST_CASE("sample_clips: fixed seed reproduces the draw") {
  ScaleConfig cfg{{3}, 3, SamplingMode::TrainRandom};
  auto a = sample_clips(8, 3, cfg, 1234);
  auto b = sample_clips(8, 3, cfg, 1234);
  REQUIRE(a.clips.size() == 3);
  for (std::size_t i = 0; i < a.clips.size(); ++i) CHECK(a.clips[i].frames == b.clips[i].frames);
  auto c = sample_clips(8, 3, cfg, 1235);
  bool all_same = true;
  for (std::size_t i = 0; i < a.clips.size(); ++i)
    if (a.clips[i].frames != c.clips[i].frames) all_same = false;
  CHECK_FALSE(all_same);
}

TEST_CASE("sample_clips: deterministic eval seed keys off the video id only") {
  ScaleConfig cfg{{3}, 2, SamplingMode::EvalDeterministic};
  const std::uint64_t id_seed = fnv1a64("domain/video_000.tmnf");
  auto a = sample_clips(8, 3, cfg, id_seed);
  auto b = sample_clips(8, 3, cfg, id_seed);
  for (std::size_t i = 0; i < a.clips.size(); ++i) CHECK(a.clips[i].frames == b.clips[i].frames);
}

TEST_CASE("sample_clips: draws are distinct and strictly increasing") {
  ScaleConfig cfg{{4}, 16, SamplingMode::TrainRandom};
  auto sample = sample_clips(9, 4, cfg, 7);
  REQUIRE(sample.clips.size() == 16);
  for (const auto& clip : sample.clips)
    for (std::size_t i = 1; i < clip.frames.size(); ++i) CHECK(clip.frames[i] > clip.frames[i - 1]);
  for (std::size_t i = 0; i < sample.clips.size(); ++i)
    for (std::size_t j = i + 1; j < sample.clips.size(); ++j)
      CHECK(sample.clips[i].frames != sample.clips[j].frames);
}

TEST_CASE("sample_clips: clamps when asking for more clips than exist") {
  ScaleConfig cfg{{3}, 10, SamplingMode::TrainRandom};
  auto sample = sample_clips(4, 3, cfg, 0);  // only C(4,3)=4 subsets
  CHECK(sample.clips.size() == 4);
  CHECK(sample.clamped);
  ScaleConfig exact{{3}, 4, SamplingMode::TrainRandom};
  CHECK_FALSE(sample_clips(4, 3, exact, 0).clamped);
}

TEST_CASE("sample_clips: scale outside [2, h] fails") {
  ScaleConfig cfg{{9}, 1, SamplingMode::TrainRandom};
  CHECK_THROWS_AS(sample_clips(8, 9, cfg, 0), Error);
  CHECK_THROWS_AS(sample_clips(8, 1, cfg, 0), Error);
  try {
    sample_clips(8, 9, cfg, 0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Scale);
  }
}

namespace {
Mlp<float> zero_net(int in, int out) {
  Mlp<float> g;
  g.layers.push_back({MatF(in, out), MatF(1, out)});
  return g;
}
}  // namespace

TEST_CASE("local_temporal_feature: zero net gives the zero vector") {
  MatF frames(4, 3);
  for (std::size_t i = 0; i < frames.v.size(); ++i) frames.v[i] = static_cast<float>(i);
  auto g = zero_net(6, 5);
  auto lt = local_temporal_feature(frames, {{2, {0, 2}}, {2, {1, 3}}}, g);
  REQUIRE(lt.size() == 5);
  for (float x : lt) CHECK(x == 0.0f);
}

TEST_CASE("local_temporal_feature: single clip through a hand-set linear layer") {
  MatF frames{{1.0f, 2.0f}, {3.0f, 4.0f}, {5.0f, 6.0f}};
  // One linear layer summing all four concatenated inputs into one output.
  Mlp<float> g;
  g.layers.push_back({MatF(4, 1, {1.0f, 1.0f, 1.0f, 1.0f}), MatF(1, 1)});
  auto lt = local_temporal_feature(frames, {{2, {0, 2}}}, g);
  REQUIRE(lt.size() == 1);
  CHECK(lt[0] == doctest::Approx(1.0f + 2.0f + 5.0f + 6.0f));
}

TEST_CASE("local_temporal_feature: additive over clips") {
  Rng rng(5);
  MatF frames(6, 2);
  for (float& x : frames.v) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));
  Mlp<float> g;
  g.layers.push_back({MatF(4, 3), MatF(1, 3)});
  for (float& x : g.layers[0].w.v) x = static_cast<float>(rng.next_uniform(-1.0, 1.0));

  const ClipIndex a{2, {0, 3}};
  const ClipIndex b{2, {1, 5}};
  auto twice = local_temporal_feature(frames, {a, a}, g);
  auto once = local_temporal_feature(frames, {a}, g);
  for (std::size_t i = 0; i < once.size(); ++i)
    CHECK(twice[i] == doctest::Approx(2.0f * once[i]).epsilon(1e-5));

  // Union of disjoint clip lists equals the sum of the parts.
  auto joint = local_temporal_feature(frames, {a, b}, g);
  auto second = local_temporal_feature(frames, {b}, g);
  for (std::size_t i = 0; i < joint.size(); ++i)
    CHECK(joint[i] == doctest::Approx(once[i] + second[i]).epsilon(1e-5));
}

TEST_CASE("local_temporal_feature: clip index past the last frame fails") {
  MatF frames(3, 2);
  auto g = zero_net(4, 2);
  CHECK_THROWS_AS(local_temporal_feature(frames, {{2, {0, 3}}}, g), Error);
}

TEST_CASE("raw_global_feature sums across scales") {
  LocalFeatureBank<float> bank;
  bank.scales = {2, 3};
  bank.features = {{1.0f, 0.0f}, {0.0f, 1.0f}};
  auto t = raw_global_feature(bank);
  CHECK(t == std::vector<float>{1.0f, 1.0f});

  LocalFeatureBank<float> single;
  single.scales = {4};
  single.features = {{0.5f, -2.0f}};
  CHECK(raw_global_feature(single) == single.features[0]);

  LocalFeatureBank<float> zeros;
  zeros.scales = {2, 3, 4};
  zeros.features = {{0.0f}, {0.0f}, {0.0f}};
  CHECK(raw_global_feature(zeros) == std::vector<float>{0.0f});
}

TEST_CASE("raw_global_feature rejects mismatched dimensions") {
  LocalFeatureBank<float> bank;
  bank.scales = {2, 3};
  bank.features = {{1.0f, 0.0f}, {0.0f}};
  CHECK_THROWS_AS(raw_global_feature(bank), Error);
}

TEST_CASE("attentive_global_feature: weighted combination") {
  LocalFeatureBank<float> bank;
  bank.scales = {2, 3};
  bank.features = {{1.0f, 0.0f}, {0.0f, 1.0f}};
  auto t = attentive_global_feature(bank, std::vector<double>{0.25, 0.75});
  CHECK(t[0] == doctest::Approx(0.25f));
  CHECK(t[1] == doctest::Approx(0.75f));

  // Uniform weights over equal features reproduce the feature.
  LocalFeatureBank<float> equal;
  equal.scales = {2, 3, 4};
  equal.features = {{3.0f, -1.0f}, {3.0f, -1.0f}, {3.0f, -1.0f}};
  auto u = attentive_global_feature(equal, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(u[0] == doctest::Approx(3.0f));
  CHECK(u[1] == doctest::Approx(-1.0f));

  // All the mass on one scale returns that scale exactly.
  auto v = attentive_global_feature(bank, std::vector<double>{1.0, 0.0});
  CHECK(v == bank.features[0]);
}

TEST_CASE("attentive_global_feature: unnormalized weights fail") {
  LocalFeatureBank<float> bank;
  bank.scales = {2, 3};
  bank.features = {{1.0f}, {2.0f}};
  CHECK_THROWS_AS(attentive_global_feature(bank, std::vector<double>{0.5, 0.6}), Error);
  try {
    attentive_global_feature(bank, std::vector<double>{0.5, 0.6});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Normalization);
  }
}

TEST_CASE("attentive_global_feature is linear in the bank") {
  Rng rng(17);
  LocalFeatureBank<float> bank, scaled;
  bank.scales = scaled.scales = {2, 3, 5};
  std::vector<double> w = {0.2, 0.5, 0.3};
  const float alpha = 2.5f;
  for (int s = 0; s < 3; ++s) {
    std::vector<float> f(4), fs(4);
    for (int i = 0; i < 4; ++i) {
      f[static_cast<std::size_t>(i)] = static_cast<float>(rng.next_uniform(-1.0, 1.0));
      fs[static_cast<std::size_t>(i)] = alpha * f[static_cast<std::size_t>(i)];
    }
    bank.features.push_back(f);
    scaled.features.push_back(fs);
  }
  auto t = attentive_global_feature(bank, w);
  auto ts = attentive_global_feature(scaled, w);
  for (std::size_t i = 0; i < t.size(); ++i)
    CHECK(ts[i] == doctest::Approx(alpha * t[i]).epsilon(1e-5));
}
