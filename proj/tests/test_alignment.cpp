#include <doctest.h>

#include <cmath>

#include "taman/alignment.hpp"
#include "taman/gradcheck.hpp"
#include "taman/rng.hpp"
#include "taman/trainer.hpp"

using namespace taman;

namespace {
MatD random_batch(Rng& rng, int rows, int cols, double lo = -2.0, double hi = 2.0) {
  MatD m(rows, cols);
  for (double& x : m.v) x = rng.next_uniform(lo, hi);
  return m;
}
}  // namespace

TEST_CASE("moment_embedding: first and second moments of a scalar batch") {
  MatD batch{{0.0}, {2.0}};
  CHECK(moment_embedding(batch, 1)[0] == doctest::Approx(1.0));
  CHECK(moment_embedding(batch, 2)[0] == doctest::Approx(2.0));  // (0 + 4) / 2
}

TEST_CASE("moment_embedding: identical rows reproduce the row at order 1") {
  MatD batch{{1.5, -0.5}, {1.5, -0.5}, {1.5, -0.5}};
  auto e = moment_embedding(batch, 1);
  CHECK(e[0] == doctest::Approx(1.5));
  CHECK(e[1] == doctest::Approx(-0.5));
}

TEST_CASE("moment_embedding: empty batch fails") {
  MatD empty(0, 3);
  CHECK_THROWS_AS(moment_embedding(empty, 1), Error);
}

TEST_CASE("moment_discrepancy: identical batches across all domains vanish") {
  Rng rng(2);
  MatD shared = random_batch(rng, 6, 4);
  std::vector<MatD> sources = {shared, shared};
  for (const MomentConfig& cfg : {MomentConfig{{1}}, MomentConfig{{2}}, MomentConfig{{1, 2}},
                                  MomentConfig{{1, 2, 3}}}) {
    auto d = moment_discrepancy<double>(sources, shared, cfg);
    CHECK(d.value < 1e-6);
  }
}

TEST_CASE("moment_discrepancy: one source, scalar features, first moment") {
  MatD source{{0.0}, {2.0}};  // mean 1
  MatD target{{4.0}, {6.0}};  // mean 5
  std::vector<MatD> sources = {source};
  auto d = moment_discrepancy<double>(sources, target, MomentConfig{{1}});
  CHECK(d.value == doctest::Approx(4.0));
}

TEST_CASE("moment_discrepancy: two sources equal to the target vanish") {
  Rng rng(4);
  MatD shared = random_batch(rng, 5, 3);
  std::vector<MatD> sources = {shared, shared};
  CHECK(moment_discrepancy<double>(sources, shared, MomentConfig{{1, 2}}).value ==
        doctest::Approx(0.0));
}

TEST_CASE("moment_discrepancy: symmetric under source permutation and nonnegative") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    MatD a = random_batch(rng, 4, 3), b = random_batch(rng, 5, 3), t = random_batch(rng, 6, 3);
    std::vector<MatD> ab = {a, b}, ba = {b, a};
    auto d1 = moment_discrepancy<double>(ab, t, MomentConfig{{1, 2}});
    auto d2 = moment_discrepancy<double>(ba, t, MomentConfig{{1, 2}});
    CHECK(d1.value >= 0.0);
    CHECK(d1.value == doctest::Approx(d2.value).epsilon(1e-12));
  }
}

TEST_CASE("moment_discrepancy: per-pair components obey the triangle inequality") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    MatD s1 = random_batch(rng, 7, 4), s2 = random_batch(rng, 5, 4), t = random_batch(rng, 6, 4);
    std::vector<MatD> sources = {s1, s2};
    auto d = moment_discrepancy<double>(sources, t, MomentConfig{{1, 2}});
    for (int k : {1, 2}) {
      double s1t = -1, s2t = -1, s1s2 = -1;
      for (const auto& pair : d.pairs) {
        if (pair.order != k) continue;
        if (pair.a == 0 && pair.b == 2) s1t = pair.dist;
        if (pair.a == 1 && pair.b == 2) s2t = pair.dist;
        if (pair.a == 0 && pair.b == 1) s1s2 = pair.dist;
      }
      REQUIRE(s1t >= 0);
      REQUIRE(s2t >= 0);
      REQUIRE(s1s2 >= 0);
      CHECK(s1s2 <= s1t + s2t + 1e-6);
    }
  }
}

TEST_CASE("moment_discrepancy: dimension mismatch across domains fails") {
  std::vector<MatD> sources = {MatD(3, 4)};
  CHECK_THROWS_AS(moment_discrepancy<double>(sources, MatD(3, 5), MomentConfig{{1}}), Error);
}

TEST_CASE("moment_discrepancy gradients match central differences") {
  Rng rng(10);
  std::vector<MatD> sources = {random_batch(rng, 4, 3), random_batch(rng, 3, 3)};
  MatD target = random_batch(rng, 5, 3);
  const MomentConfig cfg{{1, 2}};

  auto value = [&]() { return moment_discrepancy<double>(sources, target, cfg, false).value; };
  auto with_grad = moment_discrepancy<double>(sources, target, cfg, true);

  std::vector<std::pair<std::string, MatD*>> params = {
      {"s0", &sources[0]}, {"s1", &sources[1]}, {"t", &target}};
  std::vector<const MatD*> grads = {&with_grad.grads[0], &with_grad.grads[1], &with_grad.grads[2]};
  auto report = grad_check(value, params, grads, 1e-6, 1e-6);
  CHECK(report.pass);
}

namespace {
// Minimal two-domain fixture for the loss: one source plus target.
struct LossFixture {
  ModelD model;
  std::vector<DomainBatch<double>> batches;
  AttentionWeights weights;

  explicit LossFixture(std::uint64_t seed) {
    ModelConfig cfg;
    cfg.feature_dim = 3;
    cfg.temporal_dim = 4;
    cfg.hidden_dim = 5;
    cfg.class_count = 3;
    cfg.frame_count = 4;
    cfg.scales = {2, 3};
    cfg.clips_per_scale = 2;
    model = model_cast<double>(init_model(cfg, {"src"}, seed));

    Rng rng(hash_mix({seed, 77ull}));
    ScaleConfig sample_cfg{cfg.scales, cfg.clips_per_scale, SamplingMode::TrainRandom};
    for (int d = 0; d < 2; ++d) {
      DomainBatch<double> batch;
      batch.domain = d == 0 ? "src" : "tgt";
      for (int v = 0; v < 6; ++v) {
        MatD frames(cfg.frame_count, cfg.feature_dim);
        for (double& x : frames.v) x = rng.next_uniform(-1.5, 1.5);
        batch.frames.push_back(std::move(frames));
        if (d == 0) batch.labels.push_back(static_cast<int>(rng.next_below(3)));
      }
      batch.clips.resize(cfg.scales.size());
      for (std::size_t si = 0; si < cfg.scales.size(); ++si) {
        batch.clips[si].resize(6);
        for (int v = 0; v < 6; ++v)
          batch.clips[si][static_cast<std::size_t>(v)] =
              sample_clips(cfg.frame_count, cfg.scales[si], sample_cfg, rng.next_u64()).clips;
      }
      batch.frame_mean = frame_mean_features(batch.frames);
      batches.push_back(std::move(batch));
    }
    weights.source = {{0.5, 0.5}};
    weights.target = {0.5, 0.5};
  }
};
}  // namespace

TEST_CASE("taman_loss: zero trade-off weights leave the pure classification loss") {
  LossFixture fx(1);
  LossConfig cfg;
  cfg.lambda_df = 0.0;
  cfg.lambda_dt = 0.0;
  auto loss = taman_loss<double>(fx.model, fx.batches, fx.weights, cfg, nullptr, false);
  CHECK(loss.breakdown.total == doctest::Approx(loss.breakdown.cls[0]).epsilon(1e-12));
  CHECK(loss.breakdown.d_f > 0.0);  // still reported
}

TEST_CASE("taman_loss: total recombines from the parts") {
  LossFixture fx(2);
  LossConfig cfg;
  cfg.lambda_df = 0.005;
  cfg.lambda_dt = 0.01;
  auto loss = taman_loss<double>(fx.model, fx.batches, fx.weights, cfg, nullptr, false);
  double total = cfg.lambda_df * loss.breakdown.d_f + cfg.lambda_dt * loss.breakdown.d_t;
  for (double c : loss.breakdown.cls) {
    CHECK(c >= 0.0);
    total += c;
  }
  CHECK(loss.breakdown.total == doctest::Approx(total).epsilon(1e-9));
  CHECK(loss.breakdown.d_f >= 0.0);
  CHECK(loss.breakdown.d_t >= 0.0);
}

TEST_CASE("taman_loss: labeled target batch is rejected") {
  LossFixture fx(3);
  fx.batches.back().labels = {0, 1, 2, 0, 1, 2};
  CHECK_THROWS_AS(taman_loss<double>(fx.model, fx.batches, fx.weights, LossConfig{}), Error);
}

TEST_CASE("taman_loss: missing source labels are a data error") {
  LossFixture fx(4);
  fx.batches.front().labels.clear();
  try {
    taman_loss<double>(fx.model, fx.batches, fx.weights, LossConfig{});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Data);
  }
}

TEST_CASE("full objective gradients match central differences on the tiny instance") {
  PipelineCheckSpec spec;
  auto report = full_pipeline_grad_check(spec);
  CHECK(report.pass);
  CHECK(report.max_rel_err < 1e-3);
}
