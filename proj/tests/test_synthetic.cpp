#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "taman/manifest.hpp"
#include "taman/mlp.hpp"
#include "taman/synthetic.hpp"

using namespace taman;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
  auto p = fs::temp_directory_path() / "taman_synth_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

SyntheticSpec small_spec() {
  SyntheticSpec spec;
  spec.class_pairs = 2;
  spec.domains = {{"a", 0.0, 0.3}, {"b", 1.0, 0.3}};
  spec.frame_count = 6;
  spec.feature_dim = 6;
  spec.videos_per_class = 40;
  spec.seed = 5;
  spec.train_fraction = 0.75;
  return spec;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("generator is deterministic for a fixed seed") {
  const auto spec = small_spec();
  const auto dir1 = fresh_dir("det1");
  const auto dir2 = fresh_dir("det2");
  generate_synthetic(spec, dir1);
  generate_synthetic(spec, dir2);
  for (const char* rel : {"a/c00_v0000.tmnf", "b/c03_v0017.tmnf", "a_train.manifest"})
    CHECK(slurp(dir1 / rel) == slurp(dir2 / rel));

  SyntheticSpec other = spec;
  other.seed = 6;
  const auto dir3 = fresh_dir("det3");
  generate_synthetic(other, dir3);
  CHECK(slurp(dir1 / "a/c00_v0000.tmnf") != slurp(dir3 / "a/c00_v0000.tmnf"));
}

TEST_CASE("manifests carry the doubled label space and the split sizes") {
  const auto spec = small_spec();
  const auto dir = fresh_dir("split");
  auto files = generate_synthetic(spec, dir);
  REQUIRE(files.count("a") == 1);

  Manifest train = load_manifest(files["a"].train);
  Manifest unlabeled = load_manifest(files["a"].train_unlabeled);
  Manifest test = load_manifest(files["a"].test);
  CHECK(train.class_count == 4);  // 2 pairs -> 4 labels
  CHECK(train.records.size() == 4 * 30);
  CHECK(test.records.size() == 4 * 10);
  CHECK(train.labeled());
  CHECK(unlabeled.unlabeled());
  CHECK(unlabeled.records.size() == train.records.size());
}

TEST_CASE("a class and its confuser share the frame-mean distribution") {
  SyntheticSpec spec = small_spec();
  spec.videos_per_class = 120;
  const auto dir = fresh_dir("confuser");
  auto files = generate_synthetic(spec, dir);
  Dataset ds = load_dataset(files["a"].train);

  // Pooled frame means per label; class 0's confuser is class 0 + pairs = 2.
  const int dim = ds.videos.front().frames.cols;
  std::vector<std::vector<double>> mean(4, std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  std::vector<int> count(4, 0);
  for (int i = 0; i < ds.size(); ++i) {
    const int label = ds.labels[static_cast<std::size_t>(i)];
    auto fm = column_means(ds.videos[static_cast<std::size_t>(i)].frames);
    for (int j = 0; j < dim; ++j) mean[static_cast<std::size_t>(label)][static_cast<std::size_t>(j)] += fm[static_cast<std::size_t>(j)];
    ++count[static_cast<std::size_t>(label)];
  }
  for (int c = 0; c < 4; ++c)
    for (double& x : mean[static_cast<std::size_t>(c)]) x /= count[static_cast<std::size_t>(c)];

  // Standard error of each pooled mean is sigma / sqrt(n_videos * frames).
  const double tol = 6.0 * spec.domains[0].noise_sigma / std::sqrt(90.0 * spec.frame_count);
  for (int pair = 0; pair < 2; ++pair)
    for (int j = 0; j < dim; ++j)
      CHECK(std::fabs(mean[static_cast<std::size_t>(pair)][static_cast<std::size_t>(j)] -
                      mean[static_cast<std::size_t>(pair + 2)][static_cast<std::size_t>(j)]) < tol);
}

TEST_CASE("an ordered first-half/second-half frame pair separates a class from its confuser") {
  SyntheticSpec spec = small_spec();
  const auto dir = fresh_dir("probe");
  auto files = generate_synthetic(spec, dir);
  Dataset ds = load_dataset(files["a"].train);

  // Binary probe: class 0 vs its confuser (label 2), on concat(frame 0, last
  // frame) - a scale-2 clip spanning both halves.
  const int dim = ds.videos.front().frames.cols;
  std::vector<int> keep;
  for (int i = 0; i < ds.size(); ++i)
    if (ds.labels[static_cast<std::size_t>(i)] == 0 || ds.labels[static_cast<std::size_t>(i)] == 2)
      keep.push_back(i);
  MatF clip_x(static_cast<int>(keep.size()), 2 * dim);
  MatF mean_x(static_cast<int>(keep.size()), dim);
  std::vector<int> y;
  for (std::size_t row = 0; row < keep.size(); ++row) {
    const auto& frames = ds.videos[static_cast<std::size_t>(keep[row])].frames;
    for (int j = 0; j < dim; ++j) {
      clip_x(static_cast<int>(row), j) = frames(0, j);
      clip_x(static_cast<int>(row), dim + j) = frames(frames.rows - 1, j);
    }
    auto fm = column_means(frames);
    for (int j = 0; j < dim; ++j) mean_x(static_cast<int>(row), j) = static_cast<float>(fm[static_cast<std::size_t>(j)]);
    y.push_back(ds.labels[static_cast<std::size_t>(keep[row])] == 0 ? 0 : 1);
  }

  auto probe_accuracy = [&](const MatF& x) {
    Mlp<float> probe;
    probe.layers.push_back({MatF(x.cols, 2), MatF(1, 2)});
    MatF velocity_w(x.cols, 2), velocity_b(1, 2);
    for (int step = 0; step < 300; ++step) {
      MlpCache<float> cache;
      auto logits = mlp_forward(probe, x, &cache);
      auto ce = softmax_cross_entropy(logits, std::span<const int>(y));
      auto back = mlp_backward(probe, cache, ce.logit_grad);
      sgd_step(probe.layers[0].w, back.grads.layers[0].w, velocity_w, SgdConfig{0.5f, 0.9f, 0.0f});
      sgd_step(probe.layers[0].b, back.grads.layers[0].b, velocity_b, SgdConfig{0.5f, 0.9f, 0.0f});
    }
    auto logits = mlp_forward(probe, x);
    int correct = 0;
    for (int i = 0; i < logits.rows; ++i)
      if ((logits(i, 1) > logits(i, 0) ? 1 : 0) == y[static_cast<std::size_t>(i)]) ++correct;
    return static_cast<double>(correct) / logits.rows;
  };

  CHECK(probe_accuracy(clip_x) >= 0.95);   // temporal order is linearly visible
  CHECK(probe_accuracy(mean_x) <= 0.65);   // frame pooling hides it
}

TEST_CASE("invalid specs are rejected") {
  SyntheticSpec spec = small_spec();
  spec.domains.pop_back();
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = small_spec();
  spec.domains[0].noise_sigma = 0.0;
  CHECK_THROWS_AS(spec.validate(), Error);
}
