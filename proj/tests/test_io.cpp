#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "taman/checkpoint.hpp"
#include "taman/features_io.hpp"
#include "taman/manifest.hpp"
#include "taman/rng.hpp"

using namespace taman;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir() {
  static fs::path dir = [] {
    auto p = fs::temp_directory_path() / "taman_io_tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}
}  // namespace

TEST_CASE("TMNF: header plus payload size arithmetic") {
  MatF m(2, 3);
  for (std::size_t i = 0; i < m.v.size(); ++i) m.v[i] = static_cast<float>(i) * 0.5f;
  const auto path = temp_dir() / "size.tmnf";
  write_features(path, m);
  CHECK(fs::file_size(path) == 4 + 4 + 4 + 4 + 24);
}

TEST_CASE("TMNF: round-trip is bit-exact") {
  Rng rng(1);
  MatF m(5, 7);
  for (float& x : m.v) x = static_cast<float>(rng.next_uniform(-10.0, 10.0));
  const auto path = temp_dir() / "roundtrip.tmnf";
  write_features(path, m);
  MatF back = load_features(path);
  REQUIRE(back.rows == m.rows);
  REQUIRE(back.cols == m.cols);
  for (std::size_t i = 0; i < m.v.size(); ++i) CHECK(back.v[i] == m.v[i]);
}

TEST_CASE("TMNF: truncated payload is a format error with a byte offset") {
  MatF m(3, 3);
  const auto path = temp_dir() / "truncated.tmnf";
  write_features(path, m);
  fs::resize_file(path, fs::file_size(path) - 10);
  try {
    load_features(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
  }
}

TEST_CASE("TMNF: bad magic is a format error") {
  const auto path = temp_dir() / "badmagic.tmnf";
  std::ofstream out(path, std::ios::binary);
  out << "NOPE" << std::string(32, '\0');
  out.close();
  CHECK_THROWS_AS(load_features(path), Error);
}

TEST_CASE("TMNF: bad version is a format error") {
  MatF m(2, 2);
  const auto path = temp_dir() / "badversion.tmnf";
  write_features(path, m);
  std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
  f.seekp(4);
  const std::uint32_t v = 9;
  f.write(reinterpret_cast<const char*>(&v), 4);
  f.close();
  CHECK_THROWS_AS(load_features(path), Error);
}

TEST_CASE("manifest: save/load round trip including unlabeled records") {
  Manifest m;
  m.class_count = 5;
  m.records = {{"a/b.tmnf", 3, "arid"}, {"a/c.tmnf", -1, "arid"}};
  const auto path = temp_dir() / "m.manifest";
  save_manifest(path, m);
  Manifest back = load_manifest(path);
  CHECK(back.class_count == 5);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].path == "a/b.tmnf");
  CHECK(back.records[0].label == 3);
  CHECK(back.records[0].domain == "arid");
  CHECK(back.records[1].label == -1);
  CHECK_FALSE(back.labeled());
  CHECK_FALSE(back.unlabeled());
}

TEST_CASE("manifest: label at or above the class count is rejected") {
  const auto path = temp_dir() / "badlabel.manifest";
  std::ofstream out(path);
  out << "#classes=4\n" << "x.tmnf\t4\tdom\n";
  out.close();
  try {
    load_manifest(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Label);
  }
}

TEST_CASE("manifest: missing header line is a format error") {
  const auto path = temp_dir() / "noheader.manifest";
  std::ofstream out(path);
  out << "x.tmnf\t0\tdom\n";
  out.close();
  CHECK_THROWS_AS(load_manifest(path), Error);
}

TEST_CASE("dataset loader resolves records relative to the manifest") {
  const auto dir = temp_dir() / "ds";
  fs::create_directories(dir / "sub");
  MatF m(4, 2);
  m(0, 0) = 1.5f;
  write_features(dir / "sub" / "v0.tmnf", m);

  Manifest manifest;
  manifest.class_count = 2;
  manifest.records = {{"sub/v0.tmnf", 1, "dom"}};
  save_manifest(dir / "data.manifest", manifest);

  Dataset ds = load_dataset(dir / "data.manifest");
  REQUIRE(ds.size() == 1);
  CHECK(ds.domain == "dom");
  CHECK(ds.videos[0].id == "sub/v0.tmnf");  // id keeps the manifest string
  CHECK(ds.videos[0].frames(0, 0) == 1.5f);
  CHECK(ds.labels[0] == 1);
}

TEST_CASE("checkpoint: save/load round trip preserves tensors and metadata") {
  ModelConfig cfg;
  cfg.feature_dim = 4;
  cfg.temporal_dim = 6;
  cfg.hidden_dim = 5;
  cfg.class_count = 3;
  cfg.frame_count = 5;
  cfg.scales = {2, 4};
  cfg.clips_per_scale = 2;

  Checkpoint cp;
  cp.model = init_model(cfg, {"alpha", "beta"}, 7);
  cp.target_scale_weights = {0.25, 0.75};
  cp.variant = Variant::NoConfidence;
  cp.config.lr = 0.25;
  cp.config.seed = 99;
  cp.config.variant = Variant::NoConfidence;
  cp.config.scales = cfg.scales;

  const auto path = temp_dir() / "model.tmnc";
  save_checkpoint(path, cp);
  Checkpoint back = load_checkpoint(path);

  CHECK(back.model.cfg.feature_dim == 4);
  CHECK(back.model.cfg.scales == std::vector<int>{2, 4});
  CHECK(back.model.source_names == std::vector<std::string>{"alpha", "beta"});
  CHECK(back.target_scale_weights == std::vector<double>{0.25, 0.75});
  CHECK(back.variant == Variant::NoConfidence);
  CHECK(back.config.lr == doctest::Approx(0.25));
  CHECK(back.config.seed == 99);

  bool all_equal = true;
  std::vector<const MatF*> a, b;
  for_each_tensor(cp.model, [&](const std::string&, const MatF& t) { a.push_back(&t); });
  for_each_tensor(back.model, [&](const std::string&, const MatF& t) { b.push_back(&t); });
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i]->same_shape(*b[i]));
    for (std::size_t j = 0; j < a[i]->v.size(); ++j)
      if (a[i]->v[j] != b[i]->v[j]) all_equal = false;
  }
  CHECK(all_equal);
}

TEST_CASE("checkpoint: truncated file is a format error") {
  ModelConfig cfg;
  cfg.feature_dim = 2;
  cfg.temporal_dim = 2;
  cfg.hidden_dim = 2;
  cfg.class_count = 2;
  cfg.frame_count = 3;
  cfg.scales = {2};
  Checkpoint cp;
  cp.model = init_model(cfg, {"s"}, 0);
  cp.target_scale_weights = {1.0};
  const auto path = temp_dir() / "trunc.tmnc";
  save_checkpoint(path, cp);
  fs::resize_file(path, fs::file_size(path) / 2);
  CHECK_THROWS_AS(load_checkpoint(path), Error);
}
