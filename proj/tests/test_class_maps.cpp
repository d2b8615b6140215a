#include <doctest.h>

#include "taman/class_maps.hpp"

using namespace taman;

TEST_CASE("daily benchmark exposes exactly 8 classes, sports exactly 23") {
  CHECK(benchmark_class_names(Benchmark::Daily).size() == 8);
  CHECK(benchmark_class_names(Benchmark::Sports).size() == 23);
  CHECK(benchmark_datasets(Benchmark::Daily) ==
        std::vector<std::string>{"arid", "hmdb51", "moments", "kinetics"});
  CHECK(benchmark_datasets(Benchmark::Sports) ==
        std::vector<std::string>{"ucf101", "sports1m", "kinetics"});
}

TEST_CASE("many-to-one kinetics labels fold into one daily class") {
  const auto& names = benchmark_class_names(Benchmark::Daily);
  const int jump = map_raw_label(Benchmark::Daily, "kinetics", "jumping jacks");
  REQUIRE(jump >= 0);
  CHECK(names[static_cast<std::size_t>(jump)] == "Jump");
  CHECK(map_raw_label(Benchmark::Daily, "kinetics", "jumping bicycle") == jump);
  CHECK(map_raw_label(Benchmark::Daily, "kinetics", "jumping into pool") == jump);
  CHECK(map_raw_label(Benchmark::Daily, "hmdb51", "jump") == jump);
  CHECK(map_raw_label(Benchmark::Daily, "moments", "jumping") == jump);
  CHECK(map_raw_label(Benchmark::Daily, "arid", "Jump") == jump);

  const int push = map_raw_label(Benchmark::Daily, "kinetics", "pushing wheelchair");
  CHECK(names[static_cast<std::size_t>(push)] == "Push");
  CHECK(map_raw_label(Benchmark::Daily, "kinetics", "pushing car") == push);
}

TEST_CASE("sports spot checks from the shared class table") {
  const auto& names = benchmark_class_names(Benchmark::Sports);
  const int golf = map_raw_label(Benchmark::Sports, "kinetics", "golf putting");
  REQUIRE(golf >= 0);
  CHECK(names[static_cast<std::size_t>(golf)] == "Golf Swing");
  CHECK(map_raw_label(Benchmark::Sports, "kinetics", "golf chipping") == golf);
  CHECK(map_raw_label(Benchmark::Sports, "kinetics", "golf driving") == golf);

  const int taichi = map_raw_label(Benchmark::Sports, "sports1m", "t'ai chi ch'uan");
  REQUIRE(taichi >= 0);
  CHECK(names[static_cast<std::size_t>(taichi)] == "Tai Chi");
  CHECK(map_raw_label(Benchmark::Sports, "kinetics", "tai chi") == taichi);

  CHECK(names[static_cast<std::size_t>(map_raw_label(Benchmark::Sports, "kinetics",
                                                     "catching or throwing baseball"))] ==
        "Baseball Pitch");
  CHECK(names[static_cast<std::size_t>(map_raw_label(Benchmark::Sports, "ucf101", "Biking"))] ==
        "Biking");
}

TEST_CASE("labels outside the benchmark map to -1 and are dropped") {
  CHECK(map_raw_label(Benchmark::Daily, "kinetics", "juggling chainsaws") == -1);
  std::map<std::string, std::vector<ListingEntry>> listings;
  auto& entries = listings["kinetics"];
  entries.push_back({"juggling chainsaws", "x0.mp4"});
  // one video for every daily class so completeness holds
  for (const char* raw : {"drinking shots", "jumping jacks", "picking fruit", "pouring beer",
                          "pushing car", "running on treadmill", "walking the dog", "waving hand"})
    entries.push_back({raw, std::string("k_") + raw + ".mp4"});
  auto manifests = build_manifests(Benchmark::Daily, listings);
  REQUIRE(manifests.count("kinetics") == 1);
  CHECK(manifests["kinetics"].class_count == 8);
  CHECK(manifests["kinetics"].records.size() == 8);  // the chainsaw video is gone
  for (const auto& rec : manifests["kinetics"].records) CHECK(rec.label < 8);
}

TEST_CASE("matching ignores case and whitespace style") {
  CHECK(map_raw_label(Benchmark::Daily, "kinetics", "Jumping_Jacks") ==
        map_raw_label(Benchmark::Daily, "kinetics", "jumping jacks"));
  CHECK(map_raw_label(Benchmark::Sports, "ucf101", "  golf  swing ") ==
        map_raw_label(Benchmark::Sports, "ucf101", "Golf Swing"));
}

TEST_CASE("a class with no videos in a listed domain is a completeness error") {
  std::map<std::string, std::vector<ListingEntry>> listings;
  listings["hmdb51"] = {{"drink", "d.avi"}, {"jump", "j.avi"}};  // pick..wave missing
  try {
    build_manifests(Benchmark::Daily, listings);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Completeness);
    CHECK(std::string(e.what()).find("Pick") != std::string::npos);
    CHECK(std::string(e.what()).find("hmdb51") != std::string::npos);
  }
}

TEST_CASE("unknown dataset keys are rejected") {
  CHECK_THROWS_AS(map_raw_label(Benchmark::Sports, "arid", "archery"), Error);
}
