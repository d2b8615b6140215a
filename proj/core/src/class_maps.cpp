#include "taman/class_maps.hpp"

#include <algorithm>
#include <cctype>

namespace taman {

namespace {

std::string normalize(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char raw : s) {
    char c = raw == '_' ? ' ' : raw;
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

struct ClassRow {
  const char* name;
  // raw labels per dataset, in benchmark_datasets() order
  std::vector<std::vector<const char*>> raw;
};

const std::vector<std::string> kDailyDatasets = {"arid", "hmdb51", "moments", "kinetics"};
const std::vector<std::string> kSportsDatasets = {"ucf101", "sports1m", "kinetics"};

const std::vector<ClassRow>& daily_rows() {
  static const std::vector<ClassRow> rows = {
      {"Drink", {{"Drink"}, {"drink"}, {"drinking"}, {"drinking shots"}}},
      {"Jump", {{"Jump"}, {"jump"}, {"jumping"}, {"jumping bicycle", "jumping into pool", "jumping jacks"}}},
      {"Pick", {{"Pick"}, {"pick"}, {"picking"}, {"picking fruit"}}},
      {"Pour", {{"Pour"}, {"pour"}, {"pouring"}, {"pouring beer"}}},
      {"Push",
       {{"Push"}, {"push"}, {"pushing"}, {"pushing car", "pushing cart", "pushing wheelbarrow", "pushing wheelchair"}}},
      {"Run", {{"Run"}, {"run"}, {"running"}, {"running on treadmill"}}},
      {"Walk", {{"Walk"}, {"walk"}, {"walking"}, {"walking the dog", "walking through snow"}}},
      {"Wave", {{"Wave"}, {"wave"}, {"waving"}, {"waving hand"}}},
  };
  return rows;
}

const std::vector<ClassRow>& sports_rows() {
  static const std::vector<ClassRow> rows = {
      {"Archery", {{"Archery"}, {"archery"}, {"archery"}}},
      {"Baseball Pitch",
       {{"Baseball Pitch"}, {"baseball"}, {"catching or throwing baseball", "hitting baseball"}}},
      {"Basketball Shooting",
       {{"Basketball Shooting"}, {"basketball"}, {"playing basketball", "shooting basketball"}}},
      {"Biking", {{"Biking"}, {"bicycle"}, {"riding a bike"}}},
      {"Bowling", {{"Bowling"}, {"bowling"}, {"bowling"}}},
      {"Breaststroke", {{"Breaststroke"}, {"breaststroke"}, {"swimming breast stroke"}}},
      {"Diving", {{"Diving"}, {"diving"}, {"springboard diving"}}},
      {"Fencing", {{"Fencing"}, {"fencing"}, {"fencing (sport)"}}},
      {"Field Hockey Penalty", {{"Field Hockey Penalty"}, {"field hockey"}, {"playing field hockey"}}},
      {"Floor Gymnastics", {{"Floor Gymnastics"}, {"floor (gymnastics)"}, {"gymnastics tumbling"}}},
      {"Golf Swing", {{"Golf Swing"}, {"golf"}, {"golf chipping", "golf driving", "golf putting"}}},
      {"Horse Race", {{"Horse Race"}, {"horse racing"}, {"riding or walking with horse"}}},
      {"Kayaking", {{"Kayaking"}, {"kayaking"}, {"canoeing or kayaking"}}},
      {"Rock Climbing Indoor", {{"Rock Climbing Indoor"}, {"rock climbing"}, {"rock climbing"}}},
      {"Rope Climbing", {{"Rope Climbing"}, {"rope climbing"}, {"climbing a rope"}}},
      {"Skate Boarding", {{"Skate Boarding"}, {"skateboarding"}, {"skateboarding"}}},
      {"Skiing", {{"Skiing"}, {"skiing"}, {"skiing crosscountry", "skiing mono"}}},
      {"Sumo Wrestling", {{"Sumo Wrestling"}, {"sumo"}, {"wrestling"}}},
      {"Surfing", {{"Surfing"}, {"surfing"}, {"surfing water"}}},
      {"Tai Chi", {{"Tai Chi"}, {"t'ai chi ch'uan"}, {"tai chi"}}},
      {"Tennis Swing", {{"Tennis Swing"}, {"tennis"}, {"playing tennis"}}},
      {"Trampoline Jumping", {{"Trampoline Jumping"}, {"trampolining"}, {"bouncing on trampoline"}}},
      {"Volleyball Spiking", {{"Volleyball Spiking"}, {"volleyball"}, {"playing volleyball"}}},
  };
  return rows;
}

const std::vector<ClassRow>& rows_for(Benchmark b) {
  return b == Benchmark::Daily ? daily_rows() : sports_rows();
}

// dataset -> normalized raw label -> class index
const std::map<std::string, std::map<std::string, int>>& lookup_for(Benchmark b) {
  static std::map<Benchmark, std::map<std::string, std::map<std::string, int>>> cache;
  auto it = cache.find(b);
  if (it == cache.end()) {
    std::map<std::string, std::map<std::string, int>> table;
    const auto& datasets = benchmark_datasets(b);
    const auto& rows = rows_for(b);
    for (std::size_t ci = 0; ci < rows.size(); ++ci)
      for (std::size_t di = 0; di < datasets.size(); ++di)
        for (const char* raw : rows[ci].raw[di]) table[datasets[di]][normalize(raw)] = static_cast<int>(ci);
    it = cache.emplace(b, std::move(table)).first;
  }
  return it->second;
}

}  // namespace

const char* to_string(Benchmark b) { return b == Benchmark::Daily ? "daily" : "sports"; }

Benchmark parse_benchmark(const std::string& name) {
  if (name == "daily") return Benchmark::Daily;
  if (name == "sports") return Benchmark::Sports;
  fail(ErrorKind::Config, "unknown benchmark '" + name + "'");
}

const std::vector<std::string>& benchmark_class_names(Benchmark b) {
  static std::map<Benchmark, std::vector<std::string>> cache;
  auto it = cache.find(b);
  if (it == cache.end()) {
    std::vector<std::string> names;
    for (const auto& row : rows_for(b)) names.emplace_back(row.name);
    it = cache.emplace(b, std::move(names)).first;
  }
  return it->second;
}

const std::vector<std::string>& benchmark_datasets(Benchmark b) {
  return b == Benchmark::Daily ? kDailyDatasets : kSportsDatasets;
}

int map_raw_label(Benchmark b, const std::string& dataset, const std::string& raw_label) {
  const auto& table = lookup_for(b);
  auto dit = table.find(dataset);
  if (dit == table.end())
    fail(ErrorKind::Config, "dataset '" + dataset + "' is not part of benchmark " + to_string(b));
  auto lit = dit->second.find(normalize(raw_label));
  return lit == dit->second.end() ? -1 : lit->second;
}

std::map<std::string, Manifest> build_manifests(
    Benchmark b, const std::map<std::string, std::vector<ListingEntry>>& listings) {
  const int k = static_cast<int>(benchmark_class_names(b).size());
  std::map<std::string, Manifest> out;
  for (const auto& [dataset, entries] : listings) {
    Manifest m;
    m.class_count = k;
    std::vector<int> per_class(static_cast<std::size_t>(k), 0);
    for (const auto& entry : entries) {
      const int label = map_raw_label(b, dataset, entry.raw_label);
      if (label < 0) continue;  // not an overlapping class
      m.records.push_back({entry.path, label, dataset});
      ++per_class[static_cast<std::size_t>(label)];
    }
    for (int c = 0; c < k; ++c)
      if (per_class[static_cast<std::size_t>(c)] == 0)
        fail(ErrorKind::Completeness, "class '" + benchmark_class_names(b)[static_cast<std::size_t>(c)] +
                                          "' has no videos in domain '" + dataset + "'");
    out.emplace(dataset, std::move(m));
  }
  return out;
}

}  // namespace taman
