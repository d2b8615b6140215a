#pragma once

#include <map>
#include <string>
#include <vector>

#include "taman/manifest.hpp"

namespace taman {

enum class Benchmark { Daily, Sports };

const char* to_string(Benchmark b);
Benchmark parse_benchmark(const std::string& name);

/// Shared class names in index order (8 for daily, 23 for sports).
const std::vector<std::string>& benchmark_class_names(Benchmark b);

/// Constituent dataset keys for a benchmark, e.g. daily -> arid, hmdb51,
/// moments, kinetics.
const std::vector<std::string>& benchmark_datasets(Benchmark b);

/// Maps one raw dataset label to the shared class index, or -1 when the
/// label is not part of the benchmark. Matching is case- and
/// whitespace-insensitive.
int map_raw_label(Benchmark b, const std::string& dataset, const std::string& raw_label);

struct ListingEntry {
  std::string raw_label;
  std::string path;
};

/// Builds one labeled manifest per dataset. Raw labels are mapped through
/// the benchmark's class table (many raw Kinetics labels fold into one
/// class); unmatched labels are dropped. Every class must end up with at
/// least one video in every listed dataset.
std::map<std::string, Manifest> build_manifests(
    Benchmark b, const std::map<std::string, std::vector<ListingEntry>>& listings);

}  // namespace taman
