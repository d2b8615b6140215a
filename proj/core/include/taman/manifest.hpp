#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "taman/features_io.hpp"

namespace taman {

/// One line of a manifest: feature file, label (-1 = unlabeled), domain name.
struct ManifestRecord {
  std::string path;
  int label = -1;
  std::string domain;
};

/// Text format: first line `#classes=<K>`, then `path<TAB>label<TAB>domain`
/// per record. Unlabeled (target-train) records carry label -1.
struct Manifest {
  int class_count = 0;
  std::vector<ManifestRecord> records;

  bool labeled() const {
    for (const auto& r : records)
      if (r.label < 0) return false;
    return !records.empty();
  }
  bool unlabeled() const {
    for (const auto& r : records)
      if (r.label >= 0) return false;
    return true;
  }
};

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// A manifest with its feature files loaded into memory. Relative record
/// paths are resolved against the manifest's directory; ids keep the
/// original path strings so evaluation sampling is independent of layout.
struct Dataset {
  std::string domain;
  int class_count = 0;
  std::vector<VideoFeatures> videos;
  std::vector<int> labels;  // parallel to videos; -1 = unlabeled

  int size() const { return static_cast<int>(videos.size()); }
  bool labeled() const;
};

Dataset load_dataset(const std::filesystem::path& manifest_path);

}  // namespace taman
