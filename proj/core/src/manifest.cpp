#include "taman/manifest.hpp"

#include <fstream>
#include <sstream>

namespace taman {

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Format, "cannot open manifest " + path.string());
  Manifest m;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Format, path.string() + ": empty manifest");
  if (line.rfind("#classes=", 0) != 0)
    fail(ErrorKind::Format, path.string() + ": first line must be #classes=<K>");
  try {
    m.class_count = std::stoi(line.substr(9));
  } catch (const std::exception&) {
    fail(ErrorKind::Format, path.string() + ": bad class count '" + line.substr(9) + "'");
  }
  if (m.class_count < 1) fail(ErrorKind::Format, path.string() + ": class count must be >= 1");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos)
      fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) +
                                  ": expected path<TAB>label<TAB>domain");
    ManifestRecord rec;
    rec.path = line.substr(0, tab1);
    try {
      rec.label = std::stoi(line.substr(tab1 + 1, tab2 - tab1 - 1));
    } catch (const std::exception&) {
      fail(ErrorKind::Format, path.string() + ":" + std::to_string(line_no) + ": bad label");
    }
    rec.domain = line.substr(tab2 + 1);
    if (rec.label >= m.class_count || rec.label < -1)
      fail(ErrorKind::Label, path.string() + ":" + std::to_string(line_no) + ": label " +
                                 std::to_string(rec.label) + " outside [-1, " +
                                 std::to_string(m.class_count) + ")");
    m.records.push_back(std::move(rec));
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::Format, "cannot open " + path.string() + " for writing");
  out << "#classes=" << manifest.class_count << "\n";
  for (const auto& rec : manifest.records)
    out << rec.path << "\t" << rec.label << "\t" << rec.domain << "\n";
  if (!out) fail(ErrorKind::Format, "short write to " + path.string());
}

bool Dataset::labeled() const {
  for (int l : labels)
    if (l < 0) return false;
  return !labels.empty();
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  const Manifest m = load_manifest(manifest_path);
  if (m.records.empty()) fail(ErrorKind::Data, manifest_path.string() + ": no records");
  Dataset ds;
  ds.class_count = m.class_count;
  ds.domain = m.records.front().domain;
  const std::filesystem::path base = manifest_path.parent_path();
  ds.videos.reserve(m.records.size());
  ds.labels.reserve(m.records.size());
  for (const auto& rec : m.records) {
    if (rec.domain != ds.domain)
      fail(ErrorKind::Data, manifest_path.string() + ": mixed domains '" + ds.domain + "' and '" +
                                rec.domain + "'");
    std::filesystem::path p(rec.path);
    if (p.is_relative()) p = base / p;
    ds.videos.push_back({rec.path, load_features(p)});
    ds.labels.push_back(rec.label);
  }
  return ds;
}

}  // namespace taman
