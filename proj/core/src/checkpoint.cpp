#include "taman/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

namespace taman {

namespace {
constexpr char kMagic[4] = {'T', 'M', 'N', 'C'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

using json = nlohmann::ordered_json;

void put_u32(std::ofstream& out, std::uint32_t x) {
  out.write(reinterpret_cast<const char*>(&x), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::filesystem::path& path) {
  std::uint32_t x = 0;
  in.read(reinterpret_cast<char*>(&x), 4);
  if (in.gcount() != 4) fail(ErrorKind::Format, path.string() + ": truncated checkpoint");
  return x;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  if (cp.target_scale_weights.size() != cp.model.cfg.scales.size())
    fail(ErrorKind::Shape, "target scale weights do not cover the model's scales");

  json meta;
  meta["model"] = {{"feature_dim", cp.model.cfg.feature_dim},
                   {"temporal_dim", cp.model.cfg.temporal_dim},
                   {"hidden_dim", cp.model.cfg.hidden_dim},
                   {"class_count", cp.model.cfg.class_count},
                   {"frame_count", cp.model.cfg.frame_count},
                   {"scales", cp.model.cfg.scales},
                   {"clips_per_scale", cp.model.cfg.clips_per_scale}};
  meta["source_domains"] = cp.model.source_names;
  meta["target_scale_weights"] = cp.target_scale_weights;
  meta["variant"] = to_string(cp.variant);
  meta["config"] = json::parse(to_json_string(cp.config));
  const std::string meta_str = meta.dump();

  std::uint32_t tensor_count = 0;
  for_each_tensor(cp.model, [&](const std::string&, const MatF&) { ++tensor_count; });

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Format, "cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(meta_str.size()));
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  put_u32(out, tensor_count);
  for_each_tensor(cp.model, [&](const std::string& name, const MatF& t) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(t.rows));
    put_u32(out, static_cast<std::uint32_t>(t.cols));
    out.write(reinterpret_cast<const char*>(t.v.data()),
              static_cast<std::streamsize>(t.v.size() * sizeof(float)));
  });
  if (!out) fail(ErrorKind::Format, "short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Format, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
    fail(ErrorKind::Format, path.string() + ": bad checkpoint magic");
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion)
    fail(ErrorKind::Format, path.string() + ": unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t meta_len = get_u32(in, path);
  std::string meta_str(meta_len, '\0');
  in.read(meta_str.data(), meta_len);
  if (in.gcount() != static_cast<std::streamsize>(meta_len))
    fail(ErrorKind::Format, path.string() + ": truncated metadata");

  json meta;
  try {
    meta = json::parse(meta_str);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Format, path.string() + ": bad metadata: " + e.what());
  }

  Checkpoint cp;
  const auto& jm = meta.at("model");
  ModelConfig cfg;
  cfg.feature_dim = jm.at("feature_dim").get<int>();
  cfg.temporal_dim = jm.at("temporal_dim").get<int>();
  cfg.hidden_dim = jm.at("hidden_dim").get<int>();
  cfg.class_count = jm.at("class_count").get<int>();
  cfg.frame_count = jm.at("frame_count").get<int>();
  cfg.scales = jm.at("scales").get<std::vector<int>>();
  cfg.clips_per_scale = jm.at("clips_per_scale").get<int>();
  cp.target_scale_weights = meta.at("target_scale_weights").get<std::vector<double>>();
  cp.variant = parse_variant(meta.at("variant").get<std::string>());
  cp.config = run_config_from_json(meta.at("config").dump());

  // Rebuild the parameter skeleton, then fill tensors by name.
  cp.model = init_model(cfg, meta.at("source_domains").get<std::vector<std::string>>(), 0);
  std::map<std::string, MatF*> slots;
  for_each_tensor(cp.model, [&](const std::string& name, MatF& t) { slots[name] = &t; });

  const std::uint32_t tensor_count = get_u32(in, path);
  if (tensor_count != slots.size())
    fail(ErrorKind::Format, path.string() + ": directory lists " + std::to_string(tensor_count) +
                                " tensors, model needs " + std::to_string(slots.size()));
  for (std::uint32_t i = 0; i < tensor_count; ++i) {
    const std::uint32_t name_len = get_u32(in, path);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (in.gcount() != static_cast<std::streamsize>(name_len))
      fail(ErrorKind::Format, path.string() + ": truncated tensor name");
    const std::uint32_t rows = get_u32(in, path);
    const std::uint32_t cols = get_u32(in, path);
    auto it = slots.find(name);
    if (it == slots.end()) fail(ErrorKind::Format, path.string() + ": unexpected tensor '" + name + "'");
    MatF& t = *it->second;
    if (t.rows != static_cast<int>(rows) || t.cols != static_cast<int>(cols))
      fail(ErrorKind::Format, path.string() + ": tensor '" + name + "' is " + std::to_string(rows) +
                                  "x" + std::to_string(cols) + ", expected " + t.shape_str());
    const std::streamsize want = static_cast<std::streamsize>(t.v.size() * sizeof(float));
    in.read(reinterpret_cast<char*>(t.v.data()), want);
    if (in.gcount() != want)
      fail(ErrorKind::Format, path.string() + ": truncated tensor '" + name + "'");
  }
  return cp;
}

}  // namespace taman
