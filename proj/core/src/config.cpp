#include "taman/config.hpp"

#include <algorithm>

#include <json.hpp>

#include "taman/errors.hpp"

namespace taman {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoConfidence: return "no_confidence";
    case Variant::NoDominance: return "no_dominance";
    case Variant::NoLocalAttention: return "no_local_attention";
    case Variant::DominanceMin: return "dominance_min";
    case Variant::DominanceMax: return "dominance_max";
    case Variant::EnsembleAvg: return "ensemble_avg";
    case Variant::EnsembleSrcAccuracy: return "ensemble_src_accuracy";
    case Variant::SourceOnly: return "source_only";
  }
  return "full";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::Full, Variant::NoConfidence, Variant::NoDominance,
                    Variant::NoLocalAttention, Variant::DominanceMin, Variant::DominanceMax,
                    Variant::EnsembleAvg, Variant::EnsembleSrcAccuracy, Variant::SourceOnly})
    if (name == to_string(v)) return v;
  fail(ErrorKind::Config, "unknown variant '" + name + "'");
}

std::vector<int> RunConfig::effective_scales(int frame_count) const {
  std::vector<int> out = scales;
  if (out.empty())
    for (int r = 2; r <= frame_count; ++r) out.push_back(r);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (int r : out)
    if (r < 2 || r > frame_count)
      fail(ErrorKind::Scale, "scale " + std::to_string(r) + " outside [2, " +
                                 std::to_string(frame_count) + "]");
  return out;
}

void RunConfig::validate() const {
  if (lr <= 0) fail(ErrorKind::Config, "lr must be positive");
  if (momentum < 0 || momentum >= 1) fail(ErrorKind::Config, "momentum outside [0, 1)");
  if (weight_decay < 0) fail(ErrorKind::Config, "weight_decay must be nonnegative");
  if (epochs < 1) fail(ErrorKind::Config, "epochs must be >= 1");
  if (batch_size < 1) fail(ErrorKind::Config, "batch_size must be >= 1");
  if (lambda_df < 0 || lambda_dt < 0) fail(ErrorKind::Config, "lambdas must be nonnegative");
  if (clips_per_scale < 1) fail(ErrorKind::Config, "clips_per_scale must be >= 1");
  if (moment_orders.empty()) fail(ErrorKind::Config, "moment_orders must be nonempty");
  for (int k : moment_orders)
    if (k < 1) fail(ErrorKind::Config, "moment order " + std::to_string(k) + " < 1");
  if (temporal_dim < 1 || hidden_dim < 1) fail(ErrorKind::Config, "model dims must be >= 1");
}

std::string to_json_string(const RunConfig& c) {
  nlohmann::ordered_json j{{"lr", c.lr},
                           {"momentum", c.momentum},
                           {"weight_decay", c.weight_decay},
                           {"epochs", c.epochs},
                           {"batch_size", c.batch_size},
                           {"lambda_df", c.lambda_df},
                           {"lambda_dt", c.lambda_dt},
                           {"scales", c.scales},
                           {"clips_per_scale", c.clips_per_scale},
                           {"moment_orders", c.moment_orders},
                           {"seed", c.seed},
                           {"variant", to_string(c.variant)},
                           {"temporal_dim", c.temporal_dim},
                           {"hidden_dim", c.hidden_dim}};
  return j.dump();
}

RunConfig run_config_from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::Format, std::string("bad run config json: ") + e.what());
  }
  RunConfig c;
  c.lr = j.at("lr").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.weight_decay = j.at("weight_decay").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.lambda_df = j.at("lambda_df").get<double>();
  c.lambda_dt = j.at("lambda_dt").get<double>();
  c.scales = j.at("scales").get<std::vector<int>>();
  c.clips_per_scale = j.at("clips_per_scale").get<int>();
  c.moment_orders = j.at("moment_orders").get<std::vector<int>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.temporal_dim = j.at("temporal_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  return c;
}

}  // namespace taman
