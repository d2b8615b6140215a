#include "taman/model.hpp"

#include <cmath>

namespace taman {

namespace {
MatF xavier_uniform(int rows, int cols, Rng& rng) {
  MatF m(rows, cols);
  const double limit = std::sqrt(6.0 / (rows + cols));
  for (float& x : m.v) x = static_cast<float>(rng.next_uniform(-limit, limit));
  return m;
}

Mlp<float> make_mlp(const std::vector<int>& dims, Rng& rng) {
  Mlp<float> mlp;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i)
    mlp.layers.push_back({xavier_uniform(dims[i], dims[i + 1], rng), MatF(1, dims[i + 1])});
  return mlp;
}
}  // namespace

ModelF init_model(const ModelConfig& cfg, std::vector<std::string> source_names, std::uint64_t seed) {
  cfg.validate();
  if (source_names.empty()) fail(ErrorKind::Config, "need at least one source domain");
  ModelF model;
  model.cfg = cfg;
  model.source_names = std::move(source_names);
  for (std::size_t s = 0; s < cfg.scales.size(); ++s) {
    Rng rng(hash_mix({seed, 0x67ull, static_cast<std::uint64_t>(cfg.scales[s])}));
    model.integrators.push_back(
        make_mlp({cfg.scales[s] * cfg.feature_dim, cfg.hidden_dim, cfg.temporal_dim}, rng));
  }
  for (std::size_t c = 0; c < model.source_names.size(); ++c) {
    Rng rng(hash_mix({seed, 0xC15ull, static_cast<std::uint64_t>(c)}));
    model.classifiers.push_back(make_mlp({cfg.temporal_dim, cfg.class_count}, rng));
  }
  return model;
}

}  // namespace taman
