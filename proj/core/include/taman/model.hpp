#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taman/mlp.hpp"
#include "taman/rng.hpp"

namespace taman {

struct ModelConfig {
  int feature_dim = 0;    // per-frame spatial feature width
  int temporal_dim = 256; // shared output width of every integration net
  int hidden_dim = 256;
  int class_count = 0;
  int frame_count = 8;
  std::vector<int> scales;
  int clips_per_scale = 3;

  void validate() const {
    if (feature_dim < 1) fail(ErrorKind::Config, "feature_dim must be >= 1");
    if (class_count < 2) fail(ErrorKind::DegenerateClass, "need at least 2 classes");
    if (frame_count < 2) fail(ErrorKind::Config, "frame_count must be >= 2");
    if (scales.empty()) fail(ErrorKind::Config, "no temporal scales configured");
    for (int r : scales)
      if (r < 2 || r > frame_count)
        fail(ErrorKind::Scale, "scale " + std::to_string(r) + " outside [2, " +
                                   std::to_string(frame_count) + "]");
    if (clips_per_scale < 1) fail(ErrorKind::Config, "clips_per_scale must be >= 1");
  }
};

/// Trainable parameters: one integration net per scale, shared across
/// domains, and one linear classifier per source domain. Every classifier
/// accepts the shared temporal dimension, so it applies to local and global
/// temporal features alike.
template <class T>
struct Model {
  ModelConfig cfg;
  std::vector<std::string> source_names;
  std::vector<Mlp<T>> integrators;  // parallel to cfg.scales
  std::vector<Mlp<T>> classifiers;  // parallel to source_names
};

using ModelF = Model<float>;
using ModelD = Model<double>;

template <class To, class From>
Model<To> model_cast(const Model<From>& m) {
  Model<To> out;
  out.cfg = m.cfg;
  out.source_names = m.source_names;
  out.integrators.reserve(m.integrators.size());
  for (const auto& g : m.integrators) out.integrators.push_back(mlp_cast<To>(g));
  out.classifiers.reserve(m.classifiers.size());
  for (const auto& c : m.classifiers) out.classifiers.push_back(mlp_cast<To>(c));
  return out;
}

template <class T>
Model<T> model_zeros_like(const Model<T>& m) {
  Model<T> out;
  out.cfg = m.cfg;
  out.source_names = m.source_names;
  for (const auto& g : m.integrators) out.integrators.push_back(mlp_zeros_like(g));
  for (const auto& c : m.classifiers) out.classifiers.push_back(mlp_zeros_like(c));
  return out;
}

/// Visits every parameter tensor in a fixed order with a stable name.
template <class T, class Fn>
void for_each_tensor(Model<T>& m, Fn&& fn) {
  for (std::size_t s = 0; s < m.integrators.size(); ++s) {
    const std::string prefix = "g" + std::to_string(m.cfg.scales[s]);
    for (std::size_t l = 0; l < m.integrators[s].layers.size(); ++l) {
      fn(prefix + ".w" + std::to_string(l), m.integrators[s].layers[l].w);
      fn(prefix + ".b" + std::to_string(l), m.integrators[s].layers[l].b);
    }
  }
  for (std::size_t c = 0; c < m.classifiers.size(); ++c) {
    const std::string prefix = "cls." + m.source_names[c];
    for (std::size_t l = 0; l < m.classifiers[c].layers.size(); ++l) {
      fn(prefix + ".w" + std::to_string(l), m.classifiers[c].layers[l].w);
      fn(prefix + ".b" + std::to_string(l), m.classifiers[c].layers[l].b);
    }
  }
}

template <class T, class Fn>
void for_each_tensor(const Model<T>& m, Fn&& fn) {
  for_each_tensor(const_cast<Model<T>&>(m),
                  [&](const std::string& name, Mat<T>& t) { fn(name, static_cast<const Mat<T>&>(t)); });
}

ModelF init_model(const ModelConfig& cfg, std::vector<std::string> source_names, std::uint64_t seed);

}  // namespace taman
