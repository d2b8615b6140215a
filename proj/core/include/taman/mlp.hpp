#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "taman/matrix.hpp"

namespace taman {

/// Weights are stored (in_dim x out_dim); bias is a 1 x out_dim row.
template <class T>
struct MlpLayer {
  Mat<T> w;
  Mat<T> b;
};

/// Plain feed-forward net: rectifier on hidden layers, identity output.
template <class T>
struct Mlp {
  std::vector<MlpLayer<T>> layers;

  int in_dim() const { return layers.empty() ? 0 : layers.front().w.rows; }
  int out_dim() const { return layers.empty() ? 0 : layers.back().w.cols; }

  void validate() const {
    if (layers.empty()) fail(ErrorKind::Shape, "mlp has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      if (l.b.rows != 1 || l.b.cols != l.w.cols)
        fail(ErrorKind::Shape, "layer " + std::to_string(i) + " bias " + l.b.shape_str() +
                                   " for weight " + l.w.shape_str());
      if (i + 1 < layers.size() && l.w.cols != layers[i + 1].w.rows)
        fail(ErrorKind::Shape, "layer " + std::to_string(i) + " out-dim " + std::to_string(l.w.cols) +
                                   " != layer " + std::to_string(i + 1) + " in-dim " +
                                   std::to_string(layers[i + 1].w.rows));
    }
  }
};

template <class To, class From>
Mlp<To> mlp_cast(const Mlp<From>& m) {
  Mlp<To> out;
  out.layers.reserve(m.layers.size());
  for (const auto& l : m.layers) out.layers.push_back({mat_cast<To>(l.w), mat_cast<To>(l.b)});
  return out;
}

template <class T>
Mlp<T> mlp_zeros_like(const Mlp<T>& m) {
  Mlp<T> out;
  out.layers.reserve(m.layers.size());
  for (const auto& l : m.layers)
    out.layers.push_back({Mat<T>(l.w.rows, l.w.cols), Mat<T>(l.b.rows, l.b.cols)});
  return out;
}

/// Activation record from one forward pass; consumed by mlp_backward.
template <class T>
struct MlpCache {
  const void* owner = nullptr;       // the Mlp the cache was built from
  Mat<T> input;                      // batch x in_dim
  std::vector<Mat<T>> pre;           // pre-activations per layer
  std::vector<Mat<T>> post;          // post-activations per layer (last == output)
};

template <class T>
Mat<T> mlp_forward(const Mlp<T>& mlp, const Mat<T>& input, MlpCache<T>* cache = nullptr) {
  mlp.validate();
  if (input.cols != mlp.in_dim())
    fail(ErrorKind::Shape, "mlp input has " + std::to_string(input.cols) + " columns, expected " +
                               std::to_string(mlp.in_dim()));
  if (cache) {
    cache->owner = &mlp;
    cache->input = input;
    cache->pre.clear();
    cache->post.clear();
  }
  Mat<T> x = input;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    Mat<T> z = matmul(x, mlp.layers[i].w);
    add_bias_rows(z, mlp.layers[i].b);
    const bool hidden = i + 1 < mlp.layers.size();
    Mat<T> a = z;
    if (hidden)
      for (T& e : a.v) e = e > T(0) ? e : T(0);
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->post.push_back(a);
    }
    x = std::move(a);
  }
  return x;
}

template <class T>
struct MlpBackwardResult {
  Mlp<T> grads;      // same shapes as the parameters
  Mat<T> input_grad; // batch x in_dim
};

/// Accumulates parameter gradients into grad_acc and returns nothing extra.
/// Set want_input_grad when the gradient must keep flowing past the input.
template <class T>
Mat<T> mlp_backward_accumulate(const Mlp<T>& mlp, const MlpCache<T>& cache, const Mat<T>& upstream,
                               Mlp<T>& grad_acc, bool want_input_grad) {
  if (cache.owner != &mlp || cache.pre.size() != mlp.layers.size())
    fail(ErrorKind::Cache, "forward cache does not belong to this mlp");
  if (upstream.rows != cache.input.rows || upstream.cols != mlp.out_dim())
    fail(ErrorKind::Shape, "upstream gradient " + upstream.shape_str() + " for output " +
                               std::to_string(cache.input.rows) + "x" + std::to_string(mlp.out_dim()));
  if (grad_acc.layers.size() != mlp.layers.size())
    fail(ErrorKind::Shape, "gradient accumulator layer count mismatch");

  Mat<T> delta = upstream;
  for (int i = static_cast<int>(mlp.layers.size()) - 1; i >= 0; --i) {
    const bool hidden = i + 1 < static_cast<int>(mlp.layers.size());
    if (hidden) {
      const Mat<T>& pre = cache.pre[i];
      check_same_shape(delta, pre, "relu backward");
      for (std::size_t k = 0; k < delta.v.size(); ++k)
        if (pre.v[k] <= T(0)) delta.v[k] = T(0);
    }
    const Mat<T>& layer_in = i == 0 ? cache.input : cache.post[i - 1];
    Mat<T> dw = matmul_transpose_a(layer_in, delta);
    Mat<T> db = column_sums(delta);
    axpy(grad_acc.layers[i].w, 1.0, dw);
    axpy(grad_acc.layers[i].b, 1.0, db);
    if (i > 0 || want_input_grad) delta = matmul_transpose_b(delta, mlp.layers[i].w);
  }
  if (!want_input_grad) return Mat<T>();
  return delta;
}

template <class T>
MlpBackwardResult<T> mlp_backward(const Mlp<T>& mlp, const MlpCache<T>& cache, const Mat<T>& upstream) {
  MlpBackwardResult<T> out;
  out.grads = mlp_zeros_like(mlp);
  out.input_grad = mlp_backward_accumulate(mlp, cache, upstream, out.grads, true);
  return out;
}

/// Row-wise softmax with max shift.
template <class T>
Mat<T> softmax_rows(const Mat<T>& logits) {
  Mat<T> out(logits.rows, logits.cols);
  for (int i = 0; i < logits.rows; ++i) {
    const T* in = logits.v.data() + static_cast<std::size_t>(i) * logits.cols;
    T* o = out.v.data() + static_cast<std::size_t>(i) * logits.cols;
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < logits.cols; ++j) mx = std::max(mx, static_cast<double>(in[j]));
    double denom = 0.0;
    for (int j = 0; j < logits.cols; ++j) denom += std::exp(static_cast<double>(in[j]) - mx);
    for (int j = 0; j < logits.cols; ++j)
      o[j] = static_cast<T>(std::exp(static_cast<double>(in[j]) - mx) / denom);
  }
  return out;
}

template <class T>
struct CrossEntropyResult {
  double loss = 0.0;   // mean over rows of -log softmax(logits)[label]
  Mat<T> logit_grad;   // (softmax - onehot) / batch
};

template <class T>
CrossEntropyResult<T> softmax_cross_entropy(const Mat<T>& logits, std::span<const int> labels) {
  if (logits.rows == 0) fail(ErrorKind::Batch, "cross entropy on empty batch");
  if (static_cast<int>(labels.size()) != logits.rows)
    fail(ErrorKind::Shape, "labels " + std::to_string(labels.size()) + " for " + logits.shape_str());
  CrossEntropyResult<T> out;
  out.logit_grad = Mat<T>(logits.rows, logits.cols);
  double loss_acc = 0.0;
  for (int i = 0; i < logits.rows; ++i) {
    const int label = labels[i];
    if (label < 0 || label >= logits.cols)
      fail(ErrorKind::Label, "label " + std::to_string(label) + " outside [0, " +
                                 std::to_string(logits.cols) + ")");
    const T* in = logits.v.data() + static_cast<std::size_t>(i) * logits.cols;
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < logits.cols; ++j) mx = std::max(mx, static_cast<double>(in[j]));
    double denom = 0.0;
    for (int j = 0; j < logits.cols; ++j) denom += std::exp(static_cast<double>(in[j]) - mx);
    const double log_denom = std::log(denom);
    loss_acc += log_denom - (static_cast<double>(in[label]) - mx);
    T* g = out.logit_grad.v.data() + static_cast<std::size_t>(i) * logits.cols;
    const double inv_batch = 1.0 / logits.rows;
    for (int j = 0; j < logits.cols; ++j) {
      double p = std::exp(static_cast<double>(in[j]) - mx) / denom;
      g[j] = static_cast<T>((p - (j == label ? 1.0 : 0.0)) * inv_batch);
    }
  }
  out.loss = loss_acc / logits.rows;
  return out;
}

struct SgdConfig {
  float lr = 1e-3f;
  float momentum = 0.9f;
  float weight_decay = 1e-4f;
};

/// v <- momentum*v + (grad + weight_decay*param); param <- param - lr*v
template <class T>
void sgd_step(Mat<T>& param, const Mat<T>& grad, Mat<T>& velocity, const SgdConfig& cfg) {
  check_same_shape(param, grad, "sgd param/grad");
  check_same_shape(param, velocity, "sgd param/velocity");
  for (std::size_t i = 0; i < param.v.size(); ++i) {
    const double g = static_cast<double>(grad.v[i]) +
                     static_cast<double>(cfg.weight_decay) * static_cast<double>(param.v[i]);
    const double v = static_cast<double>(cfg.momentum) * static_cast<double>(velocity.v[i]) + g;
    velocity.v[i] = static_cast<T>(v);
    param.v[i] = static_cast<T>(static_cast<double>(param.v[i]) - static_cast<double>(cfg.lr) * v);
  }
}

}  // namespace taman
