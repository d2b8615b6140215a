#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "taman/attention.hpp"
#include "taman/config.hpp"
#include "taman/mlp.hpp"
#include "taman/model.hpp"
#include "taman/temporal.hpp"

namespace taman {

struct MomentConfig {
  std::vector<int> orders = {1, 2};
};

namespace detail {
inline double int_pow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}
}  // namespace detail

/// Mean over rows of the elementwise k-th power (double accumulation).
template <class T>
std::vector<double> moment_embedding(const Mat<T>& batch, int order) {
  if (batch.rows == 0) fail(ErrorKind::Batch, "moment embedding of an empty batch");
  if (order < 1) fail(ErrorKind::Config, "moment order must be >= 1");
  std::vector<double> acc(static_cast<std::size_t>(batch.cols), 0.0);
  for (int i = 0; i < batch.rows; ++i) {
    const T* row = batch.v.data() + static_cast<std::size_t>(i) * batch.cols;
    for (int j = 0; j < batch.cols; ++j) acc[j] += detail::int_pow(static_cast<double>(row[j]), order);
  }
  for (double& x : acc) x /= batch.rows;
  return acc;
}

/// One ||E(x_a^k) - E(x_b^k)||_2 term. Domain index M (= source count)
/// denotes the target.
struct MomentPairDistance {
  int order = 0;
  int a = 0;
  int b = 0;
  double dist = 0.0;
};

template <class T>
struct MomentDiscrepancy {
  double value = 0.0;
  std::vector<MomentPairDistance> pairs;
  std::vector<Mat<T>> grads;  // per domain (sources then target); empty without with_grad
};

/// Sum over moment orders of the mean source-target embedding distance plus
/// the mean inter-source embedding distance. With one source the
/// inter-source term is 0. Differentiable in every input entry.
template <class T>
MomentDiscrepancy<T> moment_discrepancy(std::span<const Mat<T>> sources, const Mat<T>& target,
                                        const MomentConfig& cfg, bool with_grad = false) {
  const int m = static_cast<int>(sources.size());
  if (m < 1) fail(ErrorKind::Config, "need at least one source domain");
  if (cfg.orders.empty()) fail(ErrorKind::Config, "no moment orders configured");
  for (int i = 0; i < m; ++i)
    if (sources[i].cols != target.cols)
      fail(ErrorKind::Shape, "domain " + std::to_string(i) + " feature dim " +
                                 std::to_string(sources[i].cols) + " vs target " +
                                 std::to_string(target.cols));

  MomentDiscrepancy<T> out;
  if (with_grad) {
    out.grads.reserve(m + 1);
    for (int i = 0; i < m; ++i) out.grads.emplace_back(sources[i].rows, sources[i].cols);
    out.grads.emplace_back(target.rows, target.cols);
  }

  const double st_coef = 1.0 / m;
  const double ss_coef = m >= 2 ? 2.0 / (static_cast<double>(m) * (m - 1)) : 0.0;
  const int dim = target.cols;

  auto batch = [&](int d) -> const Mat<T>& { return d == m ? target : sources[d]; };

  for (int k : cfg.orders) {
    std::vector<std::vector<double>> emb(m + 1);
    for (int d = 0; d <= m; ++d) emb[d] = moment_embedding(batch(d), k);

    // Unit-direction coefficients accumulated per domain, applied once to
    // the k-th power derivative below.
    std::vector<std::vector<double>> coef;
    if (with_grad) coef.assign(m + 1, std::vector<double>(static_cast<std::size_t>(dim), 0.0));

    auto add_pair = [&](int a, int b, double weight) {
      double sq = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double d = emb[a][j] - emb[b][j];
        sq += d * d;
      }
      const double dist = std::sqrt(sq);
      out.pairs.push_back({k, a, b, dist});
      out.value += weight * dist;
      if (with_grad && dist > 0.0) {
        for (int j = 0; j < dim; ++j) {
          const double u = weight * (emb[a][j] - emb[b][j]) / dist;
          coef[a][j] += u;
          coef[b][j] -= u;
        }
      }
    };

    for (int i = 0; i < m; ++i) add_pair(i, m, st_coef);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) add_pair(i, j, ss_coef);

    if (with_grad) {
      for (int d = 0; d <= m; ++d) {
        const Mat<T>& x = batch(d);
        Mat<T>& g = out.grads[d];
        const double inv_n = 1.0 / x.rows;
        for (int v = 0; v < x.rows; ++v) {
          const T* xr = x.v.data() + static_cast<std::size_t>(v) * x.cols;
          T* gr = g.v.data() + static_cast<std::size_t>(v) * g.cols;
          for (int j = 0; j < dim; ++j) {
            const double dpow = k * detail::int_pow(static_cast<double>(xr[j]), k - 1);
            gr[j] = static_cast<T>(static_cast<double>(gr[j]) + coef[d][j] * dpow * inv_n);
          }
        }
      }
    }
  }
  return out;
}

/// One domain's minibatch with its clip draw frozen for the step: the same
/// clips serve the forward pass, the attention statistics, and backward.
template <class T>
struct DomainBatch {
  std::string domain;
  std::vector<Mat<T>> frames;  // per video, h x feature_dim
  std::vector<int> labels;     // empty for the unlabeled target
  std::vector<std::vector<std::vector<ClipIndex>>> clips;  // [scale idx][video]
  Mat<T> frame_mean;           // batch x feature_dim spatial features

  int batch_size() const { return static_cast<int>(frames.size()); }
};

template <class T>
Mat<T> frame_mean_features(const std::vector<Mat<T>>& frames) {
  if (frames.empty()) fail(ErrorKind::Batch, "no videos in batch");
  Mat<T> out(static_cast<int>(frames.size()), frames.front().cols);
  for (std::size_t v = 0; v < frames.size(); ++v) {
    if (frames[v].cols != out.cols)
      fail(ErrorKind::Shape, "video feature dim " + std::to_string(frames[v].cols) + " vs " +
                                 std::to_string(out.cols));
    auto mean = column_means(frames[v]);
    for (int j = 0; j < out.cols; ++j) out(static_cast<int>(v), j) = static_cast<T>(mean[j]);
  }
  return out;
}

template <class T>
struct ScaleForward {
  Mat<T> clip_input;           // clip rows x (scale * feature_dim)
  std::vector<int> row_begin;  // per video, size batch+1
  MlpCache<T> cache;
  Mat<T> lt;                   // batch x temporal_dim
};

template <class T>
struct PipelineForward {
  std::vector<std::vector<ScaleForward<T>>> domains;  // [domain][scale idx]
  std::vector<Mat<T>> t_hat;                          // per domain, batch x temporal_dim
};

template <class T>
PipelineForward<T> forward_local_features(const Model<T>& model,
                                          std::span<const DomainBatch<T>> batches) {
  model.cfg.validate();
  const int d_f = model.cfg.feature_dim;
  const int d_t = model.cfg.temporal_dim;
  const auto& scales = model.cfg.scales;

  PipelineForward<T> fwd;
  fwd.domains.resize(batches.size());
  fwd.t_hat.reserve(batches.size());

  for (std::size_t dom = 0; dom < batches.size(); ++dom) {
    const DomainBatch<T>& batch = batches[dom];
    const int b = batch.batch_size();
    if (b == 0) fail(ErrorKind::Batch, "empty batch for domain " + batch.domain);
    if (batch.clips.size() != scales.size())
      fail(ErrorKind::Config, "clip lists cover " + std::to_string(batch.clips.size()) +
                                  " scales, model has " + std::to_string(scales.size()));
    auto& per_scale = fwd.domains[dom];
    per_scale.resize(scales.size());

    Mat<T> t_hat(b, d_t);
    for (std::size_t si = 0; si < scales.size(); ++si) {
      const int r = scales[si];
      const auto& clip_lists = batch.clips[si];
      if (static_cast<int>(clip_lists.size()) != b)
        fail(ErrorKind::Config, "clip lists for " + std::to_string(clip_lists.size()) +
                                    " videos, batch has " + std::to_string(b));
      ScaleForward<T>& sf = per_scale[si];
      sf.row_begin.resize(b + 1, 0);
      int total_rows = 0;
      for (int v = 0; v < b; ++v) {
        sf.row_begin[v] = total_rows;
        total_rows += static_cast<int>(clip_lists[v].size());
      }
      sf.row_begin[b] = total_rows;
      if (total_rows == 0) fail(ErrorKind::Batch, "no clips at scale " + std::to_string(r));

      sf.clip_input = Mat<T>(total_rows, r * d_f);
      for (int v = 0; v < b; ++v) {
        const Mat<T>& frames = batch.frames[v];
        if (frames.cols != d_f)
          fail(ErrorKind::Shape, "frame feature dim " + std::to_string(frames.cols) + " vs model " +
                                     std::to_string(d_f));
        for (std::size_t z = 0; z < clip_lists[v].size(); ++z) {
          const ClipIndex& clip = clip_lists[v][z];
          if (clip.scale != r) fail(ErrorKind::Scale, "clip scale mismatch at scale " + std::to_string(r));
          T* dst = sf.clip_input.v.data() +
                   static_cast<std::size_t>(sf.row_begin[v] + static_cast<int>(z)) * sf.clip_input.cols;
          for (int kk = 0; kk < r; ++kk) {
            const int f = clip.frames[kk];
            if (f < 0 || f >= frames.rows)
              fail(ErrorKind::Index, "clip frame " + std::to_string(f) + " outside [0, " +
                                         std::to_string(frames.rows) + ")");
            const T* src = frames.v.data() + static_cast<std::size_t>(f) * d_f;
            std::copy(src, src + d_f, dst + static_cast<std::size_t>(kk) * d_f);
          }
        }
      }

      Mat<T> rows = mlp_forward(model.integrators[si], sf.clip_input, &sf.cache);
      sf.lt = Mat<T>(b, d_t);
      for (int v = 0; v < b; ++v) {
        std::vector<double> acc(static_cast<std::size_t>(d_t), 0.0);
        for (int row = sf.row_begin[v]; row < sf.row_begin[v + 1]; ++row) {
          const T* rr = rows.v.data() + static_cast<std::size_t>(row) * d_t;
          for (int j = 0; j < d_t; ++j) acc[j] += static_cast<double>(rr[j]);
        }
        T* ltr = sf.lt.v.data() + static_cast<std::size_t>(v) * d_t;
        for (int j = 0; j < d_t; ++j) {
          ltr[j] = static_cast<T>(acc[j]);
          t_hat(v, j) += ltr[j];
        }
      }
    }
    fwd.t_hat.push_back(std::move(t_hat));
  }
  return fwd;
}

/// Batch-level attention statistics for one training step. The weights are
/// treated as constants by the loss; no gradient flows through them.
struct StepAttention {
  AttentionWeights weights;
  std::vector<double> local_discrepancy;   // per scale
  double global_discrepancy = 0.0;         // on the raw additive aggregate
  std::vector<double> dominance;           // per scale
  std::vector<std::vector<double>> confidence;  // [source][scale]
};

namespace detail {
inline std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

inline std::vector<double> one_hot_weights(std::size_t n, std::size_t hot) {
  std::vector<double> w(n, 0.0);
  w[hot] = 1.0;
  return w;
}
}  // namespace detail

template <class T>
StepAttention step_attention(const Model<T>& model, const PipelineForward<T>& fwd,
                             std::span<const DomainBatch<T>> batches, Variant variant,
                             const MomentConfig& moments) {
  const std::size_t n_domains = batches.size();
  if (n_domains < 2) fail(ErrorKind::Config, "need at least one source and the target");
  const std::size_t m = n_domains - 1;
  const std::size_t n_scales = model.cfg.scales.size();

  StepAttention att;

  // Per-scale local discrepancies and the raw-aggregate discrepancy (Eq. 9
  // statistics); only needed when a dominance rule looks at them.
  att.local_discrepancy.resize(n_scales, 0.0);
  for (std::size_t si = 0; si < n_scales; ++si) {
    std::vector<Mat<T>> lt_sources;
    lt_sources.reserve(m);
    for (std::size_t dom = 0; dom < m; ++dom) lt_sources.push_back(fwd.domains[dom][si].lt);
    att.local_discrepancy[si] =
        moment_discrepancy<T>(lt_sources, fwd.domains[m][si].lt, moments, false).value;
  }
  {
    std::vector<Mat<T>> that_sources(fwd.t_hat.begin(), fwd.t_hat.end() - 1);
    att.global_discrepancy = moment_discrepancy<T>(that_sources, fwd.t_hat.back(), moments, false).value;
  }

  switch (variant) {
    case Variant::DominanceMin:
    case Variant::DominanceMax: {
      std::size_t pick = 0;
      for (std::size_t si = 1; si < n_scales; ++si) {
        const bool better = variant == Variant::DominanceMin
                                ? att.local_discrepancy[si] < att.local_discrepancy[pick]
                                : att.local_discrepancy[si] > att.local_discrepancy[pick];
        if (better) pick = si;
      }
      att.dominance = detail::one_hot_weights(n_scales, pick);
      break;
    }
    case Variant::NoLocalAttention:
    case Variant::SourceOnly:
    case Variant::NoDominance:
      att.dominance = detail::uniform_weights(n_scales);
      break;
    default:
      att.dominance = dominance_weights(att.global_discrepancy, att.local_discrepancy);
      break;
  }

  const bool need_confidence = variant == Variant::Full || variant == Variant::NoDominance ||
                               variant == Variant::DominanceMin || variant == Variant::DominanceMax ||
                               variant == Variant::EnsembleAvg || variant == Variant::EnsembleSrcAccuracy;
  att.confidence.assign(m, std::vector<double>(n_scales, 1.0));
  if (need_confidence) {
    for (std::size_t dom = 0; dom < m; ++dom) {
      for (std::size_t si = 0; si < n_scales; ++si) {
        const Mat<T> probs = softmax_rows(mlp_forward(model.classifiers[dom], fwd.domains[dom][si].lt));
        std::vector<double> p(static_cast<std::size_t>(probs.cols));
        double mean = 0.0;
        for (int v = 0; v < probs.rows; ++v) {
          for (int c = 0; c < probs.cols; ++c) p[static_cast<std::size_t>(c)] = probs(v, c);
          mean += confidence_weight(p);
        }
        att.confidence[dom][si] = mean / probs.rows;
      }
    }
  }

  att.weights.source.resize(m);
  for (std::size_t dom = 0; dom < m; ++dom) {
    switch (variant) {
      case Variant::NoLocalAttention:
        att.weights.source[dom].assign(n_scales, 1.0);  // plain additive aggregate
        break;
      case Variant::SourceOnly:
        att.weights.source[dom] = detail::uniform_weights(n_scales);
        break;
      case Variant::NoConfidence:
        att.weights.source[dom] = target_weights(att.dominance);
        break;
      case Variant::NoDominance: {
        double sum = 0.0;
        for (double c : att.confidence[dom]) sum += c;
        att.weights.source[dom] = sum < 1e-12 ? detail::uniform_weights(n_scales)
                                              : att.confidence[dom];
        if (sum >= 1e-12)
          for (double& w : att.weights.source[dom]) w /= sum;
        break;
      }
      default:
        att.weights.source[dom] = combine_weights(att.confidence[dom], att.dominance);
        break;
    }
  }
  switch (variant) {
    case Variant::NoLocalAttention:
      att.weights.target.assign(n_scales, 1.0);
      break;
    case Variant::SourceOnly:
    case Variant::NoDominance:
      att.weights.target = detail::uniform_weights(n_scales);
      break;
    default:
      att.weights.target = target_weights(att.dominance);
      break;
  }
  return att;
}

struct LossBreakdown {
  std::vector<double> cls;  // per source, same order as the batches
  double d_f = 0.0;
  double d_t = 0.0;
  double lambda_df = 0.0;
  double lambda_dt = 0.0;
  double total = 0.0;
};

struct LossConfig {
  double lambda_df = 0.005;
  double lambda_dt = 0.01;
  MomentConfig moments;
};

template <class T>
struct TamanLossResult {
  LossBreakdown breakdown;
  Model<T> grads;
};

/// Full objective on one step's batches: per-source classification on the
/// attentive global temporal features, plus weighted spatial and temporal
/// moment discrepancies. `batches` is the M source batches followed by the
/// unlabeled target batch. The attention weights enter as fixed per-domain
/// per-scale coefficients.
template <class T>
TamanLossResult<T> taman_loss(const Model<T>& model, std::span<const DomainBatch<T>> batches,
                              const AttentionWeights& weights, const LossConfig& cfg,
                              PipelineForward<T>* prebuilt = nullptr, bool with_grads = true) {
  if (batches.size() < 2) fail(ErrorKind::Config, "need at least one source and the target");
  const std::size_t m = batches.size() - 1;
  if (!batches.back().labels.empty())
    fail(ErrorKind::Data, "target batch must be unlabeled");
  if (weights.source.size() != m)
    fail(ErrorKind::Config, "attention weights for " + std::to_string(weights.source.size()) +
                                " sources, batches have " + std::to_string(m));
  const std::size_t n_scales = model.cfg.scales.size();
  for (const auto& w : weights.source)
    if (w.size() != n_scales) fail(ErrorKind::Config, "source weights do not cover all scales");
  if (weights.target.size() != n_scales)
    fail(ErrorKind::Config, "target weights do not cover all scales");

  PipelineForward<T> local_fwd;
  PipelineForward<T>* fwd = prebuilt;
  if (!fwd) {
    local_fwd = forward_local_features(model, batches);
    fwd = &local_fwd;
  }

  const int d_t = model.cfg.temporal_dim;

  // Attentive global temporal feature per domain.
  std::vector<Mat<T>> t(batches.size());
  for (std::size_t dom = 0; dom < batches.size(); ++dom) {
    const int b = batches[dom].batch_size();
    const std::vector<double>& w = dom == m ? weights.target : weights.source[dom];
    Mat<T> tm(b, d_t);
    for (std::size_t si = 0; si < n_scales; ++si) axpy(tm, w[si], fwd->domains[dom][si].lt);
    t[dom] = std::move(tm);
  }

  TamanLossResult<T> out;
  out.breakdown.lambda_df = cfg.lambda_df;
  out.breakdown.lambda_dt = cfg.lambda_dt;
  out.breakdown.cls.resize(m, 0.0);

  // Classification on every source.
  std::vector<MlpCache<T>> cls_caches(m);
  std::vector<Mat<T>> cls_logit_grads(m);
  for (std::size_t dom = 0; dom < m; ++dom) {
    const DomainBatch<T>& batch = batches[dom];
    if (static_cast<int>(batch.labels.size()) != batch.batch_size())
      fail(ErrorKind::Data, "source batch " + batch.domain + " is missing labels");
    Mat<T> logits = mlp_forward(model.classifiers[dom], t[dom], &cls_caches[dom]);
    auto ce = softmax_cross_entropy(logits, std::span<const int>(batch.labels));
    out.breakdown.cls[dom] = ce.loss;
    cls_logit_grads[dom] = std::move(ce.logit_grad);
  }

  // Temporal discrepancy on the attentive global features (with gradients)
  // and spatial discrepancy on the per-video frame means (inputs, so no
  // parameter gradient path).
  std::vector<Mat<T>> t_sources(t.begin(), t.end() - 1);
  auto disc_t = moment_discrepancy<T>(t_sources, t.back(), cfg.moments, with_grads);
  out.breakdown.d_t = disc_t.value;

  std::vector<Mat<T>> f_sources;
  f_sources.reserve(m);
  for (std::size_t dom = 0; dom < m; ++dom) f_sources.push_back(batches[dom].frame_mean);
  out.breakdown.d_f =
      moment_discrepancy<T>(f_sources, batches.back().frame_mean, cfg.moments, false).value;

  double total = cfg.lambda_df * out.breakdown.d_f + cfg.lambda_dt * out.breakdown.d_t;
  for (double c : out.breakdown.cls) total += c;
  out.breakdown.total = total;

  if (!with_grads) return out;

  out.grads = model_zeros_like(model);

  // d total / d t per domain: classification path for sources, temporal
  // discrepancy path for everyone.
  std::vector<Mat<T>> dt(batches.size());
  for (std::size_t dom = 0; dom < batches.size(); ++dom) {
    dt[dom] = Mat<T>(t[dom].rows, t[dom].cols);
    axpy(dt[dom], cfg.lambda_dt, disc_t.grads[dom]);
  }
  for (std::size_t dom = 0; dom < m; ++dom) {
    Mat<T> from_cls = mlp_backward_accumulate(model.classifiers[dom], cls_caches[dom],
                                              cls_logit_grads[dom], out.grads.classifiers[dom], true);
    axpy(dt[dom], 1.0, from_cls);
  }

  // Through the attentive aggregation into each integration net. Every clip
  // row of video v receives that video's upstream gradient.
  for (std::size_t dom = 0; dom < batches.size(); ++dom) {
    const std::vector<double>& w = dom == m ? weights.target : weights.source[dom];
    for (std::size_t si = 0; si < n_scales; ++si) {
      const ScaleForward<T>& sf = fwd->domains[dom][si];
      if (w[si] == 0.0) continue;
      Mat<T> upstream(sf.clip_input.rows, d_t);
      const int b = batches[dom].batch_size();
      for (int v = 0; v < b; ++v) {
        const T* src = dt[dom].v.data() + static_cast<std::size_t>(v) * d_t;
        for (int row = sf.row_begin[v]; row < sf.row_begin[v + 1]; ++row) {
          T* dst = upstream.v.data() + static_cast<std::size_t>(row) * d_t;
          for (int j = 0; j < d_t; ++j) dst[j] = static_cast<T>(w[si] * static_cast<double>(src[j]));
        }
      }
      mlp_backward_accumulate(model.integrators[si], sf.cache, upstream, out.grads.integrators[si],
                              false);
    }
  }
  return out;
}

}  // namespace taman
