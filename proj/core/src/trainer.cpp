#include "taman/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "taman/rng.hpp"
#include "taman/temporal.hpp"

namespace taman {

namespace {

using json = nlohmann::ordered_json;

/// Endless shuffled walk over one domain's video indices.
struct DomainStream {
  const Dataset* data = nullptr;
  std::uint64_t seed = 0;
  std::uint64_t domain_tag = 0;
  std::vector<int> order;
  std::size_t pos = 0;
  int wraps = 0;

  void reshuffle() {
    order.resize(static_cast<std::size_t>(data->size()));
    for (int i = 0; i < data->size(); ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng(hash_mix({seed, 0x5F0FFull, domain_tag, static_cast<std::uint64_t>(wraps)}));
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.next_below(order.size() - i));
      std::swap(order[i], order[j]);
    }
    pos = 0;
  }

  int next() {
    if (pos >= order.size()) {
      ++wraps;
      reshuffle();
    }
    return order[pos++];
  }
};

Variant training_variant(Variant v) {
  // The ensemble schemas only change evaluation.
  if (v == Variant::EnsembleAvg || v == Variant::EnsembleSrcAccuracy) return Variant::Full;
  return v;
}

DomainBatch<float> build_batch(const Dataset& data, std::span<const int> picks,
                               const std::vector<int>& scales, int clips_per_scale,
                               bool labeled, std::uint64_t clip_seed_base, int domain_index) {
  DomainBatch<float> batch;
  batch.domain = data.domain;
  batch.frames.reserve(picks.size());
  if (labeled) batch.labels.reserve(picks.size());
  for (int idx : picks) {
    batch.frames.push_back(data.videos[static_cast<std::size_t>(idx)].frames);
    if (labeled) batch.labels.push_back(data.labels[static_cast<std::size_t>(idx)]);
  }
  batch.clips.resize(scales.size());
  ScaleConfig sample_cfg{scales, clips_per_scale, SamplingMode::TrainRandom};
  for (std::size_t si = 0; si < scales.size(); ++si) {
    batch.clips[si].resize(picks.size());
    for (std::size_t slot = 0; slot < picks.size(); ++slot) {
      const std::uint64_t seed = hash_mix({clip_seed_base, static_cast<std::uint64_t>(domain_index),
                                           static_cast<std::uint64_t>(slot)});
      batch.clips[si][slot] =
          sample_clips(batch.frames[slot].rows, scales[si], sample_cfg, seed).clips;
    }
  }
  batch.frame_mean = frame_mean_features(batch.frames);
  return batch;
}

void apply_sgd(ModelF& model, const ModelF& grads, ModelF& velocity, const SgdConfig& cfg) {
  for (std::size_t s = 0; s < model.integrators.size(); ++s)
    for (std::size_t l = 0; l < model.integrators[s].layers.size(); ++l) {
      sgd_step(model.integrators[s].layers[l].w, grads.integrators[s].layers[l].w,
               velocity.integrators[s].layers[l].w, cfg);
      sgd_step(model.integrators[s].layers[l].b, grads.integrators[s].layers[l].b,
               velocity.integrators[s].layers[l].b, cfg);
    }
  for (std::size_t c = 0; c < model.classifiers.size(); ++c)
    for (std::size_t l = 0; l < model.classifiers[c].layers.size(); ++l) {
      sgd_step(model.classifiers[c].layers[l].w, grads.classifiers[c].layers[l].w,
               velocity.classifiers[c].layers[l].w, cfg);
      sgd_step(model.classifiers[c].layers[l].b, grads.classifiers[c].layers[l].b,
               velocity.classifiers[c].layers[l].b, cfg);
    }
}

}  // namespace

std::string to_json_line(const MetricsRecord& rec) {
  json j;
  j["epoch"] = rec.epoch;
  json cls = json::object();
  for (const auto& [domain, loss] : rec.cls_loss) cls[domain] = loss;
  j["cls_loss"] = cls;
  j["d_f"] = rec.d_f;
  j["d_t"] = rec.d_t;
  j["total"] = rec.total;
  j["lr"] = rec.lr;
  j["wall_ms"] = rec.wall_ms;
  return j.dump();
}

TrainResult train(const RunConfig& cfg, std::span<const Dataset> sources,
                  const Dataset& target_train) {
  cfg.validate();
  if (sources.empty()) fail(ErrorKind::Data, "need at least one source domain");
  for (const auto& src : sources) {
    if (src.size() == 0) fail(ErrorKind::Data, "source domain '" + src.domain + "' is empty");
    if (!src.labeled())
      fail(ErrorKind::Data, "source domain '" + src.domain + "' has unlabeled videos");
  }
  if (target_train.size() == 0) fail(ErrorKind::Data, "target domain is empty");
  for (int l : target_train.labels)
    if (l >= 0)
      fail(ErrorKind::Data, "target-train manifest carries labels; adaptation input must be unlabeled");

  const int class_count = sources.front().class_count;
  const int feature_dim = sources.front().videos.front().frames.cols;
  int min_frames = sources.front().videos.front().frames.rows;
  for (const Dataset& ds : sources) {
    if (ds.class_count != class_count)
      fail(ErrorKind::Data, "source '" + ds.domain + "' declares " + std::to_string(ds.class_count) +
                                " classes, expected " + std::to_string(class_count));
    for (const auto& v : ds.videos) {
      if (v.frames.cols != feature_dim)
        fail(ErrorKind::Shape, "feature dim " + std::to_string(v.frames.cols) + " in '" + ds.domain +
                                   "', expected " + std::to_string(feature_dim));
      min_frames = std::min(min_frames, v.frames.rows);
    }
  }
  for (const auto& v : target_train.videos) {
    if (v.frames.cols != feature_dim)
      fail(ErrorKind::Shape, "feature dim " + std::to_string(v.frames.cols) + " in target, expected " +
                                 std::to_string(feature_dim));
    min_frames = std::min(min_frames, v.frames.rows);
  }
  if (min_frames < 2) fail(ErrorKind::Data, "videos must have at least 2 frames");

  ModelConfig model_cfg;
  model_cfg.feature_dim = feature_dim;
  model_cfg.temporal_dim = cfg.temporal_dim;
  model_cfg.hidden_dim = cfg.hidden_dim;
  model_cfg.class_count = class_count;
  model_cfg.frame_count = min_frames;
  model_cfg.scales = cfg.effective_scales(min_frames);
  model_cfg.clips_per_scale = cfg.clips_per_scale;

  std::vector<std::string> source_names;
  for (const auto& src : sources) source_names.push_back(src.domain);
  ModelF model = init_model(model_cfg, source_names, cfg.seed);
  ModelF velocity = model_zeros_like(model);

  const Variant variant = training_variant(cfg.variant);
  LossConfig loss_cfg;
  loss_cfg.lambda_df = variant == Variant::SourceOnly ? 0.0 : cfg.lambda_df;
  loss_cfg.lambda_dt = variant == Variant::SourceOnly ? 0.0 : cfg.lambda_dt;
  loss_cfg.moments.orders = cfg.moment_orders;

  SgdConfig sgd_cfg{static_cast<float>(cfg.lr), static_cast<float>(cfg.momentum),
                    static_cast<float>(cfg.weight_decay)};

  std::vector<DomainStream> streams(sources.size() + 1);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    streams[i].data = &sources[i];
    streams[i].seed = cfg.seed;
    streams[i].domain_tag = fnv1a64(sources[i].domain);
    streams[i].reshuffle();
  }
  streams.back().data = &target_train;
  streams.back().seed = cfg.seed;
  streams.back().domain_tag = hash_mix({fnv1a64(target_train.domain), 0x7A67ull});
  streams.back().reshuffle();

  int max_source = 0;
  for (const auto& src : sources) max_source = std::max(max_source, src.size());
  const int steps_per_epoch = (max_source + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t n_scales = model_cfg.scales.size();

  TrainResult result;
  RunConfig resolved = cfg;
  resolved.scales = model_cfg.scales;
  result.checkpoint.config = resolved;
  result.checkpoint.variant = cfg.variant;

  ModelF last_good_model = model;
  std::vector<double> last_good_target_weights(n_scales, 1.0 / static_cast<double>(n_scales));

  for (int epoch = 0; epoch < cfg.epochs && !result.diverged; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    std::vector<double> cls_acc(sources.size(), 0.0);
    double df_acc = 0.0, dt_acc = 0.0, total_acc = 0.0;
    std::vector<double> target_weight_acc(n_scales, 0.0);

    for (int step = 0; step < steps_per_epoch; ++step) {
      std::vector<DomainBatch<float>> batches;
      batches.reserve(streams.size());
      const std::uint64_t clip_seed_base =
          hash_mix({cfg.seed, 0xC11B5ull, static_cast<std::uint64_t>(epoch),
                    static_cast<std::uint64_t>(step)});
      for (std::size_t d = 0; d < streams.size(); ++d) {
        std::vector<int> picks(static_cast<std::size_t>(cfg.batch_size));
        for (int& p : picks) p = streams[d].next();
        const bool is_target = d + 1 == streams.size();
        batches.push_back(build_batch(*streams[d].data, picks, model_cfg.scales,
                                      cfg.clips_per_scale, !is_target, clip_seed_base,
                                      static_cast<int>(d)));
      }

      auto fwd = forward_local_features<float>(model, batches);
      const StepAttention att =
          step_attention<float>(model, fwd, batches, variant, loss_cfg.moments);
      auto loss = taman_loss<float>(model, batches, att.weights, loss_cfg, &fwd, true);

      if (!std::isfinite(loss.breakdown.total)) {
        result.diverged = true;
        result.divergence_message = "non-finite loss at epoch " + std::to_string(epoch) +
                                    " step " + std::to_string(step) +
                                    "; keeping the last completed epoch";
        break;
      }

      apply_sgd(model, loss.grads, velocity, sgd_cfg);

      for (std::size_t j = 0; j < sources.size(); ++j) cls_acc[j] += loss.breakdown.cls[j];
      df_acc += loss.breakdown.d_f;
      dt_acc += loss.breakdown.d_t;
      total_acc += loss.breakdown.total;
      for (std::size_t si = 0; si < n_scales; ++si)
        target_weight_acc[si] += att.weights.target[si];
    }
    if (result.diverged) break;

    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - epoch_start)
                          .count();
    MetricsRecord rec;
    rec.epoch = epoch;
    for (std::size_t j = 0; j < sources.size(); ++j)
      rec.cls_loss.emplace_back(sources[j].domain, cls_acc[j] / steps_per_epoch);
    rec.d_f = df_acc / steps_per_epoch;
    rec.d_t = dt_acc / steps_per_epoch;
    rec.total = total_acc / steps_per_epoch;
    rec.lr = cfg.lr;
    rec.wall_ms = wall;
    result.metrics.push_back(std::move(rec));

    last_good_model = model;
    for (std::size_t si = 0; si < n_scales; ++si)
      last_good_target_weights[si] = target_weight_acc[si] / steps_per_epoch;
  }

  result.checkpoint.model = std::move(last_good_model);
  result.checkpoint.target_scale_weights = std::move(last_good_target_weights);
  return result;
}

GradCheckReport full_pipeline_grad_check(const PipelineCheckSpec& spec) {
  ModelConfig cfg;
  cfg.feature_dim = spec.feature_dim;
  cfg.temporal_dim = spec.temporal_dim;
  cfg.hidden_dim = spec.hidden_dim;
  cfg.class_count = spec.class_count;
  cfg.frame_count = spec.frame_count;
  cfg.scales = spec.scales;
  cfg.clips_per_scale = spec.clips_per_scale;

  std::vector<std::string> names;
  for (int j = 0; j < spec.source_count; ++j) names.push_back("s" + std::to_string(j));

  // The loss is piecewise smooth: a rectifier pre-activation within eps of
  // zero makes the central difference straddle a kink and report a bogus
  // mismatch. Redraw the instance until every hidden pre-activation clears
  // a margin far above the largest single-parameter perturbation.
  const double margin = std::max(1e-3, 16.0 * spec.eps);
  ModelD model;
  std::vector<DomainBatch<double>> batches;
  ScaleConfig sample_cfg{cfg.scales, cfg.clips_per_scale, SamplingMode::TrainRandom};
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt >= 256) fail(ErrorKind::Config, "could not find a kink-free check instance");
    const std::uint64_t attempt_seed = hash_mix({spec.seed, attempt});
    model = model_cast<double>(init_model(cfg, names, attempt_seed));

    batches.clear();
    Rng rng(hash_mix({attempt_seed, 0x6CADull}));
    for (int d = 0; d <= spec.source_count; ++d) {
      DomainBatch<double> batch;
      batch.domain = d == spec.source_count ? "t" : names[static_cast<std::size_t>(d)];
      for (int v = 0; v < spec.batch_size; ++v) {
        MatD frames(cfg.frame_count, cfg.feature_dim);
        for (double& x : frames.v) x = rng.next_uniform(-2.0, 2.0);
        batch.frames.push_back(std::move(frames));
        if (d < spec.source_count)
          batch.labels.push_back(
              static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cfg.class_count))));
      }
      batch.clips.resize(cfg.scales.size());
      for (std::size_t si = 0; si < cfg.scales.size(); ++si) {
        batch.clips[si].resize(static_cast<std::size_t>(spec.batch_size));
        for (int v = 0; v < spec.batch_size; ++v)
          batch.clips[si][static_cast<std::size_t>(v)] =
              sample_clips(cfg.frame_count, cfg.scales[si], sample_cfg, rng.next_u64()).clips;
      }
      batch.frame_mean = frame_mean_features(batch.frames);
      batches.push_back(std::move(batch));
    }

    const auto probe = forward_local_features<double>(model, batches);
    double min_abs_pre = std::numeric_limits<double>::infinity();
    for (const auto& per_scale : probe.domains)
      for (const auto& sf : per_scale)
        for (std::size_t l = 0; l + 1 < sf.cache.pre.size(); ++l)
          for (double x : sf.cache.pre[l].v) min_abs_pre = std::min(min_abs_pre, std::fabs(x));
    if (min_abs_pre > margin) break;
  }

  LossConfig loss_cfg;
  loss_cfg.lambda_df = spec.lambda_df;
  loss_cfg.lambda_dt = spec.lambda_dt;

  // Attention weights are computed once at the base point and then held
  // fixed: they are constants to the optimizer, so the check probes exactly
  // the gradient the training step applies.
  AttentionWeights weights;
  {
    auto fwd = forward_local_features<double>(model, batches);
    weights = step_attention<double>(model, fwd, batches, Variant::Full, loss_cfg.moments).weights;
  }

  auto loss_value = [&]() {
    return taman_loss<double>(model, batches, weights, loss_cfg, nullptr, false).breakdown.total;
  };
  ModelD analytic = taman_loss<double>(model, batches, weights, loss_cfg, nullptr, true).grads;

  std::vector<std::pair<std::string, MatD*>> params;
  for_each_tensor(model, [&](const std::string& name, MatD& t) { params.emplace_back(name, &t); });
  std::vector<const MatD*> grads;
  for_each_tensor(analytic, [&](const std::string&, MatD& t) { grads.push_back(&t); });

  return grad_check(loss_value, params, grads, spec.eps, spec.tolerance);
}

}  // namespace taman
