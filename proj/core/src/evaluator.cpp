#include "taman/evaluator.hpp"

#include <cmath>

#include "taman/rng.hpp"
#include "taman/temporal.hpp"

namespace taman {

EvalReport evaluate(const Checkpoint& cp, const Dataset& target_test, EnsembleMode mode,
                    std::span<const double> source_accuracies) {
  const ModelF& model = cp.model;
  const int k = model.cfg.class_count;
  if (target_test.class_count != k)
    fail(ErrorKind::Compatibility, "test data declares " + std::to_string(target_test.class_count) +
                                       " classes, checkpoint has " + std::to_string(k));
  if (target_test.size() == 0) fail(ErrorKind::Data, "empty test set");
  if (!target_test.labeled()) fail(ErrorKind::Data, "test manifest must be fully labeled");
  if (cp.target_scale_weights.size() != model.cfg.scales.size())
    fail(ErrorKind::Compatibility, "checkpoint scale weights do not match its scales");

  const std::size_t m = model.classifiers.size();
  std::vector<double> ensemble_weights;
  if (mode == EnsembleMode::SourceAccuracy) {
    if (source_accuracies.size() != m)
      fail(ErrorKind::Config, "source_accuracy mode needs one accuracy per source classifier");
    double sum = 0.0;
    for (double a : source_accuracies) sum += a;
    if (sum <= 0.0) fail(ErrorKind::Config, "source accuracies sum to zero");
    for (double a : source_accuracies) ensemble_weights.push_back(a / sum);
  } else if (mode == EnsembleMode::Average) {
    ensemble_weights.assign(m, 1.0 / static_cast<double>(m));
  }

  EvalReport report;
  report.class_count = k;
  report.video_count = target_test.size();
  report.per_class.assign(static_cast<std::size_t>(k), 0.0);
  report.mean_ensemble_weight.assign(m, 0.0);
  std::vector<int> per_class_count(static_cast<std::size_t>(k), 0);

  const int d_t = model.cfg.temporal_dim;
  ScaleConfig sample_cfg{model.cfg.scales, model.cfg.clips_per_scale,
                         SamplingMode::EvalDeterministic};
  int correct = 0;

  for (int vi = 0; vi < target_test.size(); ++vi) {
    const VideoFeatures& video = target_test.videos[static_cast<std::size_t>(vi)];
    const int label = target_test.labels[static_cast<std::size_t>(vi)];
    const std::uint64_t video_seed = fnv1a64(video.id);

    // Attentive global temporal feature with the stored per-scale weights.
    std::vector<double> t(static_cast<std::size_t>(d_t), 0.0);
    for (std::size_t si = 0; si < model.cfg.scales.size(); ++si) {
      const double w = cp.target_scale_weights[si];
      if (w == 0.0) continue;
      const auto clips =
          sample_clips(video.frames.rows, model.cfg.scales[si], sample_cfg, video_seed).clips;
      const auto lt = local_temporal_feature(video.frames, clips, model.integrators[si]);
      for (int j = 0; j < d_t; ++j) t[static_cast<std::size_t>(j)] += w * static_cast<double>(lt[static_cast<std::size_t>(j)]);
    }
    MatF t_row(1, d_t);
    for (int j = 0; j < d_t; ++j) t_row(0, j) = static_cast<float>(t[static_cast<std::size_t>(j)]);

    std::vector<std::vector<double>> preds(m);
    for (std::size_t j = 0; j < m; ++j) {
      const MatF probs = softmax_rows(mlp_forward(model.classifiers[j], t_row));
      preds[j].assign(probs.v.begin(), probs.v.end());
    }

    const std::vector<double> w =
        mode == EnsembleMode::Certainty ? prediction_weights(preds) : ensemble_weights;
    const EnsemblePrediction pred = ensemble_predict(preds, w);

    for (std::size_t j = 0; j < m; ++j) report.mean_ensemble_weight[j] += w[j];
    ++per_class_count[static_cast<std::size_t>(label)];
    if (pred.label == label) {
      ++correct;
      report.per_class[static_cast<std::size_t>(label)] += 1.0;
    }
  }

  for (int c = 0; c < k; ++c)
    if (per_class_count[static_cast<std::size_t>(c)] > 0)
      report.per_class[static_cast<std::size_t>(c)] /= per_class_count[static_cast<std::size_t>(c)];
  for (double& w : report.mean_ensemble_weight) w /= target_test.size();
  report.top1 = static_cast<double>(correct) / target_test.size();
  return report;
}

}  // namespace taman
