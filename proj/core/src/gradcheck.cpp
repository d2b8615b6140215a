#include "taman/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace taman {

namespace {
constexpr double kRelErrFloor = 1e-8;

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), kRelErrFloor});
  return std::fabs(analytic - numeric) / denom;
}
}  // namespace

GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<const std::pair<std::string, MatD*>> params,
                           std::span<const MatD* const> analytic, double eps,
                           double tolerance) {
  GradCheckReport report;
  report.tolerance = tolerance;
  if (params.size() != analytic.size())
    fail(ErrorKind::Shape, "grad_check params/analytic count mismatch");

  for (std::size_t t = 0; t < params.size(); ++t) {
    const auto& [name, tensor] = params[t];
    const MatD& grad = *analytic[t];
    check_same_shape(*tensor, grad, "grad_check tensor/grad");

    GradCheckReport::TensorStat stat;
    stat.name = name;
    for (std::size_t i = 0; i < tensor->v.size(); ++i) {
      const double saved = tensor->v[i];
      tensor->v[i] = saved + eps;
      const double plus = loss();
      tensor->v[i] = saved - eps;
      const double minus = loss();
      tensor->v[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        report.error = "non-finite loss while probing " + name + "[" + std::to_string(i) + "]";
        report.pass = false;
        report.tensors.push_back(stat);
        return report;
      }
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = relative_error(grad.v[i], numeric);
      if (err > stat.max_rel_err) {
        stat.max_rel_err = err;
        stat.worst_index = static_cast<int>(i);
        stat.analytic_at_worst = grad.v[i];
        stat.numeric_at_worst = numeric;
      }
    }
    report.max_rel_err = std::max(report.max_rel_err, stat.max_rel_err);
    report.tensors.push_back(std::move(stat));
  }
  report.pass = report.error.empty() && report.max_rel_err < tolerance;
  return report;
}

}  // namespace taman
