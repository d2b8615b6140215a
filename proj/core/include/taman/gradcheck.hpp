#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "taman/matrix.hpp"

namespace taman {

struct GradCheckReport {
  struct TensorStat {
    std::string name;
    double max_rel_err = 0.0;
    int worst_index = -1;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
  };
  std::vector<TensorStat> tensors;
  double max_rel_err = 0.0;
  double tolerance = 1e-3;
  bool pass = false;
  std::string error;  // set when a probe produced a non-finite loss
};

/// Central-difference check of analytic gradients.
///
/// `loss` must be deterministic and read the tensors behind `params`; they
/// are perturbed in place and restored. `analytic[i]` matches `params[i]`.
/// Relative error is |a - n| / max(|a|, |n|, floor) with floor 1e-8.
GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<const std::pair<std::string, MatD*>> params,
                           std::span<const MatD* const> analytic, double eps,
                           double tolerance = 1e-3);

}  // namespace taman
