// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "emnav/autodiff/tape.hpp"

namespace emnav {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  Eigen::Index worst_entry = 0;
  std::size_t entries_checked = 0;
};

/// Central differences against the analytic gradient over every entry of every
/// registered parameter. The tape is replayed in place, so data-dependent
/// choices made while recording (sampled actions) stay fixed.
///
/// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor);
/// the floor keeps entries whose true gradient is ~0 from dominating.
template <typename Scalar>
GradCheckResult finite_diff_check(BasicTape<Scalar>& tape, BasicParameterSet<Scalar>& params, Var loss,
                                  Scalar eps, Scalar floor = Scalar(1e-4)) {
  if (!(eps > Scalar(0))) throw std::invalid_argument("finite_diff_check: eps must be positive");
  if (&tape.parameters() != &params)
    throw std::invalid_argument("finite_diff_check: tape is bound to another parameter set");
  tape.replay();
  const BasicGradients<Scalar> analytic = tape.backward(loss);

  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& value = params.value(p);
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const Scalar saved = value.data()[i];
      value.data()[i] = saved + eps;
      tape.replay();
      const Scalar up = tape.scalar(loss);
      value.data()[i] = saved - eps;
      tape.replay();
      const Scalar down = tape.scalar(loss);
      value.data()[i] = saved;

      const Scalar numeric = (up - down) / (Scalar(2) * eps);
      const Scalar exact = analytic[p].data()[i];
      const Scalar denom = std::max({std::abs(exact), std::abs(numeric), floor});
      const double rel = static_cast<double>(std::abs(exact - numeric) / denom);
      ++result.entries_checked;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_parameter = params.name(p);
        result.worst_entry = i;
      }
    }
  }
  tape.replay();
  return result;
}

}  // namespace emnav
