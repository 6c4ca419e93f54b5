// SPDX-License-Identifier: Apache-2.0
#include "emnav/rl/loss.hpp"

#include <stdexcept>
#include <string>

namespace emnav::rl {

NavigationLoss navigation_loss(Tape& tape, std::span<const EpisodeTrace> traces, double baseline) {
  NavigationLoss out;
  std::vector<Var> rl_terms, bc_terms;
  for (const auto& tr : traces)
    for (const auto& s : tr.steps) {
      if (s.forced) continue;
      if (tr.cloned) {
        bc_terms.push_back(tape.pick(s.log_probs, static_cast<Eigen::Index>(s.teacher_action)));
      } else {
        rl_terms.push_back(
            tape.scale(tape.pick(s.log_probs, static_cast<Eigen::Index>(s.action)), -(s.ret - baseline)));
      }
    }
  if (rl_terms.empty() && bc_terms.empty())
    throw std::invalid_argument("navigation_loss: batch has neither sampled nor teacher-forced steps");

  auto mean_of = [&](const std::vector<Var>& terms, double sign) {
    if (terms.empty()) return tape.constant(Matrix::Zero(1, 1));
    return tape.scale(tape.sum(tape.concat(terms)), sign / static_cast<double>(terms.size()));
  };
  out.rl_steps = rl_terms.size();
  out.bc_steps = bc_terms.size();
  out.rl = mean_of(rl_terms, 1.0);
  out.bc = mean_of(bc_terms, -1.0);
  out.total = tape.add(out.rl, out.bc);
  return out;
}

double estimate_baseline(std::span<const EpisodeTrace> traces) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& tr : traces) {
    if (tr.cloned) continue;
    for (const auto& s : tr.steps)
      if (!s.forced) {
        sum += s.ret;
        ++n;
      }
  }
  if (n == 0) throw std::invalid_argument("estimate_baseline: no sampled steps");
  return sum / static_cast<double>(n);
}

Var env_loss(Tape& tape, std::span<const Var> log_probs, std::span<const int> labels) {
  if (log_probs.size() != labels.size()) throw std::invalid_argument("env_loss: one label per prediction required");
  if (log_probs.empty()) throw std::invalid_argument("env_loss: no predictions");
  std::vector<Var> picked;
  picked.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto classes = tape.value(log_probs[i]).size();
    if (labels[i] < 0 || labels[i] >= classes)
      throw std::out_of_range("env_loss: label " + std::to_string(labels[i]) + " outside " + std::to_string(classes) +
                              " classes");
    picked.push_back(tape.pick(log_probs[i], labels[i]));
  }
  return tape.scale(tape.sum(tape.concat(picked)), -1.0 / static_cast<double>(picked.size()));
}

}  // namespace emnav::rl
