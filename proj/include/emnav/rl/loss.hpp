// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "emnav/autodiff/tape.hpp"
#include "emnav/rl/reward.hpp"

namespace emnav::rl {

struct NavigationLoss {
  Var total;  // rl + bc
  Var rl;     // mean over sampled policy steps of -(R - b) log pi(a_t)
  Var bc;     // mean over teacher-forced steps of -log pi(a_t*)
  std::size_t rl_steps = 0;
  std::size_t bc_steps = 0;
};

/// Mixed REINFORCE + behavior-cloning loss. Sampled traces feed the RL term,
/// teacher-forced traces the BC term; forced STOP steps feed neither.
NavigationLoss navigation_loss(Tape& tape, std::span<const EpisodeTrace> traces, double baseline);

/// Mean return over the policy steps of sampled traces.
double estimate_baseline(std::span<const EpisodeTrace> traces);

/// Mean negative log-likelihood of the true labels. Each entry of
/// `log_probs` is a C x 1 log-distribution.
Var env_loss(Tape& tape, std::span<const Var> log_probs, std::span<const int> labels);

}  // namespace emnav::rl
