// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "emnav/autodiff/tape.hpp"
#include "emnav/corpus/samples.hpp"
#include "emnav/world/house.hpp"
#include "emnav/world/navigation.hpp"

namespace emnav::rl {

using world::House;
using world::NodeId;
using world::RoomId;

/// POINT measures distance to the goal node, ROOM to the nearest goal-room node.
enum class RewardMode { Point, Room };

std::string_view reward_mode_name(RewardMode m) noexcept;
RewardMode reward_mode_from_name(std::string_view name);

struct RewardConfig {
  double gamma = 0.95;
  double success_threshold = 3.0;  // d_th, meters
  RewardMode mode = RewardMode::Point;

  /// Throws std::invalid_argument unless 0 <= gamma <= 1 and d_th > 0.
  void validate() const;
};

struct Goal {
  NodeId node = -1;  // target node (required in POINT mode)
  RoomId room = -1;  // goal room (required in ROOM mode)
};

/// D(s): distance from `node` to the goal under `mode`.
double goal_distance(const House& house, NodeId node, const Goal& goal, RewardMode mode);

/// Reward of a non-final step: D(s_t) - D(s_{t+1}).
double immediate_reward(const House& house, NodeId from, NodeId to, const Goal& goal, const RewardConfig& cfg);

/// Reward of the final (STOP) step: 1 if D(s_T) <= d_th else 0.
double final_reward(const House& house, NodeId end, const Goal& goal, const RewardConfig& cfg);

/// Rewards of an episode visiting `path` = s_1..s_T and then stopping: T - 1
/// movement rewards followed by the final reward.
std::vector<double> episode_rewards(const House& house, std::span<const NodeId> path, const Goal& goal,
                                    const RewardConfig& cfg);

/// R_t = sum_{t' >= t} gamma^(t' - t) r_t'.
std::vector<double> discounted_return(std::span<const double> rewards, double gamma);

struct TraceStep {
  world::AgentPose pose;          // s_t
  std::size_t action = 0;         // a_t, index into the directions at s_t (0 = STOP)
  std::size_t teacher_action = 0; // a_t*
  Var log_probs;                  // log pi(. | s_t), one row per direction
  Var latent;                     // z_t
  double reward = 0.0;
  double ret = 0.0;               // R(s_t, a_t)
  bool forced = false;            // STOP imposed at the length limit, not chosen by the policy
};

struct EpisodeTrace {
  corpus::Task task = corpus::Task::Vln;
  bool cloned = false;     // teacher-forced
  bool truncated = false;  // stopped by the length limit
  int house_id = 0;
  int house_label = -1;    // classifier label, -1 when the house is not a training house
  std::vector<TraceStep> steps;
  std::vector<NodeId> path;  // visited nodes s_1..s_T
};

/// Fill rewards and returns of a finished trace.
void assign_rewards(EpisodeTrace& trace, const House& house, const Goal& goal, const RewardConfig& cfg);

}  // namespace emnav::rl
