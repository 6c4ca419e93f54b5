// SPDX-License-Identifier: Apache-2.0
#include "emnav/rl/reward.hpp"

#include <stdexcept>
#include <string>

namespace emnav::rl {

std::string_view reward_mode_name(RewardMode m) noexcept { return m == RewardMode::Point ? "point" : "room"; }

RewardMode reward_mode_from_name(std::string_view name) {
  if (name == "point") return RewardMode::Point;
  if (name == "room") return RewardMode::Room;
  throw std::invalid_argument("unknown reward mode '" + std::string(name) + "'");
}

void RewardConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(success_threshold > 0.0)) throw std::invalid_argument("success threshold must be positive");
}

double goal_distance(const House& house, NodeId node, const Goal& goal, RewardMode mode) {
  if (mode == RewardMode::Point) {
    if (goal.node < 0) throw std::invalid_argument("POINT reward needs a goal node");
    return house.distance(node, goal.node);
  }
  if (goal.room < 0) throw std::invalid_argument("ROOM reward needs a goal room");
  return world::room_distance(house, node, goal.room);
}

double immediate_reward(const House& house, NodeId from, NodeId to, const Goal& goal, const RewardConfig& cfg) {
  return goal_distance(house, from, goal, cfg.mode) - goal_distance(house, to, goal, cfg.mode);
}

double final_reward(const House& house, NodeId end, const Goal& goal, const RewardConfig& cfg) {
  return goal_distance(house, end, goal, cfg.mode) <= cfg.success_threshold ? 1.0 : 0.0;
}

std::vector<double> episode_rewards(const House& house, std::span<const NodeId> path, const Goal& goal,
                                    const RewardConfig& cfg) {
  if (path.empty()) throw std::invalid_argument("episode_rewards: empty path");
  std::vector<double> r;
  r.reserve(path.size());
  for (std::size_t t = 0; t + 1 < path.size(); ++t) r.push_back(immediate_reward(house, path[t], path[t + 1], goal, cfg));
  r.push_back(final_reward(house, path.back(), goal, cfg));
  return r;
}

std::vector<double> discounted_return(std::span<const double> rewards, double gamma) {
  std::vector<double> out(rewards.size());
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    out[t] = acc;
  }
  return out;
}

void assign_rewards(EpisodeTrace& trace, const House& house, const Goal& goal, const RewardConfig& cfg) {
  if (trace.steps.size() != trace.path.size())
    throw std::invalid_argument("trace has " + std::to_string(trace.steps.size()) + " steps for a path of " +
                                std::to_string(trace.path.size()) + " nodes");
  const std::vector<double> r = episode_rewards(house, trace.path, goal, cfg);
  const std::vector<double> ret = discounted_return(r, cfg.gamma);
  for (std::size_t t = 0; t < r.size(); ++t) {
    trace.steps[t].reward = r[t];
    trace.steps[t].ret = ret[t];
  }
}

}  // namespace emnav::rl
