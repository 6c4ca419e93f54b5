// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "emnav/world/house.hpp"

namespace emnav::world {

struct AgentPose {
  NodeId node = 0;
  double heading = 0.0;
  double elevation = 0.0;

  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

/// [sin phi; cos phi; sin theta; cos theta]
Eigen::Vector4d orientation_feature(double heading, double elevation);

/// One navigable direction. Index 0 of `navigable_directions` is always STOP;
/// its feature is zero here and replaced by a learned vector in the model.
struct Direction {
  NodeId target = 0;
  bool stop = false;
  double heading = 0.0;
  double elevation = 0.0;
  Vector feature;  // f + 4
};

/// STOP followed by one entry per neighbor (ascending node id). Each neighbor's
/// feature is the view feature of the view angle nearest the edge, followed by
/// the edge orientation relative to the agent.
std::vector<Direction> navigable_directions(const House& house, const AgentPose& pose);

/// k x (f + 4): view features with each view's orientation relative to the agent.
Matrix observe_panorama(const House& house, const AgentPose& pose);

struct StepResult {
  AgentPose pose;
  bool terminal = false;
};

/// Apply `action` (an index into `navigable_directions(house, pose)`). STOP ends
/// the episode at the current node.
StepResult step(const House& house, const AgentPose& pose, std::size_t action);

/// Index of the direction leading to `target`, or 0 (STOP) when target == pose.node.
std::size_t action_toward(const House& house, const AgentPose& pose, NodeId target);

}  // namespace emnav::world
