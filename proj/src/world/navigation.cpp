// SPDX-License-Identifier: Apache-2.0
#include "emnav/world/navigation.hpp"

#include <cmath>

namespace emnav::world {

Eigen::Vector4d orientation_feature(double heading, double elevation) {
  return {std::sin(heading), std::cos(heading), std::sin(elevation), std::cos(elevation)};
}

std::vector<Direction> navigable_directions(const House& house, const AgentPose& pose) {
  const auto adj = house.neighbors(pose.node);
  const int f = house.feature_dim();
  std::vector<Direction> out;
  out.reserve(adj.size() + 1);
  Direction stop;
  stop.target = pose.node;
  stop.stop = true;
  stop.heading = pose.heading;
  stop.elevation = pose.elevation;
  stop.feature = Vector::Zero(f + 4);
  out.push_back(std::move(stop));

  const Matrix& views = house.view_features(pose.node);
  for (const auto& e : adj) {
    Direction d;
    d.target = e.to;
    d.heading = e.heading;
    d.elevation = e.elevation;
    d.feature.resize(f + 4);
    d.feature.head(f) = views.row(view_index(e.heading, e.elevation)).transpose();
    d.feature.tail<4>() = orientation_feature(e.heading - pose.heading, e.elevation - pose.elevation);
    out.push_back(std::move(d));
  }
  return out;
}

Matrix observe_panorama(const House& house, const AgentPose& pose) {
  const Matrix& views = house.view_features(pose.node);
  const int f = house.feature_dim();
  Matrix out(kViews, f + 4);
  for (int i = 0; i < kViews; ++i) {
    out.row(i).head(f) = views.row(i);
    out.row(i).tail<4>() =
        orientation_feature(view_heading(i) - pose.heading, view_elevation(i) - pose.elevation).transpose();
  }
  return out;
}

StepResult step(const House& house, const AgentPose& pose, std::size_t action) {
  const auto adj = house.neighbors(pose.node);
  if (action == 0) return {pose, true};
  if (action > adj.size())
    throw WorldError("illegal action " + std::to_string(action) + " at node " + std::to_string(pose.node));
  const Edge& e = adj[action - 1];
  return {AgentPose{e.to, e.heading, e.elevation}, false};
}

std::size_t action_toward(const House& house, const AgentPose& pose, NodeId target) {
  if (target == pose.node) return 0;
  const auto adj = house.neighbors(pose.node);
  for (std::size_t i = 0; i < adj.size(); ++i)
    if (adj[i].to == target) return i + 1;
  throw WorldError("node " + std::to_string(target) + " is not adjacent to " + std::to_string(pose.node));
}

}  // namespace emnav::world
