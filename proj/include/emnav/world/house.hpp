// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "emnav/autodiff/tensor.hpp"

namespace emnav::world {

using NodeId = int;
using RoomId = int;

inline constexpr int kHeadings = 12;
inline constexpr int kElevations = 3;
inline constexpr int kViews = kHeadings * kElevations;  // 36 view angles
inline constexpr double kViewStep = std::numbers::pi / 6.0;  // 30 degrees

enum class RoomType : int { Kitchen, Bedroom, Bathroom, Living, Hallway, Office, Dining, Garage };
inline constexpr int kRoomTypes = 8;

std::string_view room_type_name(RoomType t) noexcept;
RoomType room_type_from_name(std::string_view name);

/// Wrap an angle to [0, 2*pi).
double wrap_angle(double a) noexcept;

/// Heading bucket (0..11) of an absolute heading, nearest 30-degree step.
int heading_bucket(double heading) noexcept;

/// Elevation index (0, 1, 2 for -30, 0, +30 degrees).
int elevation_index(double elevation) noexcept;

/// View index = elevation_index * 12 + heading_bucket.
int view_index(double heading, double elevation) noexcept;
double view_heading(int view) noexcept;
double view_elevation(int view) noexcept;

struct Edge {
  NodeId to = 0;
  double heading = 0.0;    // radians in [0, 2*pi), 0 = +y, clockwise
  double elevation = 0.0;  // radians, one of {-pi/6, 0, pi/6}
  double length = 0.0;     // meters
};

struct NavNode {
  NodeId id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  RoomId room = 0;
};

struct Room {
  RoomId id = 0;
  RoomType type = RoomType::Kitchen;
  std::vector<NodeId> nodes;
};

/// Parameters of the synthetic per-view features. `house_mix` scales the
/// house-specific component relative to the shared structural one.
struct FeatureSpec {
  int dim = 16;
  double house_mix = 0.5;
  double noise = 0.05;
  std::uint64_t seed = 0;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

class WorldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Immutable navigation graph. Construction validates the graph invariants
/// (connected, symmetric edges, one room per node) and precomputes
/// all-pairs geodesic distances and the per-node view features.
class House {
 public:
  House(int house_id, std::vector<NavNode> nodes, std::vector<Room> rooms,
        const std::vector<std::pair<NodeId, NodeId>>& edges, FeatureSpec features,
        std::uint64_t structure_seed = 0);

  int id() const noexcept { return id_; }
  std::uint64_t structure_seed() const noexcept { return structure_seed_; }
  const FeatureSpec& feature_spec() const noexcept { return features_; }
  int feature_dim() const noexcept { return features_.dim; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t room_count() const noexcept { return rooms_.size(); }
  std::size_t edge_count() const noexcept;

  bool has_node(NodeId n) const noexcept { return n >= 0 && static_cast<std::size_t>(n) < nodes_.size(); }
  const NavNode& node(NodeId n) const;
  const std::vector<NavNode>& nodes() const noexcept { return nodes_; }
  const Room& room(RoomId r) const;
  const std::vector<Room>& rooms() const noexcept { return rooms_; }
  RoomId room_of(NodeId n) const { return node(n).room; }

  /// Outgoing edges of `n`, sorted by target id.
  std::span<const Edge> neighbors(NodeId n) const;
  const Edge* find_edge(NodeId from, NodeId to) const;
  std::vector<std::pair<NodeId, NodeId>> undirected_edges() const;

  /// Geodesic (edge-weighted shortest-path) distance in meters.
  double distance(NodeId a, NodeId b) const;
  /// First node after `a` on the shortest path to `b` (ties broken by lowest id).
  NodeId next_hop(NodeId a, NodeId b) const;
  std::vector<NodeId> shortest_path(NodeId a, NodeId b) const;

  /// 36 x dim synthetic features of a node's view angles.
  const Matrix& view_features(NodeId n) const;

 private:
  void validate() const;
  void compute_geodesics();
  void compute_features();

  int id_;
  std::uint64_t structure_seed_;
  FeatureSpec features_;
  std::vector<NavNode> nodes_;
  std::vector<Room> rooms_;
  std::vector<std::vector<Edge>> adjacency_;
  Eigen::MatrixXd dist_;
  std::vector<Matrix> view_features_;
};

/// Geodesic distance from `a` to the nearest node of room `room`.
double room_distance(const House& house, NodeId a, RoomId room);

}  // namespace emnav::world
