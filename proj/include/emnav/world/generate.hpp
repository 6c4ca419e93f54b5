// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "emnav/world/house.hpp"

namespace emnav::world {

struct HouseSpec {
  int house_id = 0;
  int node_count = 20;
  int room_count = 4;
  /// Structure seed: layout, room types and edges depend only on this value.
  std::uint64_t seed = 0;
  FeatureSpec features{};
  /// Permit node_count == 1 (a single node, no edges). Off by default.
  bool allow_single_node = false;
};

/// Procedurally generate a connected house. Rooms are laid out on a grid and
/// filled with connected lattice patches; doors join neighboring rooms. At
/// every node the headings of outgoing edges are at least 30 degrees apart,
/// so each edge falls into its own heading bucket.
House generate_house(const HouseSpec& spec);

/// Train houses take ids 0..train-1, held-out houses the ids after them. All
/// houses share one feature seed, so structural feature components agree.
struct WorldSpec {
  int train_houses = 8;
  int unseen_houses = 3;
  int node_count = 20;
  int room_count = 4;
  std::uint64_t seed = 0;
  FeatureSpec features{};
};

struct WorldSet {
  std::vector<House> train;
  std::vector<House> unseen;
};

WorldSet generate_world_set(const WorldSpec& spec);

/// Minimum circular separation, in radians, between edge headings at a node.
double min_heading_separation(const House& house, NodeId n);

}  // namespace emnav::world
