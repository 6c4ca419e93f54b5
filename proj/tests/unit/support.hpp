// SPDX-License-Identifier: Apache-2.0
// Hand-built houses and small fixtures shared by the unit tests.
#pragma once

#include <map>
#include <utility>
#include <vector>

#include "emnav/autodiff/tape.hpp"
#include "emnav/random.hpp"
#include "emnav/corpus/benchmark.hpp"
#include "emnav/world/generate.hpp"
#include "emnav/world/house.hpp"

namespace emnav::testing {

inline world::House make_house(const std::vector<Eigen::Vector3d>& positions, const std::vector<int>& room_of,
                               const std::vector<std::pair<int, int>>& edges, int id = 0,
                               world::FeatureSpec features = {}) {
  std::vector<world::NavNode> nodes;
  int rooms = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    nodes.push_back({static_cast<int>(i), positions[i], room_of[i]});
    rooms = std::max(rooms, room_of[i] + 1);
  }
  std::vector<world::Room> rs(static_cast<std::size_t>(rooms));
  for (int r = 0; r < rooms; ++r) {
    rs[static_cast<std::size_t>(r)].id = r;
    rs[static_cast<std::size_t>(r)].type = static_cast<world::RoomType>(r % world::kRoomTypes);
  }
  for (const auto& n : nodes) rs[static_cast<std::size_t>(n.room)].nodes.push_back(n.id);
  return world::House(id, nodes, rs, edges, features, 7);
}

/// Nodes 0..n-1 along +y, `spacing` meters apart, all in room 0 unless `rooms` says otherwise.
inline world::House chain_house(int n, double spacing = 2.0, std::vector<int> rooms = {}) {
  std::vector<Eigen::Vector3d> pos;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    pos.emplace_back(0.0, spacing * i, 0.0);
    if (i > 0) edges.emplace_back(i - 1, i);
  }
  if (rooms.empty()) rooms.assign(static_cast<std::size_t>(n), 0);
  return make_house(pos, rooms, edges);
}

/// Small benchmark for trainer and io tests.
inline corpus::Benchmark small_benchmark(int train_houses = 2, int unseen = 1, std::size_t per_task = 6,
                                         std::uint64_t seed = 11, int nodes = 12) {
  world::WorldSpec ws;
  ws.train_houses = train_houses;
  ws.unseen_houses = unseen;
  ws.node_count = nodes;
  ws.room_count = 3;
  ws.seed = seed;
  ws.features.dim = 8;
  corpus::CorpusCounts counts{per_task, per_task, per_task / 2, per_task / 2};
  return corpus::generate_benchmark(world::generate_world_set(ws), counts, seed);
}

/// Central-difference gradient of the scalar node `loss` with respect to parameter `name`,
/// computed by perturbing storage and replaying the tape.
inline Matrix numeric_gradient(Tape& tape, ParameterSet& params, Var loss, const std::string& name,
                               double eps = 1e-6) {
  Matrix& v = params.value(params.index_of(name));
  Matrix g(v.rows(), v.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double saved = v.data()[i];
    v.data()[i] = saved + eps;
    tape.replay();
    const double up = tape.scalar(loss);
    v.data()[i] = saved - eps;
    tape.replay();
    const double down = tape.scalar(loss);
    v.data()[i] = saved;
    g.data()[i] = (up - down) / (2 * eps);
  }
  tape.replay();
  return g;
}

}  // namespace emnav::testing
