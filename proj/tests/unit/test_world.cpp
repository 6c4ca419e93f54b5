// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "emnav/eval/metrics.hpp"
#include "emnav/world/generate.hpp"
#include "emnav/world/house_io.hpp"
#include "emnav/world/navigation.hpp"
#include "support.hpp"

namespace emnav::world {
namespace {

using testing::chain_house;
using testing::make_house;

House generated(std::uint64_t seed = 4, int nodes = 20, int rooms = 4) {
  HouseSpec s;
  s.seed = seed;
  s.node_count = nodes;
  s.room_count = rooms;
  return generate_house(s);
}

// Floyd-Warshall over the edge list, independent of the house's own geodesics.
Eigen::MatrixXd all_pairs(const House& h) {
  const auto n = static_cast<Eigen::Index>(h.node_count());
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& [u, v] : h.undirected_edges()) {
    const double len = (h.node(u).position - h.node(v).position).norm();
    d(u, v) = d(v, u) = len;
  }
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

TEST(Generate, SameSeedIsBitExact) {
  const House a = generated(9), b = generated(9);
  ASSERT_EQ(a.node_count(), b.node_count());
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    EXPECT_EQ(a.nodes()[i].position, b.nodes()[i].position);
    EXPECT_EQ(a.nodes()[i].room, b.nodes()[i].room);
    EXPECT_EQ(a.view_features(static_cast<NodeId>(i)), b.view_features(static_cast<NodeId>(i)));
  }
  EXPECT_EQ(a.undirected_edges(), b.undirected_edges());
}

TEST(Generate, DifferentSeedsDiffer) { EXPECT_NE(generated(1).undirected_edges(), generated(2).undirected_edges()); }

TEST(Generate, RoomsNonEmptyAndGraphConnected) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const House h = generated(seed);
    ASSERT_EQ(h.node_count(), 20u);
    ASSERT_EQ(h.room_count(), 4u);
    for (const auto& r : h.rooms()) EXPECT_FALSE(r.nodes.empty());
    std::vector<bool> seen(h.node_count(), false);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
      const NodeId n = q.front();
      q.pop();
      for (const auto& e : h.neighbors(n))
        if (!seen[static_cast<std::size_t>(e.to)]) {
          seen[static_cast<std::size_t>(e.to)] = true;
          ++reached;
          q.push(e.to);
        }
    }
    EXPECT_EQ(reached, h.node_count()) << "seed " << seed;
  }
}

TEST(Generate, EdgeHeadingsAreSeparated) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const House h = generated(seed);
    for (std::size_t n = 0; n < h.node_count(); ++n) {
      if (h.neighbors(static_cast<NodeId>(n)).size() > 1) {
        EXPECT_GE(min_heading_separation(h, static_cast<NodeId>(n)), std::numbers::pi / 6.0 - 1e-9);
      }
    }
  }
}

TEST(Generate, InfeasibleSpecsThrow) {
  HouseSpec s;
  s.node_count = 3;
  s.room_count = 4;
  EXPECT_THROW(generate_house(s), WorldError);
  s.node_count = 1;
  s.room_count = 1;
  EXPECT_THROW(generate_house(s), WorldError);
  s.allow_single_node = true;
  const House one = generate_house(s);
  EXPECT_EQ(one.node_count(), 1u);
  EXPECT_EQ(one.edge_count(), 0u);
}

TEST(Generate, WorldSetIdsAndSharedFeatures) {
  WorldSpec ws;
  ws.node_count = 12;
  ws.room_count = 3;
  const WorldSet w = generate_world_set(ws);
  ASSERT_EQ(w.train.size(), 8u);
  ASSERT_EQ(w.unseen.size(), 3u);
  for (std::size_t i = 0; i < w.train.size(); ++i) EXPECT_EQ(w.train[i].id(), static_cast<int>(i));
  for (const auto& u : w.unseen) {
    EXPECT_GE(u.id(), 8);
    EXPECT_EQ(u.feature_spec(), w.train.front().feature_spec());
  }
}

TEST(Distance, IdentityChainAndDijkstraOracle) {
  const House chain = chain_house(3);
  EXPECT_EQ(chain.distance(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(chain.distance(0, 2), 4.0);
  EXPECT_EQ(chain.shortest_path(0, 2), (std::vector<NodeId>{0, 1, 2}));
  EXPECT_THROW(chain.distance(0, 7), WorldError);

  const House h = generated(5, 12, 3);
  const Eigen::MatrixXd d = all_pairs(h);
  const auto n = static_cast<NodeId>(h.node_count());
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = 0; b < n; ++b) {
      EXPECT_NEAR(h.distance(a, b), d(a, b), 1e-9);
      for (NodeId c = 0; c < n; ++c) EXPECT_LE(h.distance(a, c), h.distance(a, b) + h.distance(b, c) + 1e-9);
    }
}

TEST(Distance, ShortestPathIsEdgeValidAndTight) {
  const House h = generated(6);
  for (NodeId a = 0; a < 20; a += 3)
    for (NodeId b = 0; b < 20; b += 5) {
      const auto p = h.shortest_path(a, b);
      EXPECT_NEAR(eval::path_length(h, p), h.distance(a, b), 1e-9);
      if (a != b) {
        EXPECT_EQ(h.next_hop(a, b), p[1]);
      }
    }
}

TEST(RoomDistance, MinimumOverRoomNodes) {
  // Room 1 holds nodes at 2, 4 and 7 m from node 0.
  const House h = make_house({{0, 0, 0}, {0, 2, 0}, {0, 4, 0}, {7, 0, 0}}, {0, 1, 1, 1}, {{0, 1}, {1, 2}, {0, 3}});
  const double oracle = std::min({h.distance(0, 1), h.distance(0, 2), h.distance(0, 3)});
  EXPECT_DOUBLE_EQ(oracle, 2.0);
  EXPECT_DOUBLE_EQ(room_distance(h, 0, 1), oracle);
  EXPECT_EQ(room_distance(h, 2, 1), 0.0);
  for (NodeId v : h.room(1).nodes) EXPECT_LE(room_distance(h, 0, 1), h.distance(0, v));
}

TEST(Navigation, DirectionCountsAndFeatureWidth) {
  // Node 0 has three neighbors at 90-degree spacing.
  const House h = make_house({{0, 0, 0}, {0, 2, 0}, {2, 0, 0}, {0, -2, 0}}, {0, 0, 0, 0}, {{0, 1}, {0, 2}, {0, 3}});
  const auto dirs = navigable_directions(h, {0, 0.0, 0.0});
  ASSERT_EQ(dirs.size(), 4u);
  EXPECT_TRUE(dirs[0].stop);
  for (const auto& d : dirs) EXPECT_EQ(d.feature.size(), h.feature_dim() + 4);
  EXPECT_EQ(navigable_directions(chain_house(2), {0, 0.0, 0.0}).size(), 2u);
}

TEST(Navigation, PanoramaShapeOrientationAndDeterminism) {
  const House h = generated(2);
  const AgentPose pose{3, 0.0, 0.0};
  const Matrix pano = observe_panorama(h, pose);
  ASSERT_EQ(pano.rows(), 36);
  ASSERT_EQ(pano.cols(), h.feature_dim() + 4);
  const int ahead = view_index(0.0, 0.0);
  const Eigen::RowVector4d suffix = pano.row(ahead).tail<4>();
  EXPECT_NEAR(suffix(0), 0.0, 1e-12);
  EXPECT_NEAR(suffix(1), 1.0, 1e-12);
  EXPECT_NEAR(suffix(2), 0.0, 1e-12);
  EXPECT_NEAR(suffix(3), 1.0, 1e-12);
  EXPECT_EQ(observe_panorama(h, pose), pano);
}

TEST(Navigation, StepSemantics) {
  const House h = chain_house(3);
  const AgentPose start{1, 0.0, 0.0};
  const StepResult stop = step(h, start, 0);
  EXPECT_TRUE(stop.terminal);
  EXPECT_EQ(stop.pose.node, 1);

  const std::size_t a = action_toward(h, start, 2);
  const StepResult moved = step(h, start, a);
  EXPECT_FALSE(moved.terminal);
  EXPECT_EQ(moved.pose.node, 2);
  EXPECT_NEAR(moved.pose.heading, 0.0, 1e-12);  // +y
  EXPECT_THROW(step(h, start, 9), WorldError);
  EXPECT_THROW(action_toward(h, {0, 0, 0}, 2), WorldError);
}

TEST(Navigation, WalkedPathLengthIsSumOfEdges) {
  const House h = generated(8);
  Rng rng(1);
  AgentPose pose{0, 0.0, 0.0};
  std::vector<NodeId> path{0};
  double sum = 0.0;
  for (int t = 0; t < 15; ++t) {
    const auto dirs = navigable_directions(h, pose);
    const std::size_t a = 1 + uniform_index(rng, dirs.size() - 1);
    sum += h.find_edge(pose.node, dirs[a].target)->length;
    pose = step(h, pose, a).pose;
    path.push_back(pose.node);
  }
  EXPECT_NEAR(eval::path_length(h, path), sum, 1e-9);
}

TEST(HouseIo, RoundTripIsExact) {
  const House h = generated(12);
  std::stringstream first;
  write_house(first, h);
  const House back = read_house(first);
  std::stringstream second;
  write_house(second, back);
  EXPECT_EQ(first.str(), second.str());
  for (std::size_t i = 0; i < h.node_count(); ++i) {
    EXPECT_EQ(back.nodes()[i].position, h.nodes()[i].position);
    EXPECT_EQ(back.view_features(static_cast<NodeId>(i)), h.view_features(static_cast<NodeId>(i)));
  }
  EXPECT_EQ(back.distance(0, 19), h.distance(0, 19));
}

TEST(HouseIo, RealFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345.678, 0.0})
    EXPECT_EQ(parse_real(format_real(v)), v);
  EXPECT_THROW(parse_real("1.2x"), WorldError);
}

TEST(HouseIo, MalformedInputThrows) {
  std::stringstream ss("house 0 1\nfeatures 4 0.5 0.1 3\nnode 0 0 0 0 5\n");
  EXPECT_THROW(read_house(ss), WorldError);
}

}  // namespace
}  // namespace emnav::world
