// SPDX-License-Identifier: Apache-2.0
#include "emnav/world/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "emnav/random.hpp"

namespace emnav::world {
namespace {

constexpr double kSpacing = 2.0;
constexpr double kJitter = 0.2;
constexpr double kLevelHeight = 1.2;
constexpr double kMinSeparation = std::numbers::pi / 6.0 + 1e-6;

double circular_diff(double a, double b) {
  const double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return std::min(d, 2.0 * std::numbers::pi - d);
}

double heading_of(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const Eigen::Vector3d d = to - from;
  return wrap_angle(std::atan2(d.x(), d.y()));
}

struct Builder {
  std::vector<NavNode> nodes;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::vector<double>> headings;  // per node, outgoing headings so far

  bool separated(NodeId u, NodeId v) const {
    const double h = heading_of(nodes[u].position, nodes[v].position);
    const double back = wrap_angle(h + std::numbers::pi);
    for (double x : headings[u])
      if (circular_diff(x, h) < kMinSeparation) return false;
    for (double x : headings[v])
      if (circular_diff(x, back) < kMinSeparation) return false;
    return true;
  }

  bool connected(NodeId u, NodeId v) const {
    return std::any_of(edges.begin(), edges.end(), [&](auto e) {
      return (e.first == u && e.second == v) || (e.first == v && e.second == u);
    });
  }

  bool try_add(NodeId u, NodeId v) {
    if (u == v || connected(u, v) || !separated(u, v)) return false;
    const double h = heading_of(nodes[u].position, nodes[v].position);
    headings[u].push_back(h);
    headings[v].push_back(wrap_angle(h + std::numbers::pi));
    edges.emplace_back(std::min(u, v), std::max(u, v));
    return true;
  }
};

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Connected patch of `count` cells on a side x side lattice.
std::vector<std::pair<int, int>> grow_patch(int side, int count, Rng& rng) {
  std::set<std::pair<int, int>> taken;
  std::vector<std::pair<int, int>> order;
  const std::pair<int, int> start{static_cast<int>(uniform_index(rng, static_cast<std::size_t>(side))),
                                  static_cast<int>(uniform_index(rng, static_cast<std::size_t>(side)))};
  taken.insert(start);
  order.push_back(start);
  while (static_cast<int>(order.size()) < count) {
    std::vector<std::pair<int, int>> frontier;
    for (auto [x, y] : order)
      for (auto [dx, dy] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
        const std::pair<int, int> c{x + dx, y + dy};
        if (c.first < 0 || c.second < 0 || c.first >= side || c.second >= side || taken.count(c)) continue;
        if (std::find(frontier.begin(), frontier.end(), c) == frontier.end()) frontier.push_back(c);
      }
    std::sort(frontier.begin(), frontier.end());
    const auto pick = frontier[uniform_index(rng, frontier.size())];
    taken.insert(pick);
    order.push_back(pick);
  }
  return order;
}

}  // namespace

double min_heading_separation(const House& house, NodeId n) {
  double best = std::numeric_limits<double>::infinity();
  const auto adj = house.neighbors(n);
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j = i + 1; j < adj.size(); ++j) best = std::min(best, circular_diff(adj[i].heading, adj[j].heading));
  return best;
}

House generate_house(const HouseSpec& spec) {
  if (spec.room_count < 1) throw WorldError("room count must be at least 1");
  if (spec.node_count < 1 || (spec.node_count < 2 && !spec.allow_single_node))
    throw WorldError("node count must be at least 2");
  if (spec.room_count > spec.node_count) throw WorldError("more rooms than nodes");

  Rng rng(mix_seed({spec.seed, 0x686f757365ULL}));
  const int rooms = spec.room_count;

  std::vector<int> counts(static_cast<std::size_t>(rooms), 1);
  for (int i = rooms; i < spec.node_count; ++i) ++counts[uniform_index(rng, counts.size())];
  const int max_count = *std::max_element(counts.begin(), counts.end());
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(max_count)))) + 1;
  const double cell = side * kSpacing + kSpacing;
  const int grid_cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(rooms))));

  std::vector<int> types(kRoomTypes);
  std::iota(types.begin(), types.end(), 0);
  shuffle(types, rng);

  Builder b;
  std::vector<Room> room_list;
  for (int r = 0; r < rooms; ++r) {
    const double level = (r > 0 && bernoulli(rng, 0.2)) ? kLevelHeight : 0.0;
    const double ox = (r % grid_cols) * cell;
    const double oy = (r / grid_cols) * cell;
    Room room{r, static_cast<RoomType>(types[static_cast<std::size_t>(r % kRoomTypes)]), {}};
    const auto patch = grow_patch(side, counts[static_cast<std::size_t>(r)], rng);
    const auto first = static_cast<NodeId>(b.nodes.size());
    for (auto [cx, cy] : patch) {
      NavNode nd;
      nd.id = static_cast<NodeId>(b.nodes.size());
      nd.room = r;
      nd.position = {ox + kSpacing * (0.5 + cx) + uniform(rng, -kJitter, kJitter),
                     oy + kSpacing * (0.5 + cy) + uniform(rng, -kJitter, kJitter), level};
      room.nodes.push_back(nd.id);
      b.nodes.push_back(nd);
    }
    b.headings.resize(b.nodes.size());
    for (std::size_t i = 0; i < patch.size(); ++i)
      for (std::size_t j = i + 1; j < patch.size(); ++j) {
        const int manhattan = std::abs(patch[i].first - patch[j].first) + std::abs(patch[i].second - patch[j].second);
        if (manhattan == 1) b.try_add(first + static_cast<NodeId>(i), first + static_cast<NodeId>(j));
      }
    room_list.push_back(std::move(room));
  }

  // Doors between grid-adjacent rooms: random spanning tree first, then loops.
  std::vector<std::pair<int, int>> adjacent;
  for (int a = 0; a < rooms; ++a)
    for (int c = a + 1; c < rooms; ++c) {
      const int dx = std::abs(a % grid_cols - c % grid_cols);
      const int dy = std::abs(a / grid_cols - c / grid_cols);
      if (dx + dy == 1) adjacent.emplace_back(a, c);
    }
  shuffle(adjacent, rng);

  auto add_door = [&](int ra, int rc) {
    std::vector<std::tuple<double, NodeId, NodeId>> cands;
    for (NodeId u : room_list[static_cast<std::size_t>(ra)].nodes)
      for (NodeId v : room_list[static_cast<std::size_t>(rc)].nodes)
        cands.emplace_back((b.nodes[u].position - b.nodes[v].position).norm(), u, v);
    std::sort(cands.begin(), cands.end());
    for (auto [d, u, v] : cands)
      if (b.try_add(u, v)) return true;
    return false;
  };

  DisjointSet ds(rooms);
  std::vector<std::pair<int, int>> unused;
  for (auto [a, c] : adjacent) {
    if (ds.find(a) != ds.find(c) && add_door(a, c))
      ds.unite(a, c);
    else
      unused.emplace_back(a, c);
  }
  for (auto [a, c] : unused)
    if (bernoulli(rng, 0.3)) add_door(a, c);

  std::sort(b.edges.begin(), b.edges.end());
  return House(spec.house_id, std::move(b.nodes), std::move(room_list), b.edges, spec.features, spec.seed);
}

WorldSet generate_world_set(const WorldSpec& spec) {
  if (spec.train_houses < 1) throw WorldError("need at least 1 training house");
  if (spec.unseen_houses < 0) throw WorldError("unseen house count must be nonnegative");
  FeatureSpec features = spec.features;
  features.seed = mix_seed({spec.seed, 0x66656174ULL});
  WorldSet out;
  for (int id = 0; id < spec.train_houses + spec.unseen_houses; ++id) {
    HouseSpec hs;
    hs.house_id = id;
    hs.node_count = spec.node_count;
    hs.room_count = spec.room_count;
    hs.seed = mix_seed({spec.seed, 0x77726c64ULL, static_cast<std::uint64_t>(id)});
    hs.features = features;
    (id < spec.train_houses ? out.train : out.unseen).push_back(generate_house(hs));
  }
  return out;
}

}  // namespace emnav::world
