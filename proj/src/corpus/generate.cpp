// SPDX-License-Identifier: Apache-2.0
#include "emnav/corpus/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emnav/random.hpp"

namespace emnav::corpus {
namespace {

using world::House;

int hops(const House& house, NodeId a, NodeId b) { return static_cast<int>(house.shortest_path(a, b).size()) - 1; }

// Nearest node of `room` from `a`, ties broken by lowest id.
NodeId nearest_in_room(const House& house, NodeId a, RoomId room) {
  NodeId best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId v : house.room(room).nodes) {
    const double d = house.distance(a, v);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

std::string rare_token(Rng& rng, const TemplateBank& bank) {
  return "x" + std::to_string(uniform_index(rng, static_cast<std::size_t>(bank.rare_pool)));
}

// Sprinkle filler and rare tokens between clause boundaries (before "turn" / "and").
TokenSeq add_noise(const TokenSeq& clean, Rng& rng, const CorpusSpec& spec, const TemplateBank& bank) {
  TokenSeq out;
  out.reserve(clean.size() + 4);
  for (const auto& t : clean) {
    if (t == "turn" || t == "and") {
      if (bernoulli(rng, spec.filler_rate)) out.push_back(bank.filler[uniform_index(rng, bank.filler.size())]);
      if (bernoulli(rng, spec.rare_rate)) out.push_back(rare_token(rng, bank));
    }
    out.push_back(t);
  }
  return out;
}

AgentPose random_start(NodeId node, Rng& rng) {
  return AgentPose{node, world::wrap_angle(uniform(rng, 0.0, 2.0 * std::numbers::pi)), 0.0};
}

}  // namespace

int relative_bucket(double heading, double pose_heading) { return world::heading_bucket(heading - pose_heading); }

bool is_edge_connected(const House& house, const std::vector<NodeId>& path) {
  if (path.empty()) return false;
  for (NodeId n : path)
    if (!house.has_node(n)) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (house.find_edge(path[i], path[i + 1]) == nullptr) return false;
  return true;
}

TokenSeq render_route(const House& house, const AgentPose& start, const std::vector<NodeId>& path,
                      const TemplateBank& bank) {
  TokenSeq out;
  double heading = start.heading;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const world::Edge* e = house.find_edge(path[i], path[i + 1]);
    if (e == nullptr) throw world::WorldError("route is not edge-connected");
    const bool new_room = house.room_of(path[i]) != house.room_of(path[i + 1]);
    out.insert(out.end(), {"turn", bank.turns[static_cast<std::size_t>(relative_bucket(e->heading, heading))], "walk",
                           new_room ? "into" : "through", "the",
                           std::string(world::room_type_name(house.room(house.room_of(path[i + 1])).type))});
    heading = e->heading;
  }
  out.insert(out.end(), {"and", "stop"});
  return out;
}

std::size_t movement_clauses(const TokenSeq& tokens) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), "walk"));
}

std::optional<std::vector<NodeId>> decode_route(const House& house, const AgentPose& start, const TokenSeq& tokens,
                                                const TemplateBank& bank) {
  std::vector<NodeId> path{start.node};
  NodeId cur = start.node;
  double heading = start.heading;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i] != "turn") continue;
    auto it = std::find(bank.turns.begin(), bank.turns.end(), tokens[i + 1]);
    if (it == bank.turns.end()) continue;
    const int bucket = static_cast<int>(it - bank.turns.begin());
    const world::Edge* chosen = nullptr;
    for (const auto& e : house.neighbors(cur))
      if (relative_bucket(e.heading, heading) == bucket) {
        chosen = &e;
        break;
      }
    if (chosen == nullptr) return std::nullopt;
    cur = chosen->to;
    heading = chosen->heading;
    path.push_back(cur);
  }
  return path;
}

VlnSample generate_vln_sample(const House& house, std::uint64_t seed, const CorpusSpec& spec,
                              const TemplateBank& bank) {
  if (house.node_count() < 2) throw world::WorldError("VLN sample needs a house with at least 2 nodes");
  Rng rng(mix_seed({seed, 0x766c6eULL}));
  std::vector<NodeId> starts(house.node_count());
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = static_cast<NodeId>(i);
  shuffle(starts, rng);

  NodeId start = -1, goal = -1;
  for (NodeId s : starts) {
    std::vector<NodeId> goals;
    for (NodeId g = 0; g < static_cast<NodeId>(house.node_count()); ++g) {
      if (g == s) continue;
      const int h = hops(house, s, g);
      if (h >= spec.vln_min_hops && h <= spec.vln_max_hops) goals.push_back(g);
    }
    if (!goals.empty()) {
      start = s;
      goal = goals[uniform_index(rng, goals.size())];
      break;
    }
  }
  if (start < 0) {
    // House too small for the hop window: take the farthest pair from a random start.
    start = starts.front();
    goal = start == 0 ? 1 : 0;
    for (NodeId g = 0; g < static_cast<NodeId>(house.node_count()); ++g)
      if (g != start && house.distance(start, g) > house.distance(start, goal)) goal = g;
  }

  VlnSample s;
  s.house_id = house.id();
  s.start = random_start(start, rng);
  s.path = house.shortest_path(start, goal);
  s.goal = goal;
  s.tokens = add_noise(render_route(house, s.start, s.path, bank), rng, spec, bank);
  return s;
}

NdhSample generate_ndh_sample(const House& house, std::uint64_t seed, const CorpusSpec& spec,
                              const TemplateBank& bank) {
  if (house.room_count() < 2) throw world::WorldError("NDH sample needs a house with at least 2 rooms");
  Rng rng(mix_seed({seed, 0x6e6468ULL}));
  const auto rooms = static_cast<RoomId>(house.room_count());
  const RoomId goal_room = static_cast<RoomId>(uniform_index(rng, static_cast<std::size_t>(rooms)));

  std::vector<NodeId> in_window;
  NodeId farthest = -1;
  int farthest_hops = -1;
  for (NodeId v = 0; v < static_cast<NodeId>(house.node_count()); ++v) {
    if (house.room_of(v) == goal_room) continue;
    const int h = hops(house, v, nearest_in_room(house, v, goal_room));
    if (h >= spec.ndh_min_hops && h <= spec.ndh_max_hops) in_window.push_back(v);
    if (h > farthest_hops) {
      farthest_hops = h;
      farthest = v;
    }
  }
  const NodeId start = in_window.empty() ? farthest : in_window[uniform_index(rng, in_window.size())];

  NdhSample s;
  s.house_id = house.id();
  s.goal_room = goal_room;
  s.start = random_start(start, rng);
  // The target object sits at one node of the goal room; the oracle walks to it.
  const auto& room_nodes = house.room(goal_room).nodes;
  s.oracle_path = house.shortest_path(start, room_nodes[uniform_index(rng, room_nodes.size())]);

  if (bernoulli(rng, spec.navigator_error_rate)) {
    RoomId wrong = static_cast<RoomId>(uniform_index(rng, static_cast<std::size_t>(rooms - 1)));
    if (wrong >= goal_room) ++wrong;
    s.navigator_path = house.shortest_path(start, nearest_in_room(house, start, wrong));
  } else {
    s.navigator_path = s.oracle_path;
    std::vector<NodeId> wander;
    for (const auto& e : house.neighbors(s.navigator_path.back()))
      if (house.room_of(e.to) == goal_room && (s.navigator_path.size() < 2 || e.to != s.navigator_path[s.navigator_path.size() - 2]))
        wander.push_back(e.to);
    if (!wander.empty() && bernoulli(rng, 0.5)) s.navigator_path.push_back(wander[uniform_index(rng, wander.size())]);
  }

  const auto& objects = bank.objects[static_cast<std::size_t>(house.room(goal_room).type)];
  s.target = objects[uniform_index(rng, objects.size())];
  const std::string goal_type(world::room_type_name(house.room(goal_room).type));

  // Rooms passed along the oracle route, in order, without repeats.
  std::vector<RoomId> route_rooms;
  for (NodeId v : s.oracle_path)
    if (route_rooms.empty() || route_rooms.back() != house.room_of(v)) route_rooms.push_back(house.room_of(v));

  const int k = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(std::max(1, spec.max_turns))));
  for (int j = 1; j <= k; ++j) {
    DialogTurn turn;
    turn.question = bank.questions[uniform_index(rng, bank.questions.size())];
    if (j < k) {
      // Earlier answers name a room partway along the route, later ones closer to the goal.
      const std::size_t idx = std::min(route_rooms.size() - 1, (route_rooms.size() * static_cast<std::size_t>(j)) /
                                                                   static_cast<std::size_t>(k));
      turn.answer = {"head", "toward", "the",
                     std::string(world::room_type_name(house.room(route_rooms[idx]).type))};
    } else {
      TokenSeq route = render_route(house, s.start, s.oracle_path, bank);
      route.resize(route.size() - 2);  // drop "and stop"
      turn.answer = add_noise(route, rng, spec, bank);
      turn.answer.insert(turn.answer.end(), {"the", s.target, "is", "in", "the", goal_type});
    }
    s.turns.push_back(std::move(turn));
  }
  return s;
}

}  // namespace emnav::corpus
