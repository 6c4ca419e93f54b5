// SPDX-License-Identifier: Apache-2.0
#include "emnav/world/house.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "emnav/random.hpp"

namespace emnav::world {
namespace {

constexpr std::array<std::string_view, kRoomTypes> kRoomNames = {
    "kitchen", "bedroom", "bathroom", "living", "hallway", "office", "dining", "garage"};

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fixed-seed draw of a vector with entries in [-1, 1).
Vector seeded_vector(std::uint64_t seed, int dim) {
  Rng rng(seed);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = uniform(rng, -1.0, 1.0);
  return v;
}

enum : std::uint64_t { kTagType = 1, kTagHouse = 2, kTagStyle = 3, kTagNoise = 4, kTagNav = 5 };

}  // namespace

std::string_view room_type_name(RoomType t) noexcept { return kRoomNames[static_cast<int>(t)]; }

RoomType room_type_from_name(std::string_view name) {
  for (int i = 0; i < kRoomTypes; ++i)
    if (kRoomNames[i] == name) return static_cast<RoomType>(i);
  throw WorldError("unknown room type '" + std::string(name) + "'");
}

double wrap_angle(double a) noexcept {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

int heading_bucket(double heading) noexcept {
  const int b = static_cast<int>(std::floor(wrap_angle(heading) / kViewStep + 0.5));
  return b % kHeadings;
}

int elevation_index(double elevation) noexcept {
  if (elevation > kViewStep / 2.0) return 2;
  if (elevation < -kViewStep / 2.0) return 0;
  return 1;
}

int view_index(double heading, double elevation) noexcept {
  return elevation_index(elevation) * kHeadings + heading_bucket(heading);
}

double view_heading(int view) noexcept { return (view % kHeadings) * kViewStep; }
double view_elevation(int view) noexcept { return (view / kHeadings - 1) * kViewStep; }

House::House(int house_id, std::vector<NavNode> nodes, std::vector<Room> rooms,
             const std::vector<std::pair<NodeId, NodeId>>& edges, FeatureSpec features,
             std::uint64_t structure_seed)
    : id_(house_id), structure_seed_(structure_seed), features_(features), nodes_(std::move(nodes)), rooms_(std::move(rooms)) {
  if (features_.dim < 1) throw WorldError("feature dimension must be positive");
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].id != static_cast<NodeId>(i)) throw WorldError("node ids must be 0..n-1 in order");
  for (auto [u, v] : edges) {
    if (!has_node(u) || !has_node(v) || u == v) throw WorldError("invalid edge");
    if (find_edge(u, v) != nullptr) throw WorldError("duplicate edge");
    const Eigen::Vector3d d = nodes_[v].position - nodes_[u].position;
    const double horizontal = std::hypot(d.x(), d.y());
    const double heading = wrap_angle(std::atan2(d.x(), d.y()));
    const double raw_elev = std::atan2(d.z(), horizontal);
    const double elev = (elevation_index(raw_elev) - 1) * kViewStep;
    const double length = d.norm();
    adjacency_[u].push_back({v, heading, elev, length});
    adjacency_[v].push_back({u, wrap_angle(heading + std::numbers::pi), -elev, length});
  }
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
  validate();
  compute_geodesics();
  compute_features();
}

std::size_t House::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& adj : adjacency_) n += adj.size();
  return n / 2;
}

const NavNode& House::node(NodeId n) const {
  if (!has_node(n)) throw WorldError("unknown node " + std::to_string(n) + " in house " + std::to_string(id_));
  return nodes_[static_cast<std::size_t>(n)];
}

const Room& House::room(RoomId r) const {
  if (r < 0 || static_cast<std::size_t>(r) >= rooms_.size())
    throw WorldError("unknown room " + std::to_string(r) + " in house " + std::to_string(id_));
  return rooms_[static_cast<std::size_t>(r)];
}

std::span<const Edge> House::neighbors(NodeId n) const {
  node(n);
  return adjacency_[static_cast<std::size_t>(n)];
}

const Edge* House::find_edge(NodeId from, NodeId to) const {
  if (!has_node(from)) return nullptr;
  for (const auto& e : adjacency_[static_cast<std::size_t>(from)])
    if (e.to == to) return &e;
  return nullptr;
}

std::vector<std::pair<NodeId, NodeId>> House::undirected_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (std::size_t u = 0; u < adjacency_.size(); ++u)
    for (const auto& e : adjacency_[u])
      if (static_cast<NodeId>(u) < e.to) out.emplace_back(static_cast<NodeId>(u), e.to);
  return out;
}

void House::validate() const {
  if (nodes_.empty()) throw WorldError("house has no nodes");
  std::vector<int> seen(nodes_.size(), 0);
  for (std::size_t r = 0; r < rooms_.size(); ++r) {
    if (rooms_[r].id != static_cast<RoomId>(r)) throw WorldError("room ids must be 0..r-1 in order");
    if (rooms_[r].nodes.empty()) throw WorldError("room " + std::to_string(r) + " is empty");
    for (NodeId n : rooms_[r].nodes) {
      if (!has_node(n)) throw WorldError("room references unknown node");
      if (nodes_[static_cast<std::size_t>(n)].room != static_cast<RoomId>(r))
        throw WorldError("node room label disagrees with room membership");
      ++seen[static_cast<std::size_t>(n)];
    }
  }
  for (int s : seen)
    if (s != 1) throw WorldError("every node must belong to exactly one room");

  std::vector<char> visited(nodes_.size(), 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  visited[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (const auto& e : adjacency_[static_cast<std::size_t>(u)])
      if (!visited[static_cast<std::size_t>(e.to)]) {
        visited[static_cast<std::size_t>(e.to)] = 1;
        ++reached;
        frontier.push(e.to);
      }
  }
  if (reached != nodes_.size()) throw WorldError("house graph is not connected");
}

void House::compute_geodesics() {
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  dist_ = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, NodeId>;
  for (Eigen::Index s = 0; s < n; ++s) {
    Eigen::VectorXd d = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d(s) = 0.0;
    pq.emplace(0.0, static_cast<NodeId>(s));
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > d(u)) continue;
      for (const auto& e : adjacency_[static_cast<std::size_t>(u)]) {
        const double cand = du + e.length;
        if (cand < d(e.to)) {
          d(e.to) = cand;
          pq.emplace(cand, e.to);
        }
      }
    }
    dist_.row(s) = d.transpose();
  }
  // Symmetrize: rounding of the two accumulation orders may differ in the last bit.
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) dist_(a, b) = dist_(b, a) = std::min(dist_(a, b), dist_(b, a));
}

double House::distance(NodeId a, NodeId b) const {
  node(a);
  node(b);
  return dist_(a, b);
}

NodeId House::next_hop(NodeId a, NodeId b) const {
  node(b);
  if (a == b) return a;
  NodeId best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& e : neighbors(a)) {
    const double cost = e.length + dist_(e.to, b);
    if (cost < best_cost - 1e-9) {
      best_cost = cost;
      best = e.to;
    }
  }
  return best;
}

std::vector<NodeId> House::shortest_path(NodeId a, NodeId b) const {
  std::vector<NodeId> path{a};
  NodeId cur = a;
  while (cur != b) {
    cur = next_hop(cur, b);
    path.push_back(cur);
    if (path.size() > nodes_.size()) throw WorldError("shortest path reconstruction did not terminate");
  }
  return path;
}

const Matrix& House::view_features(NodeId n) const {
  node(n);
  return view_features_[static_cast<std::size_t>(n)];
}

// Each view row = structural part + house_mix * house part + noise.
//  structural: shared room-type embedding of whatever room the view looks
//              into (the neighbor's room when an edge lies in that view,
//              else the node's own room), plus a shared "navigable" marker.
//  house part: a per-house global tint plus a per-house appearance of the
//              looked-at room type; absent from unseen houses' training data.
void House::compute_features() {
  const int dim = features_.dim;
  const std::uint64_t seed = features_.seed;
  std::array<Vector, kRoomTypes> type_embed;
  std::array<Vector, kRoomTypes> style;
  for (int t = 0; t < kRoomTypes; ++t) {
    type_embed[t] = seeded_vector(mix_seed({seed, kTagType, static_cast<std::uint64_t>(t)}), dim);
    style[t] = seeded_vector(
        mix_seed({seed, kTagStyle, static_cast<std::uint64_t>(id_), static_cast<std::uint64_t>(t)}), dim);
  }
  const Vector nav_marker = seeded_vector(mix_seed({seed, kTagNav}), dim);
  const Vector tint = seeded_vector(mix_seed({seed, kTagHouse, static_cast<std::uint64_t>(id_)}), dim);

  view_features_.clear();
  view_features_.reserve(nodes_.size());
  for (const auto& nd : nodes_) {
    Matrix feats(kViews, dim);
    const RoomType own = rooms_[static_cast<std::size_t>(nd.room)].type;
    std::array<int, kViews> looked_at;
    looked_at.fill(-1);
    for (const auto& e : adjacency_[static_cast<std::size_t>(nd.id)])
      looked_at[static_cast<std::size_t>(view_index(e.heading, e.elevation))] = e.to;
    for (int v = 0; v < kViews; ++v) {
      const int target = looked_at[static_cast<std::size_t>(v)];
      const bool navigable = target >= 0;
      const RoomType t = navigable ? rooms_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(target)].room)].type : own;
      const auto ti = static_cast<std::size_t>(t);
      Rng noise_rng(mix_seed({seed, kTagNoise, static_cast<std::uint64_t>(id_), static_cast<std::uint64_t>(nd.id),
                              static_cast<std::uint64_t>(v)}));
      for (int k = 0; k < dim; ++k) {
        double x = type_embed[ti](k) * (navigable ? 1.0 : 0.5);
        if (navigable) x += 0.5 * nav_marker(k);
        x += features_.house_mix * (tint(k) + style[ti](k));
        x += features_.noise * uniform(noise_rng, -1.0, 1.0);
        feats(v, k) = x;
      }
    }
    view_features_.push_back(std::move(feats));
  }
}

double room_distance(const House& house, NodeId a, RoomId room) {
  const Room& r = house.room(room);
  if (r.nodes.empty()) throw WorldError("room " + std::to_string(room) + " is empty");
  double best = std::numeric_limits<double>::infinity();
  for (NodeId v : r.nodes) best = std::min(best, house.distance(a, v));
  return best;
}

}  // namespace emnav::world
