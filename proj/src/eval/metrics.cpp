// SPDX-License-Identifier: Apache-2.0
#include "emnav/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace emnav::eval {
namespace {

void require_path(std::span<const NodeId> p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + " path is empty");
}

}  // namespace

double path_length(const House& house, std::span<const NodeId> path) {
  require_path(path, "predicted");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const world::Edge* e = house.find_edge(path[i], path[i + 1]);
    if (e == nullptr)
      throw world::WorldError("path_length: nodes " + std::to_string(path[i]) + " and " +
                              std::to_string(path[i + 1]) + " are not adjacent");
    total += e->length;
  }
  return total;
}

double nav_error(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference) {
  require_path(predicted, "predicted");
  require_path(reference, "reference");
  return house.distance(predicted.back(), reference.back());
}

double success(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference,
               double d_th) {
  return nav_error(house, predicted, reference) <= d_th ? 1.0 : 0.0;
}

double spl(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference, double d_th) {
  const double s = success(house, predicted, reference, d_th);
  const double l = house.distance(reference.front(), reference.back());
  const double p = path_length(house, predicted);
  if (l == 0.0 && p == 0.0) return s;
  return s * l / std::max(p, l);
}

double cls(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference, double d_th) {
  require_path(reference, "reference");
  const double pl_p = path_length(house, predicted);
  const double pl_r = path_length(house, reference);
  double pc = 0.0;
  for (NodeId r : reference) {
    double d = std::numeric_limits<double>::infinity();
    for (NodeId p : predicted) d = std::min(d, house.distance(r, p));
    pc += std::exp(-d / d_th);
  }
  pc /= static_cast<double>(reference.size());
  const double epl = pc * pl_r;
  const double denom = epl + std::abs(pl_p - epl);
  // Single-node reference: EPL = 0, so any movement gives LS = 0 and none gives LS = 1.
  const double ls = denom == 0.0 ? 1.0 : epl / denom;
  return pc * ls;
}

double goal_progress(const House& house, std::span<const NodeId> predicted, RoomId goal_room) {
  require_path(predicted, "predicted");
  return world::room_distance(house, predicted.front(), goal_room) -
         world::room_distance(house, predicted.back(), goal_room);
}

double goal_progress_to_node(const House& house, std::span<const NodeId> predicted, NodeId goal) {
  require_path(predicted, "predicted");
  return house.distance(predicted.front(), goal) - house.distance(predicted.back(), goal);
}

MetricValues evaluate_episode(const House& house, std::span<const NodeId> predicted,
                              std::span<const NodeId> reference, double d_th, std::optional<RoomId> goal_room) {
  MetricValues m;
  m.pl() = path_length(house, predicted);
  path_length(house, reference);
  m.ne() = nav_error(house, predicted, reference);
  m.sr() = m.ne() <= d_th ? 1.0 : 0.0;
  m.spl() = spl(house, predicted, reference, d_th);
  m.cls() = cls(house, predicted, reference, d_th);
  m.progress() = goal_room ? goal_progress(house, predicted, *goal_room)
                           : goal_progress_to_node(house, predicted, reference.back());
  return m;
}

const FoldReport* MetricReport::find(std::string_view fold) const {
  for (const auto& f : folds)
    if (f.fold == fold) return &f;
  return nullptr;
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

MetricReport aggregate(std::span<const TaggedEpisode> episodes) {
  if (episodes.empty()) throw std::invalid_argument("aggregate: no episodes");
  struct Acc {
    MetricValues sum;
    std::size_t n = 0;
  };
  std::map<std::string, std::map<int, Acc>> groups;
  for (const auto& e : episodes) {
    if (e.fold.empty()) throw std::invalid_argument("aggregate: episode without fold tag");
    Acc& a = groups[e.fold][e.seed];
    for (std::size_t k = 0; k < a.sum.v.size(); ++k) a.sum.v[k] += e.values.v[k];
    ++a.n;
  }

  MetricReport report;
  for (const auto& [fold, seeds] : groups) {
    FoldReport fr;
    fr.fold = fold;
    fr.seeds = seeds.size();
    for (std::size_t k = 0; k < fr.mean.v.size(); ++k) {
      std::vector<double> per_seed;
      for (const auto& [seed, acc] : seeds) per_seed.push_back(acc.sum.v[k] / static_cast<double>(acc.n));
      double m = 0.0;
      for (double x : per_seed) m += x;
      fr.mean.v[k] = m / static_cast<double>(per_seed.size());
      fr.sd.v[k] = sample_sd(per_seed);
    }
    for (const auto& [seed, acc] : seeds) fr.episodes += acc.n;
    report.folds.push_back(std::move(fr));
  }
  const FoldReport* seen = report.find(kFoldSeen);
  const FoldReport* unseen = report.find(kFoldUnseen);
  if (seen != nullptr && unseen != nullptr) {
    MetricValues g;
    for (std::size_t k = 0; k < g.v.size(); ++k) g.v[k] = seen->mean.v[k] - unseen->mean.v[k];
    report.gap = g;
  }
  return report;
}

}  // namespace emnav::eval
