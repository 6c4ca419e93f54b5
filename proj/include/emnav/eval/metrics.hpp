// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emnav/world/house.hpp"

namespace emnav::eval {

using world::House;
using world::NodeId;
using world::RoomId;

/// Sum of edge lengths along `path`. Throws when consecutive nodes are not adjacent.
double path_length(const House& house, std::span<const NodeId> path);

/// Geodesic distance between the last nodes of the predicted and reference paths.
double nav_error(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference);

/// 1 when nav_error <= d_th, else 0.
double success(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference,
               double d_th);

/// S * l / max(p, l), l = geodesic length of the reference, p = path length of
/// the prediction. SPL = S when both are zero.
double spl(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference, double d_th);

/// Coverage weighted by length score:
///   PC  = mean_{r in R} exp(-d(r, P) / d_th),  d(r, P) = min_{p in P} d(r, p)
///   EPL = PC * PL(R)
///   LS  = EPL / (EPL + |PL(P) - EPL|)
///   CLS = PC * LS
double cls(const House& house, std::span<const NodeId> predicted, std::span<const NodeId> reference, double d_th);

/// Reduction of the distance to the goal room from the first to the last node.
double goal_progress(const House& house, std::span<const NodeId> predicted, RoomId goal_room);

/// Reduction of the distance to a goal node from the first to the last node.
double goal_progress_to_node(const House& house, std::span<const NodeId> predicted, NodeId goal);

inline constexpr std::array<std::string_view, 6> kMetricNames{"pl", "ne", "sr", "spl", "cls", "progress"};

/// PL and NE in meters, SR/SPL/CLS in [0, 1], progress in meters.
struct MetricValues {
  std::array<double, 6> v{};

  double& pl() { return v[0]; }
  double& ne() { return v[1]; }
  double& sr() { return v[2]; }
  double& spl() { return v[3]; }
  double& cls() { return v[4]; }
  double& progress() { return v[5]; }
  double pl() const { return v[0]; }
  double ne() const { return v[1]; }
  double sr() const { return v[2]; }
  double spl() const { return v[3]; }
  double cls() const { return v[4]; }
  double progress() const { return v[5]; }

  friend bool operator==(const MetricValues&, const MetricValues&) = default;
};

/// All metrics of one episode. Progress is measured to `goal_room` when given,
/// else to the last reference node.
MetricValues evaluate_episode(const House& house, std::span<const NodeId> predicted,
                              std::span<const NodeId> reference, double d_th,
                              std::optional<RoomId> goal_room = std::nullopt);

inline constexpr std::string_view kFoldTrain = "train";
inline constexpr std::string_view kFoldSeen = "val_seen";
inline constexpr std::string_view kFoldUnseen = "val_unseen";

struct TaggedEpisode {
  std::string fold;
  int seed = 0;
  MetricValues values;
};

struct FoldReport {
  std::string fold;
  std::size_t episodes = 0;
  std::size_t seeds = 0;
  MetricValues mean;  // mean over seeds of per-seed episode means
  MetricValues sd;    // sample standard deviation of per-seed means (0 for one seed)

  friend bool operator==(const FoldReport&, const FoldReport&) = default;
};

struct MetricReport {
  std::vector<FoldReport> folds;  // sorted by fold name
  std::optional<MetricValues> gap;  // val_seen - val_unseen when both are present

  const FoldReport* find(std::string_view fold) const;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Per-fold means, per-seed standard deviations and the seen - unseen gap.
/// Throws when `episodes` is empty or a fold has an empty seed group.
MetricReport aggregate(std::span<const TaggedEpisode> episodes);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> xs);

}  // namespace emnav::eval
