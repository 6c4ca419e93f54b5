// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "emnav/corpus/vocab.hpp"
#include "emnav/world/navigation.hpp"

namespace emnav::corpus {

using world::AgentPose;
using world::NodeId;
using world::RoomId;

enum class Task { Vln, Ndh };

std::string_view task_name(Task t) noexcept;
Task task_from_name(std::string_view name);

/// Instruction-following sample: reach the exact goal node.
struct VlnSample {
  TokenSeq tokens;
  int house_id = 0;
  AgentPose start;
  std::vector<NodeId> path;
  NodeId goal = 0;

  friend bool operator==(const VlnSample&, const VlnSample&) = default;
};

struct DialogTurn {
  TokenSeq question;
  TokenSeq answer;

  friend bool operator==(const DialogTurn&, const DialogTurn&) = default;
};

/// Dialog-history sample: reach the goal room holding `target`.
struct NdhSample {
  std::string target;
  std::vector<DialogTurn> turns;
  int house_id = 0;
  AgentPose start;
  std::vector<NodeId> navigator_path;
  std::vector<NodeId> oracle_path;
  RoomId goal_room = 0;

  friend bool operator==(const NdhSample&, const NdhSample&) = default;
};

/// Which parts of the dialog the agent sees.
enum class DialogInputVariant { T0, T0A, T0AQ, FullHistory };

std::string_view variant_name(DialogInputVariant v) noexcept;
DialogInputVariant variant_from_name(std::string_view name);

/// Token view of a dialog. Each variant is a prefix of the next one:
///   T0          : t0
///   T0A         : t0 A_k
///   T0AQ        : t0 A_k Q_k
///   FullHistory : t0 A_k Q_k Q_1 A_1 ... Q_{k-1} A_{k-1}
TokenSeq serialize_dialog(const NdhSample& sample, DialogInputVariant variant);

}  // namespace emnav::corpus
