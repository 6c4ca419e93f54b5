// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emnav/corpus/samples.hpp"
#include "emnav/world/house.hpp"

namespace emnav::corpus {

/// Word banks of the synthetic language.
struct TemplateBank {
  /// Relative turn words, indexed by 30-degree heading bucket (0 = ahead, 3 = right).
  std::array<std::string, 12> turns{"ahead",      "bear-right", "half-right", "right",     "back-right", "hard-right",
                                    "around",     "hard-left",  "back-left",  "left",      "half-left",  "bear-left"};
  /// Objects found in each room type (index = RoomType).
  std::array<std::vector<std::string>, world::kRoomTypes> objects{{
      {"toaster", "fridge", "kettle"},
      {"pillow", "wardrobe", "nightstand"},
      {"towel", "bathtub", "mirror"},
      {"sofa", "television", "fireplace"},
      {"coatrack", "runner", "umbrella"},
      {"desk", "monitor", "bookshelf"},
      {"tablecloth", "chandelier", "sideboard"},
      {"toolbox", "bicycle", "workbench"},
  }};
  std::vector<std::string> filler{"then", "now", "okay", "please", "just"};
  std::vector<std::vector<std::string>> questions{
      {"where", "should", "i", "go"},
      {"which", "way", "now"},
      {"am", "i", "close", "yet"},
      {"should", "i", "keep", "going"},
  };
  /// Rare distractor tokens drawn from a large pool; most occur fewer than
  /// five times in a corpus and end up out of vocabulary.
  int rare_pool = 400;
};

struct CorpusSpec {
  int vln_min_hops = 2;
  int vln_max_hops = 4;
  int ndh_min_hops = 6;
  int ndh_max_hops = 12;
  int max_turns = 3;
  double navigator_error_rate = 0.3;
  double filler_rate = 0.1;
  double rare_rate = 0.03;
};

/// Instruction clause per traversed edge: "turn <dir> walk [into|through] the <room>",
/// closed by "and stop".
TokenSeq render_route(const world::House& house, const AgentPose& start, const std::vector<NodeId>& path,
                      const TemplateBank& bank);

VlnSample generate_vln_sample(const world::House& house, std::uint64_t seed, const CorpusSpec& spec = {},
                              const TemplateBank& bank = {});

NdhSample generate_ndh_sample(const world::House& house, std::uint64_t seed, const CorpusSpec& spec = {},
                              const TemplateBank& bank = {});

/// Inverse of the route template: follow every "turn <dir>" clause from `start`.
/// Returns nullopt when a clause names a direction with no edge.
std::optional<std::vector<NodeId>> decode_route(const world::House& house, const AgentPose& start,
                                                const TokenSeq& tokens, const TemplateBank& bank = {});

/// Number of movement clauses ("walk" tokens) in an instruction.
std::size_t movement_clauses(const TokenSeq& tokens);

/// Relative heading bucket of edge `heading` seen from agent `pose_heading`.
int relative_bucket(double heading, double pose_heading);

/// Whether consecutive nodes are joined by edges.
bool is_edge_connected(const world::House& house, const std::vector<NodeId>& path);

}  // namespace emnav::corpus
