// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "emnav/corpus/generate.hpp"
#include "emnav/corpus/samples.hpp"
#include "emnav/corpus/vocab.hpp"
#include "emnav/world/generate.hpp"

namespace emnav::corpus {

struct Fold {
  std::vector<VlnSample> vln;
  std::vector<NdhSample> ndh;

  friend bool operator==(const Fold&, const Fold&) = default;
};

/// Sample counts per task and fold.
struct CorpusCounts {
  std::size_t vln_train = 200;
  std::size_t ndh_train = 200;
  std::size_t vln_val = 40;
  std::size_t ndh_val = 40;
};

/// Houses plus the three evaluation folds. `houses[i].id() == i`; the first
/// `train_house_count` houses are the training houses, whose ids double as
/// classifier labels.
struct Benchmark {
  std::vector<world::House> houses;
  std::size_t train_house_count = 0;
  Fold train;
  Fold val_seen;
  Fold val_unseen;

  const world::House& house(int id) const;
  /// Classifier label of a house, -1 for held-out houses.
  int label(int house_id) const;
};

/// Samples for every fold: train and val_seen over training houses (distinct
/// seeds), val_unseen over held-out houses. House i of a fold's samples is
/// chosen round-robin.
Benchmark generate_benchmark(world::WorldSet worlds, const CorpusCounts& counts, std::uint64_t seed,
                             const CorpusSpec& spec = {}, const TemplateBank& bank = {});

/// Union of the per-task vocabularies of the training fold, NDH dialogs
/// serialized with `variant`.
Vocab build_joint_vocab(const Fold& train, DialogInputVariant variant = DialogInputVariant::FullHistory);

/// Mean token count of VLN instructions and of serialized NDH dialogs.
struct LengthStats {
  double vln = 0.0;
  double ndh = 0.0;
};
LengthStats mean_token_lengths(const Fold& fold, DialogInputVariant variant = DialogInputVariant::FullHistory);

}  // namespace emnav::corpus
