// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>

#include "emnav/autodiff/checkpoint.hpp"
#include "emnav/train/trainer.hpp"

namespace emnav::io {

/// A seed's training state on disk: checkpoint.txt holds the parameters plus
/// the settings needed to rebuild the model and score it; optimizer.txt holds
/// the Adam moments when there are any.
void save_train_state(const std::filesystem::path& dir, const train::TrainState& state,
                      const train::TrainConfig& cfg, std::uint64_t seed);

struct SavedRun {
  train::TrainState state;
  train::TrainConfig config;  // model dims resolved; training-only fields at defaults
  std::uint64_t seed = 0;
};

/// Reads a directory written by save_train_state, or a bare checkpoint file.
SavedRun load_train_state(const std::filesystem::path& dir_or_file);

}  // namespace emnav::io
