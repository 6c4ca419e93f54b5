// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emnav/train/trainer.hpp"

namespace emnav::io {

/// Schema violations, one message per offending key ("train.steps: expected
/// unsigned integer", "model.foo: unknown key", ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Run config file:
///
///   {
///     "worlds": "<dir>", "corpus": "<dir>",
///     "model":  { embed_dim, lang_hidden, lang_layers, traj_hidden, traj_layers,
///                 attention_dim, classifier_hidden, separate_language_encoders },
///     "train":  { batch_size, clone_fraction, lambda, learning_rate, optimizer,
///                 clip_norm, max_episode_length, task_mode, env_mode,
///                 dialog_variant, mix_ratio, env_loss_weight, steps,
///                 eval_interval, eval_episodes, seeds },
///     "reward": { gamma, success_threshold, ndh_mode }
///   }
///
/// "worlds" and "corpus" are required; every other key is optional and
/// defaults to the TrainConfig value.
struct RunConfig {
  std::filesystem::path worlds;
  std::filesystem::path corpus;
  train::TrainConfig train;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace emnav::io
