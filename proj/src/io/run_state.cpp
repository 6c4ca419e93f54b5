// SPDX-License-Identifier: Apache-2.0
#include "emnav/io/run_state.hpp"

#include <map>
#include <stdexcept>
#include <string>

#include "emnav/world/house_io.hpp"

namespace emnav::io {
namespace {

namespace fs = std::filesystem;

using Meta = std::map<std::string, std::string>;

const std::string& need(const Meta& meta, const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) throw std::runtime_error("checkpoint: missing meta '" + key + "'");
  return it->second;
}

int as_int(const Meta& meta, const std::string& key) { return std::stoi(need(meta, key)); }
std::uint64_t as_u64(const Meta& meta, const std::string& key) { return std::stoull(need(meta, key)); }

}  // namespace

void save_train_state(const fs::path& dir, const train::TrainState& state, const train::TrainConfig& cfg,
                      std::uint64_t seed) {
  fs::create_directories(dir);
  const model::ModelConfig& m = cfg.model;
  const Meta meta{
      {"seed", std::to_string(seed)},
      {"step", std::to_string(state.step)},
      {"updates", std::to_string(state.optimizer.updates())},
      {"optimizer", std::string(train::optimizer_name(state.optimizer.kind()))},
      {"vocab_size", std::to_string(m.vocab_size)},
      {"embed_dim", std::to_string(m.embed_dim)},
      {"lang_hidden", std::to_string(m.lang_hidden)},
      {"lang_layers", std::to_string(m.lang_layers)},
      {"traj_hidden", std::to_string(m.traj_hidden)},
      {"traj_layers", std::to_string(m.traj_layers)},
      {"attention_dim", std::to_string(m.attention_dim)},
      {"classifier_hidden", std::to_string(m.classifier_hidden)},
      {"house_classes", std::to_string(m.house_classes)},
      {"view_dim", std::to_string(m.view_dim)},
      {"separate_language_encoders", m.separate_language_encoders ? "1" : "0"},
      {"env_mode", std::string(model::env_mode_name(cfg.env_mode))},
      {"task_mode", std::string(train::task_mode_name(cfg.task_mode))},
      {"dialog_variant", std::string(corpus::variant_name(cfg.variant))},
      {"max_episode_length", std::to_string(cfg.max_episode_length)},
      {"success_threshold", world::format_real(cfg.vln_reward.success_threshold)},
      {"lambda", world::format_real(cfg.lambda)},
  };
  save_checkpoint(dir / "checkpoint.txt", state.params, meta);
  const ParameterSet moments = state.optimizer.state();
  if (moments.size() > 0) save_checkpoint(dir / "optimizer.txt", moments);
}

SavedRun load_train_state(const fs::path& dir_or_file) {
  const bool is_dir = fs::is_directory(dir_or_file);
  const fs::path file = is_dir ? dir_or_file / "checkpoint.txt" : dir_or_file;
  Checkpoint ck = load_checkpoint(file);
  const Meta& meta = ck.meta;

  SavedRun run;
  train::TrainConfig& cfg = run.config;
  model::ModelConfig& m = cfg.model;
  m.vocab_size = as_int(meta, "vocab_size");
  m.embed_dim = as_int(meta, "embed_dim");
  m.lang_hidden = as_int(meta, "lang_hidden");
  m.lang_layers = as_int(meta, "lang_layers");
  m.traj_hidden = as_int(meta, "traj_hidden");
  m.traj_layers = as_int(meta, "traj_layers");
  m.attention_dim = as_int(meta, "attention_dim");
  m.classifier_hidden = as_int(meta, "classifier_hidden");
  m.house_classes = as_int(meta, "house_classes");
  m.view_dim = as_int(meta, "view_dim");
  m.separate_language_encoders = need(meta, "separate_language_encoders") == "1";
  cfg.env_mode = model::env_mode_from_name(need(meta, "env_mode"));
  cfg.task_mode = train::task_mode_from_name(need(meta, "task_mode"));
  cfg.variant = corpus::variant_from_name(need(meta, "dialog_variant"));
  cfg.max_episode_length = as_int(meta, "max_episode_length");
  cfg.lambda = world::parse_real(need(meta, "lambda"));
  const double d_th = world::parse_real(need(meta, "success_threshold"));
  cfg.vln_reward.success_threshold = cfg.ndh_reward.success_threshold = d_th;
  cfg.optimizer = train::optimizer_from_name(need(meta, "optimizer"));

  run.seed = as_u64(meta, "seed");
  run.state.step = static_cast<std::size_t>(as_u64(meta, "step"));
  run.state.params = std::move(ck.params);
  const fs::path moments = file.parent_path() / "optimizer.txt";
  ParameterSet opt_state;
  if (fs::exists(moments)) opt_state = load_checkpoint(moments).params;
  run.state.optimizer = train::Optimizer(cfg.optimizer, cfg.learning_rate, cfg.clip_norm);
  run.state.optimizer.restore(opt_state, static_cast<std::size_t>(as_u64(meta, "updates")));
  return run;
}

}  // namespace emnav::io
