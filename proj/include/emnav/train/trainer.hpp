// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emnav/autodiff/parameters.hpp"
#include "emnav/corpus/benchmark.hpp"
#include "emnav/eval/metrics.hpp"
#include "emnav/model/agent.hpp"
#include "emnav/random.hpp"
#include "emnav/rl/loss.hpp"
#include "emnav/rl/reward.hpp"

namespace emnav::train {

using corpus::Task;
using world::House;
using world::NodeId;

enum class TaskMode { VlnOnly, NdhOnly, Multi };
enum class OptimizerKind { Sgd, Adam };
enum class RolloutMode { Teacher, Sample, Greedy };

std::string_view task_mode_name(TaskMode m) noexcept;
TaskMode task_mode_from_name(std::string_view name);
std::string_view optimizer_name(OptimizerKind k) noexcept;
OptimizerKind optimizer_from_name(std::string_view name);

struct TrainConfig {
  /// vocab_size, house_classes and view_dim are filled in from the data.
  model::ModelConfig model{};
  std::size_t batch_size = 8;
  double clone_fraction = 0.5;
  double lambda = 1.3;
  double learning_rate = 0.1;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  double clip_norm = 5.0;
  int max_episode_length = 20;
  TaskMode task_mode = TaskMode::Multi;
  model::EnvMode env_mode = model::EnvMode::Agnostic;
  corpus::DialogInputVariant variant = corpus::DialogInputVariant::FullHistory;
  double mix_ratio = 0.5;  // probability that a batch position is VLN in MULTI mode
  double env_loss_weight = 1.0;
  rl::RewardConfig vln_reward{0.95, 3.0, rl::RewardMode::Point};
  rl::RewardConfig ndh_reward{0.95, 3.0, rl::RewardMode::Room};
  std::size_t steps = 200;
  std::size_t eval_interval = 0;   // 0: evaluate only after the last step
  std::size_t eval_episodes = 0;   // per fold and task, 0: all
  std::vector<std::uint64_t> seeds{0};

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

/// A sample in model-ready form.
struct NavEpisode {
  Task task = Task::Vln;
  int house_id = 0;
  std::vector<int> tokens;
  world::AgentPose start;
  std::vector<NodeId> teacher_path;    // followed under teacher forcing
  std::vector<NodeId> reference_path;  // scored against by the metrics
  rl::Goal goal;
};

enum class SupervisionSource { Navigator, Oracle };

/// Navigator path when it ends inside the goal room, else the oracle path.
SupervisionSource mixed_supervision_target(const House& house, const corpus::NdhSample& sample);

NavEpisode make_episode(const corpus::VlnSample& s, const corpus::Vocab& vocab);
NavEpisode make_episode(const corpus::NdhSample& s, const House& house, const corpus::Vocab& vocab,
                        corpus::DialogInputVariant variant);

/// Model dims completed from the vocabulary and the benchmark.
model::ModelConfig resolve_model_config(model::ModelConfig cfg, const corpus::Vocab& vocab,
                                        const corpus::Benchmark& bench);

/// Run one episode on `tape`. Teacher mode follows `teacher_path`; sample mode
/// draws from the policy; greedy mode takes the argmax. An episode reaching
/// `max_len` steps ends with a forced STOP and is flagged truncated.
rl::EpisodeTrace rollout(Tape& tape, const model::ModelConfig& cfg, const House& house, const NavEpisode& ep,
                         RolloutMode mode, int max_len, Rng& rng);

/// First-order optimizer with per-parameter state.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double clip_norm);

  /// Clip the global gradient norm, then update `params`. Returns the norm before clipping.
  double apply(ParameterSet& params, Gradients& grads);

  OptimizerKind kind() const noexcept { return kind_; }
  std::size_t updates() const noexcept { return t_; }
  /// Adam moments, as a parameter set (m.<name>, v.<name>) for checkpointing.
  ParameterSet state() const;
  void restore(const ParameterSet& state, std::size_t updates);

 private:
  OptimizerKind kind_;
  double lr_;
  double clip_;
  std::size_t t_ = 0;
  std::vector<Matrix> m_, v_;
};

struct StepStats {
  double loss = 0.0;
  double nav_loss = 0.0;
  double rl_loss = 0.0;
  double bc_loss = 0.0;
  double bc_per_step = 0.0;  // mean teacher-forced NLL per step
  double env_loss = 0.0;
  double env_accuracy = 0.0;
  double grad_norm = 0.0;
  std::size_t vln_episodes = 0;
  std::size_t ndh_episodes = 0;
};

class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One update: rollouts, L_nav + L_env on a single tape, one backward pass,
/// one optimizer step. The first round(clone_fraction * |batch|) episodes are
/// teacher-forced, the rest sampled.
StepStats train_step(ParameterSet& params, Optimizer& opt, const corpus::Benchmark& bench,
                     std::span<const NavEpisode* const> batch, const TrainConfig& cfg, Rng& rng);

enum class PolicyKind { Model, ShortestPath, Random };

struct EpisodeOutcome {
  Task task = Task::Vln;
  int house_id = 0;
  std::vector<NodeId> path;
  eval::MetricValues metrics;
  std::vector<Vector> latents;   // z_t per step (model policy only)
  std::vector<int> env_predicted;  // classifier argmax per step (model policy, training houses)
};

/// Greedy (or baseline-policy) rollouts scored with the metric suite.
std::vector<EpisodeOutcome> evaluate_policy(const ParameterSet& params, const model::ModelConfig& mcfg,
                                            const corpus::Benchmark& bench, std::span<const NavEpisode> episodes,
                                            PolicyKind policy, const TrainConfig& cfg, std::uint64_t seed,
                                            bool keep_latents = false);

/// Mean per-step negative log-likelihood of the teacher actions over `episodes`.
double teacher_forced_nll(const ParameterSet& params, const model::ModelConfig& mcfg,
                          const corpus::Benchmark& bench, std::span<const NavEpisode> episodes, int max_len);

/// One metric-log record: a fold/task pair at an evaluation point.
struct LogRecord {
  std::uint64_t seed = 0;
  std::size_t step = 0;
  std::string fold;
  Task task = Task::Vln;
  std::size_t episodes = 0;
  eval::MetricValues metrics;
  std::optional<double> env_accuracy;  // only on folds of training houses

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

/// Evaluation episodes of every fold, capped per task by `cfg.eval_episodes`.
struct EvalSets {
  std::vector<NavEpisode> train, val_seen, val_unseen;
};
EvalSets build_eval_sets(const corpus::Benchmark& bench, const corpus::Vocab& vocab, const TrainConfig& cfg);

std::vector<LogRecord> evaluate_folds(const ParameterSet& params, const model::ModelConfig& mcfg,
                                      const corpus::Benchmark& bench, const EvalSets& sets, const TrainConfig& cfg,
                                      std::uint64_t seed, std::size_t step);

struct TrainState {
  ParameterSet params;
  Optimizer optimizer{OptimizerKind::Sgd, 0.1, 5.0};
  std::size_t step = 0;
};

struct RunResult {
  std::uint64_t seed = 0;
  TrainState state;
  std::vector<StepStats> stats;
  std::vector<LogRecord> log;
};

/// Training data in episode form; `train()` builds it from the train fold.
struct TrainData {
  std::vector<NavEpisode> vln;
  std::vector<NavEpisode> ndh;
};
TrainData build_train_data(const corpus::Benchmark& bench, const corpus::Vocab& vocab, const TrainConfig& cfg);

using StepCallback = std::function<void(const RunResult&)>;

/// Train one seed from scratch (or from `resume`), logging every
/// `eval_interval` steps and after the last one.
RunResult train_run(const TrainConfig& cfg, const corpus::Benchmark& bench, const corpus::Vocab& vocab,
                    const TrainData& data, std::uint64_t seed, std::optional<TrainState> resume = std::nullopt,
                    const StepCallback& on_eval = {});

/// One run per seed of `cfg.seeds` on the training fold.
std::vector<RunResult> train(const TrainConfig& cfg, const corpus::Benchmark& bench, const corpus::Vocab& vocab);

struct AblationRow {
  double vln_fraction = 0.0;
  std::size_t total = 0;
  std::size_t vln_paths = 0;
  std::size_t ndh_paths = 0;
  /// NDH goal progress per fold, mean over seeds.
  double progress_seen = 0.0;
  double progress_unseen = 0.0;
};

/// Multitask training at a constant number of training paths with the given
/// VLN fractions; one row per fraction.
std::vector<AblationRow> run_ablation_fixed_paths(const TrainConfig& cfg, const corpus::Benchmark& bench,
                                                  const corpus::Vocab& vocab, std::span<const double> fractions,
                                                  std::size_t total);

}  // namespace emnav::train
