// SPDX-License-Identifier: Apache-2.0
#include "emnav/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "emnav/corpus/generate.hpp"
#include "emnav/corpus/sampler.hpp"
#include "emnav/world/navigation.hpp"

namespace emnav::train {
namespace {

constexpr std::uint64_t kTagInit = 0x696e6974ULL;
constexpr std::uint64_t kTagSampler = 0x736d706cULL;
constexpr std::uint64_t kTagStep = 0x73746570ULL;
constexpr std::uint64_t kTagEval = 0x6576616cULL;

std::size_t argmax(const Matrix& m) {
  Eigen::Index r = 0, c = 0;
  m.maxCoeff(&r, &c);
  return static_cast<std::size_t>(r * m.cols() + c);
}

Matrix neighbor_rows(const std::vector<world::Direction>& dirs, int view_dim) {
  Matrix m(static_cast<Eigen::Index>(dirs.size() - 1), view_dim);
  for (std::size_t i = 1; i < dirs.size(); ++i) m.row(static_cast<Eigen::Index>(i - 1)) = dirs[i].feature.transpose();
  return m;
}

const rl::RewardConfig& reward_for(const TrainConfig& cfg, Task task) {
  return task == Task::Vln ? cfg.vln_reward : cfg.ndh_reward;
}

bool trains(TaskMode mode, Task task) {
  return mode == TaskMode::Multi || (mode == TaskMode::VlnOnly) == (task == Task::Vln);
}

}  // namespace

std::string_view task_mode_name(TaskMode m) noexcept {
  switch (m) {
    case TaskMode::VlnOnly: return "vln";
    case TaskMode::NdhOnly: return "ndh";
    case TaskMode::Multi: return "multi";
  }
  return "multi";
}

TaskMode task_mode_from_name(std::string_view name) {
  for (auto m : {TaskMode::VlnOnly, TaskMode::NdhOnly, TaskMode::Multi})
    if (task_mode_name(m) == name) return m;
  throw std::invalid_argument("unknown task mode '" + std::string(name) + "'");
}

std::string_view optimizer_name(OptimizerKind k) noexcept { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind optimizer_from_name(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(clone_fraction >= 0.0 && clone_fraction <= 1.0)) fail("clone_fraction must lie in [0, 1]");
  if (!(lambda >= 0.0)) fail("lambda must be nonnegative");
  if (!(learning_rate >= 0.0)) fail("learning_rate must be nonnegative");
  if (!(clip_norm > 0.0)) fail("clip_norm must be positive");
  if (max_episode_length < 1) fail("max_episode_length must be at least 1");
  if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) fail("mix_ratio must lie in [0, 1]");
  if (!(env_loss_weight >= 0.0)) fail("env_loss_weight must be nonnegative");
  if (seeds.empty()) fail("seeds must list at least one seed");
  vln_reward.validate();
  ndh_reward.validate();
}

SupervisionSource mixed_supervision_target(const House& house, const corpus::NdhSample& sample) {
  if (!sample.navigator_path.empty() && house.room_of(sample.navigator_path.back()) == sample.goal_room)
    return SupervisionSource::Navigator;
  return SupervisionSource::Oracle;
}

NavEpisode make_episode(const corpus::VlnSample& s, const corpus::Vocab& vocab) {
  NavEpisode ep;
  ep.task = Task::Vln;
  ep.house_id = s.house_id;
  ep.tokens = vocab.encode(s.tokens);
  ep.start = s.start;
  ep.teacher_path = s.path;
  ep.reference_path = s.path;
  ep.goal.node = s.goal;
  return ep;
}

NavEpisode make_episode(const corpus::NdhSample& s, const House& house, const corpus::Vocab& vocab,
                        corpus::DialogInputVariant variant) {
  NavEpisode ep;
  ep.task = Task::Ndh;
  ep.house_id = s.house_id;
  ep.tokens = vocab.encode(corpus::serialize_dialog(s, variant));
  ep.start = s.start;
  ep.teacher_path =
      mixed_supervision_target(house, s) == SupervisionSource::Navigator ? s.navigator_path : s.oracle_path;
  ep.reference_path = s.oracle_path;
  ep.goal.node = s.oracle_path.back();
  ep.goal.room = s.goal_room;
  return ep;
}

model::ModelConfig resolve_model_config(model::ModelConfig cfg, const corpus::Vocab& vocab,
                                        const corpus::Benchmark& bench) {
  if (bench.houses.empty()) throw std::invalid_argument("benchmark has no houses");
  cfg.vocab_size = static_cast<int>(vocab.size());
  cfg.house_classes = static_cast<int>(bench.train_house_count);
  cfg.view_dim = bench.houses.front().feature_dim() + 4;
  return cfg;
}

rl::EpisodeTrace rollout(Tape& tape, const model::ModelConfig& cfg, const House& house, const NavEpisode& ep,
                         RolloutMode mode, int max_len, Rng& rng) {
  if (max_len < 1) throw std::invalid_argument("rollout: max_len must be at least 1");
  if (mode == RolloutMode::Teacher &&
      (ep.teacher_path.empty() || ep.teacher_path.front() != ep.start.node ||
       !corpus::is_edge_connected(house, ep.teacher_path)))
    throw world::WorldError("teacher path is not a valid path from the start node in house " +
                            std::to_string(house.id()));

  rl::EpisodeTrace tr;
  tr.task = ep.task;
  tr.cloned = mode == RolloutMode::Teacher;
  tr.house_id = ep.house_id;
  tr.path.push_back(ep.start.node);

  const model::LanguageEncoding lang = model::encode_language(tape, cfg, ep.tokens, ep.task);
  model::TrajectoryState state = model::initial_state(tape, cfg);
  world::AgentPose pose = ep.start;
  std::size_t teacher_pos = 0;

  for (int t = 0;; ++t) {
    const Var panorama = tape.constant(world::observe_panorama(house, pose));
    state = model::encode_panorama_step(tape, cfg, state, panorama).state;
    const auto dirs = world::navigable_directions(house, pose);
    const model::ActionScores scores =
        model::predict_action(tape, cfg, state, lang, panorama, neighbor_rows(dirs, cfg.view_dim));

    rl::TraceStep st;
    st.pose = pose;
    st.log_probs = scores.log_probs;
    st.latent = state.latent();
    if (mode == RolloutMode::Teacher) {
      st.teacher_action = teacher_pos + 1 < ep.teacher_path.size()
                              ? world::action_toward(house, pose, ep.teacher_path[teacher_pos + 1])
                              : 0;
    } else if (ep.goal.node >= 0 && pose.node != ep.goal.node) {
      st.teacher_action = world::action_toward(house, pose, house.next_hop(pose.node, ep.goal.node));
    }

    const Matrix& lp = tape.value(scores.log_probs);
    switch (mode) {
      case RolloutMode::Teacher: st.action = st.teacher_action; break;
      case RolloutMode::Greedy: st.action = argmax(lp); break;
      case RolloutMode::Sample: {
        std::vector<double> w(static_cast<std::size_t>(lp.size()));
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(lp(static_cast<Eigen::Index>(i), 0));
        st.action = categorical(rng, w);
        break;
      }
    }
    if (st.action != 0 && t + 1 >= max_len) {
      st.action = 0;
      st.forced = true;
      tr.truncated = true;
    }
    tr.steps.push_back(st);
    if (st.action == 0) break;
    pose = world::step(house, pose, st.action).pose;
    tr.path.push_back(pose.node);
    ++teacher_pos;
  }
  return tr;
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double clip_norm)
    : kind_(kind), lr_(learning_rate), clip_(clip_norm) {}

double Optimizer::apply(ParameterSet& params, Gradients& grads) {
  const double norm = std::sqrt(grads.squared_norm());
  if (!std::isfinite(norm)) throw TrainError("non-finite gradient norm");
  const double scale = norm > clip_ ? clip_ / norm : 1.0;
  ++t_;
  if (kind_ == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params.value(i) -= (lr_ * scale) * grads[i];
    return norm;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.push_back(Matrix::Zero(params.value(i).rows(), params.value(i).cols()));
      v_.push_back(Matrix::Zero(params.value(i).rows(), params.value(i).cols()));
    }
  }
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix g = scale * grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g.cwiseProduct(g);
    params.value(i).array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
  }
  return norm;
}

ParameterSet Optimizer::state() const {
  ParameterSet s;
  for (std::size_t i = 0; i < m_.size(); ++i) {
    s.add("m." + std::to_string(i), m_[i]);
    s.add("v." + std::to_string(i), v_[i]);
  }
  return s;
}

void Optimizer::restore(const ParameterSet& state, std::size_t updates) {
  m_.clear();
  v_.clear();
  for (std::size_t i = 0; state.contains("m." + std::to_string(i)); ++i) {
    m_.push_back(state["m." + std::to_string(i)]);
    v_.push_back(state["v." + std::to_string(i)]);
  }
  t_ = updates;
}

StepStats train_step(ParameterSet& params, Optimizer& opt, const corpus::Benchmark& bench,
                     std::span<const NavEpisode* const> batch, const TrainConfig& cfg, Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  const model::ModelConfig& mcfg = cfg.model;
  Tape tape(params);
  const auto n_clone = static_cast<std::size_t>(std::lround(cfg.clone_fraction * static_cast<double>(batch.size())));

  StepStats stats;
  std::vector<rl::EpisodeTrace> traces;
  traces.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const NavEpisode& ep = *batch[i];
    const House& house = bench.house(ep.house_id);
    rl::EpisodeTrace tr = rollout(tape, mcfg, house, ep, i < n_clone ? RolloutMode::Teacher : RolloutMode::Sample,
                                  cfg.max_episode_length, rng);
    tr.house_label = bench.label(ep.house_id);
    rl::assign_rewards(tr, house, ep.goal, reward_for(cfg, ep.task));
    (ep.task == Task::Vln ? stats.vln_episodes : stats.ndh_episodes) += 1;
    traces.push_back(std::move(tr));
  }

  const bool any_sampled = std::any_of(traces.begin(), traces.end(), [](const auto& t) { return !t.cloned; });
  const double baseline = any_sampled ? rl::estimate_baseline(traces) : 0.0;
  const rl::NavigationLoss nav = rl::navigation_loss(tape, traces, baseline);

  Var total = nav.total;
  if (cfg.env_loss_weight > 0.0) {
    std::vector<Var> preds;
    std::vector<int> labels;
    for (const auto& tr : traces) {
      if (tr.house_label < 0) continue;
      for (const auto& s : tr.steps) {
        preds.push_back(model::classify_environment(tape, mcfg, s.latent, cfg.env_mode, cfg.lambda));
        labels.push_back(tr.house_label);
      }
    }
    if (!preds.empty()) {
      const Var env = rl::env_loss(tape, preds, labels);
      total = tape.add(total, tape.scale(env, cfg.env_loss_weight));
      stats.env_loss = tape.scalar(env);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < preds.size(); ++i)
        hits += argmax(tape.value(preds[i])) == static_cast<std::size_t>(labels[i]) ? 1 : 0;
      stats.env_accuracy = static_cast<double>(hits) / static_cast<double>(preds.size());
    }
  }

  stats.loss = tape.scalar(total);
  stats.nav_loss = tape.scalar(nav.total);
  stats.rl_loss = tape.scalar(nav.rl);
  stats.bc_loss = tape.scalar(nav.bc);
  stats.bc_per_step = stats.bc_loss;
  if (!std::isfinite(stats.loss))
    throw TrainError("non-finite loss (nav " + std::to_string(stats.nav_loss) + ", env " +
                     std::to_string(stats.env_loss) + ")");
  Gradients grads = tape.backward(total);
  stats.grad_norm = opt.apply(params, grads);
  return stats;
}

std::vector<EpisodeOutcome> evaluate_policy(const ParameterSet& params, const model::ModelConfig& mcfg,
                                            const corpus::Benchmark& bench, std::span<const NavEpisode> episodes,
                                            PolicyKind policy, const TrainConfig& cfg, std::uint64_t seed,
                                            bool keep_latents) {
  std::vector<EpisodeOutcome> out;
  out.reserve(episodes.size());
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    const NavEpisode& ep = episodes[i];
    const House& house = bench.house(ep.house_id);
    Rng rng(mix_seed({seed, kTagEval, i}));
    EpisodeOutcome o;
    o.task = ep.task;
    o.house_id = ep.house_id;
    switch (policy) {
      case PolicyKind::ShortestPath: o.path = house.shortest_path(ep.start.node, ep.goal.node); break;
      case PolicyKind::Random: {
        world::AgentPose pose = ep.start;
        o.path.push_back(pose.node);
        for (int t = 0; t + 1 < cfg.max_episode_length; ++t) {
          const std::size_t a = uniform_index(rng, world::navigable_directions(house, pose).size());
          if (a == 0) break;
          pose = world::step(house, pose, a).pose;
          o.path.push_back(pose.node);
        }
        break;
      }
      case PolicyKind::Model: {
        Tape tape(params);
        const rl::EpisodeTrace tr = rollout(tape, mcfg, house, ep, RolloutMode::Greedy, cfg.max_episode_length, rng);
        o.path = tr.path;
        const bool seen = bench.label(ep.house_id) >= 0;
        for (const auto& s : tr.steps) {
          if (keep_latents) o.latents.push_back(tape.value(s.latent));
          if (seen) {
            const Var lp = model::classify_environment(tape, mcfg, s.latent, model::EnvMode::Aware, cfg.lambda);
            o.env_predicted.push_back(static_cast<int>(argmax(tape.value(lp))));
          }
        }
        break;
      }
    }
    const double d_th = reward_for(cfg, ep.task).success_threshold;
    o.metrics = eval::evaluate_episode(house, o.path, ep.reference_path, d_th,
                                       ep.task == Task::Ndh ? std::optional<world::RoomId>(ep.goal.room)
                                                            : std::nullopt);
    out.push_back(std::move(o));
  }
  return out;
}

double teacher_forced_nll(const ParameterSet& params, const model::ModelConfig& mcfg,
                          const corpus::Benchmark& bench, std::span<const NavEpisode> episodes, int max_len) {
  double total = 0.0;
  std::size_t n = 0;
  Rng rng(0);
  for (const auto& ep : episodes) {
    Tape tape(params);
    const rl::EpisodeTrace tr = rollout(tape, mcfg, bench.house(ep.house_id), ep, RolloutMode::Teacher, max_len, rng);
    for (const auto& s : tr.steps) {
      if (s.forced) continue;
      total -= tape.value(s.log_probs)(static_cast<Eigen::Index>(s.teacher_action), 0);
      ++n;
    }
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

EvalSets build_eval_sets(const corpus::Benchmark& bench, const corpus::Vocab& vocab, const TrainConfig& cfg) {
  auto build = [&](const corpus::Fold& fold) {
    std::vector<NavEpisode> eps;
    const std::size_t cap = cfg.eval_episodes == 0 ? SIZE_MAX : cfg.eval_episodes;
    if (trains(cfg.task_mode, Task::Vln))
      for (std::size_t i = 0; i < fold.vln.size() && i < cap; ++i) eps.push_back(make_episode(fold.vln[i], vocab));
    if (trains(cfg.task_mode, Task::Ndh))
      for (std::size_t i = 0; i < fold.ndh.size() && i < cap; ++i)
        eps.push_back(make_episode(fold.ndh[i], bench.house(fold.ndh[i].house_id), vocab, cfg.variant));
    return eps;
  };
  return {build(bench.train), build(bench.val_seen), build(bench.val_unseen)};
}

std::vector<LogRecord> evaluate_folds(const ParameterSet& params, const model::ModelConfig& mcfg,
                                      const corpus::Benchmark& bench, const EvalSets& sets, const TrainConfig& cfg,
                                      std::uint64_t seed, std::size_t step) {
  std::vector<LogRecord> out;
  const std::pair<std::string_view, const std::vector<NavEpisode>*> folds[] = {
      {eval::kFoldTrain, &sets.train}, {eval::kFoldSeen, &sets.val_seen}, {eval::kFoldUnseen, &sets.val_unseen}};
  for (const auto& [name, eps] : folds) {
    if (eps->empty()) continue;
    const auto outcomes = evaluate_policy(params, mcfg, bench, *eps, PolicyKind::Model, cfg, seed);
    for (Task task : {Task::Vln, Task::Ndh}) {
      LogRecord rec;
      rec.seed = seed;
      rec.step = step;
      rec.fold = std::string(name);
      rec.task = task;
      std::size_t hits = 0, preds = 0;
      for (const auto& o : outcomes) {
        if (o.task != task) continue;
        ++rec.episodes;
        for (std::size_t k = 0; k < rec.metrics.v.size(); ++k) rec.metrics.v[k] += o.metrics.v[k];
        for (int p : o.env_predicted) {
          ++preds;
          hits += p == bench.label(o.house_id) ? 1 : 0;
        }
      }
      if (rec.episodes == 0) continue;
      for (double& x : rec.metrics.v) x /= static_cast<double>(rec.episodes);
      if (preds > 0) rec.env_accuracy = static_cast<double>(hits) / static_cast<double>(preds);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

TrainData build_train_data(const corpus::Benchmark& bench, const corpus::Vocab& vocab, const TrainConfig& cfg) {
  TrainData d;
  if (trains(cfg.task_mode, Task::Vln))
    for (const auto& s : bench.train.vln) d.vln.push_back(make_episode(s, vocab));
  if (trains(cfg.task_mode, Task::Ndh))
    for (const auto& s : bench.train.ndh) d.ndh.push_back(make_episode(s, bench.house(s.house_id), vocab, cfg.variant));
  return d;
}

RunResult train_run(const TrainConfig& cfg, const corpus::Benchmark& bench, const corpus::Vocab& vocab,
                    const TrainData& data, std::uint64_t seed, std::optional<TrainState> resume,
                    const StepCallback& on_eval) {
  cfg.validate();
  TrainConfig run_cfg = cfg;
  run_cfg.model = resolve_model_config(cfg.model, vocab, bench);
  const model::ModelConfig& mcfg = run_cfg.model;

  RunResult run;
  run.seed = seed;
  if (resume) {
    run.state = std::move(*resume);
  } else {
    run.state.params = model::init_parameters(mcfg, mix_seed({seed, kTagInit}));
    run.state.optimizer = Optimizer(cfg.optimizer, cfg.learning_rate, cfg.clip_norm);
  }

  const double ratio = cfg.task_mode == TaskMode::VlnOnly ? 1.0 : cfg.task_mode == TaskMode::NdhOnly ? 0.0
                                                                                                     : cfg.mix_ratio;
  corpus::InterleavedSampler sampler(data.vln.size(), data.ndh.size(), ratio, mix_seed({seed, kTagSampler}));
  for (std::size_t s = 0; s < run.state.step; ++s) sampler.next_batch(cfg.batch_size);
  const EvalSets sets = build_eval_sets(bench, vocab, cfg);

  std::vector<const NavEpisode*> batch;
  while (run.state.step < cfg.steps) {
    batch.clear();
    for (const auto& ref : sampler.next_batch(cfg.batch_size))
      batch.push_back(ref.task == Task::Vln ? &data.vln[ref.index] : &data.ndh[ref.index]);
    Rng rng(mix_seed({seed, kTagStep, run.state.step}));
    run.stats.push_back(train_step(run.state.params, run.state.optimizer, bench, batch, run_cfg, rng));
    ++run.state.step;
    const bool at_interval = cfg.eval_interval > 0 && run.state.step % cfg.eval_interval == 0;
    if (at_interval || run.state.step == cfg.steps) {
      auto recs = evaluate_folds(run.state.params, mcfg, bench, sets, run_cfg, seed, run.state.step);
      run.log.insert(run.log.end(), recs.begin(), recs.end());
      if (on_eval) on_eval(run);
    }
  }
  return run;
}

std::vector<RunResult> train(const TrainConfig& cfg, const corpus::Benchmark& bench, const corpus::Vocab& vocab) {
  const TrainData data = build_train_data(bench, vocab, cfg);
  std::vector<RunResult> runs;
  for (std::uint64_t seed : cfg.seeds) runs.push_back(train_run(cfg, bench, vocab, data, seed));
  return runs;
}

std::vector<AblationRow> run_ablation_fixed_paths(const TrainConfig& cfg, const corpus::Benchmark& bench,
                                                  const corpus::Vocab& vocab, std::span<const double> fractions,
                                                  std::size_t total) {
  TrainConfig full = cfg;
  full.task_mode = TaskMode::Multi;
  const TrainData pool = build_train_data(bench, vocab, full);

  std::vector<AblationRow> rows;
  for (double f : fractions) {
    AblationRow row;
    row.vln_fraction = f;
    row.total = total;
    for (std::uint64_t seed : cfg.seeds) {
      const auto refs = corpus::fixed_total_mixture(pool.ndh.size(), pool.vln.size(), total, f, seed);
      TrainData data;
      for (const auto& r : refs) (r.task == Task::Vln ? data.vln : data.ndh).push_back(
          r.task == Task::Vln ? pool.vln[r.index] : pool.ndh[r.index]);
      row.vln_paths = data.vln.size();
      row.ndh_paths = data.ndh.size();

      TrainConfig run_cfg = cfg;
      run_cfg.task_mode = data.vln.empty() ? TaskMode::NdhOnly : data.ndh.empty() ? TaskMode::VlnOnly : TaskMode::Multi;
      run_cfg.mix_ratio = static_cast<double>(data.vln.size()) / static_cast<double>(total);
      run_cfg.eval_interval = 0;
      // NDH progress is scored on every row, including the all-VLN one.
      TrainConfig eval_cfg = run_cfg;
      eval_cfg.task_mode = TaskMode::NdhOnly;
      const RunResult run = train_run(run_cfg, bench, vocab, data, seed);
      const auto mcfg = resolve_model_config(cfg.model, vocab, bench);
      const auto recs = evaluate_folds(run.state.params, mcfg, bench, build_eval_sets(bench, vocab, eval_cfg),
                                       eval_cfg, seed, run.state.step);
      for (const auto& r : recs) {
        if (r.fold == eval::kFoldSeen) row.progress_seen += r.metrics.progress();
        if (r.fold == eval::kFoldUnseen) row.progress_unseen += r.metrics.progress();
      }
    }
    row.progress_seen /= static_cast<double>(cfg.seeds.size());
    row.progress_unseen /= static_cast<double>(cfg.seeds.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace emnav::train
