// SPDX-License-Identifier: Apache-2.0
// Acceptance harness: one PASS/FAIL line per criterion.
//
//   acceptance [--cli PATH] [--work DIR] [N ...]
//
// With no numbers every criterion runs. Exit status is 0 when all selected
// criteria pass.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "emnav/autodiff/gradcheck.hpp"
#include "emnav/autodiff/layers.hpp"
#include "emnav/corpus/benchmark.hpp"
#include "emnav/corpus/sampler.hpp"
#include "emnav/eval/cluster.hpp"
#include "emnav/eval/metrics.hpp"
#include "emnav/io/report.hpp"
#include "emnav/model/agent.hpp"
#include "emnav/rl/reward.hpp"
#include "emnav/train/trainer.hpp"
#include "emnav/world/generate.hpp"
#include "emnav/world/navigation.hpp"

#ifndef EMNAV_CLI_PATH
#define EMNAV_CLI_PATH "emnav"
#endif

namespace fs = std::filesystem;
using namespace emnav;
using world::NodeId;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  std::string cli = EMNAV_CLI_PATH;
  fs::path work;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

std::string fmt(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i], 3);
  return out + "]";
}

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
  return m;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

world::House house_with_seed(std::uint64_t seed, int nodes = 20, int rooms = 4) {
  world::HouseSpec s;
  s.seed = seed;
  s.node_count = nodes;
  s.room_count = rooms;
  return world::generate_house(s);
}

std::vector<NodeId> random_walk(const world::House& h, NodeId start, int hops, Rng& rng) {
  std::vector<NodeId> p{start};
  for (int i = 0; i < hops; ++i) {
    const auto& nb = h.neighbors(p.back());
    p.push_back(nb[uniform_index(rng, nb.size())].to);
  }
  return p;
}

// --- 1: gradient correctness -------------------------------------------------

Outcome gradient_correctness() {
  const double start = cpu_seconds();
  using Build = std::function<Var(Tape&, Var, Var)>;
  const std::vector<std::pair<std::string, Build>> ops{
      {"matmul", [](Tape& t, Var a, Var b) { return t.matmul(a, t.transpose(b)); }},
      {"add", [](Tape& t, Var a, Var b) { return t.add(a, b); }},
      {"sub", [](Tape& t, Var a, Var b) { return t.sub(a, b); }},
      {"mul", [](Tape& t, Var a, Var b) { return t.mul(a, b); }},
      {"scale", [](Tape& t, Var a, Var b) { return t.scale(t.add(a, b), -2.5); }},
      {"tanh", [](Tape& t, Var a, Var b) { return t.tanh(t.mul(a, b)); }},
      {"sigmoid", [](Tape& t, Var a, Var b) { return t.sigmoid(t.sub(a, b)); }},
      {"relu", [](Tape& t, Var a, Var b) { return t.add(t.relu(a), t.relu(t.sub(b, a))); }},
      {"exp", [](Tape& t, Var a, Var b) { return t.exp(t.mul(a, b)); }},
      {"log", [](Tape& t, Var a, Var b) { return t.log(t.add(a, t.mul(b, b))); }},
      {"concat", [](Tape& t, Var a, Var b) { return t.concat({a, b}); }},
      {"hconcat", [](Tape& t, Var a, Var b) { return t.hconcat(std::vector<Var>{a, b}); }},
      {"slice_rows", [](Tape& t, Var a, Var b) { return t.slice_rows(t.mul(a, b), 1, 2); }},
      {"softmax", [](Tape& t, Var a, Var b) { return t.softmax(t.mul(a, b)); }},
      {"log_softmax",
       [](Tape& t, Var a, Var b) { return t.log_softmax(t.matmul(a, t.transpose(t.slice_rows(b, 0, 1)))); }},
      {"embedding", [](Tape& t, Var a, Var b) { return t.add(t.embedding(a, 2), t.embedding(b, 0)); }},
      {"sum", [](Tape& t, Var a, Var b) { return t.sum(t.mul(a, b)); }},
      {"mean", [](Tape& t, Var a, Var b) { return t.mean(t.mul(a, t.tanh(b))); }},
      {"pick", [](Tape& t, Var a, Var b) { return t.add(t.pick(a, 3), t.pick(t.mul(a, b), 4)); }},
      {"attention",
       [](Tape& t, Var a, Var b) { return dot_attention(t, t.transpose(t.slice_rows(b, 1, 1)), a, t.tanh(b)).output; }},
      {"lstm_cell",
       [](Tape& t, Var a, Var b) {
         const Var w = t.slice_rows(t.concat({a, b}), 1, 4);
         const Var bias = t.concat({t.pick(b, 0), t.pick(b, 1), t.pick(b, 2), t.pick(b, 3)});
         const LstmState s0{t.pick(a, 0), t.constant(Matrix::Constant(1, 1, -0.2))};
         const LstmState s1 = lstm_cell(t, w, bias, t.pick(a, 5), s0);
         return lstm_cell(t, w, bias, t.pick(b, 4), s1).h;
       }},
  };
  double worst = 0.0;
  std::string worst_op;
  for (const auto& [name, build] : ops) {
    Rng rng(17);
    ParameterSet p;
    p.add("a", random_matrix(3, 2, rng, 0.2, 1.5));
    p.add("b", random_matrix(3, 2, rng));
    Tape tape(p);
    const Var out = build(tape, tape.parameter("a"), tape.parameter("b"));
    const Matrix& ov = tape.value(out);
    const Var loss = tape.sum(tape.mul(out, tape.constant(random_matrix(ov.rows(), ov.cols(), rng))));
    const double err = finite_diff_check(tape, p, loss, 1e-4).max_relative_error;
    if (err > worst) {
      worst = err;
      worst_op = name;
    }
  }

  // Full model over a two-step episode with the environment head attached.
  world::HouseSpec hs;
  hs.seed = 9;
  hs.node_count = 8;
  hs.room_count = 2;
  hs.features.dim = 4;
  const world::House h = world::generate_house(hs);
  model::ModelConfig cfg;
  cfg.vocab_size = 7;
  cfg.embed_dim = 3;
  cfg.lang_hidden = 2;
  cfg.traj_hidden = 4;
  cfg.attention_dim = 3;
  cfg.classifier_hidden = 3;
  cfg.house_classes = 3;
  cfg.view_dim = h.feature_dim() + 4;
  ParameterSet p = model::init_parameters(cfg, 11);
  Tape tape(p);
  const auto lang = model::encode_language(tape, cfg, std::vector<int>{2, 5, 1, 4}, corpus::Task::Ndh);
  model::TrajectoryState state = model::initial_state(tape, cfg);
  world::AgentPose pose{0, 0.0, 0.0};
  std::vector<Var> terms;
  for (int t = 0; t < 2; ++t) {
    const Var pano = tape.constant(world::observe_panorama(h, pose));
    state = model::encode_panorama_step(tape, cfg, state, pano).state;
    const auto dirs = world::navigable_directions(h, pose);
    Matrix nb(static_cast<Eigen::Index>(dirs.size() - 1), cfg.view_dim);
    for (std::size_t k = 1; k < dirs.size(); ++k) nb.row(static_cast<Eigen::Index>(k - 1)) = dirs[k].feature.transpose();
    terms.push_back(tape.pick(model::predict_action(tape, cfg, state, lang, pano, nb).log_probs, 1));
    terms.push_back(tape.pick(model::classify_environment(tape, cfg, state.latent(), model::EnvMode::Aware, 1.0), 2));
    pose = world::step(h, pose, 1).pose;
  }
  const Var loss = tape.scale(tape.sum(tape.concat(terms)), -1.0);
  const GradCheckResult full = finite_diff_check(tape, p, loss, 1e-4);
  const double secs = cpu_seconds() - start;
  return {worst < 1e-3 && full.max_relative_error < 1e-3 && secs < 30.0,
          "primitives max rel err " + fmt(worst) + " (" + worst_op + "), episode graph " +
              fmt(full.max_relative_error) + " over " + std::to_string(full.entries_checked) + " entries, " +
              fmt(secs, 3) + " s"};
}

// --- 2: gradient reversal contract -------------------------------------------

Outcome gradient_reversal() {
  Rng rng(23);
  ParameterSet p;
  p.add("W", random_matrix(4, 3, rng));
  p.add("x", random_matrix(3, 1, rng));
  p.add("V", random_matrix(5, 4, rng));
  auto grads = [&](bool reversed, Matrix& forward) {
    Tape tape(p);
    const Var h = tape.tanh(tape.matmul(tape.parameter("W"), tape.parameter("x")));
    const Var z = reversed ? tape.grad_reverse(h, GradReverseConfig{1.3}) : h;
    if (reversed && !(tape.value(z).array() == tape.value(h).array()).all()) forward.resize(0, 0);
    forward = tape.value(z);
    const Var loss = tape.pick(tape.log_softmax(tape.matmul(tape.parameter("V"), z)), 2);
    return tape.backward(loss);
  };
  Matrix f_rev, f_plain;
  const Gradients rev = grads(true, f_rev);
  const Gradients plain = grads(false, f_plain);
  const bool identity = f_rev.size() == f_plain.size() && (f_rev.array() == f_plain.array()).all();
  double worst = 0.0;
  for (const char* name : {"W", "x"}) {
    const Matrix expected = -1.3 * plain[name];
    worst = std::max(worst, (rev[name] - expected).norm() / std::max(expected.norm(), 1e-300));
  }
  const bool head_same = (rev["V"].array() == plain["V"].array()).all();
  return {identity && head_same && worst <= 1e-12,
          std::string("forward ") + (identity ? "bit-exact" : "differs") + ", upstream rel err " + fmt(worst) +
              ", head gradient " + (head_same ? "unchanged" : "changed")};
}

// --- 3: reward telescoping ---------------------------------------------------

Outcome reward_telescoping() {
  Rng rng(31);
  std::vector<world::House> houses;
  for (std::uint64_t s = 0; s < 5; ++s) houses.push_back(house_with_seed(100 + s));
  double worst = 0.0;
  int episodes = 0;
  for (auto mode : {rl::RewardMode::Point, rl::RewardMode::Room}) {
    rl::RewardConfig cfg;
    cfg.mode = mode;
    for (int i = 0; i < 1000; ++i) {
      const world::House& h = houses[uniform_index(rng, houses.size())];
      const auto path = random_walk(h, static_cast<NodeId>(uniform_index(rng, h.node_count())),
                                    static_cast<int>(uniform_index(rng, 12)), rng);
      const rl::Goal goal{static_cast<NodeId>(uniform_index(rng, h.node_count())),
                          static_cast<world::RoomId>(uniform_index(rng, h.room_count()))};
      const auto r = rl::episode_rewards(h, path, goal, cfg);
      const double moved = std::accumulate(r.begin(), r.end() - 1, 0.0);
      const double expected =
          rl::goal_distance(h, path.front(), goal, mode) - rl::goal_distance(h, path.back(), goal, mode);
      worst = std::max(worst, std::abs(moved - expected));
      ++episodes;
    }
  }
  return {worst <= 1e-9, std::to_string(episodes) + " episodes, max |sum r - dD| = " + fmt(worst)};
}

// --- 4: metric identities ----------------------------------------------------

Outcome metric_identities() {
  bool ok = true;
  std::vector<std::string> notes;
  const world::House h = house_with_seed(41);
  Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const auto r = h.shortest_path(static_cast<NodeId>(uniform_index(rng, 20)), static_cast<NodeId>(uniform_index(rng, 20)));
    const auto m = eval::evaluate_episode(h, r, r, 3.0);
    if (!(m.ne() == 0.0 && m.sr() == 1.0 && std::abs(m.spl() - 1.0) < 1e-12 && std::abs(m.cls() - 1.0) < 1e-12)) {
      ok = false;
      notes.push_back("self-evaluation off");
      break;
    }
  }
  std::size_t spl_violations = 0, cls_violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const NodeId s = static_cast<NodeId>(uniform_index(rng, 20));
    const auto p = random_walk(h, s, static_cast<int>(uniform_index(rng, 10)), rng);
    const auto r = h.shortest_path(s, static_cast<NodeId>(uniform_index(rng, 20)));
    const auto m = eval::evaluate_episode(h, p, r, 3.0);
    if (m.spl() > m.sr() + 1e-12) ++spl_violations;
    if (!(m.cls() >= 0.0 && m.cls() <= 1.0)) ++cls_violations;
  }
  ok = ok && spl_violations == 0 && cls_violations == 0;

  // Chain of 2 m edges along +y.
  std::vector<world::NavNode> nodes;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 7; ++i) {
    nodes.push_back({i, Eigen::Vector3d(0.0, 2.0 * i, 0.0), 0});
    if (i > 0) edges.emplace_back(i - 1, i);
  }
  std::vector<world::Room> rooms(1);
  rooms[0].id = 0;
  for (int i = 0; i < 7; ++i) rooms[0].nodes.push_back(i);
  const world::House chain(0, nodes, rooms, edges, world::FeatureSpec{}, 1);
  const double spl = eval::spl(chain, std::vector<NodeId>{0, 1, 2, 3, 4, 5, 6}, std::vector<NodeId>{0, 1, 2, 3, 4, 5}, 3.0);
  const double cls = eval::cls(chain, std::vector<NodeId>{0, 1, 2}, std::vector<NodeId>{0, 1}, 3.0);
  ok = ok && std::abs(spl - 0.8333) < 1e-4 && std::abs(cls - 0.5) < 1e-4;
  return {ok, "SPL>SR in " + std::to_string(spl_violations) + "/10000, CLS out of range " +
                  std::to_string(cls_violations) + ", SPL case " + fmt(spl) + ", CLS case " + fmt(cls)};
}

// --- 8: mixed supervision ----------------------------------------------------

Outcome mixed_supervision() {
  // Chain 0..5; room 1 holds nodes 4 and 5.
  std::vector<world::NavNode> nodes;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 6; ++i) {
    nodes.push_back({i, Eigen::Vector3d(0.0, 2.0 * i, 0.0), i >= 4 ? 1 : 0});
    if (i > 0) edges.emplace_back(i - 1, i);
  }
  std::vector<world::Room> rooms(2);
  for (int r = 0; r < 2; ++r) rooms[static_cast<std::size_t>(r)].id = r;
  for (const auto& n : nodes) rooms[static_cast<std::size_t>(n.room)].nodes.push_back(n.id);
  const world::House h(0, nodes, rooms, edges, world::FeatureSpec{}, 1);
  corpus::Vocab vocab;
  int cases = 0, wrong = 0;
  for (NodeId end = 0; end < 6; ++end) {
    corpus::NdhSample s;
    s.target = "kettle";
    s.goal_room = 1;
    s.start = {0, 0.0, 0.0};
    s.oracle_path = {0, 1, 2, 3, 4};
    for (NodeId n = 0; n <= end; ++n) s.navigator_path.push_back(n);
    const bool in_room = h.room_of(end) == 1;
    const auto src = train::mixed_supervision_target(h, s);
    const auto ep = train::make_episode(s, h, vocab, corpus::DialogInputVariant::T0);
    const auto& want = in_room ? s.navigator_path : s.oracle_path;
    ++cases;
    if ((src == train::SupervisionSource::Navigator) != in_room || ep.teacher_path != want) ++wrong;
  }
  return {wrong == 0, std::to_string(cases - wrong) + "/" + std::to_string(cases) + " endpoint cases"};
}

// --- 9: interleaved sampler --------------------------------------------------

Outcome interleaved_sampler() {
  corpus::InterleavedSampler s(100, 100, 0.5, 7);
  std::size_t vln = 0;
  for (int b = 0; b < 1000; ++b)
    for (const auto& r : s.next_batch(10)) vln += r.task == corpus::Task::Vln ? 1 : 0;
  const double frac = static_cast<double>(vln) / 10000.0;
  const auto mix = corpus::fixed_total_mixture(6000, 6000, 4742, 0.10, 7);
  std::size_t mv = 0, mn = 0;
  std::set<std::pair<int, std::size_t>> unique;
  for (const auto& r : mix) {
    (r.task == corpus::Task::Vln ? mv : mn) += 1;
    unique.insert({static_cast<int>(r.task), r.index});
  }
  return {std::abs(frac - 0.5) <= 0.02 && mv == 474 && mn == 4268 && unique.size() == mix.size(),
          "VLN fraction " + fmt(frac) + ", mixture " + std::to_string(mv) + " VLN + " + std::to_string(mn) + " NDH"};
}

// --- training experiments ----------------------------------------------------

train::TrainConfig small_config() {
  train::TrainConfig c;
  c.model.embed_dim = 16;
  c.model.lang_hidden = 16;
  c.model.lang_layers = 1;
  c.model.traj_hidden = 32;
  c.model.traj_layers = 1;
  c.model.attention_dim = 16;
  c.model.classifier_hidden = 32;
  c.optimizer = train::OptimizerKind::Adam;
  c.learning_rate = 0.01;
  c.batch_size = 8;
  c.max_episode_length = 12;
  return c;
}

struct Dataset {
  corpus::Benchmark bench;
  corpus::Vocab vocab;
};

Dataset make_dataset(int train_houses, int unseen_houses, const corpus::CorpusCounts& counts, std::uint64_t seed,
                     int nodes = 16, int rooms = 4) {
  world::WorldSpec ws;
  ws.train_houses = train_houses;
  ws.unseen_houses = unseen_houses;
  ws.node_count = nodes;
  ws.room_count = rooms;
  ws.seed = seed;
  Dataset d{corpus::generate_benchmark(world::generate_world_set(ws), counts, seed), {}};
  d.vocab = corpus::build_joint_vocab(d.bench.train);
  return d;
}

std::vector<train::LogRecord> run_seeds(const train::TrainConfig& cfg, const Dataset& d,
                                        std::vector<train::RunResult>* keep = nullptr) {
  std::vector<train::LogRecord> log;
  for (auto& run : train::train(cfg, d.bench, d.vocab)) {
    log.insert(log.end(), run.log.begin(), run.log.end());
    if (keep != nullptr) keep->push_back(std::move(run));
  }
  return log;
}

// --- 5: environment-aware vs agnostic ----------------------------------------

Outcome aware_vs_agnostic() {
  const double start = cpu_seconds();
  const Dataset d = make_dataset(8, 1, {96, 96, 0, 0}, 501);
  train::TrainConfig cfg = small_config();
  cfg.steps = 400;
  cfg.seeds = {0, 1, 2};
  cfg.eval_episodes = 48;

  std::map<model::EnvMode, std::vector<double>> acc, sil;
  for (auto mode : {model::EnvMode::Aware, model::EnvMode::Agnostic}) {
    cfg.env_mode = mode;
    std::vector<train::RunResult> runs;
    run_seeds(cfg, d, &runs);
    const auto mcfg = train::resolve_model_config(cfg.model, d.vocab, d.bench);
    const auto sets = train::build_eval_sets(d.bench, d.vocab, cfg);
    for (const auto& run : runs) {
      std::size_t correct = 0, total = 0;
      const auto outcomes =
          train::evaluate_policy(run.state.params, mcfg, d.bench, sets.train, train::PolicyKind::Model, cfg, run.seed, true);
      std::vector<Vector> rows;
      std::vector<int> labels;
      for (const auto& o : outcomes) {
        for (int pred : o.env_predicted) {
          correct += pred == d.bench.label(o.house_id) ? 1 : 0;
          ++total;
        }
        for (const auto& z : o.latents) {
          rows.push_back(z);
          labels.push_back(o.house_id);
        }
      }
      Matrix points(static_cast<Eigen::Index>(rows.size()), rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i) points.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      acc[mode].push_back(static_cast<double>(correct) / static_cast<double>(total));
      sil[mode].push_back(eval::silhouette_score(points, labels));
    }
  }
  const double secs = cpu_seconds() - start;
  const double aware_acc = mean(acc[model::EnvMode::Aware]), agn_acc = mean(acc[model::EnvMode::Agnostic]);
  const double aware_sil = mean(sil[model::EnvMode::Aware]), agn_sil = mean(sil[model::EnvMode::Agnostic]);
  bool every_seed = true;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
    every_seed = every_seed && acc[model::EnvMode::Aware][i] > 0.9 && acc[model::EnvMode::Agnostic][i] <= 0.25 &&
                 sil[model::EnvMode::Aware][i] > sil[model::EnvMode::Agnostic][i];
  return {every_seed && aware_acc > 0.9 && agn_acc <= 0.25 && aware_sil > agn_sil && secs <= 600.0,
          "house accuracy aware " + fmt(aware_acc) + " " + fmt(acc[model::EnvMode::Aware]) + " vs agnostic " +
              fmt(agn_acc) + " " + fmt(acc[model::EnvMode::Agnostic]) + ", silhouette aware " + fmt(aware_sil) + " " +
              fmt(sil[model::EnvMode::Aware]) + " vs agnostic " + fmt(agn_sil) + " " +
              fmt(sil[model::EnvMode::Agnostic]) + ", " + fmt(secs, 3) + " s"};
}

// --- 6: generalization-gap direction -----------------------------------------

double gap_of(const std::vector<train::LogRecord>& log, corpus::Task task) {
  const auto report = io::summarize_log(log, task);
  return task == corpus::Task::Vln ? report.gap->sr() : report.gap->progress();
}

Outcome generalization_gap() {
  const double start = cpu_seconds();
  const Dataset d = make_dataset(4, 4, {64, 64, 96, 96}, 601);
  train::TrainConfig base = small_config();
  base.steps = 300;
  base.seeds = {0, 1, 2};

  struct Cell {
    std::string name;
    train::TaskMode task;
    model::EnvMode env;
  };
  const std::vector<Cell> cells{{"single", train::TaskMode::VlnOnly, model::EnvMode::Plain},
                                {"single", train::TaskMode::NdhOnly, model::EnvMode::Plain},
                                {"multi", train::TaskMode::Multi, model::EnvMode::Plain},
                                {"agnostic", train::TaskMode::Multi, model::EnvMode::Agnostic}};
  std::map<std::string, std::pair<double, double>> gaps;  // name -> (vln sr gap, ndh progress gap)
  for (const auto& c : cells) {
    train::TrainConfig cfg = base;
    cfg.task_mode = c.task;
    cfg.env_mode = c.env;
    const auto log = run_seeds(cfg, d);
    auto& g = gaps[c.name];
    if (c.task != train::TaskMode::NdhOnly) g.first = gap_of(log, corpus::Task::Vln);
    if (c.task != train::TaskMode::VlnOnly) g.second = gap_of(log, corpus::Task::Ndh);
  }
  const auto& s = gaps["single"];
  const auto& m = gaps["multi"];
  const auto& a = gaps["agnostic"];
  const bool ok = m.first < s.first && a.first < s.first && m.second < s.second && a.second < s.second;
  return {ok, "VLN SR gap single " + fmt(s.first) + " multi " + fmt(m.first) + " agnostic " + fmt(a.first) +
                  "; NDH progress gap single " + fmt(s.second) + " multi " + fmt(m.second) + " agnostic " +
                  fmt(a.second) + ", " + fmt(cpu_seconds() - start, 3) + " s"};
}

// --- 7: reward-shaping direction ---------------------------------------------

Outcome reward_shaping() {
  const double start = cpu_seconds();
  const Dataset d = make_dataset(4, 4, {0, 96, 0, 48}, 701);
  train::TrainConfig cfg = small_config();
  cfg.task_mode = train::TaskMode::NdhOnly;
  cfg.steps = 300;
  cfg.seeds = {0, 1, 2};
  std::map<rl::RewardMode, double> progress;
  for (auto mode : {rl::RewardMode::Point, rl::RewardMode::Room}) {
    cfg.ndh_reward.mode = mode;
    const auto report = io::summarize_log(run_seeds(cfg, d), corpus::Task::Ndh);
    progress[mode] = report.find(eval::kFoldUnseen)->mean.progress();
  }
  const double room = progress[rl::RewardMode::Room], point = progress[rl::RewardMode::Point];
  return {room >= point, "unseen NDH progress ROOM " + fmt(room) + " m vs POINT " + fmt(point) + " m, " +
                             fmt(cpu_seconds() - start, 3) + " s"};
}

// --- 10: determinism ---------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int sh(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome determinism(const Options& opt) {
  const fs::path dir = opt.work / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = quote(opt.cli);
  if (sh(cli + " generate-worlds -o " + quote(dir / "worlds") + " --train-houses 3 --unseen-houses 2 --nodes 12 --seed 5") != 0 ||
      sh(cli + " generate-corpus -w " + quote(dir / "worlds") + " -o " + quote(dir / "corpus") +
         " --vln-train 24 --ndh-train 24 --vln-val 8 --ndh-val 8 --seed 5") != 0)
    return {false, "could not generate worlds/corpus with " + opt.cli};
  nlohmann::json cfg = {{"worlds", "worlds"},
                        {"corpus", "corpus"},
                        {"model",
                         {{"embed_dim", 8}, {"lang_hidden", 8}, {"lang_layers", 1}, {"traj_hidden", 16},
                          {"traj_layers", 1}, {"attention_dim", 8}, {"classifier_hidden", 8}}},
                        {"train",
                         {{"steps", 30}, {"eval_interval", 10}, {"seeds", {0, 1}}, {"optimizer", "adam"},
                          {"learning_rate", 0.01}, {"batch_size", 4}}}};
  std::ofstream(dir / "config.json") << cfg.dump(2);
  if (sh(cli + " train -c " + quote(dir / "config.json") + " -o " + quote(dir / "run0")) != 0)
    return {false, "training from config failed"};
  const fs::path manifest = dir / "run0" / "manifest.json";
  if (sh(cli + " train -m " + quote(manifest) + " -o " + quote(dir / "run1")) != 0 ||
      sh(cli + " train -m " + quote(manifest) + " -o " + quote(dir / "run2")) != 0)
    return {false, "rerun from manifest failed"};
  bool same = true;
  std::size_t files = 0;
  for (const fs::path rel : {fs::path("log.jsonl"), fs::path("seed_0/log.jsonl"), fs::path("seed_1/log.jsonl")}) {
    const std::string a = slurp(dir / "run1" / rel), b = slurp(dir / "run2" / rel), c = slurp(dir / "run0" / rel);
    same = same && !a.empty() && a == b && a == c;
    ++files;
  }
  return {same, std::to_string(files) + " metric logs " + (same ? "bit-identical" : "differ") +
                    " across the original run and two manifest reruns"};
}

// --- 11: overfit smoke -------------------------------------------------------

Outcome overfit_smoke() {
  const double start = cpu_seconds();
  const Dataset d = make_dataset(1, 1, {5, 5, 0, 0}, 1101);
  train::TrainConfig cfg = small_config();
  cfg.batch_size = 10;
  cfg.clone_fraction = 0.5;
  cfg.learning_rate = 0.02;
  const auto mcfg = train::resolve_model_config(cfg.model, d.vocab, d.bench);
  cfg.model = mcfg;
  const train::TrainData data = train::build_train_data(d.bench, d.vocab, cfg);
  std::vector<train::NavEpisode> all = data.vln;
  all.insert(all.end(), data.ndh.begin(), data.ndh.end());

  ParameterSet params = model::init_parameters(mcfg, 3);
  train::Optimizer opt(cfg.optimizer, cfg.learning_rate, cfg.clip_norm);
  corpus::InterleavedSampler sampler(data.vln.size(), data.ndh.size(), cfg.mix_ratio, 3);
  double nll = train::teacher_forced_nll(params, mcfg, d.bench, all, cfg.max_episode_length);
  const double initial = nll;
  std::size_t update = 0;
  while (update < 500 && nll >= 0.05) {
    const auto refs = sampler.next_batch(cfg.batch_size);
    std::vector<const train::NavEpisode*> batch;
    for (const auto& r : refs) batch.push_back(r.task == corpus::Task::Vln ? &data.vln[r.index] : &data.ndh[r.index]);
    Rng rng(mix_seed({3, update}));
    train::train_step(params, opt, d.bench, batch, cfg, rng);
    ++update;
    if (update % 10 == 0) nll = train::teacher_forced_nll(params, mcfg, d.bench, all, cfg.max_episode_length);
  }
  const double secs = cpu_seconds() - start;
  return {nll < 0.05 && secs < 120.0, "BC loss " + fmt(initial) + " -> " + fmt(nll) + " nats/step after " +
                                          std::to_string(update) + " updates, " + fmt(secs, 3) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      opt.cli = argv[++i];
    } else if (a == "--work" && i + 1 < argc) {
      opt.work = argv[++i];
    } else if (a == "-h" || a == "--help") {
      std::cout << "usage: acceptance [--cli PATH] [--work DIR] [CRITERION ...]\n";
      return 0;
    } else {
      try {
        only.insert(std::stoi(a));
      } catch (const std::exception&) {
        std::cerr << "unknown argument '" << a << "'\n";
        return 2;
      }
    }
  }
  if (opt.work.empty()) opt.work = fs::temp_directory_path() / ("emnav_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(opt.work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"gradient reversal contract", gradient_reversal},
      {"reward telescoping", reward_telescoping},
      {"metric identities", metric_identities},
      {"environment-aware vs agnostic", aware_vs_agnostic},
      {"generalization-gap direction", generalization_gap},
      {"reward-shaping direction", reward_shaping},
      {"mixed-supervision rule", mixed_supervision},
      {"interleaved sampler", interleaved_sampler},
      {"determinism", [&] { return determinism(opt); }},
      {"overfit smoke", overfit_smoke},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && only.count(n) == 0) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << n << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  fs::remove_all(opt.work);
  return all ? 0 : 1;
}
