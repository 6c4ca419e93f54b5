// SPDX-License-Identifier: Apache-2.0
// emnav: command-line front end for world generation, corpus generation,
// training, evaluation, latent export and ablation grids.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emnav/corpus/benchmark.hpp"
#include "emnav/io/config.hpp"
#include "emnav/io/dataset_io.hpp"
#include "emnav/io/manifest.hpp"
#include "emnav/io/report.hpp"
#include "emnav/io/run_state.hpp"
#include "emnav/world/generate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace emnav;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kUsage = 2, kInvalidInput = 3, kOutputExists = 4 };

// Failure carrying an exit code and a machine-readable kind.
struct CommandError : std::runtime_error {
  CommandError(Exit code, std::string kind, const std::string& what, std::vector<std::string> details = {})
      : std::runtime_error(what), code(code), kind(std::move(kind)), details(std::move(details)) {}
  Exit code;
  std::string kind;
  std::vector<std::string> details;
};

std::string g_command = "emnav";

void diagnostic(const std::string& level, const std::string& kind, const std::string& message,
                const std::vector<std::string>& details = {}) {
  json j{{"level", level}, {"command", g_command}, {"kind", kind}, {"message", message}};
  if (!details.empty()) j["details"] = details;
  std::cerr << j.dump() << '\n';
}

void progress(const json& fields) {
  json j{{"level", "info"}, {"command", g_command}};
  j.update(fields);
  std::cerr << j.dump() << '\n';
}

// Relative output paths are placed under EMNAV_OUTPUT_ROOT when it is set.
fs::path output_path(const fs::path& p) {
  const char* root = std::getenv("EMNAV_OUTPUT_ROOT");
  if (p.is_absolute() || root == nullptr || *root == '\0') return p;
  return fs::path(root) / p;
}

void prepare_output_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) throw CommandError(kOutputExists, "output_exists", dir.string() + " exists; pass --force to replace it");
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CommandError(kFailure, "io", "cannot write " + path.string());
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct Loaded {
  corpus::Benchmark bench;
  corpus::Vocab vocab;
};

Loaded load_data(const fs::path& worlds, const fs::path& corpus_dir) {
  try {
    return {io::load_benchmark(worlds, corpus_dir), io::load_vocab(corpus_dir / "vocab.txt")};
  } catch (const std::exception& e) {
    throw CommandError(kInvalidInput, "data", e.what());
  }
}

const corpus::Fold& select_fold(const corpus::Benchmark& bench, const std::string& fold) {
  if (fold == eval::kFoldTrain) return bench.train;
  if (fold == eval::kFoldSeen) return bench.val_seen;
  if (fold == eval::kFoldUnseen) return bench.val_unseen;
  throw CommandError(kInvalidInput, "fold", "unknown fold '" + fold + "' (train, val_seen, val_unseen)");
}

std::vector<corpus::Task> select_tasks(const std::string& task) {
  if (task == "all") return {corpus::Task::Vln, corpus::Task::Ndh};
  try {
    return {corpus::task_from_name(task)};
  } catch (const std::exception& e) {
    throw CommandError(kUsage, "usage", e.what());
  }
}

std::vector<train::NavEpisode> fold_episodes(const Loaded& d, const corpus::Fold& fold, corpus::Task task,
                                             corpus::DialogInputVariant variant, std::size_t cap) {
  std::vector<train::NavEpisode> eps;
  if (task == corpus::Task::Vln)
    for (std::size_t i = 0; i < fold.vln.size() && i < cap; ++i) eps.push_back(train::make_episode(fold.vln[i], d.vocab));
  else
    for (std::size_t i = 0; i < fold.ndh.size() && i < cap; ++i)
      eps.push_back(train::make_episode(fold.ndh[i], d.bench.house(fold.ndh[i].house_id), d.vocab, variant));
  if (eps.empty())
    throw CommandError(kInvalidInput, "fold", "fold has no " + std::string(corpus::task_name(task)) + " samples");
  return eps;
}

// ---------------------------------------------------------------------------
// generate-worlds

struct WorldsArgs {
  fs::path out;
  world::WorldSpec spec;
  bool force = false;
};

int run_generate_worlds(const WorldsArgs& a) {
  const fs::path out = output_path(a.out);
  world::WorldSet worlds;
  try {
    worlds = world::generate_world_set(a.spec);
  } catch (const std::exception& e) {
    throw CommandError(kInvalidInput, "spec", e.what());
  }
  prepare_output_dir(out, a.force);
  io::save_worlds(out, worlds);
  progress({{"event", "worlds_written"},
            {"dir", out.string()},
            {"train_houses", worlds.train.size()},
            {"unseen_houses", worlds.unseen.size()},
            {"sha256", io::sha256_tree(out)}});
  return kOk;
}

// ---------------------------------------------------------------------------
// generate-corpus

struct CorpusArgs {
  fs::path worlds, out;
  corpus::CorpusCounts counts;
  corpus::CorpusSpec spec;
  std::uint64_t seed = 0;
  std::string variant = "full";
  bool force = false;
};

int run_generate_corpus(const CorpusArgs& a) {
  world::WorldSet worlds;
  try {
    worlds = io::load_worlds(a.worlds);
  } catch (const std::exception& e) {
    throw CommandError(kInvalidInput, "data", e.what());
  }
  corpus::DialogInputVariant variant{};
  try {
    variant = corpus::variant_from_name(a.variant);
  } catch (const std::exception& e) {
    throw CommandError(kUsage, "usage", e.what());
  }
  const fs::path out = output_path(a.out);
  const corpus::Benchmark bench = corpus::generate_benchmark(std::move(worlds), a.counts, a.seed, a.spec);
  const corpus::Vocab vocab = corpus::build_joint_vocab(bench.train, variant);
  prepare_output_dir(out, a.force);
  io::save_corpus(out, bench, vocab);
  const auto lengths = corpus::mean_token_lengths(bench.train, variant);
  progress({{"event", "corpus_written"},
            {"dir", out.string()},
            {"vocab", vocab.size()},
            {"mean_vln_tokens", lengths.vln},
            {"mean_ndh_tokens", lengths.ndh},
            {"sha256", io::sha256_tree(out)}});
  return kOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  fs::path config, manifest, out;
  bool dry_run = false, resume = false, force = false;
};

io::RunConfig read_config(const fs::path& path) {
  io::RunConfig cfg;
  try {
    cfg = io::load_run_config(path);
  } catch (const io::ConfigError& e) {
    throw CommandError(kInvalidInput, "config", "invalid config " + path.string(), e.problems());
  }
  // Data paths in a config file are relative to the file itself.
  const fs::path base = fs::absolute(path).parent_path();
  if (cfg.worlds.is_relative()) cfg.worlds = base / cfg.worlds;
  if (cfg.corpus.is_relative()) cfg.corpus = base / cfg.corpus;
  cfg.worlds = fs::weakly_canonical(cfg.worlds);
  cfg.corpus = fs::weakly_canonical(cfg.corpus);
  return cfg;
}

std::vector<train::LogRecord> read_log(const fs::path& path) {
  std::vector<train::LogRecord> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(io::log_record_from_json(json::parse(line)));
  return out;
}

std::string log_text(const std::vector<train::LogRecord>& log) {
  std::ostringstream os;
  io::write_log(os, log);
  return os.str();
}

int run_train(const TrainArgs& a) {
  io::RunConfig cfg;
  std::optional<io::RunManifest> source;
  if (!a.manifest.empty()) {
    std::ifstream in(a.manifest);
    if (!in) throw CommandError(kInvalidInput, "manifest", "cannot open " + a.manifest.string());
    try {
      source = io::RunManifest::from_json(json::parse(in));
      cfg = io::parse_run_config(source->config);
    } catch (const io::ConfigError& e) {
      throw CommandError(kInvalidInput, "config", "invalid config in manifest", e.problems());
    } catch (const std::exception& e) {
      throw CommandError(kInvalidInput, "manifest", e.what());
    }
  } else {
    cfg = read_config(a.config);
  }

  for (const auto& [name, dir] : {std::pair{"worlds", cfg.worlds}, std::pair{"corpus", cfg.corpus}})
    if (!fs::is_directory(dir))
      throw CommandError(kInvalidInput, "config", std::string(name) + " directory not found: " + dir.string());
  const std::string worlds_hash = io::sha256_tree(cfg.worlds);
  const std::string corpus_hash = io::sha256_tree(cfg.corpus);
  if (source && (source->worlds_hash != worlds_hash || source->corpus_hash != corpus_hash))
    throw CommandError(kInvalidInput, "manifest", "world or corpus contents differ from the manifest");

  const Loaded d = load_data(cfg.worlds, cfg.corpus);
  const train::TrainConfig& tc = cfg.train;
  const auto mcfg = train::resolve_model_config(tc.model, d.vocab, d.bench);
  const train::TrainData data = train::build_train_data(d.bench, d.vocab, tc);
  if (a.dry_run) {
    progress({{"event", "dry_run"},
              {"vln_train", data.vln.size()},
              {"ndh_train", data.ndh.size()},
              {"parameters", model::init_parameters(mcfg, 0).scalar_count()},
              {"steps", tc.steps},
              {"seeds", tc.seeds}});
    return kOk;
  }

  const fs::path out = output_path(a.out);
  if (!a.resume) prepare_output_dir(out, a.force);
  fs::create_directories(out);

  io::RunManifest manifest;
  manifest.config = io::to_json(cfg);
  manifest.worlds_hash = worlds_hash;
  manifest.corpus_hash = corpus_hash;
  manifest.seeds = tc.seeds;
  manifest.started = io::utc_timestamp();

  train::TrainConfig resolved = tc;
  resolved.model = mcfg;
  std::vector<train::LogRecord> all;
  for (std::uint64_t seed : tc.seeds) {
    const fs::path seed_dir = out / ("seed_" + std::to_string(seed));
    std::optional<train::TrainState> resume;
    std::vector<train::LogRecord> prior;
    if (a.resume && fs::exists(seed_dir / "checkpoint.txt")) {
      io::SavedRun saved = io::load_train_state(seed_dir);
      if (saved.seed != seed || saved.config.model != mcfg)
        throw CommandError(kInvalidInput, "resume", "checkpoint in " + seed_dir.string() + " does not match the config");
      train::TrainState st;
      st.params = std::move(saved.state.params);
      st.step = saved.state.step;
      st.optimizer = train::Optimizer(tc.optimizer, tc.learning_rate, tc.clip_norm);
      st.optimizer.restore(saved.state.optimizer.state(), saved.state.optimizer.updates());
      resume = std::move(st);
      for (auto& r : read_log(seed_dir / "log.jsonl"))
        if (r.step <= resume->step) prior.push_back(std::move(r));
      progress({{"event", "resume"}, {"seed", seed}, {"step", resume->step}});
    }
    auto persist = [&](const train::RunResult& run) {
      io::save_train_state(seed_dir, run.state, resolved, seed);
      std::vector<train::LogRecord> log = prior;
      log.insert(log.end(), run.log.begin(), run.log.end());
      write_text(seed_dir / "log.jsonl", log_text(log));
      const train::LogRecord& last = run.log.back();
      progress({{"event", "eval"}, {"seed", seed}, {"step", run.state.step}, {"fold", last.fold}});
    };
    train::RunResult run;
    try {
      run = train::train_run(tc, d.bench, d.vocab, data, seed, std::move(resume), persist);
    } catch (const train::TrainError& e) {
      throw CommandError(kFailure, "training", e.what());
    }
    io::save_train_state(seed_dir, run.state, resolved, seed);
    std::vector<train::LogRecord> log = prior;
    log.insert(log.end(), run.log.begin(), run.log.end());
    write_text(seed_dir / "log.jsonl", log_text(log));
    all.insert(all.end(), log.begin(), log.end());
  }

  write_text(out / "log.jsonl", log_text(all));
  write_text(out / "config.json", io::to_json(cfg).dump(2) + "\n");
  std::vector<io::LabeledReport> reports;
  json report_json = json::object();
  for (corpus::Task task : {corpus::Task::Vln, corpus::Task::Ndh}) {
    const bool has = std::any_of(all.begin(), all.end(), [&](const auto& r) { return r.task == task; });
    if (!has) continue;
    const auto rep = io::summarize_log(all, task);
    report_json[std::string(corpus::task_name(task))] = io::to_json(rep);
    reports.push_back({{{"task", std::string(corpus::task_name(task))}}, rep});
  }
  write_text(out / "report.json", report_json.dump(2) + "\n");
  std::ostringstream csv;
  io::write_report_csv(csv, reports);
  write_text(out / "report.csv", csv.str());

  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      manifest.artifacts[fs::relative(e.path(), out).generic_string()] = io::sha256_file(e.path());
  manifest.finished = io::utc_timestamp();
  write_text(out / "manifest.json", manifest.to_json().dump(2) + "\n");
  progress({{"event", "done"}, {"dir", out.string()}, {"log_sha256", io::sha256_file(out / "log.jsonl")}});
  return kOk;
}

// ---------------------------------------------------------------------------
// evaluate / dump-latents

struct EvalArgs {
  fs::path checkpoint, worlds, corpus, out;
  std::string fold = "val_unseen", policy = "model", task = "all";
  std::size_t episodes = 0;
  std::uint64_t seed = 0;
  int max_length = 20;
  double success_threshold = 3.0;
};

struct EvalContext {
  Loaded data;
  train::TrainConfig cfg;
  ParameterSet params;
};

EvalContext eval_context(const EvalArgs& a, bool need_checkpoint) {
  EvalContext ctx{load_data(a.worlds, a.corpus), {}, {}};
  ctx.cfg.max_episode_length = a.max_length;
  ctx.cfg.vln_reward.success_threshold = ctx.cfg.ndh_reward.success_threshold = a.success_threshold;
  if (a.checkpoint.empty()) {
    if (need_checkpoint) throw CommandError(kUsage, "usage", "the model policy needs --checkpoint");
    return ctx;
  }
  io::SavedRun saved;
  try {
    saved = io::load_train_state(a.checkpoint);
  } catch (const std::exception& e) {
    throw CommandError(kInvalidInput, "checkpoint", e.what());
  }
  ctx.cfg = saved.config;
  ctx.params = std::move(saved.state.params);
  if (ctx.cfg.model != train::resolve_model_config(ctx.cfg.model, ctx.data.vocab, ctx.data.bench))
    throw CommandError(kInvalidInput, "checkpoint", "checkpoint does not match the corpus vocabulary or house set");
  return ctx;
}

int run_evaluate(const EvalArgs& a) {
  train::PolicyKind policy{};
  if (a.policy == "model") policy = train::PolicyKind::Model;
  else if (a.policy == "shortest") policy = train::PolicyKind::ShortestPath;
  else if (a.policy == "random") policy = train::PolicyKind::Random;
  else throw CommandError(kUsage, "usage", "unknown policy '" + a.policy + "' (model, shortest, random)");
  const EvalContext ctx = eval_context(a, policy == train::PolicyKind::Model);
  const corpus::Fold& fold = select_fold(ctx.data.bench, a.fold);
  const std::size_t cap = a.episodes == 0 ? SIZE_MAX : a.episodes;

  json report_json{{"fold", a.fold}, {"policy", a.policy}, {"tasks", json::object()}};
  std::vector<io::LabeledReport> reports;
  for (corpus::Task task : select_tasks(a.task)) {
    const auto eps = fold_episodes(ctx.data, fold, task, ctx.cfg.variant, cap);
    const auto outcomes =
        train::evaluate_policy(ctx.params, ctx.cfg.model, ctx.data.bench, eps, policy, ctx.cfg, a.seed);
    std::vector<eval::TaggedEpisode> tagged;
    for (const auto& o : outcomes) tagged.push_back({a.fold, 0, o.metrics});
    const auto rep = eval::aggregate(tagged);
    report_json["tasks"][std::string(corpus::task_name(task))] = io::to_json(rep);
    reports.push_back({{{"policy", a.policy}, {"task", std::string(corpus::task_name(task))}}, rep});
  }

  const fs::path prefix = output_path(a.out);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  write_text(fs::path(prefix.string() + ".json"), report_json.dump(2) + "\n");
  std::ostringstream csv;
  io::write_report_csv(csv, reports);
  write_text(fs::path(prefix.string() + ".csv"), csv.str());
  std::cout << csv.str();
  return kOk;
}

int run_dump_latents(const EvalArgs& a) {
  const EvalContext ctx = eval_context(a, true);
  const corpus::Fold& fold = select_fold(ctx.data.bench, a.fold);
  const std::size_t cap = a.episodes == 0 ? SIZE_MAX : a.episodes;
  std::vector<train::EpisodeOutcome> outcomes;
  for (corpus::Task task : select_tasks(a.task)) {
    const auto eps = fold_episodes(ctx.data, fold, task, ctx.cfg.variant, cap);
    auto o = train::evaluate_policy(ctx.params, ctx.cfg.model, ctx.data.bench, eps, train::PolicyKind::Model, ctx.cfg,
                                    a.seed, true);
    outcomes.insert(outcomes.end(), std::make_move_iterator(o.begin()), std::make_move_iterator(o.end()));
  }
  const fs::path out = output_path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream f(out);
  if (!f) throw CommandError(kFailure, "io", "cannot write " + out.string());
  io::write_latents_csv(f, outcomes);
  std::size_t rows = 0;
  for (const auto& o : outcomes) rows += o.latents.size();
  progress({{"event", "latents_written"}, {"file", out.string()}, {"rows", rows}, {"width", ctx.cfg.model.traj_hidden}});
  return kOk;
}

// ---------------------------------------------------------------------------
// ablate

struct AblateArgs {
  fs::path config, out;
  std::string task_modes = "vln,multi", env_modes = "plain,agnostic", variants;
  std::string fractions;
  std::size_t total = 0;
  bool force = false;
};

int run_ablate(const AblateArgs& a) {
  const io::RunConfig cfg = read_config(a.config);
  const Loaded d = load_data(cfg.worlds, cfg.corpus);
  std::vector<train::TaskMode> tasks;
  std::vector<model::EnvMode> envs;
  std::vector<corpus::DialogInputVariant> variants;
  std::vector<double> fractions;
  try {
    for (const auto& s : split_list(a.task_modes)) tasks.push_back(train::task_mode_from_name(s));
    for (const auto& s : split_list(a.env_modes)) envs.push_back(model::env_mode_from_name(s));
    for (const auto& s : split_list(a.variants)) variants.push_back(corpus::variant_from_name(s));
    for (const auto& s : split_list(a.fractions)) fractions.push_back(std::stod(s));
  } catch (const std::exception& e) {
    throw CommandError(kUsage, "usage", std::string("bad grid value: ") + e.what());
  }
  if (variants.empty()) variants.push_back(cfg.train.variant);
  if (!fractions.empty() && a.total == 0) throw CommandError(kUsage, "usage", "--fractions needs --total");

  const fs::path out = output_path(a.out);
  prepare_output_dir(out, a.force);

  std::vector<io::LabeledReport> rows;
  for (auto tm : tasks)
    for (auto em : envs)
      for (auto var : variants) {
        train::TrainConfig tc = cfg.train;
        tc.task_mode = tm;
        tc.env_mode = em;
        tc.variant = var;
        progress({{"event", "cell"},
                  {"task_mode", train::task_mode_name(tm)},
                  {"env_mode", model::env_mode_name(em)},
                  {"variant", corpus::variant_name(var)}});
        std::vector<train::LogRecord> log;
        for (auto& run : train::train(tc, d.bench, d.vocab)) log.insert(log.end(), run.log.begin(), run.log.end());
        for (corpus::Task task : {corpus::Task::Vln, corpus::Task::Ndh}) {
          if (std::none_of(log.begin(), log.end(), [&](const auto& r) { return r.task == task; })) continue;
          rows.push_back({{{"task_mode", std::string(train::task_mode_name(tm))},
                           {"env_mode", std::string(model::env_mode_name(em))},
                           {"variant", std::string(corpus::variant_name(var))},
                           {"task", std::string(corpus::task_name(task))}},
                          io::summarize_log(log, task)});
        }
      }
  if (!rows.empty()) {
    std::ostringstream csv;
    io::write_report_csv(csv, rows);
    write_text(out / "grid.csv", csv.str());
  }

  if (!fractions.empty()) {
    std::vector<train::AblationRow> table;
    try {
      table = train::run_ablation_fixed_paths(cfg.train, d.bench, d.vocab, fractions, a.total);
    } catch (const std::invalid_argument& e) {
      throw CommandError(kInvalidInput, "ablation", e.what());
    }
    std::ostringstream csv;
    csv << "vln_fraction,total,vln_paths,ndh_paths,progress_seen,progress_unseen\n";
    for (const auto& r : table)
      csv << io::csv_real(r.vln_fraction) << ',' << r.total << ',' << r.vln_paths << ',' << r.ndh_paths << ','
          << io::csv_real(r.progress_seen) << ',' << io::csv_real(r.progress_unseen) << '\n';
    write_text(out / "fixed_paths.csv", csv.str());
  }
  progress({{"event", "done"}, {"dir", out.string()}, {"cells", rows.size()}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic multitask navigation: worlds, corpora, training and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kArtifactVersion);

  WorldsArgs wa;
  auto* gw = app.add_subcommand("generate-worlds", "Generate training and held-out houses");
  gw->add_option("-o,--out", wa.out, "Output directory")->required();
  gw->add_option("--train-houses", wa.spec.train_houses, "Number of training houses")->capture_default_str();
  gw->add_option("--unseen-houses", wa.spec.unseen_houses, "Number of held-out houses")->capture_default_str();
  gw->add_option("--nodes", wa.spec.node_count, "Nodes per house")->capture_default_str();
  gw->add_option("--rooms", wa.spec.room_count, "Rooms per house")->capture_default_str();
  gw->add_option("--feature-dim", wa.spec.features.dim, "View feature width")->capture_default_str();
  gw->add_option("--house-mix", wa.spec.features.house_mix, "Weight of house-specific appearance")->capture_default_str();
  gw->add_option("--noise", wa.spec.features.noise, "View feature noise")->capture_default_str();
  gw->add_option("--seed", wa.spec.seed, "Seed")->capture_default_str();
  gw->add_flag("--force", wa.force, "Replace an existing output directory");

  CorpusArgs ca;
  auto* gc = app.add_subcommand("generate-corpus", "Generate VLN and NDH samples for every fold");
  gc->add_option("-w,--worlds", ca.worlds, "World directory")->required()->check(CLI::ExistingDirectory);
  gc->add_option("-o,--out", ca.out, "Output directory")->required();
  gc->add_option("--vln-train", ca.counts.vln_train, "VLN training samples")->capture_default_str();
  gc->add_option("--ndh-train", ca.counts.ndh_train, "NDH training samples")->capture_default_str();
  gc->add_option("--vln-val", ca.counts.vln_val, "VLN samples per validation fold")->capture_default_str();
  gc->add_option("--ndh-val", ca.counts.ndh_val, "NDH samples per validation fold")->capture_default_str();
  gc->add_option("--navigator-error-rate", ca.spec.navigator_error_rate, "Share of NDH navigators that miss the room")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gc->add_option("--filler-rate", ca.spec.filler_rate, "Filler word rate")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gc->add_option("--rare-rate", ca.spec.rare_rate, "Rare distractor rate")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gc->add_option("--vocab-variant", ca.variant, "Dialog variant the vocabulary is built from")->capture_default_str();
  gc->add_option("--seed", ca.seed, "Seed")->capture_default_str();
  gc->add_flag("--force", ca.force, "Replace an existing output directory");

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train one model per configured seed");
  auto* cfg_opt = tr->add_option("-c,--config", ta.config, "Run config (JSON)")->check(CLI::ExistingFile);
  auto* man_opt = tr->add_option("-m,--manifest", ta.manifest, "Rerun the config recorded in a manifest")
                      ->check(CLI::ExistingFile);
  cfg_opt->excludes(man_opt);
  tr->add_option("-o,--out", ta.out, "Run directory");
  tr->add_flag("--dry-run", ta.dry_run, "Validate config and data, then exit");
  tr->add_flag("--resume", ta.resume, "Continue from the checkpoints in the run directory");
  tr->add_flag("--force", ta.force, "Replace an existing run directory");

  EvalArgs ea;
  auto* ev = app.add_subcommand("evaluate", "Score a policy on one fold");
  ev->add_option("-k,--checkpoint", ea.checkpoint, "Checkpoint file or seed directory (model policy)");
  ev->add_option("-w,--worlds", ea.worlds, "World directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--corpus", ea.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("-f,--fold", ea.fold, "train, val_seen or val_unseen")->capture_default_str();
  ev->add_option("-p,--policy", ea.policy, "model, shortest or random")->capture_default_str();
  ev->add_option("-t,--task", ea.task, "vln, ndh or all")->capture_default_str();
  ev->add_option("-n,--episodes", ea.episodes, "Episodes per task, 0 for all")->capture_default_str();
  ev->add_option("--seed", ea.seed, "Seed of the random policy")->capture_default_str();
  ev->add_option("--max-length", ea.max_length, "Episode cap without a checkpoint")->capture_default_str();
  ev->add_option("--success-threshold", ea.success_threshold, "Success radius without a checkpoint")
      ->capture_default_str();
  ev->add_option("-o,--out", ea.out, "Report prefix; writes <prefix>.json and <prefix>.csv")->required();

  EvalArgs la;
  la.fold = "train";
  auto* dl = app.add_subcommand("dump-latents", "Export trajectory latents as CSV");
  dl->add_option("-k,--checkpoint", la.checkpoint, "Checkpoint file or seed directory")->required();
  dl->add_option("-w,--worlds", la.worlds, "World directory")->required()->check(CLI::ExistingDirectory);
  dl->add_option("--corpus", la.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  dl->add_option("-f,--fold", la.fold, "train, val_seen or val_unseen")->capture_default_str();
  dl->add_option("-t,--task", la.task, "vln, ndh or all")->capture_default_str();
  dl->add_option("-n,--episodes", la.episodes, "Episodes per task, 0 for all")->capture_default_str();
  dl->add_option("-o,--out", la.out, "Output CSV")->required();

  AblateArgs aa;
  auto* ab = app.add_subcommand("ablate", "Run a task-mode x env-mode x variant grid and the fixed-paths sweep");
  ab->add_option("-c,--config", aa.config, "Base run config")->required()->check(CLI::ExistingFile);
  ab->add_option("-o,--out", aa.out, "Output directory")->required();
  ab->add_option("--task-modes", aa.task_modes, "Comma list of vln, ndh, multi")->capture_default_str();
  ab->add_option("--env-modes", aa.env_modes, "Comma list of plain, agnostic, aware")->capture_default_str();
  ab->add_option("--variants", aa.variants, "Comma list of dialog variants (default: the config's)");
  ab->add_option("--fractions", aa.fractions, "Comma list of VLN fractions for the fixed-paths sweep");
  ab->add_option("--total", aa.total, "Training paths per fixed-paths row");
  ab->add_flag("--force", aa.force, "Replace an existing output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnostic("error", "usage", e.what());
    return kUsage;
  }

  try {
    g_command = app.get_subcommands().front()->get_name();
    if (gw->parsed()) return run_generate_worlds(wa);
    if (gc->parsed()) return run_generate_corpus(ca);
    if (tr->parsed()) {
      if (ta.config.empty() && ta.manifest.empty()) throw CommandError(kUsage, "usage", "train needs --config or --manifest");
      if (!ta.dry_run && ta.out.empty()) throw CommandError(kUsage, "usage", "train needs --out");
      return run_train(ta);
    }
    if (ev->parsed()) return run_evaluate(ea);
    if (dl->parsed()) return run_dump_latents(la);
    if (ab->parsed()) return run_ablate(aa);
  } catch (const CommandError& e) {
    diagnostic("error", e.kind, e.what(), e.details);
    return e.code;
  } catch (const std::exception& e) {
    diagnostic("error", "internal", e.what());
    return kFailure;
  }
  return kUsage;
}
