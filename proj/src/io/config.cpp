// SPDX-License-Identifier: Apache-2.0
#include "emnav/io/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace emnav::io {
namespace {

using nlohmann::json;

bool nonnegative_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::string join(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid config:";
  for (const auto& p : v) os << "\n  " << p;
  return os.str();
}

// Reads the fields of one JSON object, recording problems instead of throwing.
class Reader {
 public:
  Reader(const json& obj, std::string prefix, std::vector<std::string>& problems)
      : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {}

  template <typename T>
  void number(const char* key, T& out) {
    const json* v = take(key);
    if (v == nullptr) return;
    if constexpr (std::is_unsigned_v<T>) {
      if (!nonnegative_integer(*v)) return bad(key, "expected nonnegative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) return bad(key, "expected integer");
    } else {
      if (!v->is_number()) return bad(key, "expected number");
    }
    out = v->get<T>();
  }

  void boolean(const char* key, bool& out) {
    const json* v = take(key);
    if (v == nullptr) return;
    if (!v->is_boolean()) return bad(key, "expected boolean");
    out = v->get<bool>();
  }

  template <typename E>
  void enumeration(const char* key, E& out, const std::function<E(std::string_view)>& parse) {
    const json* v = take(key);
    if (v == nullptr) return;
    if (!v->is_string()) return bad(key, "expected string");
    try {
      out = parse(v->get<std::string>());
    } catch (const std::exception& e) {
      bad(key, e.what());
    }
  }

  void path(const char* key, std::filesystem::path& out, bool required) {
    const json* v = take(key);
    if (v == nullptr) {
      if (required) bad(key, "required key is missing");
      return;
    }
    if (!v->is_string()) return bad(key, "expected string path");
    out = v->get<std::string>();
  }

  void seeds(const char* key, std::vector<std::uint64_t>& out) {
    const json* v = take(key);
    if (v == nullptr) return;
    if (!v->is_array()) return bad(key, "expected array of nonnegative integers");
    std::vector<std::uint64_t> s;
    for (const auto& x : *v) {
      if (!nonnegative_integer(x)) return bad(key, "expected array of nonnegative integers");
      s.push_back(x.get<std::uint64_t>());
    }
    out = std::move(s);
  }

  const json* object(const char* key) {
    const json* v = take(key);
    if (v == nullptr) return nullptr;
    if (!v->is_object()) {
      bad(key, "expected object");
      return nullptr;
    }
    return v;
  }

  void finish() {
    for (const auto& [k, v] : obj_.items())
      if (!used_.count(k)) problems_.push_back(prefix_ + k + ": unknown key");
  }

 private:
  const json* take(const char* key) {
    used_.emplace(key, true);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  void bad(const char* key, const std::string& why) { problems_.push_back(prefix_ + key + ": " + why); }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& problems_;
  std::map<std::string, bool> used_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems) : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

RunConfig parse_run_config(const json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) throw ConfigError({"<root>: expected object"});
  RunConfig cfg;
  train::TrainConfig& t = cfg.train;
  Reader root(j, "", problems);
  root.path("worlds", cfg.worlds, true);
  root.path("corpus", cfg.corpus, true);

  if (const json* m = root.object("model")) {
    Reader r(*m, "model.", problems);
    r.number("embed_dim", t.model.embed_dim);
    r.number("lang_hidden", t.model.lang_hidden);
    r.number("lang_layers", t.model.lang_layers);
    r.number("traj_hidden", t.model.traj_hidden);
    r.number("traj_layers", t.model.traj_layers);
    r.number("attention_dim", t.model.attention_dim);
    r.number("classifier_hidden", t.model.classifier_hidden);
    r.boolean("separate_language_encoders", t.model.separate_language_encoders);
    r.finish();
  }
  if (const json* tr = root.object("train")) {
    Reader r(*tr, "train.", problems);
    r.number("batch_size", t.batch_size);
    r.number("clone_fraction", t.clone_fraction);
    r.number("lambda", t.lambda);
    r.number("learning_rate", t.learning_rate);
    r.enumeration<train::OptimizerKind>("optimizer", t.optimizer, train::optimizer_from_name);
    r.number("clip_norm", t.clip_norm);
    r.number("max_episode_length", t.max_episode_length);
    r.enumeration<train::TaskMode>("task_mode", t.task_mode, train::task_mode_from_name);
    r.enumeration<model::EnvMode>("env_mode", t.env_mode, model::env_mode_from_name);
    r.enumeration<corpus::DialogInputVariant>("dialog_variant", t.variant, corpus::variant_from_name);
    r.number("mix_ratio", t.mix_ratio);
    r.number("env_loss_weight", t.env_loss_weight);
    r.number("steps", t.steps);
    r.number("eval_interval", t.eval_interval);
    r.number("eval_episodes", t.eval_episodes);
    r.seeds("seeds", t.seeds);
    r.finish();
  }
  if (const json* rw = root.object("reward")) {
    Reader r(*rw, "reward.", problems);
    double gamma = t.vln_reward.gamma, d_th = t.vln_reward.success_threshold;
    r.number("gamma", gamma);
    r.number("success_threshold", d_th);
    r.enumeration<rl::RewardMode>("ndh_mode", t.ndh_reward.mode, rl::reward_mode_from_name);
    t.vln_reward.gamma = t.ndh_reward.gamma = gamma;
    t.vln_reward.success_threshold = t.ndh_reward.success_threshold = d_th;
    r.finish();
  }
  root.finish();
  if (problems.empty()) {
    try {
      t.validate();
    } catch (const std::invalid_argument& e) {
      problems.push_back(std::string("train: ") + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
  const train::TrainConfig& t = cfg.train;
  json j;
  j["worlds"] = cfg.worlds.string();
  j["corpus"] = cfg.corpus.string();
  j["model"] = {{"embed_dim", t.model.embed_dim},
                {"lang_hidden", t.model.lang_hidden},
                {"lang_layers", t.model.lang_layers},
                {"traj_hidden", t.model.traj_hidden},
                {"traj_layers", t.model.traj_layers},
                {"attention_dim", t.model.attention_dim},
                {"classifier_hidden", t.model.classifier_hidden},
                {"separate_language_encoders", t.model.separate_language_encoders}};
  j["train"] = {{"batch_size", t.batch_size},
                {"clone_fraction", t.clone_fraction},
                {"lambda", t.lambda},
                {"learning_rate", t.learning_rate},
                {"optimizer", train::optimizer_name(t.optimizer)},
                {"clip_norm", t.clip_norm},
                {"max_episode_length", t.max_episode_length},
                {"task_mode", train::task_mode_name(t.task_mode)},
                {"env_mode", model::env_mode_name(t.env_mode)},
                {"dialog_variant", corpus::variant_name(t.variant)},
                {"mix_ratio", t.mix_ratio},
                {"env_loss_weight", t.env_loss_weight},
                {"steps", t.steps},
                {"eval_interval", t.eval_interval},
                {"eval_episodes", t.eval_episodes},
                {"seeds", t.seeds}};
  j["reward"] = {{"gamma", t.vln_reward.gamma},
                 {"success_threshold", t.vln_reward.success_threshold},
                 {"ndh_mode", rl::reward_mode_name(t.ndh_reward.mode)}};
  return j;
}

}  // namespace emnav::io
