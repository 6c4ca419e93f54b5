// SPDX-License-Identifier: Apache-2.0
#include "emnav/io/dataset_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "emnav/world/house_io.hpp"

namespace emnav::io {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string house_file(int id) { return "house_" + std::to_string(id) + ".txt"; }

json pose_json(const world::AgentPose& p) {
  return {{"node", p.node}, {"heading", p.heading}, {"elevation", p.elevation}};
}

world::AgentPose pose_from(const json& j) {
  return {j.at("node").get<int>(), j.at("heading").get<double>(), j.at("elevation").get<double>()};
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return in;
}

}  // namespace

void save_worlds(const fs::path& dir, const world::WorldSet& worlds) {
  fs::create_directories(dir / "train");
  fs::create_directories(dir / "val_unseen");
  json folds{{"train", json::array()}, {"val_seen", json::array()}, {"val_unseen", json::array()}};
  for (const auto& h : worlds.train) {
    world::save_house(dir / "train" / house_file(h.id()), h);
    folds["train"].push_back(h.id());
    folds["val_seen"].push_back(h.id());
  }
  for (const auto& h : worlds.unseen) {
    world::save_house(dir / "val_unseen" / house_file(h.id()), h);
    folds["val_unseen"].push_back(h.id());
  }
  auto out = open_out(dir / "folds.json");
  out << folds.dump(2) << "\n";
}

world::WorldSet load_worlds(const fs::path& dir) {
  if (!fs::exists(dir / "folds.json")) throw std::runtime_error("missing " + (dir / "folds.json").string());
  const json folds = json::parse(open_in(dir / "folds.json"));
  world::WorldSet out;
  for (int id : folds.at("train").get<std::vector<int>>())
    out.train.push_back(world::load_house(dir / "train" / house_file(id)));
  for (int id : folds.at("val_unseen").get<std::vector<int>>())
    out.unseen.push_back(world::load_house(dir / "val_unseen" / house_file(id)));
  return out;
}

void write_fold(std::ostream& out, const corpus::Fold& fold, const corpus::Vocab& vocab) {
  for (const auto& s : fold.vln) {
    json j{{"task", "vln"},
           {"house", s.house_id},
           {"tokens", s.tokens},
           {"token_ids", vocab.encode(s.tokens)},
           {"start", pose_json(s.start)},
           {"path", s.path},
           {"goal", {{"node", s.goal}}}};
    out << j.dump() << "\n";
  }
  for (const auto& s : fold.ndh) {
    json turns = json::array();
    for (const auto& t : s.turns) turns.push_back({{"question", t.question}, {"answer", t.answer}});
    const corpus::TokenSeq full = corpus::serialize_dialog(s, corpus::DialogInputVariant::FullHistory);
    json j{{"task", "ndh"},
           {"house", s.house_id},
           {"target", s.target},
           {"turns", turns},
           {"tokens", full},
           {"token_ids", vocab.encode(full)},
           {"start", pose_json(s.start)},
           {"navigator_path", s.navigator_path},
           {"oracle_path", s.oracle_path},
           {"goal", {{"room", s.goal_room}}}};
    out << j.dump() << "\n";
  }
}

corpus::Fold read_fold(std::istream& in) {
  corpus::Fold fold;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const corpus::Task task = corpus::task_from_name(j.at("task").get<std::string>());
      if (task == corpus::Task::Vln) {
        corpus::VlnSample s;
        s.house_id = j.at("house").get<int>();
        s.tokens = j.at("tokens").get<corpus::TokenSeq>();
        s.start = pose_from(j.at("start"));
        s.path = j.at("path").get<std::vector<int>>();
        s.goal = j.at("goal").at("node").get<int>();
        fold.vln.push_back(std::move(s));
      } else {
        corpus::NdhSample s;
        s.house_id = j.at("house").get<int>();
        s.target = j.at("target").get<std::string>();
        for (const auto& t : j.at("turns"))
          s.turns.push_back({t.at("question").get<corpus::TokenSeq>(), t.at("answer").get<corpus::TokenSeq>()});
        s.start = pose_from(j.at("start"));
        s.navigator_path = j.at("navigator_path").get<std::vector<int>>();
        s.oracle_path = j.at("oracle_path").get<std::vector<int>>();
        s.goal_room = j.at("goal").at("room").get<int>();
        fold.ndh.push_back(std::move(s));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return fold;
}

void save_vocab(const fs::path& path, const corpus::Vocab& vocab) {
  auto out = open_out(path);
  for (const auto& t : vocab.tokens()) out << t << "\n";
}

corpus::Vocab load_vocab(const fs::path& path) {
  auto in = open_in(path);
  corpus::Vocab v;
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (i < v.size()) {
      if (v.token(static_cast<int>(i)) != line) throw std::runtime_error(path.string() + ": special ids out of order");
    } else {
      v.add(line);
    }
    ++i;
  }
  return v;
}

void save_corpus(const fs::path& dir, const corpus::Benchmark& bench, const corpus::Vocab& vocab) {
  fs::create_directories(dir);
  const std::pair<const char*, const corpus::Fold*> folds[] = {
      {"train.jsonl", &bench.train}, {"val_seen.jsonl", &bench.val_seen}, {"val_unseen.jsonl", &bench.val_unseen}};
  for (const auto& [name, fold] : folds) {
    auto out = open_out(dir / name);
    write_fold(out, *fold, vocab);
  }
  save_vocab(dir / "vocab.txt", vocab);
}

corpus::Benchmark load_benchmark(const fs::path& worlds_dir, const fs::path& corpus_dir) {
  world::WorldSet worlds = load_worlds(worlds_dir);
  corpus::Benchmark b;
  b.train_house_count = worlds.train.size();
  for (auto& h : worlds.train) b.houses.push_back(std::move(h));
  for (auto& h : worlds.unseen) b.houses.push_back(std::move(h));
  for (std::size_t i = 0; i < b.houses.size(); ++i)
    if (b.houses[i].id() != static_cast<int>(i))
      throw std::runtime_error(worlds_dir.string() + ": house ids must be 0..n-1 with training houses first");
  auto fold = [&](const char* name) {
    const fs::path p = corpus_dir / (std::string(name) + ".jsonl");
    if (!fs::exists(p)) throw std::runtime_error("missing corpus fold " + p.string());
    auto in = open_in(p);
    return read_fold(in);
  };
  b.train = fold("train");
  b.val_seen = fold("val_seen");
  b.val_unseen = fold("val_unseen");
  return b;
}

}  // namespace emnav::io
