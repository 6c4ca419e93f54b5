// SPDX-License-Identifier: Apache-2.0
#include "emnav/io/report.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "emnav/world/house_io.hpp"

namespace emnav::io {
namespace {

using nlohmann::json;

json values_json(const eval::MetricValues& m) {
  json j = json::object();
  for (std::size_t k = 0; k < m.v.size(); ++k) j[std::string(eval::kMetricNames[k])] = m.v[k];
  return j;
}

eval::MetricValues values_from(const json& j) {
  eval::MetricValues m;
  for (std::size_t k = 0; k < m.v.size(); ++k) m.v[k] = j.at(std::string(eval::kMetricNames[k])).get<double>();
  return m;
}

}  // namespace

std::string csv_real(double v) { return world::format_real(v); }

json to_json(const eval::MetricReport& report) {
  json folds = json::array();
  for (const auto& f : report.folds)
    folds.push_back({{"fold", f.fold},
                     {"episodes", f.episodes},
                     {"seeds", f.seeds},
                     {"mean", values_json(f.mean)},
                     {"sd", values_json(f.sd)}});
  json j{{"folds", folds}};
  j["gap"] = report.gap ? values_json(*report.gap) : json(nullptr);
  return j;
}

eval::MetricReport metric_report_from_json(const json& j) {
  eval::MetricReport r;
  for (const auto& f : j.at("folds")) {
    eval::FoldReport fr;
    fr.fold = f.at("fold").get<std::string>();
    fr.episodes = f.at("episodes").get<std::size_t>();
    fr.seeds = f.at("seeds").get<std::size_t>();
    fr.mean = values_from(f.at("mean"));
    fr.sd = values_from(f.at("sd"));
    r.folds.push_back(std::move(fr));
  }
  if (!j.at("gap").is_null()) r.gap = values_from(j.at("gap"));
  return r;
}

void write_report_csv(std::ostream& out, std::span<const LabeledReport> reports) {
  if (reports.empty()) return;
  const auto& keys = reports.front().labels;
  for (const auto& [k, v] : keys) out << k << ',';
  out << "fold,episodes,seeds";
  for (auto n : eval::kMetricNames) out << ',' << n;
  for (auto n : eval::kMetricNames) out << ',' << n << "_sd";
  out << '\n';
  for (const auto& r : reports) {
    if (r.labels.size() != keys.size())
      throw std::invalid_argument("write_report_csv: reports carry different label columns");
    std::string prefix;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (r.labels[i].first != keys[i].first)
        throw std::invalid_argument("write_report_csv: reports carry different label columns");
      prefix += r.labels[i].second + ',';
    }
    for (const auto& f : r.report.folds) {
      out << prefix << f.fold << ',' << f.episodes << ',' << f.seeds;
      for (double x : f.mean.v) out << ',' << csv_real(x);
      for (double x : f.sd.v) out << ',' << csv_real(x);
      out << '\n';
    }
    if (r.report.gap) {
      out << prefix << "gap,,";
      for (double x : r.report.gap->v) out << ',' << csv_real(x);
      for (std::size_t k = 0; k < r.report.gap->v.size(); ++k) out << ',';
      out << '\n';
    }
  }
}

eval::MetricReport summarize_log(std::span<const train::LogRecord> log, corpus::Task task) {
  std::map<std::uint64_t, std::size_t> last;
  for (const auto& r : log)
    if (r.task == task) last[r.seed] = std::max(last[r.seed], r.step);
  if (last.empty()) throw std::invalid_argument("summarize_log: no records for task " + std::string(corpus::task_name(task)));
  std::vector<eval::TaggedEpisode> tagged;
  std::map<std::string, std::size_t> episodes;
  for (const auto& r : log) {
    if (r.task != task || r.step != last[r.seed]) continue;
    tagged.push_back({r.fold, static_cast<int>(r.seed), r.metrics});
    episodes[r.fold] += r.episodes;
  }
  eval::MetricReport rep = eval::aggregate(tagged);
  for (auto& f : rep.folds) f.episodes = episodes[f.fold];
  return rep;
}

json to_json(const train::LogRecord& rec) {
  json j{{"seed", rec.seed},
         {"step", rec.step},
         {"fold", rec.fold},
         {"task", corpus::task_name(rec.task)},
         {"episodes", rec.episodes}};
  for (std::size_t k = 0; k < rec.metrics.v.size(); ++k) j[std::string(eval::kMetricNames[k])] = rec.metrics.v[k];
  j["env_accuracy"] = rec.env_accuracy ? json(*rec.env_accuracy) : json(nullptr);
  return j;
}

train::LogRecord log_record_from_json(const json& j) {
  train::LogRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.step = j.at("step").get<std::size_t>();
  r.fold = j.at("fold").get<std::string>();
  r.task = corpus::task_from_name(j.at("task").get<std::string>());
  r.episodes = j.at("episodes").get<std::size_t>();
  r.metrics = values_from(j);
  if (!j.at("env_accuracy").is_null()) r.env_accuracy = j.at("env_accuracy").get<double>();
  return r;
}

void write_log(std::ostream& out, std::span<const train::LogRecord> records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

void write_latents_csv(std::ostream& out, std::span<const train::EpisodeOutcome> outcomes) {
  Eigen::Index dim = 0;
  for (const auto& o : outcomes)
    if (!o.latents.empty()) dim = o.latents.front().size();
  out << "house_id,episode,step";
  for (Eigen::Index k = 0; k < dim; ++k) out << ",z" << k;
  out << '\n';
  for (std::size_t e = 0; e < outcomes.size(); ++e)
    for (std::size_t t = 0; t < outcomes[e].latents.size(); ++t) {
      out << outcomes[e].house_id << ',' << e << ',' << t;
      const Vector& z = outcomes[e].latents[t];
      for (Eigen::Index k = 0; k < z.size(); ++k) out << ',' << csv_real(z(k));
      out << '\n';
    }
}

}  // namespace emnav::io
