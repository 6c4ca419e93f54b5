// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emnav/eval/metrics.hpp"
#include "emnav/train/trainer.hpp"

namespace emnav::io {

nlohmann::json to_json(const eval::MetricReport& report);
eval::MetricReport metric_report_from_json(const nlohmann::json& j);

/// A report with identifying columns, e.g. {{"task", "ndh"}, {"env_mode", "aware"}}.
struct LabeledReport {
  std::vector<std::pair<std::string, std::string>> labels;
  eval::MetricReport report;
};

/// Header "<labels>,fold,episodes,seeds,pl,ne,sr,spl,cls,progress,pl_sd,...,progress_sd",
/// one row per fold, then a "gap" row per report that has one. Dot decimals.
/// Every report must carry the same label keys.
void write_report_csv(std::ostream& out, std::span<const LabeledReport> reports);

/// Report over the last evaluation of every seed in `log`, restricted to `task`.
/// Throws when the log holds no record of the task.
eval::MetricReport summarize_log(std::span<const train::LogRecord> log, corpus::Task task);

nlohmann::json to_json(const train::LogRecord& rec);
train::LogRecord log_record_from_json(const nlohmann::json& j);

/// One compact JSON object per line.
void write_log(std::ostream& out, std::span<const train::LogRecord> records);

/// Header "house_id,episode,step,z0,...,z{d-1}", one row per trajectory step.
void write_latents_csv(std::ostream& out, std::span<const train::EpisodeOutcome> outcomes);

/// Locale-independent shortest round-trip decimal.
std::string csv_real(double v);

}  // namespace emnav::io
