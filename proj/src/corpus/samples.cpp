// SPDX-License-Identifier: Apache-2.0
#include "emnav/corpus/samples.hpp"

#include <stdexcept>
#include <string>

namespace emnav::corpus {

std::string_view task_name(Task t) noexcept { return t == Task::Vln ? "vln" : "ndh"; }

Task task_from_name(std::string_view name) {
  if (name == "vln") return Task::Vln;
  if (name == "ndh") return Task::Ndh;
  throw std::invalid_argument("unknown task '" + std::string(name) + "'");
}

std::string_view variant_name(DialogInputVariant v) noexcept {
  switch (v) {
    case DialogInputVariant::T0: return "t0";
    case DialogInputVariant::T0A: return "t0+a";
    case DialogInputVariant::T0AQ: return "t0+a+q";
    case DialogInputVariant::FullHistory: return "full";
  }
  return "full";
}

DialogInputVariant variant_from_name(std::string_view name) {
  for (auto v : {DialogInputVariant::T0, DialogInputVariant::T0A, DialogInputVariant::T0AQ,
                 DialogInputVariant::FullHistory})
    if (variant_name(v) == name) return v;
  throw std::invalid_argument("unknown dialog variant '" + std::string(name) + "'");
}

TokenSeq serialize_dialog(const NdhSample& sample, DialogInputVariant variant) {
  TokenSeq out{sample.target};
  if (variant == DialogInputVariant::T0 || sample.turns.empty()) return out;
  const DialogTurn& last = sample.turns.back();
  out.insert(out.end(), last.answer.begin(), last.answer.end());
  if (variant == DialogInputVariant::T0A) return out;
  out.insert(out.end(), last.question.begin(), last.question.end());
  if (variant == DialogInputVariant::T0AQ) return out;
  for (std::size_t i = 0; i + 1 < sample.turns.size(); ++i) {
    out.insert(out.end(), sample.turns[i].question.begin(), sample.turns[i].question.end());
    out.insert(out.end(), sample.turns[i].answer.begin(), sample.turns[i].answer.end());
  }
  return out;
}

}  // namespace emnav::corpus
