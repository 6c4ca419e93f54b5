// SPDX-License-Identifier: Apache-2.0
#include "emnav/model/agent.hpp"

#include <stdexcept>

#include "emnav/random.hpp"

namespace emnav::model {
namespace {

void add_lstm(ParameterSet& params, const std::string& prefix, int input, int hidden, Rng& rng) {
  params.add_uniform(prefix + ".W", 4 * hidden, input + hidden, rng);
  Matrix bias = Matrix::Zero(4 * hidden, 1);
  bias.middleRows(hidden, hidden).setOnes();
  params.add(prefix + ".b", std::move(bias));
}

void add_language_encoder(ParameterSet& params, const ModelConfig& cfg, const std::string& prefix, Rng& rng) {
  params.add_uniform(prefix + ".embed", cfg.vocab_size, cfg.embed_dim, rng);
  for (int l = 0; l < cfg.lang_layers; ++l) {
    const int input = l == 0 ? cfg.embed_dim : 2 * cfg.lang_hidden;
    const std::string layer = prefix + ".l" + std::to_string(l);
    add_lstm(params, layer + ".fw", input, cfg.lang_hidden, rng);
    add_lstm(params, layer + ".bw", input, cfg.lang_hidden, rng);
  }
  params.add_uniform(prefix + ".text_key", cfg.attention_dim, 2 * cfg.lang_hidden, rng);
}

LstmState zero_state(Tape& tape, int hidden) {
  return {tape.constant(Matrix::Zero(hidden, 1)), tape.constant(Matrix::Zero(hidden, 1))};
}

}  // namespace

std::string_view env_mode_name(EnvMode m) noexcept {
  switch (m) {
    case EnvMode::Plain: return "plain";
    case EnvMode::Agnostic: return "agnostic";
    case EnvMode::Aware: return "aware";
  }
  return "plain";
}

EnvMode env_mode_from_name(std::string_view name) {
  for (auto m : {EnvMode::Plain, EnvMode::Agnostic, EnvMode::Aware})
    if (env_mode_name(m) == name) return m;
  throw std::invalid_argument("unknown env mode '" + std::string(name) + "'");
}

std::string language_prefix(const ModelConfig& cfg, Task task) {
  if (!cfg.separate_language_encoders) return "lang";
  return "lang." + std::string(corpus::task_name(task));
}

ParameterSet init_parameters(const ModelConfig& cfg, std::uint64_t seed) {
  if (cfg.house_classes < 1) throw std::invalid_argument("model needs at least 1 house class");
  if (cfg.vocab_size < 2) throw std::invalid_argument("vocabulary must hold the special ids");
  Rng rng(mix_seed({seed, 0x696e6974ULL}));
  ParameterSet p;
  if (cfg.separate_language_encoders) {
    add_language_encoder(p, cfg, language_prefix(cfg, Task::Vln), rng);
    add_language_encoder(p, cfg, language_prefix(cfg, Task::Ndh), rng);
  } else {
    add_language_encoder(p, cfg, "lang", rng);
  }

  p.add_uniform("traj.query", cfg.view_dim, cfg.traj_hidden, rng);
  for (int l = 0; l < cfg.traj_layers; ++l)
    add_lstm(p, "traj.l" + std::to_string(l), l == 0 ? cfg.view_dim : cfg.traj_hidden, cfg.traj_hidden, rng);

  const int context = cfg.traj_hidden + 2 * cfg.lang_hidden + cfg.view_dim;
  p.add_uniform("policy.text_query", cfg.attention_dim, cfg.traj_hidden, rng);
  p.add_uniform("policy.visual_query", cfg.attention_dim, 2 * cfg.lang_hidden, rng);
  p.add_uniform("policy.visual_key", cfg.attention_dim, cfg.view_dim, rng);
  p.add_uniform("policy.Wc", cfg.attention_dim, context, rng);
  p.add_uniform("policy.Wu", cfg.attention_dim, cfg.view_dim, rng);
  p.add_uniform("policy.stop", cfg.view_dim, 1, rng);

  p.add_uniform("env.W1", cfg.classifier_hidden, cfg.traj_hidden, rng);
  p.add_zeros("env.b1", cfg.classifier_hidden, 1);
  p.add_uniform("env.W2", cfg.house_classes, cfg.classifier_hidden, rng);
  p.add_zeros("env.b2", cfg.house_classes, 1);
  return p;
}

bool is_classifier_parameter(const std::string& name) { return name.rfind("env.", 0) == 0; }

LanguageEncoding encode_language(Tape& tape, const ModelConfig& cfg, std::span<const int> tokens, Task task) {
  if (tokens.empty()) throw std::invalid_argument("encode_language: empty token sequence");
  const std::string prefix = language_prefix(cfg, task);
  const Var table = tape.parameter(prefix + ".embed");
  std::vector<Var> inputs;
  inputs.reserve(tokens.size());
  for (int id : tokens) {
    if (id < 0 || id >= cfg.vocab_size)
      throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of " +
                              std::to_string(cfg.vocab_size));
    inputs.push_back(tape.embedding(table, id));
  }

  const std::size_t n = inputs.size();
  for (int l = 0; l < cfg.lang_layers; ++l) {
    const std::string layer = prefix + ".l" + std::to_string(l);
    const Var wf = tape.parameter(layer + ".fw.W"), bf = tape.parameter(layer + ".fw.b");
    const Var wb = tape.parameter(layer + ".bw.W"), bb = tape.parameter(layer + ".bw.b");
    std::vector<Var> fw(n), bw(n);
    LstmState s = zero_state(tape, cfg.lang_hidden);
    for (std::size_t t = 0; t < n; ++t) {
      s = lstm_cell(tape, wf, bf, inputs[t], s);
      fw[t] = s.h;
    }
    s = zero_state(tape, cfg.lang_hidden);
    for (std::size_t t = n; t-- > 0;) {
      s = lstm_cell(tape, wb, bb, inputs[t], s);
      bw[t] = s.h;
    }
    for (std::size_t t = 0; t < n; ++t) inputs[t] = tape.concat({fw[t], bw[t]});
  }

  LanguageEncoding enc;
  enc.states = tape.transpose(tape.hconcat(inputs));
  enc.text_keys = tape.matmul(enc.states, tape.transpose(tape.parameter(prefix + ".text_key")));
  return enc;
}

TrajectoryState initial_state(Tape& tape, const ModelConfig& cfg) {
  TrajectoryState s;
  for (int l = 0; l < cfg.traj_layers; ++l) s.layers.push_back(zero_state(tape, cfg.traj_hidden));
  return s;
}

PanoramaStep encode_panorama_step(Tape& tape, const ModelConfig& cfg, const TrajectoryState& prev, Var panorama) {
  const Var query = tape.matmul(tape.parameter("traj.query"), prev.latent());
  const Attended<double> pooled = dot_attention(tape, query, panorama, panorama);
  PanoramaStep out;
  out.pooled = pooled.output;
  out.view_weights = pooled.weights;
  out.state.step = prev.step + 1;
  Var x = pooled.output;
  for (int l = 0; l < cfg.traj_layers; ++l) {
    const std::string layer = "traj.l" + std::to_string(l);
    LstmState s = lstm_cell(tape, tape.parameter(layer + ".W"), tape.parameter(layer + ".b"), x,
                            prev.layers[static_cast<std::size_t>(l)]);
    out.state.layers.push_back(s);
    x = s.h;
  }
  return out;
}

ActionScores bilinear_action_scores(Tape& tape, Var query, Var directions, Var wu) {
  ActionScores s;
  s.logits = tape.matmul(directions, tape.matmul(tape.transpose(wu), query));
  s.log_probs = tape.log_softmax(s.logits);
  return s;
}

ActionScores predict_action(Tape& tape, const ModelConfig& cfg, const TrajectoryState& state,
                            const LanguageEncoding& lang, Var panorama, const Matrix& neighbor_features) {
  if (neighbor_features.rows() > 0 && neighbor_features.cols() != cfg.view_dim)
    throw ShapeError("predict_action", shape_of(neighbor_features), Shape{neighbor_features.rows(), cfg.view_dim});
  const Var h = state.latent();
  const Var text_query = tape.matmul(tape.parameter("policy.text_query"), h);
  const Var c_text = dot_attention(tape, text_query, lang.text_keys, lang.states).output;
  const Var visual_query = tape.matmul(tape.parameter("policy.visual_query"), c_text);
  const Var visual_keys = tape.matmul(panorama, tape.transpose(tape.parameter("policy.visual_key")));
  const Var c_visual = dot_attention(tape, visual_query, visual_keys, panorama).output;
  const Var query = tape.matmul(tape.parameter("policy.Wc"), tape.concat({h, c_text, c_visual}));

  Var directions = tape.transpose(tape.parameter("policy.stop"));
  if (neighbor_features.rows() > 0) directions = tape.concat({directions, tape.constant(neighbor_features)});
  return bilinear_action_scores(tape, query, directions, tape.parameter("policy.Wu"));
}

Var classify_environment(Tape& tape, const ModelConfig& /*cfg*/, Var latent, EnvMode mode, double lambda) {
  Var z = latent;
  switch (mode) {
    case EnvMode::Agnostic: z = tape.grad_reverse(latent, GradReverseConfig{lambda}); break;
    case EnvMode::Aware: break;
    case EnvMode::Plain: z = tape.detach(latent); break;
  }
  const Var hidden = tape.relu(linear(tape, tape.parameter("env.W1"), tape.parameter("env.b1"), z));
  return tape.log_softmax(linear(tape, tape.parameter("env.W2"), tape.parameter("env.b2"), hidden));
}

}  // namespace emnav::model
