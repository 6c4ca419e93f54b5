// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emnav/autodiff/layers.hpp"
#include "emnav/autodiff/parameters.hpp"
#include "emnav/autodiff/tape.hpp"
#include "emnav/corpus/samples.hpp"

namespace emnav::model {

using corpus::Task;

struct ModelConfig {
  int vocab_size = 2;
  int embed_dim = 300;
  int lang_hidden = 256;  // per direction
  int lang_layers = 2;
  int traj_hidden = 512;
  int traj_layers = 2;
  int attention_dim = 128;
  int classifier_hidden = 128;
  int house_classes = 2;
  int view_dim = 20;  // feature dim + 4 orientation entries
  /// One language encoder per task instead of a shared one.
  bool separate_language_encoders = false;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// How the environment classifier is attached to the trajectory latent.
enum class EnvMode {
  Plain,     // classifier sees a detached latent; the trunk ignores it
  Agnostic,  // gradient reversal between latent and classifier
  Aware,     // plain identity, the trunk helps the classifier
};

std::string_view env_mode_name(EnvMode m) noexcept;
EnvMode env_mode_from_name(std::string_view name);

/// Trainable parameters, Xavier-uniform weights and zero biases (LSTM forget
/// gates start at 1).
ParameterSet init_parameters(const ModelConfig& cfg, std::uint64_t seed);

/// Name prefix of the language encoder used for `task`.
std::string language_prefix(const ModelConfig& cfg, Task task);

struct LanguageEncoding {
  Var states;     // n x 2*lang_hidden, row t = [fw_t, bw_t]
  Var text_keys;  // n x attention_dim
};

LanguageEncoding encode_language(Tape& tape, const ModelConfig& cfg, std::span<const int> tokens, Task task);

struct TrajectoryState {
  std::vector<LstmState> layers;
  int step = 0;

  /// Top-layer hidden state h_t^V, the latent z_t.
  Var latent() const { return layers.back().h; }
};

/// All-zero state for the start of an episode.
TrajectoryState initial_state(Tape& tape, const ModelConfig& cfg);

struct PanoramaStep {
  Var pooled;        // v_t, view_dim x 1
  Var view_weights;  // k x 1
  TrajectoryState state;
};

/// Attention-pool the panorama with the previous latent as query, then
/// advance the trajectory LSTM.
PanoramaStep encode_panorama_step(Tape& tape, const ModelConfig& cfg, const TrajectoryState& prev, Var panorama);

struct ActionScores {
  Var logits;     // l x 1
  Var log_probs;  // l x 1
};

/// softmax((U W_u^T) q) over direction rows U: the bilinear action scorer.
ActionScores bilinear_action_scores(Tape& tape, Var query, Var directions, Var wu);

/// Action distribution over STOP followed by the rows of `neighbor_features`
/// (l - 1 rows of view_dim entries).
ActionScores predict_action(Tape& tape, const ModelConfig& cfg, const TrajectoryState& state,
                            const LanguageEncoding& lang, Var panorama, const Matrix& neighbor_features);

/// Log-distribution over house labels from the latent, attached per `mode`.
Var classify_environment(Tape& tape, const ModelConfig& cfg, Var latent, EnvMode mode, double lambda);

/// Parameters of the environment classifier head.
bool is_classifier_parameter(const std::string& name);

}  // namespace emnav::model
