// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace emnav::corpus {

using TokenSeq = std::vector<std::string>;

/// Token <-> id map. Id 0 is padding, id 1 the single out-of-vocabulary id.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOov = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kOovToken = "<oov>";

  Vocab();

  /// Insert `token` if absent; returns its id.
  int add(const std::string& token);

  bool contains(const std::string& token) const { return ids_.count(token) != 0; }
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::vector<int> encode(std::span<const std::string> tokens) const;
  TokenSeq decode(std::span<const int> ids) const;

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> ids_;
};

inline constexpr int kMinTokenCount = 5;

/// Vocabulary of tokens occurring at least `min_count` times. Ids are assigned
/// in lexicographic token order for reproducibility.
Vocab build_vocab(std::span<const TokenSeq> corpus, int min_count = kMinTokenCount);

/// Union of two vocabularies (tokens of `a` keep their ids; new tokens of `b`
/// are appended in lexicographic order).
Vocab merge_vocab(const Vocab& a, const Vocab& b);

}  // namespace emnav::corpus
