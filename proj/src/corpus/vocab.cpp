// SPDX-License-Identifier: Apache-2.0
#include "emnav/corpus/vocab.hpp"

#include <stdexcept>

namespace emnav::corpus {

Vocab::Vocab() {
  add(kPadToken);
  add(kOovToken);
}

int Vocab::add(const std::string& token) {
  if (auto it = ids_.find(token); it != ids_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  ids_.emplace(token, id);
  return id;
}

int Vocab::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kOov : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary");
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

TokenSeq Vocab::decode(std::span<const int> ids) const {
  TokenSeq out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

Vocab build_vocab(std::span<const TokenSeq> corpus, int min_count) {
  std::map<std::string, int> counts;
  for (const auto& seq : corpus)
    for (const auto& t : seq) ++counts[t];
  Vocab v;
  for (const auto& [t, c] : counts)
    if (c >= min_count && t != Vocab::kPadToken && t != Vocab::kOovToken) v.add(t);
  return v;
}

Vocab merge_vocab(const Vocab& a, const Vocab& b) {
  Vocab out = a;
  std::map<std::string, int> extra;
  for (const auto& t : b.tokens())
    if (!out.contains(t)) extra.emplace(t, 0);
  for (const auto& [t, _] : extra) out.add(t);
  return out;
}

}  // namespace emnav::corpus
