// SPDX-License-Identifier: Apache-2.0
#include "emnav/corpus/benchmark.hpp"

#include <stdexcept>
#include <string>

#include "emnav/random.hpp"

namespace emnav::corpus {
namespace {

Fold make_fold(const std::vector<world::House>& houses, std::size_t first, std::size_t count, std::size_t n_vln,
               std::size_t n_ndh, std::uint64_t seed, std::uint64_t tag, const CorpusSpec& spec,
               const TemplateBank& bank) {
  Fold f;
  for (std::size_t i = 0; i < n_vln; ++i)
    f.vln.push_back(generate_vln_sample(houses[first + i % count], mix_seed({seed, tag, 0, i}), spec, bank));
  for (std::size_t i = 0; i < n_ndh; ++i)
    f.ndh.push_back(generate_ndh_sample(houses[first + i % count], mix_seed({seed, tag, 1, i}), spec, bank));
  return f;
}

}  // namespace

const world::House& Benchmark::house(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= houses.size())
    throw world::WorldError("unknown house " + std::to_string(id));
  return houses[static_cast<std::size_t>(id)];
}

int Benchmark::label(int house_id) const {
  return house_id >= 0 && static_cast<std::size_t>(house_id) < train_house_count ? house_id : -1;
}

Benchmark generate_benchmark(world::WorldSet worlds, const CorpusCounts& counts, std::uint64_t seed,
                             const CorpusSpec& spec, const TemplateBank& bank) {
  Benchmark b;
  b.train_house_count = worlds.train.size();
  for (auto& h : worlds.train) b.houses.push_back(std::move(h));
  for (auto& h : worlds.unseen) b.houses.push_back(std::move(h));
  for (std::size_t i = 0; i < b.houses.size(); ++i)
    if (b.houses[i].id() != static_cast<int>(i))
      throw world::WorldError("house ids must be 0..n-1 with training houses first");
  if (b.train_house_count == 0) throw world::WorldError("benchmark needs training houses");

  const std::size_t t = b.train_house_count;
  b.train = make_fold(b.houses, 0, t, counts.vln_train, counts.ndh_train, seed, 0x74726eULL, spec, bank);
  b.val_seen = make_fold(b.houses, 0, t, counts.vln_val, counts.ndh_val, seed, 0x736565ULL, spec, bank);
  const std::size_t u = b.houses.size() - t;
  if (u > 0) b.val_unseen = make_fold(b.houses, t, u, counts.vln_val, counts.ndh_val, seed, 0x756e73ULL, spec, bank);
  return b;
}

Vocab build_joint_vocab(const Fold& train, DialogInputVariant variant) {
  std::vector<TokenSeq> vln, ndh;
  for (const auto& s : train.vln) vln.push_back(s.tokens);
  for (const auto& s : train.ndh) ndh.push_back(serialize_dialog(s, variant));
  return merge_vocab(build_vocab(vln), build_vocab(ndh));
}

LengthStats mean_token_lengths(const Fold& fold, DialogInputVariant variant) {
  LengthStats st;
  for (const auto& s : fold.vln) st.vln += static_cast<double>(s.tokens.size());
  for (const auto& s : fold.ndh) st.ndh += static_cast<double>(serialize_dialog(s, variant).size());
  if (!fold.vln.empty()) st.vln /= static_cast<double>(fold.vln.size());
  if (!fold.ndh.empty()) st.ndh /= static_cast<double>(fold.ndh.size());
  return st;
}

}  // namespace emnav::corpus
