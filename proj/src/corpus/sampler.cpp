// SPDX-License-Identifier: Apache-2.0
#include "emnav/corpus/sampler.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace emnav::corpus {

InterleavedSampler::InterleavedSampler(std::size_t vln_pool, std::size_t ndh_pool, double vln_ratio,
                                       std::uint64_t seed)
    : ratio_(vln_ratio), rng_(mix_seed({seed, 0x6d6978ULL})) {
  if (!(vln_ratio >= 0.0 && vln_ratio <= 1.0)) throw std::invalid_argument("mix ratio must lie in [0, 1]");
  if (vln_ratio > 0.0 && vln_pool == 0) throw std::invalid_argument("mix ratio needs VLN samples but pool is empty");
  if (vln_ratio < 1.0 && ndh_pool == 0) throw std::invalid_argument("mix ratio needs NDH samples but pool is empty");
  vln_.order.resize(vln_pool);
  ndh_.order.resize(ndh_pool);
  std::iota(vln_.order.begin(), vln_.order.end(), std::size_t{0});
  std::iota(ndh_.order.begin(), ndh_.order.end(), std::size_t{0});
  shuffle(vln_.order, rng_);
  shuffle(ndh_.order, rng_);
}

std::size_t InterleavedSampler::draw(Stream& s) {
  if (s.pos == s.order.size()) {
    shuffle(s.order, rng_);
    s.pos = 0;
  }
  return s.order[s.pos++];
}

std::vector<SampleRef> InterleavedSampler::next_batch(std::size_t batch_size) {
  std::vector<SampleRef> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    // Boundary ratios never consult the generator, so they cannot pick an empty pool.
    const bool vln = ratio_ >= 1.0 || (ratio_ > 0.0 && bernoulli(rng_, ratio_));
    batch.push_back(vln ? SampleRef{Task::Vln, draw(vln_)} : SampleRef{Task::Ndh, draw(ndh_)});
  }
  return batch;
}

std::vector<SampleRef> fixed_total_mixture(std::size_t ndh_pool, std::size_t vln_pool, std::size_t total,
                                           double vln_fraction, std::uint64_t seed) {
  if (!(vln_fraction >= 0.0 && vln_fraction <= 1.0)) throw std::invalid_argument("VLN fraction must lie in [0, 1]");
  // The epsilon keeps products such as 0.29 * 100 from flooring one short.
  const auto n_vln = static_cast<std::size_t>(std::floor(vln_fraction * static_cast<double>(total) + 1e-9));
  const std::size_t n_ndh = total - n_vln;
  if (n_vln > vln_pool || n_ndh > ndh_pool)
    throw std::invalid_argument("insufficient pool: need " + std::to_string(n_vln) + " VLN / " +
                                std::to_string(n_ndh) + " NDH, have " + std::to_string(vln_pool) + " / " +
                                std::to_string(ndh_pool));
  Rng rng(mix_seed({seed, 0x666978ULL}));
  auto draw = [&](std::size_t pool, std::size_t n, Task task, std::vector<SampleRef>& out) {
    std::vector<std::size_t> idx(pool);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    shuffle(idx, rng);
    for (std::size_t i = 0; i < n; ++i) out.push_back({task, idx[i]});
  };
  std::vector<SampleRef> out;
  out.reserve(total);
  draw(vln_pool, n_vln, Task::Vln, out);
  draw(ndh_pool, n_ndh, Task::Ndh, out);
  return out;
}

}  // namespace emnav::corpus
