// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "emnav/corpus/samples.hpp"
#include "emnav/random.hpp"

namespace emnav::corpus {

/// Reference to a sample in a task's pool.
struct SampleRef {
  Task task = Task::Vln;
  std::size_t index = 0;

  friend bool operator==(const SampleRef&, const SampleRef&) = default;
};

/// Interleaved multitask batches: every batch position independently picks
/// VLN with probability `vln_ratio`, else NDH, and takes the next sample of
/// that task's stream. Each stream is a reshuffled cycle over its pool.
class InterleavedSampler {
 public:
  InterleavedSampler(std::size_t vln_pool, std::size_t ndh_pool, double vln_ratio, std::uint64_t seed);

  std::vector<SampleRef> next_batch(std::size_t batch_size);

  double vln_ratio() const noexcept { return ratio_; }

 private:
  struct Stream {
    std::vector<std::size_t> order;
    std::size_t pos = 0;
  };
  std::size_t draw(Stream& s);

  double ratio_;
  Rng rng_;
  Stream vln_;
  Stream ndh_;
};

/// Training set of exactly `total` samples: floor(vln_fraction * total) from
/// the VLN pool and the rest from the NDH pool, each drawn without replacement.
std::vector<SampleRef> fixed_total_mixture(std::size_t ndh_pool, std::size_t vln_pool, std::size_t total,
                                           double vln_fraction, std::uint64_t seed);

}  // namespace emnav::corpus
