// SPDX-License-Identifier: Apache-2.0
#include "emnav/eval/cluster.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace emnav::eval {

double silhouette_score(const Matrix& points, std::span<const int> labels) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (labels.size() != n) throw std::invalid_argument("silhouette_score: one label per point required");
  std::map<int, int> cluster_of;
  for (int l : labels) cluster_of.emplace(l, 0);
  if (cluster_of.size() < 2) throw std::invalid_argument("silhouette_score: needs at least two clusters");
  int next = 0;
  for (auto& [label, idx] : cluster_of) idx = next++;
  const std::size_t k = cluster_of.size();

  std::vector<int> c(n);
  std::vector<std::size_t> size(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = cluster_of[labels[i]];
    ++size[static_cast<std::size_t>(c[i])];
  }

  double total = 0.0;
  std::vector<double> sum(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sum[static_cast<std::size_t>(c[j])] += (points.row(static_cast<Eigen::Index>(i)) -
                                                          points.row(static_cast<Eigen::Index>(j))).norm();
    const auto own = static_cast<std::size_t>(c[i]);
    if (size[own] < 2) continue;
    const double a = sum[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < k; ++q)
      if (q != own && size[q] > 0) b = std::min(b, sum[q] / static_cast<double>(size[q]));
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

}  // namespace emnav::eval
