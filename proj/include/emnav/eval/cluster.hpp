// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "emnav/autodiff/tensor.hpp"

namespace emnav::eval {

/// Mean silhouette coefficient of the rows of `points` grouped by `labels`,
/// Euclidean distance. Points in singleton clusters score 0. Needs at least
/// two distinct labels.
double silhouette_score(const Matrix& points, std::span<const int> labels);

}  // namespace emnav::eval
