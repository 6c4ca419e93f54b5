// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace emnav {

// Dense rank-<=2 storage, row-major. Vectors are column vectors (n x 1).
template <typename Scalar>
using Tensor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Matrix = Tensor<double>;
using Vector = Eigen::VectorXd;

struct Shape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  friend bool operator==(const Shape&, const Shape&) = default;
};

template <typename Derived>
Shape shape_of(const Eigen::EigenBase<Derived>& m) {
  return {m.rows(), m.cols()};
}

inline std::string to_string(const Shape& s) {
  std::ostringstream os;
  os << '[' << s.rows << 'x' << s.cols << ']';
  return os.str();
}

class ShapeError : public std::invalid_argument {
 public:
  ShapeError(const std::string& op, const Shape& lhs, const Shape& rhs)
      : std::invalid_argument(op + ": shape mismatch " + to_string(lhs) + " vs " + to_string(rhs)),
        op_(op),
        lhs_(lhs),
        rhs_(rhs) {}

  const std::string& op() const noexcept { return op_; }
  const Shape& lhs() const noexcept { return lhs_; }
  const Shape& rhs() const noexcept { return rhs_; }

 private:
  std::string op_;
  Shape lhs_;
  Shape rhs_;
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace emnav
