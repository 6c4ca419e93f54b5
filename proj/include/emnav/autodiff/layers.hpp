// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "emnav/autodiff/tape.hpp"

namespace emnav {

template <typename Scalar>
struct Attended {
  Var output;   // [d' x 1]
  Var weights;  // [m x 1], nonnegative, sums to one
};

/// Dot-product attention: output = sum_i softmax(keys * query)_i * values_i.
/// `query` is [d x 1], `keys` is [m x d], `values` is [m x d'].
template <typename Scalar>
Attended<Scalar> dot_attention(BasicTape<Scalar>& tape, Var query, Var keys, Var values) {
  const auto& k = tape.value(keys);
  const auto& v = tape.value(values);
  if (k.rows() == 0) throw std::invalid_argument("dot_attention: empty attention set");
  if (k.rows() != v.rows()) throw ShapeError("dot_attention", shape_of(k), shape_of(v));
  Var scores = tape.matmul(keys, query);
  Var weights = tape.softmax(scores);
  Var output = tape.matmul(tape.transpose(values), weights);
  return {output, weights};
}

/// y = W x (+ b). Bias-add is the only broadcast-like op and needs matching shapes.
template <typename Scalar>
Var linear(BasicTape<Scalar>& tape, Var weight, Var x) {
  return tape.matmul(weight, x);
}

template <typename Scalar>
Var linear(BasicTape<Scalar>& tape, Var weight, Var bias, Var x) {
  return tape.add(tape.matmul(weight, x), bias);
}

struct LstmState {
  Var h;
  Var c;
};

/// One LSTM step with packed gates [i; f; g; o] = W [x; h] + b.
template <typename Scalar>
LstmState lstm_cell(BasicTape<Scalar>& tape, Var weight, Var bias, Var x, const LstmState& prev) {
  const Eigen::Index hidden = tape.value(prev.h).rows();
  Var gates = tape.add(tape.matmul(weight, tape.concat({x, prev.h})), bias);
  Var i = tape.sigmoid(tape.slice_rows(gates, 0, hidden));
  Var f = tape.sigmoid(tape.slice_rows(gates, hidden, hidden));
  Var g = tape.tanh(tape.slice_rows(gates, 2 * hidden, hidden));
  Var o = tape.sigmoid(tape.slice_rows(gates, 3 * hidden, hidden));
  Var c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
  Var h = tape.mul(o, tape.tanh(c));
  return {h, c};
}

}  // namespace emnav
