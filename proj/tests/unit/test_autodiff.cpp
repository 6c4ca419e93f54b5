// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "emnav/autodiff/checkpoint.hpp"
#include "emnav/autodiff/gradcheck.hpp"
#include "emnav/autodiff/layers.hpp"
#include "emnav/random.hpp"
#include "support.hpp"

namespace emnav {
namespace {

Matrix col(std::initializer_list<double> xs) {
  Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, lo, hi);
  return m;
}

TEST(Forward, SoftmaxOfZerosIsUniform) {
  ParameterSet p;
  Tape tape(p);
  const Matrix s = tape.value(tape.softmax(tape.constant(col({0, 0}))));
  EXPECT_DOUBLE_EQ(s(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(s(1, 0), 0.5);
}

TEST(Forward, SoftmaxMatchesDirectEvaluation) {
  ParameterSet p;
  Tape tape(p);
  const Matrix s = tape.value(tape.softmax(tape.constant(col({1, 0}))));
  const double e = std::exp(1.0);
  EXPECT_NEAR(s(0, 0), e / (e + 1.0), 1e-12);
  EXPECT_NEAR(s(0, 0), 0.7311, 1e-4);
  EXPECT_NEAR(s(1, 0), 0.2689, 1e-4);
}

TEST(Forward, MatmulWithIdentity) {
  ParameterSet p;
  Tape tape(p);
  const Matrix out = tape.value(tape.matmul(tape.constant(Matrix::Identity(2, 2)), tape.constant(col({3, 4}))));
  EXPECT_EQ(out, col({3, 4}));
}

TEST(Forward, ShapeMismatchThrows) {
  ParameterSet p;
  Tape tape(p);
  const Var a = tape.constant(Matrix::Ones(2, 3));
  EXPECT_THROW(tape.matmul(a, a), ShapeError);
  EXPECT_THROW(tape.add(a, tape.constant(Matrix::Ones(3, 2))), ShapeError);
}

TEST(Backward, SumGivesOnes) {
  ParameterSet p;
  p.add("x", col({0.3, -2.0, 5.0}));
  Tape tape(p);
  const Gradients g = tape.backward(tape.sum(tape.parameter("x")));
  EXPECT_EQ(g["x"], Matrix::Ones(3, 1));
}

TEST(Backward, SumOfSquares) {
  ParameterSet p;
  p.add("x", col({2, -1}));
  Tape tape(p);
  const Var x = tape.parameter("x");
  const Gradients g = tape.backward(tape.sum(tape.mul(x, x)));
  EXPECT_EQ(g["x"], col({4, -2}));
}

TEST(Backward, UnreachedParameterHasZeroGradient) {
  ParameterSet p;
  p.add("x", col({1, 2}));
  p.add("unused", Matrix::Ones(2, 2));
  Tape tape(p);
  const Gradients g = tape.backward(tape.sum(tape.parameter("x")));
  EXPECT_EQ(g["unused"], Matrix::Zero(2, 2));
}

TEST(Backward, NonScalarLossThrows) {
  ParameterSet p;
  p.add("x", col({1, 2}));
  Tape tape(p);
  EXPECT_THROW(tape.backward(tape.parameter("x")), ShapeError);
}

TEST(GradReverse, ForwardIsIdentity) {
  ParameterSet p;
  Tape tape(p);
  const Matrix x = col({1, 2});
  EXPECT_EQ(tape.value(tape.grad_reverse(tape.constant(x))), x);
}

TEST(GradReverse, BackwardScalesByMinusLambda) {
  ParameterSet p;
  p.add("x", col({0.5, -0.25}));
  Tape tape(p);
  // loss = [3, -1] . grl(x), so the upstream gradient at the reversal is [3, -1].
  const Var y = tape.grad_reverse(tape.parameter("x"), GradReverseConfig{1.3});
  const Gradients g = tape.backward(tape.matmul(tape.transpose(tape.constant(col({3, -1}))), y));
  EXPECT_NEAR(g["x"](0, 0), -3.9, 1e-12);
  EXPECT_NEAR(g["x"](1, 0), 1.3, 1e-12);
}

TEST(GradReverse, ZeroLambdaBlocksGradient) {
  ParameterSet p;
  p.add("x", col({0.5, -0.25}));
  Tape tape(p);
  const Var y = tape.grad_reverse(tape.parameter("x"), GradReverseConfig{0.0});
  const Gradients g = tape.backward(tape.sum(tape.mul(y, y)));
  EXPECT_EQ(g["x"], Matrix::Zero(2, 1));
}

TEST(GradReverse, ComposedGraphMatchesUnreversedNumericGradient) {
  Rng rng(3);
  ParameterSet p;
  p.add("W", random_matrix(3, 2, rng));
  p.add("x", random_matrix(2, 1, rng));
  Tape tape(p);
  const Var h = tape.tanh(tape.matmul(tape.parameter("W"), tape.parameter("x")));
  const Var loss = tape.sum(tape.log_softmax(tape.scale(tape.grad_reverse(h, {1.3}), 2.0)));
  const Var picked = tape.pick(tape.log_softmax(tape.scale(tape.grad_reverse(h, {1.3}), 2.0)), 1);
  for (Var l : {loss, picked}) {
    const Gradients g = tape.backward(l);
    // Finite differences see only the identity forward path.
    for (const char* name : {"W", "x"}) {
      const Matrix numeric = testing::numeric_gradient(tape, p, l, name);
      EXPECT_LT((g[name] + 1.3 * numeric).cwiseAbs().maxCoeff(), 1e-7) << name;
    }
  }
}

TEST(Detach, BlocksGradient) {
  ParameterSet p;
  p.add("x", col({1, 2}));
  Tape tape(p);
  const Var x = tape.parameter("x");
  const Var d = tape.detach(x);
  EXPECT_EQ(tape.value(d), col({1, 2}));
  const Gradients g = tape.backward(tape.sum(tape.add(tape.mul(d, d), x)));
  EXPECT_EQ(g["x"], Matrix::Ones(2, 1));
}

TEST(Attention, MatchesHandSoftmaxWeighting) {
  ParameterSet p;
  Tape tape(p);
  const Var keys = tape.constant(Matrix::Identity(2, 2));
  const Attended<double> a = dot_attention(tape, tape.constant(col({1, 0})), keys, keys);
  EXPECT_NEAR(tape.value(a.output)(0, 0), 0.7311, 1e-4);
  EXPECT_NEAR(tape.value(a.output)(1, 0), 0.2689, 1e-4);
}

TEST(Attention, SingleKeyReturnsItsValue) {
  ParameterSet p;
  Tape tape(p);
  Matrix v(1, 3);
  v << 4, -1, 2;
  const Attended<double> a = dot_attention(tape, tape.constant(col({0.3, 7})), tape.constant(Matrix::Ones(1, 2)),
                                           tape.constant(v));
  EXPECT_EQ(tape.value(a.output), Matrix(v.transpose()));
}

TEST(Attention, IdenticalKeysAverageValues) {
  ParameterSet p;
  Tape tape(p);
  Matrix v(3, 2);
  v << 1, 2, 3, 4, 5, 9;
  const Attended<double> a = dot_attention(tape, tape.constant(col({0.4, -2})), tape.constant(Matrix::Ones(3, 2)),
                                           tape.constant(v));
  const Matrix mean = v.colwise().mean().transpose();
  EXPECT_LT((tape.value(a.output) - mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Attention, EmptyKeySetThrows) {
  ParameterSet p;
  Tape tape(p);
  const Var empty = tape.constant(Matrix(0, 2));
  EXPECT_THROW(dot_attention(tape, tape.constant(col({1, 0})), empty, empty), std::invalid_argument);
}

// One composition per primitive; each loss is a random linear read-out so no
// gradient is identically zero by symmetry.
struct PrimitiveCase {
  const char* name;
  std::function<Var(Tape&, Var, Var)> build;  // (tape, a: 3x2, b: 3x2)
};

class PrimitiveGradients : public ::testing::TestWithParam<PrimitiveCase> {};

TEST_P(PrimitiveGradients, MatchFiniteDifferences) {
  Rng rng(17);
  ParameterSet p;
  p.add("a", random_matrix(3, 2, rng, 0.2, 1.5));  // positive and away from relu's kink
  p.add("b", random_matrix(3, 2, rng, -1.0, 1.0));
  Tape tape(p);
  const Var out = GetParam().build(tape, tape.parameter("a"), tape.parameter("b"));
  const Matrix& ov = tape.value(out);
  const Var readout = tape.constant(random_matrix(ov.rows(), ov.cols(), rng));
  const Var loss = tape.sum(tape.mul(out, readout));
  const GradCheckResult r = finite_diff_check(tape, p, loss, 1e-4);
  EXPECT_LT(r.max_relative_error, 1e-3) << GetParam().name << " worst at " << r.worst_parameter;
  EXPECT_EQ(r.entries_checked, 12u);
}

INSTANTIATE_TEST_SUITE_P(
    AllOps, PrimitiveGradients,
    ::testing::Values(
        PrimitiveCase{"matmul", [](Tape& t, Var a, Var b) { return t.matmul(a, t.transpose(b)); }},
        PrimitiveCase{"transpose", [](Tape& t, Var a, Var b) { return t.add(t.transpose(a), t.transpose(b)); }},
        PrimitiveCase{"add", [](Tape& t, Var a, Var b) { return t.add(a, b); }},
        PrimitiveCase{"sub", [](Tape& t, Var a, Var b) { return t.sub(a, b); }},
        PrimitiveCase{"mul", [](Tape& t, Var a, Var b) { return t.mul(a, b); }},
        PrimitiveCase{"scale", [](Tape& t, Var a, Var b) { return t.scale(t.add(a, b), -2.5); }},
        PrimitiveCase{"tanh", [](Tape& t, Var a, Var b) { return t.tanh(t.mul(a, b)); }},
        PrimitiveCase{"sigmoid", [](Tape& t, Var a, Var b) { return t.sigmoid(t.sub(a, b)); }},
        PrimitiveCase{"relu", [](Tape& t, Var a, Var b) { return t.add(t.relu(a), t.relu(t.sub(b, a))); }},
        PrimitiveCase{"exp", [](Tape& t, Var a, Var b) { return t.exp(t.mul(a, b)); }},
        PrimitiveCase{"log", [](Tape& t, Var a, Var) { return t.log(a); }},
        PrimitiveCase{"concat", [](Tape& t, Var a, Var b) { return t.concat({a, b}); }},
        PrimitiveCase{"hconcat", [](Tape& t, Var a, Var b) { return t.hconcat(std::vector<Var>{a, b}); }},
        PrimitiveCase{"slice_rows", [](Tape& t, Var a, Var b) { return t.slice_rows(t.mul(a, b), 1, 2); }},
        PrimitiveCase{"softmax",
                      [](Tape& t, Var a, Var b) { return t.softmax(t.mul(a, b)); }},
        PrimitiveCase{"log_softmax", [](Tape& t, Var a, Var b) { return t.log_softmax(t.matmul(a, t.transpose(t.slice_rows(b, 0, 1)))); }},
        PrimitiveCase{"embedding", [](Tape& t, Var a, Var b) { return t.add(t.embedding(a, 2), t.embedding(b, 0)); }},
        PrimitiveCase{"sum", [](Tape& t, Var a, Var b) { return t.sum(t.mul(a, b)); }},
        PrimitiveCase{"mean", [](Tape& t, Var a, Var b) { return t.mean(t.mul(a, t.tanh(b))); }},
        PrimitiveCase{"pick", [](Tape& t, Var a, Var b) { return t.add(t.pick(a, 3), t.pick(t.mul(a, b), 4)); }},
        PrimitiveCase{"lstm_cell",
                      [](Tape& t, Var a, Var b) {
                        // Hidden size 1: weight 4 x (1 + 1), bias 4 x 1.
                        const Var w = t.slice_rows(t.concat({a, b}), 1, 4);
                        const Var bias = t.concat({t.pick(b, 0), t.pick(b, 1), t.pick(b, 2), t.pick(b, 3)});
                        const LstmState s{t.pick(a, 0), t.constant(Matrix::Constant(1, 1, -0.2))};
                        const LstmState s1 = lstm_cell(t, w, bias, t.pick(a, 5), s);
                        return lstm_cell(t, w, bias, t.pick(b, 4), s1).h;
                      }}),
    [](const ::testing::TestParamInfo<PrimitiveCase>& info) { return std::string(info.param.name); });

TEST(GradCheck, LinearLossIsExact) {
  Rng rng(5);
  ParameterSet p;
  p.add("W", random_matrix(2, 3, rng));
  Tape tape(p);
  const Var loss = tape.sum(tape.matmul(tape.parameter("W"), tape.constant(random_matrix(3, 1, rng))));
  EXPECT_LT(finite_diff_check(tape, p, loss, 1e-4).max_relative_error, 1e-9);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(9);
  ParameterSet p;
  p.add("a.W", random_matrix(3, 4, rng));
  p.add("b", random_matrix(1, 1, rng));
  std::stringstream ss;
  write_checkpoint(ss, p, {{"step", "12"}});
  const Checkpoint ck = read_checkpoint(ss);
  EXPECT_EQ(ck.meta.at("step"), "12");
  ASSERT_EQ(ck.params.size(), 2u);
  EXPECT_EQ(ck.params["a.W"], p["a.W"]);
  EXPECT_EQ(ck.params["b"], p["b"]);
}

TEST(Checkpoint, AssignRejectsShapeMismatch) {
  ParameterSet target, source;
  target.add("w", Matrix::Zero(2, 2));
  source.add("w", Matrix::Zero(2, 3));
  EXPECT_THROW(assign_parameters(target, source), std::exception);
}

}  // namespace
}  // namespace emnav
