// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "emnav/autodiff/parameters.hpp"
#include "emnav/autodiff/tensor.hpp"

namespace emnav {

/// Handle to a node recorded on a tape.
struct Var {
  std::uint32_t id = 0;
};

enum class Op : std::uint8_t {
  Constant,
  Parameter,
  MatMul,
  Transpose,
  Add,
  Sub,
  Mul,
  Scale,
  Tanh,
  Sigmoid,
  Relu,
  Exp,
  Log,
  Concat,
  HConcat,
  SliceRows,
  Softmax,
  LogSoftmax,
  Embedding,
  Sum,
  Mean,
  Pick,
  GradReverse,
  Detach,
};

const char* op_name(Op op) noexcept;

/// Negative gradient multiplier of a gradient reversal node.
struct GradReverseConfig {
  double lambda = 1.3;
};

/// Reverse-mode tape over dense tensors.
///
/// Nodes are appended in evaluation order, so the node list is already a
/// topological order. Every operation is evaluated eagerly; `replay()`
/// recomputes all values from the current parameter storage without
/// re-recording, which is what finite-difference checks rely on.
template <typename Scalar>
class BasicTape {
 public:
  using TensorType = Tensor<Scalar>;
  using Params = BasicParameterSet<Scalar>;

  explicit BasicTape(const Params& params) : params_(&params) {}

  const Params& parameters() const noexcept { return *params_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  Op op(Var v) const { return nodes_.at(v.id).op; }

  const TensorType& value(Var v) const {
    const Node& n = nodes_.at(v.id);
    return n.op == Op::Parameter ? *n.param : n.value;
  }

  Scalar scalar(Var v) const {
    const TensorType& t = value(v);
    if (t.size() != 1) throw ShapeError("scalar", shape_of(t), Shape{1, 1});
    return t(0, 0);
  }

  // --- leaves -------------------------------------------------------------

  Var constant(TensorType value) {
    Node n{Op::Constant};
    n.value = std::move(value);
    return push(std::move(n));
  }

  Var parameter(std::size_t index) {
    if (auto it = param_nodes_.find(index); it != param_nodes_.end()) return it->second;
    Node n{Op::Parameter};
    n.param = &params_->value(index);
    n.index = static_cast<Eigen::Index>(index);
    Var v = push(std::move(n));
    param_nodes_.emplace(index, v);
    return v;
  }

  Var parameter(const std::string& name) { return parameter(params_->index_of(name)); }

  // --- primitives ---------------------------------------------------------

  Var matmul(Var a, Var b) { return record(Op::MatMul, {a, b}); }
  Var transpose(Var a) { return record(Op::Transpose, {a}); }
  Var add(Var a, Var b) { return record(Op::Add, {a, b}); }
  Var sub(Var a, Var b) { return record(Op::Sub, {a, b}); }
  Var mul(Var a, Var b) { return record(Op::Mul, {a, b}); }
  Var scale(Var a, Scalar s) { return record(Op::Scale, {a}, 0, 0, s); }
  Var tanh(Var a) { return record(Op::Tanh, {a}); }
  Var sigmoid(Var a) { return record(Op::Sigmoid, {a}); }
  Var relu(Var a) { return record(Op::Relu, {a}); }
  Var exp(Var a) { return record(Op::Exp, {a}); }
  Var log(Var a) { return record(Op::Log, {a}); }

  /// Vertical stack of inputs with equal column counts.
  Var concat(std::span<const Var> parts) { return record(Op::Concat, std::vector<Var>(parts.begin(), parts.end())); }
  Var concat(std::initializer_list<Var> parts) { return record(Op::Concat, parts); }
  /// Horizontal stack of inputs with equal row counts.
  Var hconcat(std::span<const Var> parts) { return record(Op::HConcat, std::vector<Var>(parts.begin(), parts.end())); }

  Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count) {
    return record(Op::SliceRows, {a}, begin, count);
  }

  /// Softmax over all entries of `a` (used on column vectors).
  Var softmax(Var a) { return record(Op::Softmax, {a}); }
  Var log_softmax(Var a) { return record(Op::LogSoftmax, {a}); }

  /// Row `row` of `table` as a column vector.
  Var embedding(Var table, Eigen::Index row) { return record(Op::Embedding, {table}, row); }

  Var sum(Var a) { return record(Op::Sum, {a}); }
  Var mean(Var a) { return record(Op::Mean, {a}); }
  /// Entry at flat row-major position `index`, as a 1x1 tensor.
  Var pick(Var a, Eigen::Index index) { return record(Op::Pick, {a}, index); }

  /// Identity forward; backward multiplies the upstream gradient by -lambda.
  Var grad_reverse(Var a, GradReverseConfig cfg = {}) {
    if (!(cfg.lambda >= 0.0)) throw std::invalid_argument("grad_reverse: lambda must be nonnegative");
    return record(Op::GradReverse, {a}, 0, 0, static_cast<Scalar>(cfg.lambda));
  }

  /// Identity forward; no gradient flows back.
  Var detach(Var a) { return record(Op::Detach, {a}); }

  // --- evaluation ---------------------------------------------------------

  /// Recompute every node from its inputs, in recording order.
  void replay() {
    for (auto& n : nodes_)
      if (n.op != Op::Constant && n.op != Op::Parameter) n.value = evaluate(n);
  }

  /// Reverse pass from a scalar node. Adjoints of all nodes are retained and
  /// available through `adjoint()` until the next call.
  BasicGradients<Scalar> backward(Var loss) {
    const TensorType& lv = value(loss);
    if (lv.size() != 1) throw ShapeError("backward", shape_of(lv), Shape{1, 1});
    adjoints_.assign(nodes_.size(), TensorType());
    adjoints_[loss.id] = TensorType::Ones(1, 1);
    BasicGradients<Scalar> grads(*params_);
    for (std::size_t k = loss.id + 1; k-- > 0;) {
      TensorType& g = adjoints_[k];
      if (g.size() == 0) continue;
      const Node& n = nodes_[k];
      if (n.op == Op::Parameter) {
        grads[static_cast<std::size_t>(n.index)] += g;
        continue;
      }
      propagate(n, g);
    }
    return grads;
  }

  /// Gradient of the last backward's loss with respect to node `v` (zeros if unreached).
  TensorType adjoint(Var v) const {
    if (v.id < adjoints_.size() && adjoints_[v.id].size() != 0) return adjoints_[v.id];
    const TensorType& val = value(v);
    return TensorType::Zero(val.rows(), val.cols());
  }

 private:
  struct Node {
    Op op;
    std::vector<std::uint32_t> inputs{};
    TensorType value{};
    const TensorType* param = nullptr;
    Eigen::Index index = 0;
    Eigen::Index count = 0;
    Scalar coef = 0;
  };

  Var push(Node n) {
    nodes_.push_back(std::move(n));
    return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  Var record(Op op, std::vector<Var> in, Eigen::Index index = 0, Eigen::Index count = 0, Scalar coef = 0) {
    Node n{op};
    n.inputs.reserve(in.size());
    for (Var v : in) {
      if (v.id >= nodes_.size()) throw std::out_of_range(std::string(op_name(op)) + ": dangling input");
      n.inputs.push_back(v.id);
    }
    n.index = index;
    n.count = count;
    n.coef = coef;
    n.value = evaluate(n);
    return push(std::move(n));
  }

  const TensorType& in(const Node& n, std::size_t i) const { return value(Var{n.inputs[i]}); }

  TensorType evaluate(const Node& n) const {
    switch (n.op) {
      case Op::MatMul: {
        const auto& a = in(n, 0);
        const auto& b = in(n, 1);
        if (a.cols() != b.rows()) throw ShapeError("matmul", shape_of(a), shape_of(b));
        TensorType out(a.rows(), b.cols());
        out.noalias() = a * b;
        return out;
      }
      case Op::Transpose:
        return in(n, 0).transpose();
      case Op::Add:
      case Op::Sub:
      case Op::Mul: {
        const auto& a = in(n, 0);
        const auto& b = in(n, 1);
        if (shape_of(a) != shape_of(b)) throw ShapeError(op_name(n.op), shape_of(a), shape_of(b));
        if (n.op == Op::Add) return a + b;
        if (n.op == Op::Sub) return a - b;
        return a.cwiseProduct(b);
      }
      case Op::Scale:
        return in(n, 0) * n.coef;
      case Op::Tanh:
        return in(n, 0).array().tanh().matrix();
      case Op::Sigmoid:
        return in(n, 0).unaryExpr([](Scalar x) { return sigmoid_scalar(x); });
      case Op::Relu:
        return in(n, 0).cwiseMax(Scalar(0));
      case Op::Exp:
        return in(n, 0).array().exp().matrix();
      case Op::Log:
        return in(n, 0).array().log().matrix();
      case Op::Concat: {
        Eigen::Index rows = 0;
        const Eigen::Index cols = in(n, 0).cols();
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          const auto& p = in(n, i);
          if (p.cols() != cols) throw ShapeError("concat", shape_of(in(n, 0)), shape_of(p));
          rows += p.rows();
        }
        TensorType out(rows, cols);
        Eigen::Index r = 0;
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          const auto& p = in(n, i);
          out.middleRows(r, p.rows()) = p;
          r += p.rows();
        }
        return out;
      }
      case Op::HConcat: {
        Eigen::Index cols = 0;
        const Eigen::Index rows = in(n, 0).rows();
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          const auto& p = in(n, i);
          if (p.rows() != rows) throw ShapeError("hconcat", shape_of(in(n, 0)), shape_of(p));
          cols += p.cols();
        }
        TensorType out(rows, cols);
        Eigen::Index c = 0;
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          const auto& p = in(n, i);
          out.middleCols(c, p.cols()) = p;
          c += p.cols();
        }
        return out;
      }
      case Op::SliceRows: {
        const auto& a = in(n, 0);
        if (n.index < 0 || n.count < 0 || n.index + n.count > a.rows())
          throw ShapeError("slice_rows", shape_of(a), Shape{n.index + n.count, a.cols()});
        return a.middleRows(n.index, n.count);
      }
      case Op::Softmax: {
        const auto& a = in(n, 0);
        if (a.size() == 0) throw ShapeError("softmax", shape_of(a), Shape{1, 1});
        TensorType e = (a.array() - a.maxCoeff()).exp().matrix();
        return e / e.sum();
      }
      case Op::LogSoftmax: {
        const auto& a = in(n, 0);
        if (a.size() == 0) throw ShapeError("log_softmax", shape_of(a), Shape{1, 1});
        const Scalar m = a.maxCoeff();
        const Scalar lse = m + std::log((a.array() - m).exp().sum());
        return (a.array() - lse).matrix();
      }
      case Op::Embedding: {
        const auto& table = in(n, 0);
        if (n.index < 0 || n.index >= table.rows())
          throw ShapeError("embedding", shape_of(table), Shape{n.index + 1, table.cols()});
        return table.row(n.index).transpose();
      }
      case Op::Sum:
        return TensorType::Constant(1, 1, in(n, 0).sum());
      case Op::Mean: {
        const auto& a = in(n, 0);
        if (a.size() == 0) throw ShapeError("mean", shape_of(a), Shape{1, 1});
        return TensorType::Constant(1, 1, a.mean());
      }
      case Op::Pick: {
        const auto& a = in(n, 0);
        if (n.index < 0 || n.index >= a.size()) throw ShapeError("pick", shape_of(a), Shape{n.index + 1, 1});
        return TensorType::Constant(1, 1, a.data()[n.index]);
      }
      case Op::GradReverse:
      case Op::Detach:
        return in(n, 0);
      case Op::Constant:
      case Op::Parameter:
        break;
    }
    return n.value;
  }

  void accumulate(std::uint32_t id, const TensorType& g) {
    TensorType& slot = adjoints_[id];
    if (slot.size() == 0)
      slot = g;
    else
      slot += g;
  }

  template <typename Expr>
  void accumulate_expr(std::uint32_t id, const Expr& g) {
    TensorType& slot = adjoints_[id];
    if (slot.size() == 0)
      slot = g;
    else
      slot += g;
  }

  void propagate(const Node& n, const TensorType& g) {
    switch (n.op) {
      case Op::MatMul:
        accumulate_expr(n.inputs[0], g * in(n, 1).transpose());
        accumulate_expr(n.inputs[1], in(n, 0).transpose() * g);
        break;
      case Op::Transpose:
        accumulate_expr(n.inputs[0], g.transpose());
        break;
      case Op::Add:
        accumulate(n.inputs[0], g);
        accumulate(n.inputs[1], g);
        break;
      case Op::Sub:
        accumulate(n.inputs[0], g);
        accumulate_expr(n.inputs[1], -g);
        break;
      case Op::Mul:
        accumulate_expr(n.inputs[0], g.cwiseProduct(in(n, 1)));
        accumulate_expr(n.inputs[1], g.cwiseProduct(in(n, 0)));
        break;
      case Op::Scale:
        accumulate_expr(n.inputs[0], g * n.coef);
        break;
      case Op::Tanh:
        accumulate_expr(n.inputs[0], (g.array() * (Scalar(1) - n.value.array().square())).matrix());
        break;
      case Op::Sigmoid:
        accumulate_expr(n.inputs[0], (g.array() * n.value.array() * (Scalar(1) - n.value.array())).matrix());
        break;
      case Op::Relu:
        accumulate_expr(n.inputs[0],
                        (g.array() * (in(n, 0).array() > Scalar(0)).template cast<Scalar>()).matrix());
        break;
      case Op::Exp:
        accumulate_expr(n.inputs[0], g.cwiseProduct(n.value));
        break;
      case Op::Log:
        accumulate_expr(n.inputs[0], g.cwiseQuotient(in(n, 0)));
        break;
      case Op::Concat: {
        Eigen::Index r = 0;
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          const Eigen::Index rows = in(n, i).rows();
          accumulate_expr(n.inputs[i], g.middleRows(r, rows));
          r += rows;
        }
        break;
      }
      case Op::HConcat: {
        Eigen::Index c = 0;
        for (std::size_t i = 0; i < n.inputs.size(); ++i) {
          const Eigen::Index cols = in(n, i).cols();
          accumulate_expr(n.inputs[i], g.middleCols(c, cols));
          c += cols;
        }
        break;
      }
      case Op::SliceRows: {
        const auto& a = in(n, 0);
        TensorType& slot = adjoints_[n.inputs[0]];
        if (slot.size() == 0) slot = TensorType::Zero(a.rows(), a.cols());
        slot.middleRows(n.index, n.count) += g;
        break;
      }
      case Op::Softmax: {
        const Scalar dot = g.cwiseProduct(n.value).sum();
        accumulate_expr(n.inputs[0], (n.value.array() * (g.array() - dot)).matrix());
        break;
      }
      case Op::LogSoftmax: {
        const Scalar total = g.sum();
        accumulate_expr(n.inputs[0], (g.array() - n.value.array().exp() * total).matrix());
        break;
      }
      case Op::Embedding: {
        const auto& table = in(n, 0);
        TensorType& slot = adjoints_[n.inputs[0]];
        if (slot.size() == 0) slot = TensorType::Zero(table.rows(), table.cols());
        slot.row(n.index) += g.transpose();
        break;
      }
      case Op::Sum: {
        const auto& a = in(n, 0);
        accumulate_expr(n.inputs[0], TensorType::Constant(a.rows(), a.cols(), g(0, 0)));
        break;
      }
      case Op::Mean: {
        const auto& a = in(n, 0);
        accumulate_expr(n.inputs[0], TensorType::Constant(a.rows(), a.cols(), g(0, 0) / Scalar(a.size())));
        break;
      }
      case Op::Pick: {
        const auto& a = in(n, 0);
        TensorType& slot = adjoints_[n.inputs[0]];
        if (slot.size() == 0) slot = TensorType::Zero(a.rows(), a.cols());
        slot.data()[n.index] += g(0, 0);
        break;
      }
      case Op::GradReverse:
        accumulate_expr(n.inputs[0], g * (-n.coef));
        break;
      case Op::Detach:
      case Op::Constant:
      case Op::Parameter:
        break;
    }
  }

  static Scalar sigmoid_scalar(Scalar x) {
    if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
  }

  const Params* params_;
  std::vector<Node> nodes_;
  std::vector<TensorType> adjoints_;
  std::unordered_map<std::size_t, Var> param_nodes_;
};

inline const char* op_name(Op op) noexcept {
  switch (op) {
    case Op::Constant: return "constant";
    case Op::Parameter: return "parameter";
    case Op::MatMul: return "matmul";
    case Op::Transpose: return "transpose";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Scale: return "scale";
    case Op::Tanh: return "tanh";
    case Op::Sigmoid: return "sigmoid";
    case Op::Relu: return "relu";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Concat: return "concat";
    case Op::HConcat: return "hconcat";
    case Op::SliceRows: return "slice_rows";
    case Op::Softmax: return "softmax";
    case Op::LogSoftmax: return "log_softmax";
    case Op::Embedding: return "embedding";
    case Op::Sum: return "sum";
    case Op::Mean: return "mean";
    case Op::Pick: return "pick";
    case Op::GradReverse: return "grad_reverse";
    case Op::Detach: return "detach";
  }
  return "unknown";
}

using Tape = BasicTape<double>;

/// Value of `node`; inputs are always bound because nodes are evaluated on record.
template <typename Scalar>
const Tensor<Scalar>& forward_eval(const BasicTape<Scalar>& tape, Var node) {
  return tape.value(node);
}

}  // namespace emnav
