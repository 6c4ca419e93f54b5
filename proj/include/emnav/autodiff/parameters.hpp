// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "emnav/autodiff/tensor.hpp"

namespace emnav {

/// Named registry of trainable tensors.
///
/// Entries are kept in insertion order so that iteration, checkpoints and
/// optimizer updates are deterministic. Storage addresses are stable: tapes
/// hold const pointers into the registry.
template <typename Scalar>
class BasicParameterSet {
 public:
  using TensorType = Tensor<Scalar>;

  BasicParameterSet() = default;
  BasicParameterSet(const BasicParameterSet& other) { *this = other; }
  BasicParameterSet& operator=(const BasicParameterSet& other) {
    if (this == &other) return *this;
    names_.clear();
    index_.clear();
    values_.clear();
    for (std::size_t i = 0; i < other.names_.size(); ++i) add(other.names_[i], *other.values_[i]);
    return *this;
  }
  BasicParameterSet(BasicParameterSet&&) noexcept = default;
  BasicParameterSet& operator=(BasicParameterSet&&) noexcept = default;

  std::size_t add(const std::string& name, TensorType value) {
    if (index_.count(name) != 0) throw std::invalid_argument("duplicate parameter '" + name + "'");
    index_.emplace(name, names_.size());
    names_.push_back(name);
    values_.push_back(std::make_unique<TensorType>(std::move(value)));
    return names_.size() - 1;
  }

  /// Xavier/Glorot uniform in (-a, a), a = sqrt(6 / (fan_in + fan_out)).
  std::size_t add_uniform(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                          std::mt19937_64& rng) {
    const Scalar bound = std::sqrt(Scalar(6) / Scalar(rows + cols));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    TensorType value(rows, cols);
    for (Eigen::Index i = 0; i < value.size(); ++i) value.data()[i] = bound * Scalar(dist(rng));
    return add(name, std::move(value));
  }

  std::size_t add_zeros(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    return add(name, TensorType::Zero(rows, cols));
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
    return it->second;
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  TensorType& value(std::size_t i) { return *values_.at(i); }
  const TensorType& value(std::size_t i) const { return *values_.at(i); }
  TensorType& operator[](const std::string& name) { return value(index_of(name)); }
  const TensorType& operator[](const std::string& name) const { return value(index_of(name)); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += static_cast<std::size_t>(v->size());
    return n;
  }

  void set_zero() {
    for (auto& v : values_) v->setZero();
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::unique_ptr<TensorType>> values_;
};

/// Gradient per registered parameter, index-aligned with the registry.
template <typename Scalar>
class BasicGradients {
 public:
  using TensorType = Tensor<Scalar>;

  explicit BasicGradients(const BasicParameterSet<Scalar>& params) : params_(&params) {
    grads_.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i)
      grads_.push_back(TensorType::Zero(params.value(i).rows(), params.value(i).cols()));
  }

  std::size_t size() const noexcept { return grads_.size(); }
  TensorType& operator[](std::size_t i) { return grads_.at(i); }
  const TensorType& operator[](std::size_t i) const { return grads_.at(i); }
  const TensorType& operator[](const std::string& name) const { return grads_.at(params_->index_of(name)); }
  TensorType& operator[](const std::string& name) { return grads_.at(params_->index_of(name)); }

  Scalar squared_norm() const {
    Scalar s = 0;
    for (const auto& g : grads_) s += g.squaredNorm();
    return s;
  }

  BasicGradients& operator+=(const BasicGradients& other) {
    for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i] += other.grads_.at(i);
    return *this;
  }

  BasicGradients& operator*=(Scalar s) {
    for (auto& g : grads_) g *= s;
    return *this;
  }

  const BasicParameterSet<Scalar>& parameters() const noexcept { return *params_; }

 private:
  const BasicParameterSet<Scalar>* params_;
  std::vector<TensorType> grads_;
};

using ParameterSet = BasicParameterSet<double>;
using Gradients = BasicGradients<double>;

}  // namespace emnav
