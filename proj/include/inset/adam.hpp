// Copyright 2026 The INSET Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "inset/tensor.hpp"

namespace inset {

/// A named, ordered collection of parameter handles. Names are stable and
/// are what checkpoints key on.
template <typename Scalar>
class ParameterSet {
 public:
  void add(std::string name, Tensor<Scalar> tensor) {
    entries_.emplace_back(std::move(name), std::move(tensor));
  }

  void append(const std::string& prefix, const ParameterSet& other) {
    for (const auto& [name, t] : other.entries_) entries_.emplace_back(prefix + name, t);
  }

  const std::vector<std::pair<std::string, Tensor<Scalar>>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::vector<Tensor<Scalar>> tensors() const {
    std::vector<Tensor<Scalar>> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.second);
    return out;
  }

  Index element_count() const {
    Index n = 0;
    for (const auto& e : entries_) n += e.second.size();
    return n;
  }

  void zero_grad() const {
    for (const auto& e : entries_) {
      Tensor<Scalar> t = e.second;
      t.zero_grad();
    }
  }

  const Tensor<Scalar>* find(const std::string& name) const {
    for (const auto& e : entries_)
      if (e.first == name) return &e.second;
    return nullptr;
  }

 private:
  std::vector<std::pair<std::string, Tensor<Scalar>>> entries_;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename Scalar>
struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<Matrix<Scalar>> first_moment;
  std::vector<Matrix<Scalar>> second_moment;
};

/// One bias-corrected Adam update over `params`. Frozen parameters are
/// skipped and never touched. A trainable parameter without a gradient is a
/// contract violation.
template <typename Scalar>
void adam_step(std::vector<Tensor<Scalar>>& params, AdamState<Scalar>& state) {
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.push_back(Matrix<Scalar>::Zero(p.rows(), p.cols()));
      state.second_moment.push_back(Matrix<Scalar>::Zero(p.rows(), p.cols()));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ContractError("adam_step: optimizer state tracks " +
                        std::to_string(state.first_moment.size()) + " tensors, got " +
                        std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].frozen()) continue;
    if (!params[i].has_grad()) {
      throw ContractError("adam_step: trainable parameter #" + std::to_string(i) +
                          " has no gradient");
    }
  }

  state.step += 1;
  const auto& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const Scalar b1 = Scalar(c.beta1);
  const Scalar b2 = Scalar(c.beta2);
  const Scalar step_size = Scalar(c.learning_rate / bc1);
  const Scalar inv_sqrt_bc2 = Scalar(1.0 / std::sqrt(bc2));
  const Scalar eps = Scalar(c.epsilon);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<Scalar>& p = params[i];
    if (p.frozen()) continue;
    const Matrix<Scalar>& g = p.grad();
    Matrix<Scalar>& m = state.first_moment[i];
    Matrix<Scalar>& v = state.second_moment[i];
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    p.mutable_value().array() -=
        step_size * m.array() / ((v.array().sqrt() * inv_sqrt_bc2) + eps);
  }
}

}  // namespace inset
