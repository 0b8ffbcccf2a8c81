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

// Sentence-level planner: predicts the feature of the missing sentence from
// the features of its six neighbours, trained with 1 - cosine against the
// encoder's feature of the true sentence.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "inset/adam.hpp"
#include "inset/corpus.hpp"
#include "inset/feature_cache.hpp"
#include "inset/random.hpp"
#include "inset/transformer.hpp"

namespace inset {

template <typename Scalar>
struct PlannerInput {
  Matrix<Scalar> slots;  // 7 x d, window order
  int missing = kMissingSlot;  // 1-based
};

/// Places the six context features around slot `missing`; that slot holds
/// the constraint feature when given, otherwise the zero vector.
template <typename Scalar>
PlannerInput<Scalar> assemble(std::span<const RowVector<Scalar>> context, int missing,
                              const std::optional<RowVector<Scalar>>& constraint = std::nullopt) {
  if (missing < 1 || missing > kWindowSize) {
    throw IndexError("assemble: missing index " + std::to_string(missing) + " outside [1, 7]");
  }
  if (context.size() != static_cast<std::size_t>(kWindowSize - 1)) {
    throw LengthError("assemble: expected 6 context features, got " + std::to_string(context.size()));
  }
  const Index d = context.front().cols();
  PlannerInput<Scalar> in;
  in.missing = missing;
  in.slots = Matrix<Scalar>::Zero(kWindowSize, d);
  std::size_t next = 0;
  for (int slot = 1; slot <= kWindowSize; ++slot) {
    if (slot == missing) {
      if (constraint) {
        if (constraint->cols() != d) throw ShapeError("assemble: constraint width differs from context");
        in.slots.row(slot - 1) = *constraint;
      }
      continue;
    }
    if (context[next].cols() != d) throw ShapeError("assemble: context features differ in width");
    in.slots.row(slot - 1) = context[next++];
  }
  return in;
}

template <typename Scalar>
class LatentPlanner {
 public:
  LatentPlanner() = default;
  LatentPlanner(const BlockConfig& config, Rng& rng) : net_(config, rng) {}

  Tensor<Scalar> predict_tensor(const PlannerInput<Scalar>& in, const ForwardMode& mode) const {
    const auto out = net_(Tensor<Scalar>::constant(in.slots), mode);
    return slice_rows(out, in.missing - 1, 1);
  }

  RowVector<Scalar> predict(const PlannerInput<Scalar>& in) const {
    NoGradGuard no_grad;
    return predict_tensor(in, ForwardMode::eval()).value().row(0);
  }

  ParameterSet<Scalar> parameters() const {
    ParameterSet<Scalar> p;
    p.append("planner.", net_.parameters());
    return p;
  }

  const SentenceTransformer<Scalar>& network() const { return net_; }
  const BlockConfig& config() const { return net_.config(); }

 private:
  SentenceTransformer<Scalar> net_;
};

/// 1 - cos(pred, truth), in [0, 2].
template <typename Scalar>
Tensor<Scalar> planner_loss(const Tensor<Scalar>& pred, const Tensor<Scalar>& truth) {
  return add_constant(scale(cosine(pred, truth), Scalar(-1)), Matrix<Scalar>(Matrix<Scalar>::Ones(1, 1)));
}

template <typename Scalar>
Scalar planner_loss(const RowVector<Scalar>& pred, const RowVector<Scalar>& truth) {
  NoGradGuard no_grad;
  return planner_loss(Tensor<Scalar>::constant(Matrix<Scalar>(pred)),
                      Tensor<Scalar>::constant(Matrix<Scalar>(truth)))
      .item();
}

struct PlannerTrainConfig {
  int batch_size = 32;
  int epochs = 20;
  double learning_rate = 1e-4;
  double dropout = 0.1;
  /// Fraction of windows that see the keyword feature in the missing slot
  /// when keyword features are supplied.
  double constraint_probability = 0.5;
  std::uint64_t seed = 1;
};

struct PlannerEpoch {
  int epoch = 0;
  int steps = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

/// Trains T from cached features only. No token-level network is touched.
template <typename Scalar>
class PlannerTrainer {
 public:
  PlannerTrainer(LatentPlanner<Scalar>& planner, const FeatureCache& cache,
                 std::vector<ParagraphWindow> windows, PlannerTrainConfig config,
                 const FeatureCache* constraint_cache = nullptr)
      : planner_(planner),
        cache_(cache),
        constraint_cache_(constraint_cache),
        windows_(std::move(windows)),
        config_(config),
        params_(planner.parameters()),
        tensors_(params_.tensors()) {
    if (windows_.empty()) throw ContractError("train_planner: no windows");
    if (config_.batch_size < 1) throw ContractError("train_planner: batch_size must be >= 1");
    if (cache_.dimension() != planner.config().d_model) {
      throw ShapeError("train_planner: cache dimension " + std::to_string(cache_.dimension()) +
                       " != d_model " + std::to_string(planner.config().d_model));
    }
    for (const auto& w : windows_)
      for (auto id : w.sentence_ids) cache_.require(id);
    optimizer_.config.learning_rate = config_.learning_rate;
  }

  int steps_per_epoch() const {
    return static_cast<int>((windows_.size() + config_.batch_size - 1) / config_.batch_size);
  }

  /// One pass over all windows in a seeded order. Returns mean loss.
  PlannerEpoch run_epoch() {
    const int e = epoch_++;
    Rng order_rng(mix_seed(config_.seed, 0x91a, static_cast<std::uint64_t>(e)));
    const auto order = permutation(windows_.size(), order_rng);
    PlannerEpoch out;
    out.epoch = e;
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config_.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config_.batch_size);
      Rng rng(mix_seed(config_.seed, 0x91b, static_cast<std::uint64_t>(step_)));
      const auto mode = ForwardMode::train(rng, config_.dropout);
      params_.zero_grad();
      const Scalar weight = Scalar(1) / Scalar(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const auto& w = windows_[order[i]];
        std::optional<RowVector<Scalar>> constraint;
        if (constraint_cache_ != nullptr) {
          std::bernoulli_distribution use(config_.constraint_probability);
          if (use(rng)) constraint = constraint_cache_->template row<Scalar>(w.missing_sentence());
        }
        const auto loss = window_loss(w, constraint, mode);
        total += static_cast<double>(loss.item());
        backward(scale(loss, weight));
      }
      adam_step(tensors_, optimizer_);
      ++step_;
      ++out.steps;
    }
    out.train_loss = total / static_cast<double>(windows_.size());
    if (!std::isfinite(out.train_loss)) {
      throw DivergenceError("train_planner: non-finite loss in epoch " + std::to_string(e));
    }
    return out;
  }

  /// Mean loss over `windows` with zero filler, no dropout.
  double evaluate(const std::vector<ParagraphWindow>& windows) const {
    NoGradGuard no_grad;
    double total = 0.0;
    for (const auto& w : windows)
      total += static_cast<double>(window_loss(w, std::nullopt, ForwardMode::eval()).item());
    return windows.empty() ? 0.0 : total / static_cast<double>(windows.size());
  }

  Tensor<Scalar> window_loss(const ParagraphWindow& w, const std::optional<RowVector<Scalar>>& constraint,
                             const ForwardMode& mode) const {
    std::vector<RowVector<Scalar>> context;
    context.reserve(kWindowSize - 1);
    for (int slot = 1; slot <= kWindowSize; ++slot)
      if (slot != w.missing) context.push_back(cache_.template row<Scalar>(w.sentence_ids[slot - 1]));
    const auto input = assemble<Scalar>(context, w.missing, constraint);
    const auto pred = planner_.predict_tensor(input, mode);
    const auto truth = Tensor<Scalar>::constant(Matrix<Scalar>(cache_.template row<Scalar>(w.missing_sentence())));
    return planner_loss(pred, truth);
  }

  /// Trains for config.epochs, keeping the parameters with the lowest
  /// validation loss when validation windows are given.
  std::vector<PlannerEpoch> run(const std::vector<ParagraphWindow>& validation = {},
                                const std::function<void(const PlannerEpoch&)>& on_epoch = {}) {
    std::vector<PlannerEpoch> history;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Matrix<Scalar>> best_values;
    for (int e = 0; e < config_.epochs; ++e) {
      auto rec = run_epoch();
      rec.validation_loss = validation.empty() ? rec.train_loss : evaluate(validation);
      if (rec.validation_loss < best) {
        best = rec.validation_loss;
        best_values = snapshot_values(params_);
      }
      if (on_epoch) on_epoch(rec);
      history.push_back(rec);
    }
    if (!best_values.empty()) restore_values(params_, best_values);
    return history;
  }

  int step_count() const { return step_; }

 private:
  LatentPlanner<Scalar>& planner_;
  const FeatureCache& cache_;
  const FeatureCache* constraint_cache_;
  std::vector<ParagraphWindow> windows_;
  PlannerTrainConfig config_;
  ParameterSet<Scalar> params_;
  std::vector<Tensor<Scalar>> tensors_;
  AdamState<Scalar> optimizer_;
  int epoch_ = 0;
  int step_ = 0;
};

}  // namespace inset
