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

// Denoising sentence autoencoder: the encoder maps a (masked) sentence to the
// hidden state above [CLS]; the decoder reconstructs the clean sentence from
// that feature by teacher forcing.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "inset/adam.hpp"
#include "inset/decoding.hpp"
#include "inset/random.hpp"
#include "inset/tokens.hpp"
#include "inset/transformer.hpp"

namespace inset {

inline constexpr double kDefaultMaskProbability = 0.15;

/// Replaces each non-special token with [MASK] independently with
/// probability p.
inline TokenSequence corrupt(const TokenSequence& s, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw ContractError("corrupt: p must lie in [0, 1]");
  TokenSequence out = s;
  if (p == 0.0) return out;
  std::bernoulli_distribution mask(p);
  for (int& id : out.ids) {
    if (is_special(id)) continue;
    if (mask(rng)) id = kMask;
  }
  return out;
}

inline void check_sentence_length(const TokenSequence& s) {
  if (s.size() > static_cast<std::size_t>(kMaxSentenceTokens)) {
    throw LengthError("sentence has " + std::to_string(s.size()) + " tokens, limit is " +
                      std::to_string(kMaxSentenceTokens));
  }
}

template <typename Scalar>
class SentenceAutoencoder {
 public:
  SentenceAutoencoder() = default;
  SentenceAutoencoder(const BlockConfig& config, int vocab_size, Rng& rng)
      : encoder_(config, vocab_size, rng), decoder_(config, vocab_size, rng) {}

  /// The [CLS] hidden state as a 1 x d tensor (differentiable).
  Tensor<Scalar> encode_tensor(const TokenSequence& s, const ForwardMode& mode) const {
    check_sentence_length(s);
    const auto framed = encoder_frame(s);
    return slice_rows(encoder_(framed, mode), 0, 1);
  }

  RowVector<Scalar> encode(const TokenSequence& s) const {
    NoGradGuard no_grad;
    return encode_tensor(s, ForwardMode::eval()).value().row(0);
  }

  /// Teacher-forced NLL of the clean sentence given the encoding of the
  /// noisy one.
  Tensor<Scalar> reconstruction_loss(const TokenSequence& clean, const TokenSequence& noisy,
                                     const ForwardMode& mode) const {
    if (clean.size() != noisy.size()) {
      throw ContractError("reconstruction_loss: clean has " + std::to_string(clean.size()) +
                          " tokens, noisy has " + std::to_string(noisy.size()));
    }
    for (std::size_t i = 0; i < clean.size(); ++i) {
      if (noisy.ids[i] != clean.ids[i] && noisy.ids[i] != kMask) {
        throw ContractError("reconstruction_loss: noisy token " + std::to_string(i) +
                            " is neither the clean token nor [MASK]");
      }
    }
    const auto feature = encode_tensor(noisy, mode);
    const auto logits = decoder_(decoder_input(clean), feature, mode);
    const auto targets = decoder_targets(clean);
    return cross_entropy(logits, targets);
  }

  Generation generate(const RowVector<Scalar>& feature, const DecodeMode& mode,
                      Rng* rng = nullptr) const {
    return inset::generate(decoder_, feature, mode, rng);
  }

  ParameterSet<Scalar> parameters() const {
    ParameterSet<Scalar> p;
    p.append("encoder.", encoder_.parameters());
    p.append("decoder.", decoder_.parameters());
    return p;
  }

  const TokenEncoder<Scalar>& encoder() const { return encoder_; }
  const FeatureDecoder<Scalar>& decoder() const { return decoder_; }
  const BlockConfig& config() const { return encoder_.config(); }
  int vocab_size() const { return encoder_.vocab_size(); }

 private:
  TokenEncoder<Scalar> encoder_;
  FeatureDecoder<Scalar> decoder_;
};

/// Decodes (1 - t) * E(a) + t * E(b) for t = i / (steps + 1), i = 1..steps.
template <typename Scalar>
std::vector<Generation> interpolate(const SentenceAutoencoder<Scalar>& model, const TokenSequence& a,
                                    const TokenSequence& b, int steps, const DecodeMode& mode) {
  if (steps < 1) throw ContractError("interpolate: steps must be >= 1");
  const RowVector<Scalar> fa = model.encode(a);
  const RowVector<Scalar> fb = model.encode(b);
  std::vector<Generation> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 1; i <= steps; ++i) {
    const Scalar t = Scalar(i) / Scalar(steps + 1);
    const RowVector<Scalar> f = (Scalar(1) - t) * fa + t * fb;
    out.push_back(model.generate(f, mode));
  }
  return out;
}

/// Token-level accuracy of greedy reconstruction, scored position by
/// position against the reference (missing or extra tokens count as errors).
template <typename Scalar>
double reconstruction_token_accuracy(const SentenceAutoencoder<Scalar>& model,
                                     const std::vector<TokenSequence>& sentences) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const auto& s : sentences) {
    const auto out = model.generate(model.encode(s), DecodeMode::greedy()).tokens;
    const std::size_t n = std::max(s.size() + 1, out.size() + 1);  // +1 for [EOS]
    auto at = [](const TokenSequence& t, std::size_t i) {
      return i < t.size() ? t.ids[i] : (i == t.size() ? int(kEos) : -1);
    };
    for (std::size_t i = 0; i < n; ++i) correct += at(s, i) == at(out, i) ? 1 : 0;
    total += n;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

struct AutoencoderTrainConfig {
  int batch_size = 16;
  int max_steps = 2000;
  double learning_rate = 1e-4;
  double mask_probability = kDefaultMaskProbability;
  double dropout = 0.1;
  int eval_interval = 200;
  int patience = 3;
  std::uint64_t seed = 1;
};

struct TrainingRecord {
  int step = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainSummary {
  int steps_run = 0;
  int best_step = 0;
  double best_validation_loss = 0.0;
  bool stopped_early = false;
  bool divergence_warning = false;
  std::vector<TrainingRecord> history;
};

/// Snapshot of parameter values, used to keep the best checkpoint.
template <typename Scalar>
std::vector<Matrix<Scalar>> snapshot_values(const ParameterSet<Scalar>& params) {
  std::vector<Matrix<Scalar>> out;
  for (const auto& [name, t] : params.entries()) out.push_back(t.value());
  return out;
}

template <typename Scalar>
void restore_values(const ParameterSet<Scalar>& params, const std::vector<Matrix<Scalar>>& values) {
  std::size_t i = 0;
  for (const auto& [name, t] : params.entries()) {
    Tensor<Scalar> handle = t;
    handle.mutable_value() = values[i++];
  }
}

/// Trains E and D jointly on single sentences. Every step draws its batch,
/// masks and dropout from streams derived from (seed, step), so training can
/// resume from any saved step and reproduce the same losses.
template <typename Scalar>
class AutoencoderTrainer {
 public:
  using Callback = std::function<void(int step, const SentenceAutoencoder<Scalar>&)>;

  AutoencoderTrainer(SentenceAutoencoder<Scalar>& model, std::vector<TokenSequence> train,
                     std::vector<TokenSequence> validation, AutoencoderTrainConfig config)
      : model_(model),
        train_(std::move(train)),
        validation_(std::move(validation)),
        config_(config),
        params_(model.parameters()),
        tensors_(params_.tensors()),
        sampler_(train_.size(), config.seed) {
    if (train_.empty()) throw ContractError("train_autoencoder: empty training corpus");
    if (validation_.empty()) validation_ = train_;
    if (config_.batch_size < 1) throw ContractError("train_autoencoder: batch_size must be >= 1");
    optimizer_.config.learning_rate = config_.learning_rate;
  }

  /// One optimizer step; returns the batch loss measured before the update.
  double step() {
    const int s = step_;
    Rng rng(mix_seed(config_.seed, 0xae, static_cast<std::uint64_t>(s)));
    const auto mode = ForwardMode::train(rng, config_.dropout);
    params_.zero_grad();
    double total = 0.0;
    const Scalar weight = Scalar(1) / Scalar(config_.batch_size);
    for (int b = 0; b < config_.batch_size; ++b) {
      const auto& clean =
          train_[sampler_.at(static_cast<std::uint64_t>(s) * config_.batch_size + b)];
      const auto noisy = corrupt(clean, config_.mask_probability, rng);
      const auto loss = model_.reconstruction_loss(clean, noisy, mode);
      total += static_cast<double>(loss.item());
      backward(scale(loss, weight));
    }
    const double mean_loss = total / config_.batch_size;
    if (!std::isfinite(mean_loss)) {
      throw DivergenceError("train_autoencoder: non-finite loss at step " + std::to_string(s));
    }
    adam_step(tensors_, optimizer_);
    ++step_;
    return mean_loss;
  }

  /// Mean denoising loss over the validation set with a fixed mask stream.
  double validation_loss() const {
    NoGradGuard no_grad;
    Rng rng(mix_seed(config_.seed, 0xba1));
    double total = 0.0;
    for (const auto& s : validation_) {
      const auto noisy = corrupt(s, config_.mask_probability, rng);
      total += static_cast<double>(model_.reconstruction_loss(s, noisy, ForwardMode::eval()).item());
    }
    return total / static_cast<double>(validation_.size());
  }

  /// Runs to max_steps or until validation loss fails to improve for
  /// `patience` rounds; leaves the best-scoring parameters in the model.
  TrainSummary run(const Callback& on_checkpoint = {}) {
    TrainSummary summary;
    const int steps_per_epoch = std::max<int>(
        1, static_cast<int>((train_.size() + config_.batch_size - 1) / config_.batch_size));
    double first_loss = 0.0;
    double epoch_sum = 0.0;
    double window_sum = 0.0;
    int window_count = 0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Matrix<Scalar>> best_values = snapshot_values(params_);
    int rounds_without_gain = 0;

    while (step_ < config_.max_steps) {
      const int s = step_;
      const double loss = step();
      if (s == 0) first_loss = loss;
      if (s < steps_per_epoch) epoch_sum += loss;
      if (s + 1 == steps_per_epoch && epoch_sum / steps_per_epoch >= first_loss) {
        summary.divergence_warning = true;
        std::cerr << "warning: autoencoder loss did not decrease during the first epoch\n";
      }
      window_sum += loss;
      ++window_count;
      if (step_ % config_.eval_interval == 0 || step_ == config_.max_steps) {
        const double val = validation_loss();
        summary.history.push_back({step_, window_sum / window_count, val});
        window_sum = 0.0;
        window_count = 0;
        if (on_checkpoint) on_checkpoint(step_, model_);
        if (val < best) {
          best = val;
          best_values = snapshot_values(params_);
          summary.best_step = step_;
          rounds_without_gain = 0;
        } else if (++rounds_without_gain >= config_.patience) {
          summary.stopped_early = true;
          break;
        }
      }
    }
    restore_values(params_, best_values);
    summary.steps_run = step_;
    summary.best_validation_loss = best;
    return summary;
  }

  int step_count() const { return step_; }
  void set_step_count(int s) { step_ = s; }
  AdamState<Scalar>& optimizer() { return optimizer_; }

 private:
  SentenceAutoencoder<Scalar>& model_;
  std::vector<TokenSequence> train_;
  std::vector<TokenSequence> validation_;
  AutoencoderTrainConfig config_;
  ParameterSet<Scalar> params_;
  std::vector<Tensor<Scalar>> tensors_;
  EpochSampler sampler_;
  AdamState<Scalar> optimizer_;
  int step_ = 0;
};

}  // namespace inset
