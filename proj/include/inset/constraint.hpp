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


// Keyword encoder K: maps an unordered set of up to two keywords into the
// sentence feature space, distilled from the frozen sentence encoder.

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "inset/adam.hpp"
#include "inset/autoencoder.hpp"
#include "inset/corpus.hpp"
#include "inset/random.hpp"
#include "inset/transformer.hpp"

namespace inset {

/// Vocabulary ids of the keywords. Unknown words are an error rather than
/// silently mapping to [UNK].
inline std::vector<int> keyword_ids(std::span<const std::string> words, const Vocabulary& vocab) {
  std::vector<int> ids;
  for (const auto& w : words) {
    if (!vocab.contains(w)) throw IndexError("out-of-vocabulary keyword '" + w + "'");
    ids.push_back(vocab.id(w));
  }
  return ids;
}

/// [CLS] followed by the keyword ids in ascending order. Canonical ordering
/// makes the result independent of input order down to the last bit.
inline std::vector<int> keyword_input(std::span<const int> ids) {
  std::vector<int> sorted(ids.begin(), ids.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ContractError("keyword set contains a duplicate");
  }
  for (int id : sorted)
    if (is_special(id)) throw ContractError("keyword set contains a special token");
  std::vector<int> out{kCls};
  out.insert(out.end(), sorted.begin(), sorted.end());
  return out;
}

template <typename Scalar>
class ConstraintEncoder {
 public:
  ConstraintEncoder() = default;
  ConstraintEncoder(const BlockConfig& config, int vocab_size, Rng& rng) : net_(config, vocab_size, rng) {}

  Tensor<Scalar> encode_tensor(std::span<const int> keyword_ids, const ForwardMode& mode) const {
    const auto input = keyword_input(keyword_ids);
    for (int id : input)
      if (id < 0 || id >= net_.vocab_size()) throw IndexError("keyword id " + std::to_string(id) + " out of range");
    return slice_rows(net_(input, mode), 0, 1);
  }

  RowVector<Scalar> encode(std::span<const int> keyword_ids) const {
    NoGradGuard no_grad;
    return encode_tensor(keyword_ids, ForwardMode::eval()).value().row(0);
  }

  ParameterSet<Scalar> parameters() const {
    ParameterSet<Scalar> p;
    p.append("kw.", net_.parameters());
    return p;
  }

  const KeywordEncoder<Scalar>& network() const { return net_; }
  const BlockConfig& config() const { return net_.config(); }
  int vocab_size() const { return net_.vocab_size(); }

 private:
  KeywordEncoder<Scalar> net_;
};

/// 1 - cos(student, teacher). A zero teacher raises DegenerateInputError.
template <typename Scalar>
Tensor<Scalar> distill_loss(const Tensor<Scalar>& student, const RowVector<Scalar>& teacher) {
  const auto t = Tensor<Scalar>::constant(Matrix<Scalar>(teacher));
  return add_constant(scale(cosine(student, t), Scalar(-1)), Matrix<Scalar>(Matrix<Scalar>::Ones(1, 1)));
}

/// True when any keyword appears in the sentence verbatim or shares its stem
/// with a sentence word.
inline bool soft_includes(std::span<const std::string> sentence, std::span<const std::string> keywords) {
  for (const auto& k : keywords) {
    const auto ks = stem(k);
    for (const auto& w : sentence)
      if (w == k || stem(w) == ks) return true;
  }
  return false;
}

template <typename Scalar>
struct DistillPair {
  std::vector<int> keyword_ids;
  RowVector<Scalar> teacher;
};

/// Teacher features come from the frozen autoencoder's encoder.
template <typename Scalar>
std::vector<DistillPair<Scalar>> make_distill_pairs(const SentenceAutoencoder<Scalar>& teacher,
                                                    const std::vector<TokenSequence>& sentences,
                                                    const std::vector<KeywordSet>& keywords,
                                                    const Vocabulary& vocab) {
  std::vector<DistillPair<Scalar>> pairs;
  pairs.reserve(keywords.size());
  for (const auto& ks : keywords) {
    if (ks.sentence_id >= sentences.size()) {
      throw IndexError("keyword file references sentence id " + std::to_string(ks.sentence_id) +
                       " beyond the corpus (" + std::to_string(sentences.size()) + " sentences)");
    }
    pairs.push_back({keyword_ids(ks.words, vocab), teacher.encode(sentences[ks.sentence_id])});
  }
  return pairs;
}

struct ConstraintTrainConfig {
  int batch_size = 32;
  int epochs = 10;
  double learning_rate = 1e-4;
  double dropout = 0.1;
  std::uint64_t seed = 1;
};

struct ConstraintEpoch {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

/// Updates K only; the teacher features are fixed inputs.
template <typename Scalar>
class ConstraintTrainer {
 public:
  ConstraintTrainer(ConstraintEncoder<Scalar>& encoder, std::vector<DistillPair<Scalar>> pairs,
                    ConstraintTrainConfig config)
      : encoder_(encoder),
        pairs_(std::move(pairs)),
        config_(config),
        params_(encoder.parameters()),
        tensors_(params_.tensors()) {
    if (pairs_.empty()) throw ContractError("train_constraint_encoder: no keyword pairs");
    if (config_.batch_size < 1) throw ContractError("train_constraint_encoder: batch_size must be >= 1");
    optimizer_.config.learning_rate = config_.learning_rate;
  }

  double run_epoch() {
    const int e = epoch_++;
    Rng order_rng(mix_seed(config_.seed, 0xc0a, static_cast<std::uint64_t>(e)));
    const auto order = permutation(pairs_.size(), order_rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config_.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config_.batch_size);
      Rng rng(mix_seed(config_.seed, 0xc0b, static_cast<std::uint64_t>(step_)));
      const auto mode = ForwardMode::train(rng, config_.dropout);
      params_.zero_grad();
      const Scalar weight = Scalar(1) / Scalar(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        const auto& p = pairs_[order[i]];
        const auto loss = distill_loss(encoder_.encode_tensor(p.keyword_ids, mode), p.teacher);
        total += static_cast<double>(loss.item());
        backward(scale(loss, weight));
      }
      adam_step(tensors_, optimizer_);
      ++step_;
    }
    const double mean = total / static_cast<double>(pairs_.size());
    if (!std::isfinite(mean)) {
      throw DivergenceError("train_constraint_encoder: non-finite loss in epoch " + std::to_string(e));
    }
    return mean;
  }

  double evaluate(const std::vector<DistillPair<Scalar>>& pairs) const {
    NoGradGuard no_grad;
    double total = 0.0;
    for (const auto& p : pairs)
      total += static_cast<double>(distill_loss(encoder_.encode_tensor(p.keyword_ids, ForwardMode::eval()),
                                                p.teacher)
                                       .item());
    return pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
  }

  /// Keeps the parameters with the lowest validation loss.
  std::vector<ConstraintEpoch> run(const std::vector<DistillPair<Scalar>>& validation = {}) {
    std::vector<ConstraintEpoch> history;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Matrix<Scalar>> best_values;
    for (int e = 0; e < config_.epochs; ++e) {
      ConstraintEpoch rec;
      rec.epoch = e;
      rec.train_loss = run_epoch();
      rec.validation_loss = validation.empty() ? rec.train_loss : evaluate(validation);
      if (rec.validation_loss < best) {
        best = rec.validation_loss;
        best_values = snapshot_values(params_);
      }
      history.push_back(rec);
    }
    if (!best_values.empty()) restore_values(params_, best_values);
    return history;
  }

  int step_count() const { return step_; }

 private:
  ConstraintEncoder<Scalar>& encoder_;
  std::vector<DistillPair<Scalar>> pairs_;
  ConstraintTrainConfig config_;
  ParameterSet<Scalar> params_;
  std::vector<Tensor<Scalar>> tensors_;
  AdamState<Scalar> optimizer_;
  int epoch_ = 0;
  int step_ = 0;
};

}  // namespace inset
