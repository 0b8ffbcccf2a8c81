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

// Pre-LayerNorm transformer blocks and the four networks built from them:
//
//   TokenEncoder        bidirectional over [CLS] w.. [SEP], frozen final LN
//   FeatureDecoder      causal over [f, SOS, w..], feature injected at slot 0
//   SentenceTransformer bidirectional over 7 sentence features + slot positions
//   KeywordEncoder      bidirectional over [CLS] k.., no positions, frozen LN

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "inset/adam.hpp"
#include "inset/instrumentation.hpp"
#include "inset/ops.hpp"
#include "inset/tensor.hpp"

namespace inset {

using Rng = std::mt19937_64;

struct BlockConfig {
  int d_model = 64;
  int heads = 4;
  int layers = 2;
  int ffn = 256;
  int max_len = 34;
  double dropout = 0.1;

  void validate() const {
    if (d_model < 2 || heads < 1 || layers < 1 || ffn < 1) {
      throw ContractError("BlockConfig: sizes must be positive (d_model >= 2)");
    }
    if (d_model % heads != 0) {
      throw ContractError("BlockConfig: d_model " + std::to_string(d_model) +
                          " not divisible by heads " + std::to_string(heads));
    }
    if (max_len < 34) {
      throw ContractError("BlockConfig: max_len must be >= 34, got " + std::to_string(max_len));
    }
    if (dropout < 0.0 || dropout >= 1.0) {
      throw ContractError("BlockConfig: dropout must lie in [0, 1)");
    }
  }

  bool operator==(const BlockConfig&) const = default;
};

/// Whether a forward pass is a training pass (dropout on) and the RNG that
/// drives dropout masks.
struct ForwardMode {
  bool training = false;
  Rng* rng = nullptr;
  double dropout = 0.0;

  static ForwardMode eval() { return {}; }
  static ForwardMode train(Rng& rng, double dropout) { return {true, &rng, dropout}; }
};

inline constexpr double kLayerNormEps = 1e-5;

namespace detail {

template <typename Scalar>
Matrix<Scalar> random_normal(Index rows, Index cols, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = Scalar(dist(rng));
  return m;
}

template <typename Scalar>
Tensor<Scalar> maybe_dropout(const Tensor<Scalar>& x, const ForwardMode& mode) {
  if (!mode.training || mode.dropout <= 0.0 || mode.rng == nullptr) return x;
  return dropout(x, mode.dropout, *mode.rng);
}

}  // namespace detail

template <typename Scalar>
struct Linear {
  Tensor<Scalar> weight;  // in x out
  Tensor<Scalar> bias;    // 1 x out

  Linear() = default;
  Linear(int in, int out, Rng& rng, double stddev = -1.0) {
    if (stddev < 0) stddev = 1.0 / std::sqrt(static_cast<double>(in));
    weight = Tensor<Scalar>::parameter(detail::random_normal<Scalar>(in, out, stddev, rng));
    bias = Tensor<Scalar>::parameter(Matrix<Scalar>::Zero(1, out));
  }

  Tensor<Scalar> operator()(const Tensor<Scalar>& x) const {
    return add_row(matmul(x, weight), bias);
  }

  void collect(ParameterSet<Scalar>& out, const std::string& prefix) const {
    out.add(prefix + "weight", weight);
    out.add(prefix + "bias", bias);
  }

  static Index parameter_count(Index in, Index out) { return in * out + out; }
};

template <typename Scalar>
struct LayerNorm {
  Tensor<Scalar> gamma;
  Tensor<Scalar> beta;

  LayerNorm() = default;
  explicit LayerNorm(int d)
      : gamma(Tensor<Scalar>::parameter(Matrix<Scalar>::Ones(1, d))),
        beta(Tensor<Scalar>::parameter(Matrix<Scalar>::Zero(1, d))) {}

  Tensor<Scalar> operator()(const Tensor<Scalar>& x) const {
    return layer_norm(x, gamma, beta, Scalar(kLayerNormEps));
  }

  /// Identity affine that never trains: outputs then have norm sqrt(d).
  void freeze() {
    gamma.set_frozen(true);
    beta.set_frozen(true);
  }

  void collect(ParameterSet<Scalar>& out, const std::string& prefix) const {
    out.add(prefix + "gamma", gamma);
    out.add(prefix + "beta", beta);
  }
};

/// Additive causal mask: 0 on and below the diagonal, -inf above.
template <typename Scalar>
Matrix<Scalar> causal_mask(Index t) {
  Matrix<Scalar> m = Matrix<Scalar>::Zero(t, t);
  for (Index i = 0; i < t; ++i)
    for (Index j = i + 1; j < t; ++j) m(i, j) = -std::numeric_limits<Scalar>::infinity();
  return m;
}

/// Multi-head scaled dot-product attention over already-projected q, k, v.
/// Heads are column blocks of width d/heads and are concatenated back. When
/// `weights` is non-null it receives each head's attention matrix.
template <typename Scalar>
Tensor<Scalar> scaled_dot_product_attention(const Tensor<Scalar>& q, const Tensor<Scalar>& k,
                                            const Tensor<Scalar>& v, int heads,
                                            const Matrix<Scalar>* mask = nullptr,
                                            std::vector<Matrix<Scalar>>* weights = nullptr) {
  if (q.cols() != k.cols() || k.cols() != v.cols() || k.rows() != v.rows()) {
    throw ShapeError("attention: q " + q.shape_string() + " k " + k.shape_string() + " v " +
                     v.shape_string() + " disagree");
  }
  if (heads < 1 || q.cols() % heads != 0) {
    throw ShapeError("attention: width " + std::to_string(q.cols()) + " not divisible into " +
                     std::to_string(heads) + " heads");
  }
  if (mask != nullptr && (mask->rows() != q.rows() || mask->cols() != k.rows())) {
    throw LengthError("attention: mask " + detail::dims(mask->rows(), mask->cols()) +
                      " does not match sequence lengths " + std::to_string(q.rows()) + "x" +
                      std::to_string(k.rows()));
  }
  const Index dh = q.cols() / heads;
  const Scalar inv_sqrt_dh = Scalar(1) / std::sqrt(Scalar(dh));
  std::vector<Tensor<Scalar>> outs;
  outs.reserve(static_cast<std::size_t>(heads));
  if (weights != nullptr) weights->clear();
  for (int h = 0; h < heads; ++h) {
    auto qh = heads == 1 ? q : slice_cols(q, h * dh, dh);
    auto kh = heads == 1 ? k : slice_cols(k, h * dh, dh);
    auto vh = heads == 1 ? v : slice_cols(v, h * dh, dh);
    auto scores = scale(matmul(qh, transpose(kh)), inv_sqrt_dh);
    if (mask != nullptr) scores = add_constant(scores, *mask);
    auto attn = softmax(scores, -1);
    if (weights != nullptr) weights->push_back(attn.value());
    outs.push_back(matmul(attn, vh));
  }
  return heads == 1 ? outs.front() : concat_cols(outs);
}

template <typename Scalar>
struct MultiHeadAttention {
  Linear<Scalar> query, key, value, output;
  int heads = 1;

  MultiHeadAttention() = default;
  MultiHeadAttention(int d, int h, Rng& rng)
      : query(d, d, rng), key(d, d, rng), value(d, d, rng), output(d, d, rng), heads(h) {}

  Tensor<Scalar> operator()(const Tensor<Scalar>& x, const Matrix<Scalar>* mask,
                            std::vector<Matrix<Scalar>>* weights = nullptr) const {
    return output(scaled_dot_product_attention(query(x), key(x), value(x), heads, mask, weights));
  }

  void collect(ParameterSet<Scalar>& out, const std::string& prefix) const {
    query.collect(out, prefix + "query.");
    key.collect(out, prefix + "key.");
    value.collect(out, prefix + "value.");
    output.collect(out, prefix + "output.");
  }
};

template <typename Scalar>
struct TransformerBlock {
  LayerNorm<Scalar> attn_norm;
  MultiHeadAttention<Scalar> attention;
  LayerNorm<Scalar> ffn_norm;
  Linear<Scalar> ffn_in;
  Linear<Scalar> ffn_out;

  TransformerBlock() = default;
  TransformerBlock(const BlockConfig& c, Rng& rng)
      : attn_norm(c.d_model),
        attention(c.d_model, c.heads, rng),
        ffn_norm(c.d_model),
        ffn_in(c.d_model, c.ffn, rng),
        ffn_out(c.ffn, c.d_model, rng) {}

  Tensor<Scalar> operator()(const Tensor<Scalar>& x, const Matrix<Scalar>* mask,
                            const ForwardMode& mode,
                            std::vector<Matrix<Scalar>>* weights = nullptr) const {
    auto h = x + detail::maybe_dropout(attention(attn_norm(x), mask, weights), mode);
    return h + detail::maybe_dropout(ffn_out(gelu(ffn_in(ffn_norm(h)))), mode);
  }

  void collect(ParameterSet<Scalar>& out, const std::string& prefix) const {
    attn_norm.collect(out, prefix + "attn_norm.");
    attention.collect(out, prefix + "attention.");
    ffn_norm.collect(out, prefix + "ffn_norm.");
    ffn_in.collect(out, prefix + "ffn_in.");
    ffn_out.collect(out, prefix + "ffn_out.");
  }

  static Index parameter_count(const BlockConfig& c) {
    const Index d = c.d_model;
    const Index f = c.ffn;
    return 4 * Linear<Scalar>::parameter_count(d, d) + 2 * (2 * d) +
           Linear<Scalar>::parameter_count(d, f) + Linear<Scalar>::parameter_count(f, d);
  }
};

/// Blocks followed by a final LayerNorm.
template <typename Scalar>
struct TransformerStack {
  std::vector<TransformerBlock<Scalar>> blocks;
  LayerNorm<Scalar> final_norm;

  TransformerStack() = default;
  TransformerStack(const BlockConfig& c, Rng& rng) : final_norm(c.d_model) {
    for (int i = 0; i < c.layers; ++i) blocks.emplace_back(c, rng);
  }

  /// When `weights` is non-null it receives every head of every layer.
  Tensor<Scalar> operator()(Tensor<Scalar> x, const Matrix<Scalar>* mask, const ForwardMode& mode,
                            std::vector<Matrix<Scalar>>* weights = nullptr) const {
    std::vector<Matrix<Scalar>> layer_weights;
    for (const auto& b : blocks) {
      x = b(x, mask, mode, weights ? &layer_weights : nullptr);
      if (weights) weights->insert(weights->end(), layer_weights.begin(), layer_weights.end());
    }
    return final_norm(x);
  }

  void collect(ParameterSet<Scalar>& out, const std::string& prefix) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
      blocks[i].collect(out, prefix + "block" + std::to_string(i) + ".");
    final_norm.collect(out, prefix + "final_norm.");
  }

  static Index parameter_count(const BlockConfig& c) {
    return c.layers * TransformerBlock<Scalar>::parameter_count(c) + 2 * c.d_model;
  }
};

namespace detail {

template <typename Scalar>
void check_parameter_count(const ParameterSet<Scalar>& params, Index expected,
                           const char* network) {
  if (params.element_count() != expected) {
    throw ContractError(std::string(network) + ": parameter count " +
                        std::to_string(params.element_count()) + " differs from closed form " +
                        std::to_string(expected));
  }
}

inline constexpr double kEmbeddingStd = 1.0;
inline constexpr double kPositionStd = 0.1;
inline constexpr double kOutputStd = 0.02;

}  // namespace detail

/// Bidirectional sentence encoder E. Input is a framed [CLS] w.. [SEP] id
/// sequence; output is one hidden row per position.
template <typename Scalar>
class TokenEncoder {
 public:
  TokenEncoder() = default;
  TokenEncoder(const BlockConfig& c, int vocab_size, Rng& rng) : config_(c), vocab_size_(vocab_size) {
    c.validate();
    tokens_ = Tensor<Scalar>::parameter(
        detail::random_normal<Scalar>(vocab_size, c.d_model, detail::kEmbeddingStd, rng));
    positions_ = Tensor<Scalar>::parameter(
        detail::random_normal<Scalar>(c.max_len, c.d_model, detail::kPositionStd, rng));
    stack_ = TransformerStack<Scalar>(c, rng);
    stack_.final_norm.freeze();
    detail::check_parameter_count(parameters(), parameter_count(c, vocab_size), "TokenEncoder");
  }

  Tensor<Scalar> operator()(std::span<const int> ids, const ForwardMode& mode,
                            std::vector<Matrix<Scalar>>* weights = nullptr) const {
    const Index t = static_cast<Index>(ids.size());
    if (t < 1 || t > config_.max_len) {
      throw LengthError("encoder: sequence length " + std::to_string(t) + " outside [1, " +
                        std::to_string(config_.max_len) + "]");
    }
    instrumentation::token_encoder_forwards.fetch_add(1, std::memory_order_relaxed);
    auto x = gather_rows(tokens_, ids) + slice_rows(positions_, 0, t);
    return stack_(detail::maybe_dropout(x, mode), nullptr, mode, weights);
  }

  ParameterSet<Scalar> parameters() const {
    ParameterSet<Scalar> p;
    p.add("token_embedding", tokens_);
    p.add("position_embedding", positions_);
    stack_.collect(p, "stack.");
    return p;
  }

  static Index parameter_count(const BlockConfig& c, Index vocab) {
    return vocab * c.d_model + Index(c.max_len) * c.d_model +
           TransformerStack<Scalar>::parameter_count(c);
  }

  const BlockConfig& config() const { return config_; }
  int vocab_size() const { return vocab_size_; }
  const TransformerStack<Scalar>& stack() const { return stack_; }
  const Tensor<Scalar>& position_embedding() const { return positions_; }

 private:
  BlockConfig config_;
  int vocab_size_ = 0;
  Tensor<Scalar> tokens_;
  Tensor<Scalar> positions_;
  TransformerStack<Scalar> stack_;
};

/// Causal decoder D. The conditioning feature is the embedding of position 0;
/// token ids follow from position 1.
template <typename Scalar>
class FeatureDecoder {
 public:
  FeatureDecoder() = default;
  FeatureDecoder(const BlockConfig& c, int vocab_size, Rng& rng) : config_(c), vocab_size_(vocab_size) {
    c.validate();
    tokens_ = Tensor<Scalar>::parameter(
        detail::random_normal<Scalar>(vocab_size, c.d_model, detail::kEmbeddingStd, rng));
    positions_ = Tensor<Scalar>::parameter(
        detail::random_normal<Scalar>(c.max_len, c.d_model, detail::kPositionStd, rng));
    stack_ = TransformerStack<Scalar>(c, rng);
    output_ = Linear<Scalar>(c.d_model, vocab_size, rng, detail::kOutputStd);
    detail::check_parameter_count(parameters(), parameter_count(c, vocab_size), "FeatureDecoder");
  }

  /// Logits of shape (T+1) x V for prefix ids of length T.
  Tensor<Scalar> operator()(std::span<const int> prefix, const Tensor<Scalar>& feature,
                            const ForwardMode& mode) const {
    if (feature.rows() != 1 || feature.cols() != config_.d_model) {
      throw ShapeError("decoder: conditioning feature " + feature.shape_string() +
                       " does not match d_model " + std::to_string(config_.d_model));
    }
    const Index t = static_cast<Index>(prefix.size()) + 1;
    if (t > config_.max_len) {
      throw LengthError("decoder: sequence length " + std::to_string(t) + " exceeds " +
                        std::to_string(config_.max_len));
    }
    instrumentation::token_decoder_forwards.fetch_add(1, std::memory_order_relaxed);
    auto x = prefix.empty() ? feature : concat_rows<Scalar>({feature, gather_rows(tokens_, prefix)});
    x = x + slice_rows(positions_, 0, t);
    const Matrix<Scalar> mask = causal_mask<Scalar>(t);
    return output_(stack_(detail::maybe_dropout(x, mode), &mask, mode));
  }

  ParameterSet<Scalar> parameters() const {
    ParameterSet<Scalar> p;
    p.add("token_embedding", tokens_);
    p.add("position_embedding", positions_);
    stack_.collect(p, "stack.");
    output_.collect(p, "output.");
    return p;
  }

  static Index parameter_count(const BlockConfig& c, Index vocab) {
    return vocab * c.d_model + Index(c.max_len) * c.d_model +
           TransformerStack<Scalar>::parameter_count(c) +
           Linear<Scalar>::parameter_count(c.d_model, vocab);
  }

  const BlockConfig& config() const { return config_; }
  int vocab_size() const { return vocab_size_; }

 private:
  BlockConfig config_;
  int vocab_size_ = 0;
  Tensor<Scalar> tokens_;
  Tensor<Scalar> positions_;
  TransformerStack<Scalar> stack_;
  Linear<Scalar> output_;
};

/// Sentence-level transformer T over a fixed number of sentence slots, each
/// offset by a learned slot-position vector.
template <typename Scalar>
class SentenceTransformer {
 public:
  static constexpr int kSlots = 7;

  SentenceTransformer() = default;
  SentenceTransformer(const BlockConfig& c, Rng& rng) : config_(c) {
    c.validate();
    positions_ = Tensor<Scalar>::parameter(
        detail::random_normal<Scalar>(kSlots, c.d_model, detail::kPositionStd, rng));
    stack_ = TransformerStack<Scalar>(c, rng);
    stack_.final_norm.freeze();
    detail::check_parameter_count(parameters(), parameter_count(c), "SentenceTransformer");
  }

  /// `slots` is kSlots x d; the result is one output row per slot.
  Tensor<Scalar> operator()(const Tensor<Scalar>& slots, const ForwardMode& mode,
                            std::vector<Matrix<Scalar>>* weights = nullptr) const {
    if (slots.rows() != kSlots) {
      throw LengthError("sentence transformer: expected " + std::to_string(kSlots) +
                        " slots, got " + std::to_string(slots.rows()));
    }
    if (slots.cols() != config_.d_model) {
      throw ShapeError("sentence transformer: slot width " + std::to_string(slots.cols()) +
                       " != d_model " + std::to_string(config_.d_model));
    }
    return stack_(detail::maybe_dropout(slots + positions_, mode), nullptr, mode, weights);
  }

  ParameterSet<Scalar> parameters() const {
    ParameterSet<Scalar> p;
    p.add("slot_position_embedding", positions_);
    stack_.collect(p, "stack.");
    return p;
  }

  static Index parameter_count(const BlockConfig& c) {
    return Index(kSlots) * c.d_model + TransformerStack<Scalar>::parameter_count(c);
  }

  const BlockConfig& config() const { return config_; }
  const TransformerStack<Scalar>& stack() const { return stack_; }

 private:
  BlockConfig config_;
  Tensor<Scalar> positions_;
  TransformerStack<Scalar> stack_;
};

/// Keyword encoder K: [CLS] followed by keyword ids, no positional signal.
template <typename Scalar>
class KeywordEncoder {
 public:
  KeywordEncoder() = default;
  KeywordEncoder(const BlockConfig& c, int vocab_size, Rng& rng) : config_(c), vocab_size_(vocab_size) {
    c.validate();
    tokens_ = Tensor<Scalar>::parameter(
        detail::random_normal<Scalar>(vocab_size, c.d_model, detail::kEmbeddingStd, rng));
    stack_ = TransformerStack<Scalar>(c, rng);
    stack_.final_norm.freeze();
    detail::check_parameter_count(parameters(), parameter_count(c, vocab_size), "KeywordEncoder");
  }

  Tensor<Scalar> operator()(std::span<const int> ids, const ForwardMode& mode) const {
    if (ids.empty() || static_cast<Index>(ids.size()) > config_.max_len) {
      throw LengthError("keyword encoder: length " + std::to_string(ids.size()) + " out of range");
    }
    auto x = gather_rows(tokens_, ids);
    return stack_(detail::maybe_dropout(x, mode), nullptr, mode);
  }

  ParameterSet<Scalar> parameters() const {
    ParameterSet<Scalar> p;
    p.add("token_embedding", tokens_);
    stack_.collect(p, "stack.");
    return p;
  }

  static Index parameter_count(const BlockConfig& c, Index vocab) {
    return vocab * c.d_model + TransformerStack<Scalar>::parameter_count(c);
  }

  const BlockConfig& config() const { return config_; }
  int vocab_size() const { return vocab_size_; }
  const TransformerStack<Scalar>& stack() const { return stack_; }

 private:
  BlockConfig config_;
  int vocab_size_ = 0;
  Tensor<Scalar> tokens_;
  TransformerStack<Scalar> stack_;
};

}  // namespace inset
