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

// Autoregressive decoding from a sentence feature.
//
// A hypothesis either ends with [EOS] or stops at max_len content tokens, in
// which case it is flagged truncated. Hypotheses are ranked by total log
// probability divided by the number of scored tokens ([EOS] included).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "inset/tokens.hpp"
#include "inset/transformer.hpp"

namespace inset {

struct DecodeMode {
  enum class Strategy { kGreedy, kBeam, kTopK };

  Strategy strategy = Strategy::kGreedy;
  int width = 1;  // beam width or k
  int max_len = kMaxSentenceTokens;

  static DecodeMode greedy(int max_len = kMaxSentenceTokens) {
    return {Strategy::kGreedy, 1, max_len};
  }
  static DecodeMode beam(int width, int max_len = kMaxSentenceTokens) {
    return {Strategy::kBeam, width, max_len};
  }
  static DecodeMode top_k(int k, int max_len = kMaxSentenceTokens) {
    return {Strategy::kTopK, k, max_len};
  }
};

struct Generation {
  TokenSequence tokens;
  bool truncated = false;
  double log_prob = 0.0;
  double score = 0.0;  // length-normalized
};

/// Tokens that may never be generated. [EOS] and ordinary words are allowed.
inline bool is_generatable(int id) { return id == kEos || !is_special(id); }

/// Log-probabilities of the next token after `content` given `feature`.
/// Non-generatable ids get -inf.
template <typename Scalar>
std::vector<double> next_token_log_probs(const FeatureDecoder<Scalar>& decoder,
                                         const Tensor<Scalar>& feature,
                                         std::span<const int> content) {
  NoGradGuard no_grad;
  std::vector<int> prefix;
  prefix.reserve(content.size() + 1);
  prefix.push_back(kSos);
  prefix.insert(prefix.end(), content.begin(), content.end());
  const auto logits = decoder(prefix, feature, ForwardMode::eval());
  const auto last = logits.value().row(logits.rows() - 1);
  const Index v = last.cols();
  double mx = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < v; ++i)
    if (is_generatable(static_cast<int>(i))) mx = std::max(mx, static_cast<double>(last(i)));
  double z = 0.0;
  for (Index i = 0; i < v; ++i)
    if (is_generatable(static_cast<int>(i))) z += std::exp(static_cast<double>(last(i)) - mx);
  const double lse = mx + std::log(z);
  std::vector<double> out(static_cast<std::size_t>(v), -std::numeric_limits<double>::infinity());
  for (Index i = 0; i < v; ++i)
    if (is_generatable(static_cast<int>(i))) out[i] = static_cast<double>(last(i)) - lse;
  return out;
}

namespace detail {

inline void check_decode_mode(const DecodeMode& mode) {
  if (mode.width < 1) {
    throw ContractError("decode: beam width / k must be positive, got " + std::to_string(mode.width));
  }
  if (mode.max_len < 1) throw ContractError("decode: max_len must be positive");
}

template <typename Scalar>
Generation greedy_decode(const FeatureDecoder<Scalar>& decoder, const Tensor<Scalar>& feature,
                         int max_len) {
  Generation g;
  for (int step = 0; step < max_len; ++step) {
    const auto lp = next_token_log_probs(decoder, feature, g.tokens.ids);
    // Ties resolve to the lowest id, matching the beam ordering.
    int best = -1;
    for (int i = 0; i < static_cast<int>(lp.size()); ++i)
      if (best < 0 || lp[i] > lp[best]) best = i;
    g.log_prob += lp[best];
    if (best == kEos) {
      g.score = g.log_prob / static_cast<double>(g.tokens.size() + 1);
      return g;
    }
    g.tokens.ids.push_back(best);
  }
  g.truncated = true;
  g.score = g.log_prob / static_cast<double>(max_len);
  return g;
}

template <typename Scalar>
Generation beam_decode(const FeatureDecoder<Scalar>& decoder, const Tensor<Scalar>& feature,
                       int width, int max_len) {
  struct Hyp {
    std::vector<int> ids;
    double log_prob;
  };
  struct Candidate {
    std::size_t parent;
    int token;
    double log_prob;
  };

  std::vector<Hyp> live{{{}, 0.0}};
  std::vector<Generation> finished;
  std::vector<Candidate> candidates;

  for (int step = 0; step < max_len && !live.empty(); ++step) {
    candidates.clear();
    for (std::size_t h = 0; h < live.size(); ++h) {
      const auto lp = next_token_log_probs(decoder, feature, live[h].ids);
      for (int tok = 0; tok < static_cast<int>(lp.size()); ++tok) {
        if (!is_generatable(tok)) continue;
        candidates.push_back({h, tok, live[h].log_prob + lp[tok]});
      }
    }
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(width), candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const Candidate& a, const Candidate& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    std::vector<Hyp> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& c = candidates[i];
      if (c.token == kEos) {
        Generation g;
        g.tokens.ids = live[c.parent].ids;
        g.log_prob = c.log_prob;
        g.score = c.log_prob / static_cast<double>(g.tokens.size() + 1);
        finished.push_back(std::move(g));
      } else {
        Hyp h{live[c.parent].ids, c.log_prob};
        h.ids.push_back(c.token);
        next.push_back(std::move(h));
      }
    }
    live = std::move(next);
  }
  for (auto& h : live) {
    Generation g;
    g.tokens.ids = std::move(h.ids);
    g.log_prob = h.log_prob;
    g.truncated = true;
    g.score = h.log_prob / static_cast<double>(max_len);
    finished.push_back(std::move(g));
  }
  auto best = std::max_element(finished.begin(), finished.end(),
                               [](const Generation& a, const Generation& b) { return a.score < b.score; });
  return *best;
}

template <typename Scalar>
Generation top_k_decode(const FeatureDecoder<Scalar>& decoder, const Tensor<Scalar>& feature, int k,
                        int max_len, Rng& rng) {
  Generation g;
  std::vector<int> order;
  for (int step = 0; step < max_len; ++step) {
    const auto lp = next_token_log_probs(decoder, feature, g.tokens.ids);
    order.clear();
    for (int i = 0; i < static_cast<int>(lp.size()); ++i)
      if (is_generatable(i)) order.push_back(i);
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](int a, int b) { return lp[a] != lp[b] ? lp[a] > lp[b] : a < b; });
    std::vector<double> weights(keep);
    for (std::size_t i = 0; i < keep; ++i) weights[i] = std::exp(lp[order[i]] - lp[order[0]]);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const int tok = order[pick(rng)];
    g.log_prob += lp[tok];
    if (tok == kEos) {
      g.score = g.log_prob / static_cast<double>(g.tokens.size() + 1);
      return g;
    }
    g.tokens.ids.push_back(tok);
  }
  g.truncated = true;
  g.score = g.log_prob / static_cast<double>(max_len);
  return g;
}

}  // namespace detail

/// Decodes a sentence from `feature` (1 x d). `rng` is required for top-k.
template <typename Scalar>
Generation generate(const FeatureDecoder<Scalar>& decoder, const RowVector<Scalar>& feature,
                    const DecodeMode& mode, Rng* rng = nullptr) {
  detail::check_decode_mode(mode);
  const auto f = Tensor<Scalar>::constant(Matrix<Scalar>(feature));
  switch (mode.strategy) {
    case DecodeMode::Strategy::kGreedy:
      return detail::greedy_decode(decoder, f, mode.max_len);
    case DecodeMode::Strategy::kBeam:
      return detail::beam_decode(decoder, f, mode.width, mode.max_len);
    case DecodeMode::Strategy::kTopK:
      if (rng == nullptr) throw ContractError("decode: top-k sampling needs an RNG");
      return detail::top_k_decode(decoder, f, mode.width, mode.max_len, *rng);
  }
  throw ContractError("decode: unknown strategy");
}

}  // namespace inset
