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


// Moving models, optimizer state and metadata in and out of checkpoints.

#pragma once

#include <charconv>
#include <cstdint>
#include <string>

#include "inset/adam.hpp"
#include "inset/checkpoint.hpp"
#include "inset/corpus.hpp"
#include "inset/errors.hpp"
#include "inset/transformer.hpp"

namespace inset {

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError("cannot parse '" + text + "' as a number for " + key);
  }
  return v;
}

inline std::int64_t parse_int(const std::string& text, const std::string& key) {
  std::int64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw FormatError("cannot parse '" + text + "' as an integer for " + key);
  }
  return v;
}

inline void store_block_config(Checkpoint& c, const BlockConfig& b) {
  c.config["d_model"] = std::to_string(b.d_model);
  c.config["heads"] = std::to_string(b.heads);
  c.config["layers"] = std::to_string(b.layers);
  c.config["ffn"] = std::to_string(b.ffn);
  c.config["max_len"] = std::to_string(b.max_len);
  c.config["dropout"] = format_double(b.dropout);
}

inline BlockConfig load_block_config(const Checkpoint& c) {
  BlockConfig b;
  b.d_model = static_cast<int>(parse_int(c.get("d_model"), "d_model"));
  b.heads = static_cast<int>(parse_int(c.get("heads"), "heads"));
  b.layers = static_cast<int>(parse_int(c.get("layers"), "layers"));
  b.ffn = static_cast<int>(parse_int(c.get("ffn"), "ffn"));
  b.max_len = static_cast<int>(parse_int(c.get("max_len"), "max_len"));
  b.dropout = parse_double(c.get("dropout"), "dropout");
  b.validate();
  return b;
}

inline void store_vocab(Checkpoint& c, const Vocabulary& vocab) {
  c.config["vocab_size"] = std::to_string(vocab.size());
  c.config["vocab_checksum"] = to_hex(vocab.checksum());
}

/// Throws VocabMismatchError when the checkpoint was trained on another
/// vocabulary.
inline void verify_vocab(const Checkpoint& c, const Vocabulary& vocab) {
  const auto& stored = c.get("vocab_checksum");
  const auto actual = to_hex(vocab.checksum());
  if (stored != actual) {
    throw VocabMismatchError("checkpoint was trained with vocabulary " + stored + " but " + actual +
                             " was supplied");
  }
}

inline void expect_kind(const Checkpoint& c, ModelKind kind) {
  if (c.kind != kind) {
    throw FormatError("expected a '" + to_string(kind) + "' checkpoint, got '" + to_string(c.kind) + "'");
  }
}

template <typename Scalar>
CheckpointTensor to_checkpoint_tensor(const std::string& name, const Matrix<Scalar>& m) {
  CheckpointTensor t;
  t.name = name;
  t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
  t.data.resize(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.size(); ++i) t.data[i] = static_cast<float>(m.data()[i]);
  return t;
}

template <typename Scalar>
Matrix<Scalar> from_checkpoint_tensor(const CheckpointTensor& t, Index rows, Index cols) {
  if (t.dims.size() != 2 || t.dims[0] != rows || t.dims[1] != cols) {
    std::string got;
    for (auto d : t.dims) got += (got.empty() ? "" : "x") + std::to_string(d);
    throw FormatError("checkpoint tensor " + t.name + " has shape " + got + ", model expects " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  Matrix<Scalar> m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(t.data[i]);
  return m;
}

template <typename Scalar>
void store_parameters(Checkpoint& c, const ParameterSet<Scalar>& params) {
  for (const auto& [name, t] : params.entries()) c.tensors.push_back(to_checkpoint_tensor(name, t.value()));
}

template <typename Scalar>
void load_parameters(const Checkpoint& c, const ParameterSet<Scalar>& params) {
  for (const auto& [name, t] : params.entries()) {
    const auto* stored = c.find(name);
    if (stored == nullptr) throw FormatError("checkpoint lacks parameter " + name);
    Tensor<Scalar> handle = t;
    handle.mutable_value() = from_checkpoint_tensor<Scalar>(*stored, t.rows(), t.cols());
  }
}

/// Adam moments are stored as "opt/m/<name>" and "opt/v/<name>".
template <typename Scalar>
void store_optimizer(Checkpoint& c, const AdamState<Scalar>& state, const ParameterSet<Scalar>& params) {
  c.config["opt_step"] = std::to_string(state.step);
  c.config["learning_rate"] = format_double(state.config.learning_rate);
  if (state.first_moment.empty()) return;
  std::size_t i = 0;
  for (const auto& [name, t] : params.entries()) {
    c.tensors.push_back(to_checkpoint_tensor("opt/m/" + name, state.first_moment[i]));
    c.tensors.push_back(to_checkpoint_tensor("opt/v/" + name, state.second_moment[i]));
    ++i;
  }
}

template <typename Scalar>
void load_optimizer(const Checkpoint& c, AdamState<Scalar>& state, const ParameterSet<Scalar>& params) {
  state.step = parse_int(c.get("opt_step"), "opt_step");
  state.first_moment.clear();
  state.second_moment.clear();
  if (state.step == 0) return;
  for (const auto& [name, t] : params.entries()) {
    const auto* m = c.find("opt/m/" + name);
    const auto* v = c.find("opt/v/" + name);
    if (m == nullptr || v == nullptr) throw FormatError("checkpoint lacks optimizer state for " + name);
    state.first_moment.push_back(from_checkpoint_tensor<Scalar>(*m, t.rows(), t.cols()));
    state.second_moment.push_back(from_checkpoint_tensor<Scalar>(*v, t.rows(), t.cols()));
  }
}

}  // namespace inset
