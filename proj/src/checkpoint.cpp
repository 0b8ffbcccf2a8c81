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


#include "inset/checkpoint.hpp"

#include <algorithm>
#include <sstream>

#include "inset/binary_io.hpp"
#include "inset/errors.hpp"

namespace inset {

namespace {

std::vector<std::uint8_t> body_bytes(const Checkpoint& c) {
  ByteWriter w;
  w.text(std::string_view(kCheckpointMagic, 8));
  w.string(to_string(c.kind));
  std::string block;
  for (const auto& [k, v] : c.config) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw ContractError("checkpoint: config entry '" + k + "' cannot be stored");
    }
    block += k + "=" + v + "\n";
  }
  w.string(block);
  w.u32(static_cast<std::uint32_t>(c.tensors.size()));
  for (const auto& t : c.tensors) {
    std::size_t n = 1;
    for (auto d : t.dims) n *= d;
    if (n != t.data.size()) throw ContractError("checkpoint: tensor " + t.name + " dims disagree with data");
    w.string(t.name);
    w.u32(static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) w.u32(d);
    for (float v : t.data) w.f32(v);
  }
  return w.take();
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kAutoencoder:
      return "ae";
    case ModelKind::kPlanner:
      return "planner";
    case ModelKind::kKeyword:
      return "kw";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& tag) {
  if (tag == "ae") return ModelKind::kAutoencoder;
  if (tag == "planner") return ModelKind::kPlanner;
  if (tag == "kw") return ModelKind::kKeyword;
  throw FormatError("checkpoint: unknown model kind '" + tag + "'");
}

const CheckpointTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

const std::string& Checkpoint::get(const std::string& key) const {
  const auto it = config.find(key);
  if (it == config.end()) throw FormatError("checkpoint: config key '" + key + "' missing");
  return it->second;
}

std::vector<std::uint8_t> Checkpoint::serialize() const {
  auto bytes = body_bytes(*this);
  const auto d = sha256(bytes);
  bytes.insert(bytes.end(), d.begin(), d.end());
  return bytes;
}

Digest Checkpoint::digest() const { return sha256(body_bytes(*this)); }

Checkpoint Checkpoint::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw TruncationError("checkpoint: file shorter than its magic");
  if (!std::equal(bytes.begin(), bytes.begin() + 8, kCheckpointMagic)) {
    throw BadMagicError("checkpoint: bad magic (expected INSETCK1)");
  }
  // Parse the structure first so a short file reports truncation rather
  // than a checksum mismatch.
  ByteReader r(bytes, "checkpoint");
  r.bytes(8);
  Checkpoint c;
  c.kind = parse_model_kind(r.string());
  std::istringstream block(r.string());
  for (std::string line; std::getline(block, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("checkpoint: malformed config line '" + line + "'");
    c.config[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointTensor t;
    t.name = r.string();
    const std::uint32_t rank = r.u32();
    std::size_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.dims.push_back(r.u32());
      n *= t.dims.back();
      if (n > r.remaining()) throw TruncationError("checkpoint: tensor " + t.name + " truncated");
    }
    if (r.remaining() < n * 4) {
      throw TruncationError("checkpoint: tensor " + t.name + " truncated");
    }
    t.data.resize(n);
    for (auto& v : t.data) v = r.f32();
    c.tensors.push_back(std::move(t));
  }
  const std::size_t body = r.position();
  const auto trailer = r.bytes(32);
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes after checksum");
  const auto expected = sha256(bytes.first(body));
  if (!std::equal(expected.begin(), expected.end(), trailer.begin())) {
    throw ChecksumError("checkpoint: checksum mismatch (file corrupted)");
  }
  return c;
}

void Checkpoint::save(const std::string& path) const { write_file_bytes(path, serialize()); }

Checkpoint Checkpoint::load(const std::string& path) {
  if (!file_exists(path)) throw DependencyError("missing checkpoint " + path);
  return deserialize(read_file_bytes(path));
}

}  // namespace inset
