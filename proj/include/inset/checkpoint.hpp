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


// Binary checkpoints: magic, kind tag, key=value config block, named float
// tensors, trailing SHA-256 of everything before it.

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "inset/digest.hpp"

namespace inset {

inline constexpr char kCheckpointMagic[] = "INSETCK1";

enum class ModelKind { kAutoencoder, kPlanner, kKeyword };

std::string to_string(ModelKind kind);  // "ae" | "planner" | "kw"
ModelKind parse_model_kind(const std::string& tag);

struct CheckpointTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  bool operator==(const CheckpointTensor&) const = default;
};

struct Checkpoint {
  ModelKind kind = ModelKind::kAutoencoder;
  std::map<std::string, std::string> config;
  std::vector<CheckpointTensor> tensors;

  const CheckpointTensor* find(const std::string& name) const;
  /// Throws FormatError when the key is absent.
  const std::string& get(const std::string& key) const;

  std::vector<std::uint8_t> serialize() const;
  /// Distinguishes BadMagicError, TruncationError and ChecksumError.
  static Checkpoint deserialize(std::span<const std::uint8_t> bytes);

  /// SHA-256 of the serialized body, identical to the file trailer.
  Digest digest() const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

  bool operator==(const Checkpoint&) const = default;
};

}  // namespace inset
