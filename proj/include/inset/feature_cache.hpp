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


// Precomputed sentence features keyed by global sentence id, stamped with
// the checksum of the checkpoint that produced them.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "inset/digest.hpp"
#include "inset/errors.hpp"
#include "inset/tensor.hpp"

namespace inset {

inline constexpr char kFeatureCacheMagic[] = "INSETFC1";

class FeatureCache {
 public:
  FeatureCache() = default;
  FeatureCache(int dimension, const Digest& checkpoint_checksum);

  void append(std::span<const float> feature);

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
  int dimension() const { return dim_; }
  const Digest& checkpoint_checksum() const { return checkpoint_; }
  const std::vector<float>& data() const { return data_; }

  /// Throws MissingFeatureError naming `sentence_id` when it is not cached.
  void require(std::size_t sentence_id) const;

  std::span<const float> raw_row(std::size_t sentence_id) const {
    require(sentence_id);
    return {data_.data() + sentence_id * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  template <typename Scalar>
  RowVector<Scalar> row(std::size_t sentence_id) const {
    const auto r = raw_row(sentence_id);
    RowVector<Scalar> out(dim_);
    for (int j = 0; j < dim_; ++j) out(j) = static_cast<Scalar>(r[j]);
    return out;
  }

  std::vector<std::uint8_t> serialize() const;
  static FeatureCache deserialize(std::span<const std::uint8_t> bytes);

  /// Leaves the file untouched when its bytes already match.
  void save(const std::string& path) const;
  /// With `expected` set, a cache built from a different checkpoint is
  /// rejected with ChecksumError.
  static FeatureCache load(const std::string& path, const Digest* expected = nullptr);

  bool operator==(const FeatureCache&) const = default;

 private:
  int dim_ = 0;
  Digest checkpoint_{};
  std::vector<float> data_;
};

}  // namespace inset
