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


#include "inset/feature_cache.hpp"

#include <cstring>

#include "inset/binary_io.hpp"

namespace inset {

FeatureCache::FeatureCache(int dimension, const Digest& checkpoint_checksum)
    : dim_(dimension), checkpoint_(checkpoint_checksum) {
  if (dimension < 1) throw ContractError("feature cache: dimension must be positive");
}

void FeatureCache::append(std::span<const float> feature) {
  if (feature.size() != static_cast<std::size_t>(dim_)) {
    throw ShapeError("feature cache: appending width " + std::to_string(feature.size()) +
                     " to a cache of dimension " + std::to_string(dim_));
  }
  data_.insert(data_.end(), feature.begin(), feature.end());
}

void FeatureCache::require(std::size_t sentence_id) const {
  if (sentence_id >= size()) {
    throw MissingFeatureError("feature cache has no entry for sentence id " + std::to_string(sentence_id) +
                              " (holds " + std::to_string(size()) + " sentences); run precompute first");
  }
}

std::vector<std::uint8_t> FeatureCache::serialize() const {
  ByteWriter w;
  w.text(std::string_view(kFeatureCacheMagic, 8));
  w.u32(static_cast<std::uint32_t>(size()));
  w.u32(static_cast<std::uint32_t>(dim_));
  w.bytes(checkpoint_);
  for (float v : data_) w.f32(v);
  return w.take();
}

FeatureCache FeatureCache::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "feature cache");
  if (r.text(8) != std::string_view(kFeatureCacheMagic, 8)) {
    throw BadMagicError("feature cache: bad magic (expected INSETFC1)");
  }
  const std::uint32_t count = r.u32();
  const std::uint32_t dim = r.u32();
  if (dim == 0) throw FormatError("feature cache: zero dimension");
  FeatureCache cache;
  cache.dim_ = static_cast<int>(dim);
  const auto digest = r.bytes(32);
  std::memcpy(cache.checkpoint_.data(), digest.data(), 32);
  const std::size_t n = static_cast<std::size_t>(count) * dim;
  if (r.remaining() < n * 4) {
    throw TruncationError("feature cache: payload holds " + std::to_string(r.remaining()) +
                          " bytes, header promises " + std::to_string(n * 4));
  }
  if (r.remaining() > n * 4) throw FormatError("feature cache: trailing bytes after payload");
  cache.data_.resize(n);
  for (auto& v : cache.data_) v = r.f32();
  return cache;
}

void FeatureCache::save(const std::string& path) const {
  const auto bytes = serialize();
  if (file_exists(path) && read_file_bytes(path) == bytes) return;
  write_file_bytes(path, bytes);
}

FeatureCache FeatureCache::load(const std::string& path, const Digest* expected) {
  if (!file_exists(path)) throw DependencyError("missing feature cache " + path + "; run precompute first");
  auto cache = deserialize(read_file_bytes(path));
  if (expected != nullptr && cache.checkpoint_ != *expected) {
    throw ChecksumError("feature cache " + path + " was built from checkpoint " + to_hex(cache.checkpoint_) +
                        ", expected " + to_hex(*expected) + "; rerun precompute");
  }
  return cache;
}

}  // namespace inset
