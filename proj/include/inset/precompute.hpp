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


// Building feature caches from a frozen encoder.

#pragma once

#include <vector>

#include "inset/autoencoder.hpp"
#include "inset/feature_cache.hpp"
#include "inset/parallel.hpp"

namespace inset {

/// Encodes every sentence once, in id order.
template <typename Scalar>
FeatureCache precompute_features(const std::vector<TokenSequence>& sentences,
                                 const SentenceAutoencoder<Scalar>& model, const Digest& checkpoint_checksum,
                                 int threads = 1) {
  const int d = model.config().d_model;
  std::vector<std::vector<float>> rows(sentences.size());
  parallel_for(sentences.size(), threads, [&](std::size_t i) {
    const RowVector<Scalar> f = model.encode(sentences[i]);
    rows[i].resize(d);
    for (int j = 0; j < d; ++j) rows[i][j] = static_cast<float>(f(j));
  });
  FeatureCache cache(d, checkpoint_checksum);
  for (const auto& r : rows) cache.append(r);
  return cache;
}

}  // namespace inset
