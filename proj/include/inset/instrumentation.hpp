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

#pragma once

#include <atomic>
#include <cstdint>

namespace inset::instrumentation {

// Process-wide call counters for the token-level networks. Planner training
// is checked against these to confirm it never touches token tensors.
inline std::atomic<std::uint64_t> token_encoder_forwards{0};
inline std::atomic<std::uint64_t> token_decoder_forwards{0};

struct Counts {
  std::uint64_t encoder_forwards;
  std::uint64_t decoder_forwards;
};

inline Counts snapshot() {
  return {token_encoder_forwards.load(), token_decoder_forwards.load()};
}

inline void reset() {
  token_encoder_forwards = 0;
  token_decoder_forwards = 0;
}

}  // namespace inset::instrumentation
