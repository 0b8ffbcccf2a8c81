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

#include <array>
#include <string_view>
#include <vector>

namespace inset {

/// Reserved vocabulary ids, fixed for every vocabulary.
enum SpecialToken : int {
  kPad = 0,
  kUnk = 1,
  kCls = 2,
  kSep = 3,
  kMask = 4,
  kSos = 5,
  kEos = 6,
};

inline constexpr int kNumSpecialTokens = 7;

inline constexpr std::array<std::string_view, kNumSpecialTokens> kSpecialTokenText = {
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "[SOS]", "[EOS]"};

/// Maximum content tokens per sentence.
inline constexpr int kMaxSentenceTokens = 32;

inline bool is_special(int id) { return id >= 0 && id < kNumSpecialTokens; }

/// Content token ids of one sentence, without framing specials.
struct TokenSequence {
  std::vector<int> ids;

  bool operator==(const TokenSequence&) const = default;
  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

/// [CLS] w1 .. wl [SEP]
inline std::vector<int> encoder_frame(const TokenSequence& s) {
  std::vector<int> out;
  out.reserve(s.size() + 2);
  out.push_back(kCls);
  out.insert(out.end(), s.ids.begin(), s.ids.end());
  out.push_back(kSep);
  return out;
}

/// [SOS] w1 .. wl, the decoder input after the injected feature.
inline std::vector<int> decoder_input(const TokenSequence& s) {
  std::vector<int> out;
  out.reserve(s.size() + 1);
  out.push_back(kSos);
  out.insert(out.end(), s.ids.begin(), s.ids.end());
  return out;
}

/// [SOS] w1 .. wl [EOS], predicted at positions 0 .. l+1 of the decoder.
inline std::vector<int> decoder_targets(const TokenSequence& s) {
  std::vector<int> out = decoder_input(s);
  out.push_back(kEos);
  return out;
}

}  // namespace inset
