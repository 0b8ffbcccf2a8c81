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

// Text side of the pipeline: tokenization, vocabularies, paragraph corpora,
// 7-sentence windows, keyword extraction and the synthetic corpus generator.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "inset/digest.hpp"
#include "inset/tokens.hpp"

namespace inset {

/// Lowercases and splits on whitespace; every ASCII punctuation character
/// becomes a token of its own.
std::vector<std::string> tokenize_words(std::string_view text);

/// Tokens joined by single spaces.
std::string normalize_text(std::string_view text);

class Vocabulary {
 public:
  Vocabulary();
  /// `tokens` excludes the reserved specials, which always occupy ids 0..6.
  explicit Vocabulary(std::vector<std::string> tokens);

  int id(std::string_view word) const;  // [UNK] when absent
  bool contains(std::string_view word) const;
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  TokenSequence encode(std::string_view text) const;
  std::string decode(const TokenSequence& s) const;

  /// SHA-256 of the newline-joined token list; stored in checkpoints.
  Digest checksum() const;

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Ordered paragraphs of normalized sentences. Global sentence ids number
/// sentences in reading order.
struct Corpus {
  std::vector<std::vector<std::string>> paragraphs;

  std::size_t sentence_count() const;
  std::vector<std::string> sentences() const;
  /// Global id of the first sentence of each paragraph.
  std::vector<std::size_t> paragraph_offsets() const;

  bool operator==(const Corpus&) const = default;
};

inline constexpr int kWindowSize = 7;
inline constexpr int kMissingSlot = 4;  // 1-based

/// Paragraphs with fewer sentences, or any sentence longer than the token
/// cap, are dropped.
Corpus filter_corpus(const Corpus& corpus);

/// One sentence per line, blank line between paragraphs.
Corpus parse_corpus(std::istream& in);
Corpus read_corpus(const std::string& path);
void write_corpus(const std::string& path, const Corpus& corpus);
std::string format_corpus(const Corpus& corpus);

/// Builds the vocabulary: specials first, then tokens with count >= min_freq
/// by descending count, ties lexicographic.
Vocabulary build_vocab(const Corpus& corpus, int min_freq);

struct ParagraphWindow {
  std::array<std::size_t, kWindowSize> sentence_ids{};
  int missing = kMissingSlot;

  std::size_t missing_sentence() const { return sentence_ids[missing - 1]; }
  bool operator==(const ParagraphWindow&) const = default;
};

/// The M - 6 windows of an M-sentence paragraph given its global sentence
/// ids. Throws LengthError when M < 7.
std::vector<ParagraphWindow> make_windows(std::span<const std::size_t> paragraph);

/// All windows of a corpus, skipping paragraphs shorter than 7.
std::vector<ParagraphWindow> make_windows(const Corpus& corpus);

class FrequencyTable {
 public:
  FrequencyTable() = default;
  explicit FrequencyTable(const Corpus& corpus);

  std::size_t count(const std::string& word) const;
  const std::map<std::string, std::size_t>& counts() const { return counts_; }

 private:
  std::map<std::string, std::size_t> counts_;
};

using StopList = std::set<std::string, std::less<>>;

StopList load_stop_list(const std::string& path);

struct KeywordSet {
  std::size_t sentence_id = 0;
  std::vector<std::string> words;  // at most 2, ranked

  bool operator==(const KeywordSet&) const = default;
};

/// Top-2 non-stop in-vocabulary words of a sentence by corpus frequency
/// (ties lexicographic); fewer when fewer candidates remain.
std::vector<std::string> extract_keywords(std::string_view sentence, const StopList& stop,
                                          const FrequencyTable& freq, const Vocabulary* vocab = nullptr,
                                          std::size_t max_keywords = 2);

std::vector<KeywordSet> extract_all_keywords(const Corpus& corpus, const StopList& stop,
                                             const Vocabulary* vocab = nullptr);

/// Tab-separated: sentence-id, keyword, keyword (empty fields when absent).
void write_keywords(const std::string& path, const std::vector<KeywordSet>& keywords);
std::vector<KeywordSet> read_keywords(const std::string& path);

enum class SyntheticStyle {
  /// Step number, verb and dish carry over between sentences; adjectives and
  /// trailing phrases are random, so the middle sentence is only partly
  /// predictable.
  kProcedural,
  /// Every sentence is a function of its neighbours.
  kRule,
};

/// Deterministic templated recipe paragraphs (7..10 sentences each).
Corpus gen_synthetic(std::size_t paragraphs, std::uint64_t seed,
                     SyntheticStyle style = SyntheticStyle::kProcedural);

/// Crude suffix stripper shared by METEOR-lite and soft keyword matching.
std::string stem(std::string_view word);

}  // namespace inset
