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

#include "inset/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "inset/errors.hpp"
#include "inset/random.hpp"

namespace inset {

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      out.emplace_back(1, raw);
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  for (const auto& w : tokenize_words(text)) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  tokens_.reserve(tokens.size() + kNumSpecialTokens);
  for (auto s : kSpecialTokenText) tokens_.emplace_back(s);
  for (auto& t : tokens) tokens_.push_back(std::move(t));
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw FormatError("vocabulary: duplicate token '" + tokens_[i] + "'");
    }
  }
}

int Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view word) const {
  return index_.find(std::string(word)) != index_.end();
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw IndexError("vocabulary: id " + std::to_string(id) + " outside [0," +
                     std::to_string(size()) + ")");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

TokenSequence Vocabulary::encode(std::string_view text) const {
  TokenSequence s;
  for (const auto& w : tokenize_words(text)) s.ids.push_back(id(w));
  return s;
}

std::string Vocabulary::decode(const TokenSequence& s) const {
  std::string out;
  for (int id : s.ids) {
    if (!out.empty()) out.push_back(' ');
    out += token(id);
  }
  return out;
}

Digest Vocabulary::checksum() const {
  std::string joined;
  for (const auto& t : tokens_) {
    joined += t;
    joined.push_back('\n');
  }
  return sha256(joined);
}

void Vocabulary::save(const std::string& path) const {
  std::string text;
  for (const auto& t : tokens_) {
    text += t;
    text.push_back('\n');
  }
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DependencyError("cannot open vocabulary " + path + " (run build-vocab first)");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < static_cast<std::size_t>(kNumSpecialTokens)) {
    throw FormatError("vocabulary " + path + ": missing reserved tokens");
  }
  for (int i = 0; i < kNumSpecialTokens; ++i) {
    if (lines[static_cast<std::size_t>(i)] != kSpecialTokenText[static_cast<std::size_t>(i)]) {
      throw FormatError("vocabulary " + path + ": line " + std::to_string(i) + " must be " +
                        std::string(kSpecialTokenText[static_cast<std::size_t>(i)]));
    }
  }
  return Vocabulary(std::vector<std::string>(lines.begin() + kNumSpecialTokens, lines.end()));
}

// ---------------------------------------------------------------------------
// Corpus

std::size_t Corpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& p : paragraphs) n += p.size();
  return n;
}

std::vector<std::string> Corpus::sentences() const {
  std::vector<std::string> out;
  out.reserve(sentence_count());
  for (const auto& p : paragraphs) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<std::size_t> Corpus::paragraph_offsets() const {
  std::vector<std::size_t> out;
  std::size_t at = 0;
  for (const auto& p : paragraphs) {
    out.push_back(at);
    at += p.size();
  }
  return out;
}

Corpus filter_corpus(const Corpus& corpus) {
  Corpus out;
  for (const auto& p : corpus.paragraphs) {
    if (p.size() < static_cast<std::size_t>(kWindowSize)) continue;
    const bool too_long = std::any_of(p.begin(), p.end(), [](const std::string& s) {
      return tokenize_words(s).size() > static_cast<std::size_t>(kMaxSentenceTokens);
    });
    if (!too_long) out.paragraphs.push_back(p);
  }
  return out;
}

Corpus parse_corpus(std::istream& in) {
  Corpus c;
  std::vector<std::string> current;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string norm = normalize_text(line);
    if (norm.empty()) {
      if (!current.empty()) c.paragraphs.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(norm);
    }
  }
  if (!current.empty()) c.paragraphs.push_back(std::move(current));
  return c;
}

Corpus read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DependencyError("cannot open corpus " + path + " (run gen-synthetic first)");
  return parse_corpus(in);
}

std::string format_corpus(const Corpus& corpus) {
  std::string out;
  for (std::size_t i = 0; i < corpus.paragraphs.size(); ++i) {
    if (i > 0) out.push_back('\n');
    for (const auto& s : corpus.paragraphs[i]) {
      out += s;
      out.push_back('\n');
    }
  }
  return out;
}

void write_corpus(const std::string& path, const Corpus& corpus) {
  const std::string text = format_corpus(corpus);
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Vocabulary build_vocab(const Corpus& corpus, int min_freq) {
  if (corpus.sentence_count() == 0) throw ContractError("build_vocab: empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& p : corpus.paragraphs)
    for (const auto& s : p)
      for (auto& w : tokenize_words(s)) ++counts[w];
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [w, n] : counts) {
    if (n < static_cast<std::size_t>(std::max(min_freq, 1))) continue;
    if (std::find(kSpecialTokenText.begin(), kSpecialTokenText.end(), w) != kSpecialTokenText.end())
      continue;
    ranked.emplace_back(w, n);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [w, n] : ranked) tokens.push_back(w);
  return Vocabulary(std::move(tokens));
}

// ---------------------------------------------------------------------------
// Windows

std::vector<ParagraphWindow> make_windows(std::span<const std::size_t> paragraph) {
  const std::size_t m = paragraph.size();
  if (m < static_cast<std::size_t>(kWindowSize)) {
    throw LengthError("make_windows: paragraph has " + std::to_string(m) +
                      " sentences, at least 7 are required");
  }
  std::vector<ParagraphWindow> out;
  out.reserve(m - kWindowSize + 1);
  for (std::size_t j = 0; j + kWindowSize <= m; ++j) {
    ParagraphWindow w;
    for (int k = 0; k < kWindowSize; ++k) w.sentence_ids[k] = paragraph[j + k];
    w.missing = kMissingSlot;
    out.push_back(w);
  }
  return out;
}

std::vector<ParagraphWindow> make_windows(const Corpus& corpus) {
  std::vector<ParagraphWindow> out;
  std::size_t at = 0;
  for (const auto& p : corpus.paragraphs) {
    if (p.size() >= static_cast<std::size_t>(kWindowSize)) {
      std::vector<std::size_t> ids(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) ids[i] = at + i;
      auto w = make_windows(ids);
      out.insert(out.end(), w.begin(), w.end());
    }
    at += p.size();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Keywords

FrequencyTable::FrequencyTable(const Corpus& corpus) {
  for (const auto& p : corpus.paragraphs)
    for (const auto& s : p)
      for (auto& w : tokenize_words(s)) ++counts_[w];
}

std::size_t FrequencyTable::count(const std::string& word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

StopList load_stop_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DependencyError("cannot open stop list " + path);
  StopList out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.insert(normalize_text(line));
  }
  return out;
}

std::vector<std::string> extract_keywords(std::string_view sentence, const StopList& stop,
                                          const FrequencyTable& freq, const Vocabulary* vocab,
                                          std::size_t max_keywords) {
  std::vector<std::string> candidates;
  for (auto& w : tokenize_words(sentence)) {
    if (stop.count(w) > 0) continue;
    if (vocab != nullptr && !vocab->contains(w)) continue;
    if (freq.count(w) == 0) continue;
    if (std::find(candidates.begin(), candidates.end(), w) != candidates.end()) continue;
    candidates.push_back(std::move(w));
  }
  std::sort(candidates.begin(), candidates.end(), [&](const std::string& a, const std::string& b) {
    const auto ca = freq.count(a);
    const auto cb = freq.count(b);
    return ca != cb ? ca > cb : a < b;
  });
  if (candidates.size() > max_keywords) candidates.resize(max_keywords);
  return candidates;
}

std::vector<KeywordSet> extract_all_keywords(const Corpus& corpus, const StopList& stop,
                                             const Vocabulary* vocab) {
  const FrequencyTable freq(corpus);
  std::vector<KeywordSet> out;
  std::size_t id = 0;
  for (const auto& p : corpus.paragraphs)
    for (const auto& s : p) out.push_back({id++, extract_keywords(s, stop, freq, vocab)});
  return out;
}

void write_keywords(const std::string& path, const std::vector<KeywordSet>& keywords) {
  std::string text;
  for (const auto& k : keywords) {
    text += std::to_string(k.sentence_id);
    for (std::size_t i = 0; i < 2; ++i) {
      text.push_back('\t');
      if (i < k.words.size()) text += k.words[i];
    }
    text.push_back('\n');
  }
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<KeywordSet> read_keywords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DependencyError("cannot open keywords " + path + " (run extract-keywords first)");
  std::vector<KeywordSet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
    }
    KeywordSet k;
    try {
      k.sentence_id = std::stoull(fields[0]);
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(line_no) + ": bad sentence id");
    }
    for (std::size_t i = 1; i < 3; ++i)
      if (!fields[i].empty()) k.words.push_back(fields[i]);
    out.push_back(std::move(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

constexpr std::array<std::string_view, 10> kStepVerbs = {
    "wash", "peel", "chop", "slice", "season", "mix", "stir", "boil", "fry", "serve"};
constexpr std::array<std::string_view, 16> kNouns = {
    "onion", "carrot",  "potato",  "garlic", "pepper", "tomato",   "bean",    "lentil",
    "rice",  "noodle",  "chicken", "salmon", "tofu",   "mushroom", "spinach", "cabbage"};
constexpr std::array<std::string_view, 8> kTools = {"pan", "pot",  "bowl", "skillet",
                                                    "tray", "wok", "oven", "grill"};
constexpr std::array<std::string_view, 8> kAdjectives = {"fresh", "red",   "green", "small",
                                                         "large", "sweet", "ripe",  "crisp"};
constexpr std::array<std::string_view, 6> kSpices = {"salt", "oil", "butter", "herbs", "lemon", "honey"};

constexpr std::size_t kRuleNouns = 10;
constexpr std::size_t kRuleTools = 6;

template <typename Array>
std::string_view pick(const Array& a, std::size_t n, std::mt19937_64& rng) {
  return a[static_cast<std::size_t>(rng() % n)];
}

std::string procedural_sentence(int step, std::string_view noun, std::string_view tool,
                                std::mt19937_64& rng) {
  std::string s = "step " + std::to_string(step) + " : " + std::string(kStepVerbs[(step - 1) % 10]) +
                  " the " + std::string(pick(kAdjectives, kAdjectives.size(), rng)) + " " +
                  std::string(noun);
  switch (rng() % 6) {
    case 0:
      break;
    case 1:
      s += " in the " + std::string(tool);
      break;
    case 2:
      s += " with some " + std::string(pick(kSpices, kSpices.size(), rng));
      break;
    case 3:
      s += " for " + std::to_string(2 + rng() % 8) + " minutes";
      break;
    case 4:
      s += " until soft";
      break;
    default:
      s += " very gently";
      break;
  }
  return s + " .";
}

std::string rule_sentence(int step, std::string_view noun, std::string_view tool) {
  return "step " + std::to_string(step) + " : " + std::string(kStepVerbs[(step - 1) % 10]) +
         " the " + std::string(noun) + " in the " + std::string(tool) + " .";
}

}  // namespace

Corpus gen_synthetic(std::size_t paragraphs, std::uint64_t seed, SyntheticStyle style) {
  if (paragraphs < 1) throw ContractError("gen_synthetic: paragraph count must be >= 1");
  std::mt19937_64 rng(mix_seed(seed, 0x5a7));
  Corpus c;
  c.paragraphs.reserve(paragraphs);
  for (std::size_t p = 0; p < paragraphs; ++p) {
    const int m = 7 + static_cast<int>(rng() % 4);
    std::vector<std::string> para;
    if (style == SyntheticStyle::kRule) {
      const auto noun = pick(kNouns, kRuleNouns, rng);
      const auto tool = pick(kTools, kRuleTools, rng);
      for (int k = 1; k <= m; ++k) para.push_back(rule_sentence(k, noun, tool));
    } else {
      const auto noun = pick(kNouns, kNouns.size(), rng);
      const auto tool = pick(kTools, kTools.size(), rng);
      for (int k = 1; k <= m; ++k) para.push_back(procedural_sentence(k, noun, tool, rng));
    }
    c.paragraphs.push_back(std::move(para));
  }
  return c;
}

std::string stem(std::string_view word) {
  std::string w(word);
  auto ends_with = [&](std::string_view suffix) {
    return w.size() >= suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (w.size() > 5 && ends_with("ing")) return w.substr(0, w.size() - 3);
  if (w.size() > 4 && ends_with("ed")) return w.substr(0, w.size() - 2);
  if (w.size() > 4 && ends_with("es")) return w.substr(0, w.size() - 2);
  if (w.size() > 4 && ends_with("ly")) return w.substr(0, w.size() - 2);
  if (w.size() > 3 && ends_with("s") && !ends_with("ss")) return w.substr(0, w.size() - 1);
  return w;
}

}  // namespace inset
