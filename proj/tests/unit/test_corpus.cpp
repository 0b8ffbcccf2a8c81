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


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "inset/autoencoder.hpp"
#include "inset/corpus.hpp"

using namespace inset;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "inset_corpus_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("tokenizer lowercases and splits punctuation") {
  CHECK(tokenize_words("Hello, World!  It's") ==
        std::vector<std::string>{"hello", ",", "world", "!", "it", "'", "s"});
  CHECK(normalize_text("  A  b.") == "a b .");
  CHECK(tokenize_words("").empty());
}

TEST_CASE("vocabulary reserves the special ids") {
  Vocabulary v({"apple"});
  CHECK(v.size() == kNumSpecialTokens + 1);
  CHECK(v.token(kPad) == "[PAD]");
  CHECK(v.token(kMask) == "[MASK]");
  CHECK(v.token(kEos) == "[EOS]");
  CHECK(v.id("apple") == 7);
  CHECK(v.id("pear") == kUnk);
  CHECK_THROWS_AS(v.token(8), IndexError);
  CHECK(v.decode(v.encode("Apple pear")) == "apple [UNK]");
}

TEST_CASE("vocabulary ranks by count with lexicographic ties") {
  Corpus c;
  c.paragraphs = {{"b a c a", "c b d"}};
  const auto v = build_vocab(c, 1);
  // a:2 b:2 c:2 d:1
  CHECK(v.tokens() == std::vector<std::string>{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "[SOS]", "[EOS]",
                                               "a", "b", "c", "d"});
  CHECK(build_vocab(c, 2).size() == kNumSpecialTokens + 3);
}

TEST_CASE("vocabulary files round-trip and reject bad headers") {
  Corpus c;
  c.paragraphs = {{"x y z", "y z", "z"}};
  const auto v = build_vocab(c, 1);
  const auto path = temp_path("vocab.txt");
  v.save(path);
  const auto loaded = Vocabulary::load(path);
  CHECK(loaded.tokens() == v.tokens());
  CHECK(loaded.checksum() == v.checksum());
  write_text(path, "[PAD]\n[CLS]\n");
  CHECK_THROWS_AS(Vocabulary::load(path), FormatError);
  CHECK_THROWS_AS(Vocabulary::load(temp_path("absent.txt")), DependencyError);
  CHECK(Vocabulary({"a"}).checksum() != Vocabulary({"b"}).checksum());
}

TEST_CASE("window arithmetic over paragraph lengths 7..40") {
  for (std::size_t m = 7; m <= 40; ++m) {
    std::vector<std::size_t> ids(m);
    for (std::size_t i = 0; i < m; ++i) ids[i] = 100 + i;
    const auto windows = make_windows(ids);
    CHECK(windows.size() == m - 6);
    std::size_t slots = 0, masked = 0;
    for (std::size_t j = 0; j < windows.size(); ++j) {
      const auto& w = windows[j];
      CHECK(w.missing == 4);
      CHECK(w.missing_sentence() == 100 + j + 3);
      for (int k = 0; k < 7; ++k) CHECK(w.sentence_ids[k] == 100 + j + static_cast<std::size_t>(k));
      slots += 7;
      masked += 1;
    }
    CHECK(masked * 7 == slots);
  }
  std::vector<std::size_t> six(6);
  CHECK_THROWS_AS(make_windows(six), LengthError);
}

TEST_CASE("corpus windows use global sentence ids and skip short paragraphs") {
  Corpus c;
  c.paragraphs = {std::vector<std::string>(3, "a"), std::vector<std::string>(8, "b")};
  const auto w = make_windows(c);
  REQUIRE(w.size() == 2);
  CHECK(w[0].sentence_ids[0] == 3);
  CHECK(w[1].missing_sentence() == 7);
}

TEST_CASE("filtering drops short paragraphs and over-long sentences") {
  Corpus c;
  std::string long_sentence;
  for (int i = 0; i < 33; ++i) long_sentence += "w ";
  c.paragraphs = {std::vector<std::string>(7, "ok"), std::vector<std::string>(6, "short"),
                  std::vector<std::string>(7, "ok")};
  c.paragraphs[2][3] = long_sentence;
  const auto f = filter_corpus(c);
  REQUIRE(f.paragraphs.size() == 1);
  CHECK(f.paragraphs[0][0] == "ok");
}

TEST_CASE("corpus text round-trips") {
  const auto c = gen_synthetic(5, 1);
  std::istringstream in(format_corpus(c));
  CHECK(parse_corpus(in) == c);
  const auto path = temp_path("corpus.txt");
  write_corpus(path, c);
  CHECK(read_corpus(path) == c);
}

TEST_CASE("synthetic corpora are deterministic and well formed") {
  CHECK(gen_synthetic(20, 9) == gen_synthetic(20, 9));
  CHECK_FALSE(gen_synthetic(20, 9) == gen_synthetic(20, 10));
  for (auto style : {SyntheticStyle::kProcedural, SyntheticStyle::kRule}) {
    const auto c = gen_synthetic(50, 2, style);
    CHECK(filter_corpus(c) == c);
    for (const auto& p : c.paragraphs) {
      CHECK(p.size() >= 7);
      CHECK(p.size() <= 10);
    }
  }
}

TEST_CASE("rule corpus middle sentence is fixed by its neighbours") {
  const auto c = gen_synthetic(30, 4, SyntheticStyle::kRule);
  for (const auto& p : c.paragraphs) {
    for (std::size_t i = 0; i + 7 <= p.size(); ++i) {
      // Same dish and tool throughout; only the step number and verb move.
      const auto before = tokenize_words(p[i + 2]);
      const auto middle = tokenize_words(p[i + 3]);
      CHECK(middle.size() == before.size());
      CHECK(middle[1] == std::to_string(i + 4));
      for (std::size_t k = 4; k < middle.size(); ++k) CHECK(middle[k] == before[k]);
    }
  }
}

TEST_CASE("keywords skip stop words and rank by corpus frequency") {
  Corpus c;
  c.paragraphs = {{"the cat sat on the mat", "a cat and a dog", "the dog saw a cat"}};
  const FrequencyTable freq(c);
  const StopList stop{"the", "a", "on", "and"};
  CHECK(extract_keywords("the cat sat on the mat", stop, freq) == std::vector<std::string>{"cat", "mat"});
  CHECK(extract_keywords("the dog saw a cat", stop, freq) == std::vector<std::string>{"cat", "dog"});
  CHECK(extract_keywords("the the a", stop, freq).empty());
  CHECK(extract_keywords("cat cat", stop, freq) == std::vector<std::string>{"cat"});
  Vocabulary v({"dog", "saw"});
  CHECK(extract_keywords("the dog saw a cat", stop, freq, &v) == std::vector<std::string>{"dog", "saw"});
}

TEST_CASE("bundled stop list loads") {
  const auto stop = load_stop_list(std::string(INSET_DATA_DIR) + "/stopwords.txt");
  CHECK(stop.count("the") == 1);
  CHECK(stop.count("step") == 1);
  CHECK(stop.count(".") == 1);
  CHECK(stop.count("onion") == 0);
}

TEST_CASE("keyword files round-trip") {
  const std::vector<KeywordSet> sets{{0, {"cat", "mat"}}, {1, {"dog"}}, {2, {}}};
  const auto path = temp_path("keywords.tsv");
  write_keywords(path, sets);
  CHECK(read_keywords(path) == sets);
  write_text(path, "0\tcat\n");
  CHECK_THROWS_AS(read_keywords(path), FormatError);
  write_text(path, "x\tcat\tdog\n");
  CHECK_THROWS_AS(read_keywords(path), FormatError);
}

TEST_CASE("stemmer strips common suffixes") {
  CHECK(stem("walking") == "walk");
  CHECK(stem("walked") == "walk");
  CHECK(stem("boxes") == "box");
  CHECK(stem("quickly") == "quick");
  CHECK(stem("cats") == "cat");
  CHECK(stem("glass") == "glass");
  CHECK(stem("sing") == "sing");
}

TEST_CASE("sentences longer than the token cap are rejected") {
  TokenSequence s;
  s.ids.assign(32, 9);
  CHECK_NOTHROW(check_sentence_length(s));
  s.ids.push_back(9);
  CHECK_THROWS_AS(check_sentence_length(s), LengthError);
}
