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

#include <algorithm>
#include <cmath>
#include <random>

#include "inset/errors.hpp"
#include "support/metric_oracle.hpp"

using namespace inset;

namespace {

EvalCorpus single(const std::string& hyp, const std::string& ref) { return make_eval_corpus({hyp}, {ref}); }

EvalCorpus random_corpus(std::mt19937_64& rng) {
  const int vocab = 2 + static_cast<int>(rng() % 11);
  const int pairs = 1 + static_cast<int>(rng() % 10);
  auto sentence = [&](int min_len) {
    Words w;
    const int len = min_len + static_cast<int>(rng() % 9);
    for (int i = 0; i < len; ++i) w.push_back("w" + std::to_string(rng() % vocab));
    return w;
  };
  EvalCorpus c;
  for (int p = 0; p < pairs; ++p) {
    EvalPair pair;
    pair.hypothesis = sentence(0);
    const int refs = 1 + static_cast<int>(rng() % 3);
    for (int r = 0; r < refs; ++r) pair.references.push_back(sentence(1));
    c.push_back(std::move(pair));
  }
  return c;
}

}  // namespace

TEST_CASE("hand-computed fixtures") {
  SUBCASE("unigram BLEU of three matches in four") {
    const auto c = single("the cat sat down", "the cat sat up");
    CHECK(bleu(c, 1)[0] == doctest::Approx(0.75).epsilon(1e-12));
    // bigrams: 2 of 3 match
    CHECK(bleu(c, 2)[1] == doctest::Approx(std::sqrt(0.75 * 2.0 / 3.0)).epsilon(1e-12));
  }
  SUBCASE("brevity penalty") {
    const auto c = single("a b", "a b c d");
    CHECK(bleu(c, 1)[0] == doctest::Approx(std::exp(1.0 - 2.0)).epsilon(1e-12));
  }
  SUBCASE("zero matches fall back to epsilon") {
    const auto c = single("x y", "a b");
    CHECK(bleu(c, 1)[0] == doctest::Approx(1e-9).epsilon(1e-9));
  }
  SUBCASE("entropy and distinctness") {
    CHECK(entropy(single("a b c d", "a"), 1) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(entropy(single("a a a", "a"), 1) == 0.0);
    CHECK(dist(single("a a b", "a"), 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dist(single("a a b", "a"), 2) == 1.0);
    CHECK(avg_len(make_eval_corpus({"a b", "c d e f"}, {"x", "y"})) == 3.0);
  }
  SUBCASE("NIST of an exact four-token match") {
    const auto n = nist(single("a b c d", "a b c d"), 4);
    // each unigram carries log2(4/1) = 2 bits; longer grams add nothing
    CHECK(n[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(n[3] == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("NIST brevity penalty halves at two thirds length") {
    const auto n = nist(single("a b", "a b c"), 1);
    // unigram info log2(3) for each of the 2 matches, over 2 hypothesis grams
    CHECK(n[0] == doctest::Approx(0.5 * std::log2(3.0)).epsilon(1e-12));
  }
  SUBCASE("METEOR-lite") {
    // perfect match: one chunk over four matches
    CHECK(meteor_lite(single("a b c d", "a b c d")) == doctest::Approx(1.0 - 0.5 / 64.0).epsilon(1e-12));
    // stem-level match counts
    CHECK(meteor_lite(single("cats walked", "cat walk")) == doctest::Approx(1.0 - 0.5 / 8.0).epsilon(1e-12));
    CHECK(meteor_lite(single("x", "y")) == 0.0);
    // swapped order: two chunks over two matches
    CHECK(meteor_lite(single("b a", "a b")) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("metrics agree with the direct-formula oracles on random corpora") {
  std::mt19937_64 rng(20260);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_corpus(rng);
    INFO("trial " << trial);
    const auto b = bleu(c, 4);
    const auto n = nist(c, 4);
    for (int k = 1; k <= 4; ++k) {
      CHECK(std::abs(b[k - 1] - oracle::bleu(c, k)) <= 1e-9);
      CHECK(std::abs(n[k - 1] - oracle::nist(c, k)) <= 1e-9);
      if (oracle::pooled(c, k).empty()) {
        CHECK_THROWS_AS(entropy(c, k), ContractError);
      } else {
        CHECK(std::abs(entropy(c, k) - oracle::entropy(c, k)) <= 1e-9);
        CHECK(std::abs(dist(c, k) - oracle::dist(c, k)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("corpus metrics ignore pair order") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = random_corpus(rng);
    const auto before = evaluate_all(c, "m");
    std::shuffle(c.begin(), c.end(), rng);
    const auto after = evaluate_all(c, "m");
    CHECK(format_report({before}) == format_report({after}));
    CHECK(before.meteor == after.meteor);
    CHECK(before.bleu == after.bleu);
    CHECK(before.nist == after.nist);
  }
}

TEST_CASE("scores stay in range") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_corpus(rng);
    for (double v : bleu(c, 4)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    const double m = meteor_lite(c);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
    for (double v : nist(c, 4)) CHECK(v >= 0.0);
  }
}

TEST_CASE("report layout") {
  const auto c = make_eval_corpus({"a b c d", "a c d e"}, {"a b c d", "a b d e"});
  const auto text = format_report({evaluate_all(c, "model"), evaluate_references(c)});
  CHECK(text.find("# entropy_log_base=e\n") != std::string::npos);
  CHECK(text.find("Method\tN-1\tN-2\tN-3\tN-4\tB-1\tB-2\tB-3\tB-4\tMETEOR\tE-1\tE-2\tE-3\tE-4\tD-1\tD-2\tLen\n") !=
        std::string::npos);
  const auto row_start = text.find("ground truth\t");
  REQUIRE(row_start != std::string::npos);
  const auto row = text.substr(row_start, text.find('\n', row_start) - row_start);
  CHECK(std::count(row.begin(), row.end(), '\t') == 16);
  CHECK(row.find("\t-\t-\t-\t-\t-\t-\t-\t-\t-\t") != std::string::npos);
  CHECK(row.find("%") != std::string::npos);  // Dist is reported
  CHECK(row.substr(row.rfind('\t') + 1) == "4.00");
  const auto model_start = text.find("model\t");
  const auto model_row = text.substr(model_start, text.find('\n', model_start) - model_start);
  CHECK(model_row.find("-") == std::string::npos);
}

TEST_CASE("metric contracts") {
  CHECK_THROWS_AS(make_eval_corpus({"a"}, {}), LengthError);
  CHECK_THROWS_AS(bleu(EvalCorpus{}, 4), ContractError);
  CHECK_THROWS_AS(entropy(single("a", "a"), 2), ContractError);
  CHECK_THROWS_AS(dist(EvalCorpus{}, 1), ContractError);
}
