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


// Corpus-level generation metrics and the tab-separated report.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace inset {

using Words = std::vector<std::string>;

struct EvalPair {
  Words hypothesis;
  std::vector<Words> references;
};

using EvalCorpus = std::vector<EvalPair>;

/// Pairs aligned line by line; each side is tokenized like the corpus.
EvalCorpus make_eval_corpus(const std::vector<std::string>& hypotheses,
                            const std::vector<std::string>& references);

inline constexpr double kBleuEpsilon = 1e-9;

/// Cumulative B-1..B-n_max in [0, 1]: clipped n-gram precisions pooled over
/// the corpus, geometric mean, brevity penalty against the closest reference.
std::vector<double> bleu(const EvalCorpus& corpus, int n_max = 4);

/// Cumulative N-1..N-n_max. Information weights come from the references.
std::vector<double> nist(const EvalCorpus& corpus, int n_max = 4);

/// Exact-then-stem unigram alignment with a fragmentation penalty and no
/// synonym matching; mean of per-pair scores, best reference per pair.
double meteor_lite(const EvalCorpus& corpus);

/// Natural-log entropy of the pooled hypothesis n-gram distribution.
double entropy(const EvalCorpus& corpus, int n);

/// Distinct n-grams over total n-grams, pooled over hypotheses.
double dist(const EvalCorpus& corpus, int n);

double avg_len(const EvalCorpus& corpus);

struct MetricReport {
  std::string method;
  std::array<std::optional<double>, 4> nist;
  std::array<std::optional<double>, 4> bleu;
  std::optional<double> meteor;
  std::array<std::optional<double>, 4> entropy;
  std::array<std::optional<double>, 2> dist;
  std::optional<double> length;
};

/// All columns filled.
MetricReport evaluate_all(const EvalCorpus& corpus, const std::string& method);

/// Only the reference-free columns, computed on the references themselves.
MetricReport evaluate_references(const EvalCorpus& corpus, const std::string& method = "ground truth");

/// Header, metadata comment lines, one row per report. Percent columns
/// (BLEU, METEOR, Dist) carry two decimals and a '%'; absent cells are "-".
std::string format_report(const std::vector<MetricReport>& rows);

}  // namespace inset
