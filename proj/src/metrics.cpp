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


#include "inset/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "inset/corpus.hpp"
#include "inset/errors.hpp"

namespace inset {

namespace {

using NgramCounts = std::map<std::string, std::size_t>;

std::string join(const Words& w, std::size_t begin, std::size_t n) {
  std::string key;
  for (std::size_t i = begin; i < begin + n; ++i) {
    if (i > begin) key.push_back('\x1f');
    key += w[i];
  }
  return key;
}

NgramCounts ngrams(const Words& w, std::size_t n) {
  NgramCounts out;
  if (w.size() < n) return out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) ++out[join(w, i, n)];
  return out;
}

/// Per-ngram maximum count over a pair's references.
NgramCounts max_reference_counts(const std::vector<Words>& refs, std::size_t n) {
  NgramCounts out;
  for (const auto& r : refs)
    for (const auto& [g, c] : ngrams(r, n)) out[g] = std::max(out[g], c);
  return out;
}

void check_corpus(const EvalCorpus& corpus, const char* what) {
  if (corpus.empty()) throw ContractError(std::string(what) + ": empty hypothesis set");
  for (const auto& p : corpus)
    if (p.references.empty()) throw ContractError(std::string(what) + ": pair without references");
}

void check_order(int n, const char* what) {
  if (n < 1) throw ContractError(std::string(what) + ": n must be >= 1");
}

NgramCounts pooled_hypothesis_ngrams(const EvalCorpus& corpus, int n, const char* what) {
  if (corpus.empty()) throw ContractError(std::string(what) + ": empty hypothesis set");
  check_order(n, what);
  NgramCounts pooled;
  for (const auto& p : corpus)
    for (const auto& [g, c] : ngrams(p.hypothesis, n)) pooled[g] += c;
  if (pooled.empty()) throw ContractError(std::string(what) + ": hypotheses contain no " + std::to_string(n) + "-grams");
  return pooled;
}

double meteor_pair(const Words& h, const Words& r) {
  if (h.empty() || r.empty()) return 0.0;
  std::vector<bool> used_h(h.size(), false), used_r(r.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> links;
  auto align = [&](auto&& key) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (used_h[i]) continue;
      const auto kh = key(h[i]);
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (!used_r[j] && key(r[j]) == kh) {
          used_h[i] = used_r[j] = true;
          links.emplace_back(i, j);
          break;
        }
      }
    }
  };
  align([](const std::string& w) { return w; });
  align([](const std::string& w) { return stem(w); });
  const double m = static_cast<double>(links.size());
  if (links.empty()) return 0.0;
  std::sort(links.begin(), links.end());
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < links.size(); ++k)
    if (links[k].first != links[k - 1].first + 1 || links[k].second != links[k - 1].second + 1) ++chunks;
  const double p = m / static_cast<double>(h.size());
  const double rc = m / static_cast<double>(r.size());
  const double fmean = 10.0 * p * rc / (rc + 9.0 * p);
  const double penalty = 0.5 * std::pow(static_cast<double>(chunks) / m, 3.0);
  return fmean * (1.0 - penalty);
}

/// Order-independent sum.
double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

EvalCorpus make_eval_corpus(const std::vector<std::string>& hypotheses,
                            const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size()) {
    throw LengthError("evaluate: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                      std::to_string(references.size()) + " references");
  }
  EvalCorpus corpus;
  for (std::size_t i = 0; i < hypotheses.size(); ++i)
    corpus.push_back({tokenize_words(hypotheses[i]), {tokenize_words(references[i])}});
  return corpus;
}

std::vector<double> bleu(const EvalCorpus& corpus, int n_max) {
  check_corpus(corpus, "bleu");
  check_order(n_max, "bleu");
  std::vector<std::size_t> matches(n_max, 0), totals(n_max, 0);
  std::size_t hyp_len = 0, ref_len = 0;
  for (const auto& p : corpus) {
    hyp_len += p.hypothesis.size();
    std::size_t best = p.references.front().size();
    for (const auto& r : p.references) {
      const auto d = [&](std::size_t len) {
        return len > p.hypothesis.size() ? len - p.hypothesis.size() : p.hypothesis.size() - len;
      };
      if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
    }
    ref_len += best;
    for (int n = 1; n <= n_max; ++n) {
      const auto ref = max_reference_counts(p.references, n);
      for (const auto& [g, c] : ngrams(p.hypothesis, n)) {
        totals[n - 1] += c;
        const auto it = ref.find(g);
        if (it != ref.end()) matches[n - 1] += std::min(c, it->second);
      }
    }
  }
  double bp = 0.0;
  if (hyp_len > 0) {
    bp = hyp_len > ref_len ? 1.0
                           : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  }
  std::vector<double> out(n_max);
  double log_sum = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double num = matches[n - 1] > 0 ? static_cast<double>(matches[n - 1]) : kBleuEpsilon;
    const double den = totals[n - 1] > 0 ? static_cast<double>(totals[n - 1]) : 1.0;
    log_sum += std::log(num / den);
    out[n - 1] = bp * std::exp(log_sum / n);
  }
  return out;
}

std::vector<double> nist(const EvalCorpus& corpus, int n_max) {
  check_corpus(corpus, "nist");
  check_order(n_max, "nist");
  NgramCounts ref_counts;
  std::size_t ref_words = 0;
  std::vector<double> pair_ref_len;
  std::size_t hyp_len = 0;
  for (const auto& p : corpus) {
    double seg = 0.0;
    for (const auto& r : p.references) {
      ref_words += r.size();
      seg += static_cast<double>(r.size());
      for (int n = 1; n <= n_max; ++n)
        for (const auto& [g, c] : ngrams(r, n)) ref_counts[g] += c;
    }
    pair_ref_len.push_back(seg / static_cast<double>(p.references.size()));
    hyp_len += p.hypothesis.size();
  }
  if (ref_words == 0) throw ContractError("nist: empty references");
  const double ref_len = sorted_sum(pair_ref_len);

  auto info = [&](const std::string& g) {
    const auto cut = g.rfind('\x1f');
    const double whole = static_cast<double>(ref_counts.at(g));
    const double prefix = cut == std::string::npos ? static_cast<double>(ref_words)
                                                   : static_cast<double>(ref_counts.at(g.substr(0, cut)));
    return std::log2(prefix / whole);
  };

  std::vector<double> out(n_max);
  const double beta = -std::log(0.5) / std::pow(std::log(1.5), 2.0);
  const double ratio = static_cast<double>(hyp_len) / ref_len;
  double bp = 1.0;
  if (ratio <= 0.0) {
    bp = 0.0;
  } else if (ratio < 1.0) {
    bp = std::exp(-beta * std::pow(std::log(ratio), 2.0));
  }
  double cumulative = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    NgramCounts matched;
    std::size_t hyp_total = 0;
    for (const auto& p : corpus) {
      const auto ref = max_reference_counts(p.references, n);
      for (const auto& [g, c] : ngrams(p.hypothesis, n)) {
        hyp_total += c;
        const auto it = ref.find(g);
        if (it != ref.end()) matched[g] += std::min(c, it->second);
      }
    }
    double gain = 0.0;
    for (const auto& [g, c] : matched) gain += info(g) * static_cast<double>(c);
    cumulative += hyp_total > 0 ? gain / static_cast<double>(hyp_total) : 0.0;
    out[n - 1] = bp * cumulative;
  }
  return out;
}

double meteor_lite(const EvalCorpus& corpus) {
  check_corpus(corpus, "meteor_lite");
  std::vector<double> scores;
  for (const auto& p : corpus) {
    double best = 0.0;
    for (const auto& r : p.references) best = std::max(best, meteor_pair(p.hypothesis, r));
    scores.push_back(best);
  }
  return sorted_sum(scores) / static_cast<double>(corpus.size());
}

double entropy(const EvalCorpus& corpus, int n) {
  const auto pooled = pooled_hypothesis_ngrams(corpus, n, "entropy");
  double total = 0.0;
  for (const auto& [g, c] : pooled) total += static_cast<double>(c);
  double h = 0.0;
  for (const auto& [g, c] : pooled) {
    const double q = static_cast<double>(c) / total;
    h -= q * std::log(q);
  }
  return h;
}

double dist(const EvalCorpus& corpus, int n) {
  const auto pooled = pooled_hypothesis_ngrams(corpus, n, "dist");
  std::size_t total = 0;
  for (const auto& [g, c] : pooled) total += c;
  return static_cast<double>(pooled.size()) / static_cast<double>(total);
}

double avg_len(const EvalCorpus& corpus) {
  if (corpus.empty()) throw ContractError("avg_len: empty hypothesis set");
  std::size_t total = 0;
  for (const auto& p : corpus) total += p.hypothesis.size();
  return static_cast<double>(total) / static_cast<double>(corpus.size());
}

namespace {

/// Reference-free columns; n-gram orders with no n-grams stay empty.
void fill_diversity(const EvalCorpus& corpus, MetricReport& r) {
  for (int n = 1; n <= 4; ++n) {
    try {
      r.entropy[n - 1] = entropy(corpus, n);
      if (n <= 2) r.dist[n - 1] = dist(corpus, n);
    } catch (const ContractError&) {
    }
  }
  r.length = avg_len(corpus);
}

}  // namespace

MetricReport evaluate_all(const EvalCorpus& corpus, const std::string& method) {
  MetricReport r;
  r.method = method;
  const auto b = bleu(corpus, 4);
  const auto n = nist(corpus, 4);
  for (int i = 0; i < 4; ++i) {
    r.bleu[i] = b[i];
    r.nist[i] = n[i];
  }
  r.meteor = meteor_lite(corpus);
  fill_diversity(corpus, r);
  return r;
}

MetricReport evaluate_references(const EvalCorpus& corpus, const std::string& method) {
  EvalCorpus refs;
  for (const auto& p : corpus)
    for (const auto& ref : p.references) refs.push_back({ref, {ref}});
  MetricReport r;
  r.method = method;
  fill_diversity(refs, r);
  return r;
}

std::string format_report(const std::vector<MetricReport>& rows) {
  std::string out =
      "# entropy_log_base=e\n"
      "# meteor=meteor_lite (exact then stem alignment, no synonyms)\n"
      "# bleu_smoothing=epsilon 1e-9 on zero matches\n"
      "Method\tN-1\tN-2\tN-3\tN-4\tB-1\tB-2\tB-3\tB-4\tMETEOR\tE-1\tE-2\tE-3\tE-4\tD-1\tD-2\tLen\n";
  auto cell = [](const std::optional<double>& v, bool percent) {
    if (!v) return std::string("-");
    char buf[64];
    std::snprintf(buf, sizeof buf, percent ? "%.2f%%" : "%.2f", percent ? *v * 100.0 : *v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out += r.method;
    for (const auto& v : r.nist) out += "\t" + cell(v, false);
    for (const auto& v : r.bleu) out += "\t" + cell(v, true);
    out += "\t" + cell(r.meteor, true);
    for (const auto& v : r.entropy) out += "\t" + cell(v, false);
    for (const auto& v : r.dist) out += "\t" + cell(v, true);
    out += "\t" + cell(r.length, false) + "\n";
  }
  return out;
}

}  // namespace inset
