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


#include "inset/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>

#include "inset/errors.hpp"

#ifndef INSET_DATA_DIR
#define INSET_DATA_DIR "data"
#endif

namespace inset {

namespace {

// Default file names for path keys left empty.
const std::map<std::string, std::string>& default_files() {
  static const std::map<std::string, std::string> files = {
      {"corpus", "corpus.txt"},
      {"vocab", "vocab.txt"},
      {"keywords", "keywords.tsv"},
      {"ae_checkpoint", "ae.ckpt"},
      {"features", "features.bin"},
      {"kw_features", "kw_features.bin"},
      {"planner_checkpoint", "planner.ckpt"},
      {"kw_checkpoint", "kw.ckpt"},
      {"samples", "interpolation_samples.txt"},
  };
  return files;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<RunConfig::Key>& RunConfig::keys() {
  static const std::vector<Key> k = {
      {"seed", "1", "seed for every random stream"},
      {"threads", "0", "inference workers (0: INSET_THREADS or hardware)"},
      {"work_dir", "run", "directory for files whose path key is empty"},
      {"corpus", "", "paragraph corpus"},
      {"vocab", "", "vocabulary file"},
      {"stopwords", std::string(INSET_DATA_DIR) + "/stopwords.txt", "stop-word list"},
      {"keywords", "", "keyword pairs"},
      {"ae_checkpoint", "", "autoencoder checkpoint"},
      {"features", "", "sentence feature cache"},
      {"kw_features", "", "keyword feature cache"},
      {"planner_checkpoint", "", "planner checkpoint"},
      {"kw_checkpoint", "", "keyword encoder checkpoint"},
      {"samples", "", "interpolation samples written during autoencoder training"},
      {"paragraphs", "300", "paragraphs produced by gen-synthetic"},
      {"style", "procedural", "synthetic corpus style: procedural | rule"},
      {"min_freq", "1", "minimum token count for the vocabulary"},
      {"d_model", "64", "feature width d"},
      {"heads", "4", "attention heads"},
      {"layers", "2", "blocks per stack"},
      {"ffn", "256", "feed-forward width"},
      {"max_len", "34", "position table size"},
      {"dropout", "0.1", "dropout probability"},
      {"validation_every", "20", "every n-th sentence/paragraph/pair is held out for validation"},
      {"batch_size", "16", "autoencoder batch size"},
      {"learning_rate", "0.0001", "autoencoder Adam learning rate"},
      {"max_steps", "2000", "autoencoder step budget"},
      {"eval_interval", "200", "autoencoder steps between validations"},
      {"patience", "3", "validations without improvement before stopping"},
      {"mask_prob", "0.15", "token corruption probability p"},
      {"planner_batch_size", "32", "planner batch size"},
      {"planner_epochs", "20", "planner epochs"},
      {"planner_learning_rate", "0.0001", "planner Adam learning rate"},
      {"constraint_probability", "0.5", "share of planner windows given the keyword feature"},
      {"kw_batch_size", "32", "keyword encoder batch size"},
      {"kw_epochs", "10", "keyword encoder epochs"},
      {"kw_learning_rate", "0.0001", "keyword encoder Adam learning rate"},
      {"decode", "beam", "decoding: greedy | beam | topk"},
      {"beam_width", "5", "beam width"},
      {"top_k", "10", "k for top-k sampling"},
      {"max_decode_len", "32", "generated token cap"},
      {"interpolation_steps", "4", "interior points between two sentences"},
  };
  return k;
}

RunConfig::RunConfig() {
  for (const auto& k : keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

int RunConfig::get_int(const std::string& key) const {
  const auto& v = get(key);
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw UsageError("config key " + key + ": '" + v + "' is not an integer");
  }
  return out;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const auto& v = get(key);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw UsageError("config key " + key + ": '" + v + "' is not a non-negative integer");
  }
  return out;
}

double RunConfig::get_double(const std::string& key) const {
  const auto& v = get(key);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw UsageError("config key " + key + ": '" + v + "' is not a number");
  }
  return out;
}

std::string RunConfig::path(const std::string& key) const {
  const auto& v = get(key);
  if (!v.empty()) return v;
  const auto it = default_files().find(key);
  if (it == default_files().end()) throw UsageError("config key " + key + " is empty");
  return (std::filesystem::path(get("work_dir")) / it->second).string();
}

void RunConfig::load_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open config file " + file);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(file + ":" + std::to_string(line_no) + ": expected key=value");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& k : keys()) out += k.name + "=" + values_.at(k.name) + "\n";
  return out;
}

void RunConfig::validate() const {
  auto probability = [&](const char* key) {
    const double p = get_double(key);
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError(std::string(key) + " must lie in [0, 1]");
  };
  probability("mask_prob");
  probability("constraint_probability");
  const double dropout = get_double("dropout");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("dropout must lie in [0, 1)");
  auto at_least = [&](const char* key, int lo) {
    if (get_int(key) < lo) throw UsageError(std::string(key) + " must be >= " + std::to_string(lo));
  };
  at_least("beam_width", 1);
  at_least("top_k", 1);
  at_least("batch_size", 1);
  at_least("planner_batch_size", 1);
  at_least("kw_batch_size", 1);
  at_least("eval_interval", 1);
  at_least("patience", 1);
  at_least("validation_every", 2);
  at_least("max_decode_len", 1);
  at_least("min_freq", 1);
  if (get_int("max_decode_len") > 32) throw UsageError("max_decode_len must be <= 32");
  at_least("threads", 0);
  for (const char* key : {"d_model", "heads", "layers", "ffn", "max_len", "paragraphs", "max_steps",
                          "planner_epochs", "kw_epochs", "interpolation_steps"}) {
    at_least(key, 1);
  }
  get_double("learning_rate");
  get_double("planner_learning_rate");
  get_double("kw_learning_rate");
  get_u64("seed");
  const auto& style = get("style");
  if (style != "procedural" && style != "rule") throw UsageError("style must be procedural or rule");
  const auto& decode = get("decode");
  if (decode != "greedy" && decode != "beam" && decode != "topk") {
    throw UsageError("decode must be greedy, beam or topk");
  }
}

}  // namespace inset
