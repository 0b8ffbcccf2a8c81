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


// Pipeline stages behind the command-line tool. Each stage reads and writes
// only the files named by its RunConfig keys and reports progress on `log`.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "inset/autoencoder.hpp"
#include "inset/config.hpp"
#include "inset/constraint.hpp"
#include "inset/corpus.hpp"
#include "inset/decoding.hpp"
#include "inset/planner.hpp"

namespace inset::pipeline {

BlockConfig block_config(const RunConfig& cfg);
AutoencoderTrainConfig autoencoder_config(const RunConfig& cfg);
PlannerTrainConfig planner_config(const RunConfig& cfg);
ConstraintTrainConfig constraint_config(const RunConfig& cfg);
DecodeMode decode_mode(const RunConfig& cfg);
int thread_count(const RunConfig& cfg);

/// Filtered corpus from cfg "corpus"; DependencyError names gen-synthetic.
Corpus load_corpus(const RunConfig& cfg);
Vocabulary load_vocab(const RunConfig& cfg);

void gen_synthetic(const RunConfig& cfg, std::ostream& log);
void build_vocab(const RunConfig& cfg, std::ostream& log);
void extract_keywords(const RunConfig& cfg, std::ostream& log);

/// Writes the best checkpoint to ae_checkpoint and the latest training state
/// (parameters plus optimizer) to ae_checkpoint + ".last" at every
/// validation. With `resume`, training continues from that state.
TrainSummary train_ae(const RunConfig& cfg, std::ostream& log, bool resume = false);

/// Sentence features from the autoencoder; keyword features too when a
/// keyword checkpoint and keyword file exist.
void precompute(const RunConfig& cfg, std::ostream& log);

std::vector<PlannerEpoch> train_planner(const RunConfig& cfg, std::ostream& log);
std::vector<ConstraintEpoch> train_kw(const RunConfig& cfg, std::ostream& log);

std::vector<std::string> interpolate(const RunConfig& cfg, const std::string& a, const std::string& b);

/// Report text for aligned hypothesis/reference files.
std::string evaluate(const std::string& hypotheses, const std::string& references, const std::string& method);

struct Models {
  Vocabulary vocab;
  SentenceAutoencoder<float> autoencoder;
  LatentPlanner<float> planner;
  std::optional<ConstraintEncoder<float>> keywords;
};

/// Loads vocab, autoencoder and planner (plus the keyword encoder when
/// asked) and checks they agree on vocabulary and features.
Models load_models(const RunConfig& cfg, bool with_keywords);

inline constexpr char kSlotMarker[] = "<MASK>";

struct InfillRequest {
  std::array<std::string, kWindowSize - 1> context;
  int missing = kMissingSlot;  // 1-based
  std::vector<std::string> keywords;
};

/// Seven lines with exactly one "<MASK>" line.
InfillRequest parse_infill_input(const std::vector<std::string>& lines);

/// Predicted feature for the missing slot.
RowVector<float> plan(const Models& models, const InfillRequest& request);

Generation infill(const Models& models, const InfillRequest& request, const DecodeMode& mode,
                  Rng* rng = nullptr);

}  // namespace inset::pipeline
