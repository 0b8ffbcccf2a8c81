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


// Command-line front end: one subcommand per pipeline stage plus infill.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inset/config.hpp"
#include "inset/errors.hpp"
#include "inset/pipeline.hpp"

namespace {

std::string flag_name(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

std::vector<std::string> read_input_lines(const std::string& path) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw inset::UsageError("cannot open infill input " + path);
    in = &file;
  }
  std::vector<std::string> lines;
  for (std::string line; std::getline(*in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace inset;
  CLI::App app{"Sentence infilling over a learned sentence feature space"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_file;
  bool dump_config = false;
  app.add_option("--config", config_file, "key=value configuration file");
  app.add_flag("--dump-config", dump_config, "print the effective configuration and exit");

  std::map<std::string, std::string> overrides;
  for (const auto& key : RunConfig::keys()) {
    app.add_option_function<std::string>(
           flag_name(key.name), [&overrides, name = key.name](const std::string& v) { overrides[name] = v; },
           key.help + " (default: " + (key.default_value.empty() ? "<work_dir>/..." : key.default_value) + ")")
        ->group("Configuration");
  }

  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic paragraph corpus");
  auto* vocab = app.add_subcommand("build-vocab", "build the vocabulary from the corpus");
  auto* keywords = app.add_subcommand("extract-keywords", "extract two keywords per sentence");
  auto* train_ae = app.add_subcommand("train-ae", "train the sentence autoencoder");
  bool resume = false;
  train_ae->add_flag("--resume", resume, "continue from the last saved training state");
  auto* precompute = app.add_subcommand("precompute", "cache sentence features from the autoencoder");
  auto* train_planner = app.add_subcommand("train-planner", "train the sentence-level planner on cached features");
  auto* train_kw = app.add_subcommand("train-kw", "distil the keyword encoder from the sentence encoder");

  auto* interp = app.add_subcommand("interpolate", "decode points between two sentence features");
  std::string from, to;
  interp->add_option("--from", from, "first sentence")->required();
  interp->add_option("--to", to, "second sentence")->required();

  auto* evaluate = app.add_subcommand("evaluate", "score hypotheses against references");
  std::string hyp, ref, report_path, method = "inset";
  evaluate->add_option("--hypotheses", hyp, "one generated sentence per line")->required();
  evaluate->add_option("--references", ref, "one reference sentence per line")->required();
  evaluate->add_option("--output", report_path, "report file (default: stdout)");
  evaluate->add_option("--method", method, "row label");

  auto* infill = app.add_subcommand("infill", "generate the missing sentence of a 7-line window");
  std::string input = "-";
  std::vector<std::string> infill_keywords;
  infill->add_option("--input", input, "7 lines with one <MASK> line ('-' for stdin)");
  infill->add_option("--keyword", infill_keywords, "keyword constraint (repeat for two)")->expected(0, 2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    RunConfig cfg;
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    cfg.validate();

    if (dump_config) {
      std::cout << cfg.dump();
      return 0;
    }
    if (app.get_subcommands().empty()) throw UsageError("no subcommand given (see --help)");

    auto& log = std::cerr;
    if (gen->parsed()) pipeline::gen_synthetic(cfg, log);
    if (vocab->parsed()) pipeline::build_vocab(cfg, log);
    if (keywords->parsed()) pipeline::extract_keywords(cfg, log);
    if (train_ae->parsed()) pipeline::train_ae(cfg, log, resume);
    if (precompute->parsed()) pipeline::precompute(cfg, log);
    if (train_planner->parsed()) pipeline::train_planner(cfg, log);
    if (train_kw->parsed()) pipeline::train_kw(cfg, log);
    if (interp->parsed()) {
      for (const auto& line : pipeline::interpolate(cfg, from, to)) std::cout << line << "\n";
    }
    if (evaluate->parsed()) {
      const auto report = pipeline::evaluate(hyp, ref, method);
      if (report_path.empty()) {
        std::cout << report;
      } else {
        std::ofstream(report_path) << report;
      }
    }
    if (infill->parsed()) {
      auto request = pipeline::parse_infill_input(read_input_lines(input));
      request.keywords = infill_keywords;
      const auto models = pipeline::load_models(cfg, !request.keywords.empty());
      Rng rng(mix_seed(cfg.get_u64("seed"), 0x1f11));
      const auto g = pipeline::infill(models, request, pipeline::decode_mode(cfg), &rng);
      std::cout << models.vocab.decode(g.tokens) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kInternal);
  }
}
