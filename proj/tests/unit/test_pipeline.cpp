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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "inset/checkpoint.hpp"
#include "inset/feature_cache.hpp"
#include "inset/pipeline.hpp"

using namespace inset;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "inset_pipeline_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig tiny_config(const fs::path& dir) {
  RunConfig cfg;
  cfg.set("work_dir", dir.string());
  cfg.set("paragraphs", "12");
  cfg.set("d_model", "16");
  cfg.set("heads", "2");
  cfg.set("layers", "1");
  cfg.set("ffn", "32");
  cfg.set("max_steps", "20");
  cfg.set("eval_interval", "10");
  cfg.set("batch_size", "4");
  cfg.set("planner_epochs", "2");
  cfg.set("kw_epochs", "2");
  cfg.set("validation_every", "4");
  return cfg;
}

std::string file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(INSET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config defaults, overrides and validation") {
  RunConfig cfg;
  CHECK(cfg.get_int("d_model") == 64);
  CHECK(cfg.get_double("learning_rate") == 1e-4);
  CHECK(cfg.get("decode") == "beam");
  CHECK(cfg.get_int("beam_width") == 5);
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(cfg.set("no_such_key", "1"), UsageError);
  CHECK_THROWS_AS(cfg.get("no_such_key"), UsageError);
  cfg.set("work_dir", "w");
  CHECK(cfg.path("vocab") == (fs::path("w") / "vocab.txt").string());
  cfg.set("vocab", "/x/v.txt");
  CHECK(cfg.path("vocab") == "/x/v.txt");

  for (auto [key, value] : std::vector<std::pair<std::string, std::string>>{
           {"mask_prob", "1.5"}, {"beam_width", "0"}, {"dropout", "1"}, {"max_decode_len", "40"},
           {"style", "poetry"}, {"decode", "sample"}, {"d_model", "many"}}) {
    RunConfig bad;
    bad.set(key, value);
    INFO(key << "=" << value);
    CHECK_THROWS_AS(bad.validate(), UsageError);
  }
}

TEST_CASE("config dump reloads to the same values") {
  const auto dir = fresh_dir("config");
  RunConfig cfg;
  cfg.set("seed", "42");
  cfg.set("top_k", "3");
  const auto path = (dir / "run.cfg").string();
  std::ofstream(path) << "# comment\n" << cfg.dump();
  RunConfig back;
  back.load_file(path);
  CHECK(back.dump() == cfg.dump());
  std::ofstream(path) << "seed 3\n";
  CHECK_THROWS_AS(back.load_file(path), UsageError);
}

TEST_CASE("infill input parsing") {
  std::vector<std::string> lines{"a", "b", "c", "<MASK>", "e", "f", "g", "", ""};
  const auto req = pipeline::parse_infill_input(lines);
  CHECK(req.missing == 4);
  CHECK(req.context[3] == "e");
  lines[0] = "<MASK>";
  CHECK_THROWS_AS(pipeline::parse_infill_input(lines), UsageError);
  CHECK_THROWS_AS(pipeline::parse_infill_input({"a", "b", "<MASK>"}), UsageError);
  CHECK_THROWS_AS(pipeline::parse_infill_input({"a", "b", "c", "d", "e", "f", "g"}), UsageError);
  const auto first = pipeline::parse_infill_input({"<MASK>", "b", "c", "d", "e", "f", "g"});
  CHECK(first.missing == 1);
}

TEST_CASE("stages name the stage that must run first") {
  const auto dir = fresh_dir("deps");
  const auto cfg = tiny_config(dir);
  std::ostringstream log;
  auto message = [&](auto&& fn) -> std::string {
    try {
      fn();
    } catch (const DependencyError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message([&] { pipeline::build_vocab(cfg, log); }).find("gen-synthetic") != std::string::npos);
  pipeline::gen_synthetic(cfg, log);
  CHECK(message([&] { pipeline::train_ae(cfg, log); }).find("build-vocab") != std::string::npos);
  pipeline::build_vocab(cfg, log);
  CHECK(message([&] { pipeline::precompute(cfg, log); }).find("train-ae") != std::string::npos);
  CHECK(message([&] { pipeline::train_planner(cfg, log); }).find("precompute") != std::string::npos);
}

TEST_CASE("end-to-end pipeline on a tiny corpus") {
  const auto dir = fresh_dir("e2e");
  auto cfg = tiny_config(dir);
  std::ostringstream log;
  pipeline::gen_synthetic(cfg, log);
  pipeline::build_vocab(cfg, log);
  pipeline::extract_keywords(cfg, log);
  const auto corpus_before = file_text(cfg.path("corpus"));

  const auto summary = pipeline::train_ae(cfg, log);
  CHECK(summary.steps_run == 20);
  CHECK(fs::exists(cfg.path("ae_checkpoint")));
  CHECK(fs::exists(cfg.path("ae_checkpoint") + ".last"));
  CHECK(fs::file_size(cfg.path("samples")) > 0);

  pipeline::train_kw(cfg, log);
  pipeline::precompute(cfg, log);
  const auto features = file_text(cfg.path("features"));
  const auto kw_features = file_text(cfg.path("kw_features"));
  pipeline::precompute(cfg, log);
  CHECK(file_text(cfg.path("features")) == features);
  CHECK(file_text(cfg.path("kw_features")) == kw_features);
  const auto ae = Checkpoint::load(cfg.path("ae_checkpoint"));
  const Digest digest = ae.digest();
  CHECK(FeatureCache::load(cfg.path("features"), &digest).size() ==
        pipeline::load_corpus(cfg).sentence_count());

  const auto epochs = pipeline::train_planner(cfg, log);
  CHECK(epochs.size() == 2);
  CHECK(file_text(cfg.path("corpus")) == corpus_before);

  const auto models = pipeline::load_models(cfg, true);
  const auto corpus = pipeline::load_corpus(cfg);
  pipeline::InfillRequest req;
  const auto& p = corpus.paragraphs.front();
  for (int i = 0, k = 0; i < 7; ++i)
    if (i != 3) req.context[k++] = p[i];
  const auto beam = pipeline::infill(models, req, pipeline::decode_mode(cfg));
  CHECK(beam.tokens.size() <= 32);
  CHECK(pipeline::infill(models, req, pipeline::decode_mode(cfg)).tokens == beam.tokens);
  req.keywords = {"step"};
  CHECK_NOTHROW(pipeline::infill(models, req, DecodeMode::greedy()));
  req.keywords = {"zebra"};
  CHECK_THROWS_AS(pipeline::infill(models, req, DecodeMode::greedy()), IndexError);

  const auto lines = pipeline::interpolate(cfg, p[0], p[1]);
  CHECK(lines.size() == 4);

  SUBCASE("a retrained autoencoder invalidates the planner's features") {
    cfg.set("seed", "2");
    pipeline::train_ae(cfg, log);
    CHECK_THROWS_AS(pipeline::load_models(cfg, false), ChecksumError);
    CHECK_THROWS_AS(pipeline::train_planner(cfg, log), ChecksumError);
  }
}

TEST_CASE("training runs are reproducible and resumable") {
  const auto a = fresh_dir("repro_a");
  const auto b = fresh_dir("repro_b");
  std::ostringstream log;
  for (const auto& dir : {a, b}) {
    auto cfg = tiny_config(dir);
    pipeline::gen_synthetic(cfg, log);
    pipeline::build_vocab(cfg, log);
    if (dir == b) {
      cfg.set("max_steps", "10");
      pipeline::train_ae(cfg, log);
      cfg.set("max_steps", "20");
      pipeline::train_ae(cfg, log, true);
    } else {
      pipeline::train_ae(cfg, log);
    }
  }
  CHECK(file_text((a / "ae.ckpt.last").string()) == file_text((b / "ae.ckpt.last").string()));
  CHECK(file_text((a / "corpus.txt").string()) == file_text((b / "corpus.txt").string()));
}

TEST_CASE("command-line exit codes") {
  const auto dir = fresh_dir("cli");
  const std::string wd = " --work-dir " + dir.string();
  CHECK(run_cli("--dump-config") == 0);
  CHECK(run_cli("no-such-command") == 2);
  CHECK(run_cli("--beam-width 0 gen-synthetic" + wd) == 2);
  CHECK(run_cli("train-planner" + wd) == 4);
  CHECK(run_cli("gen-synthetic --paragraphs 8" + wd) == 0);
  {
    std::ofstream corrupt((dir / "vocab.txt").string());
    corrupt << "not a vocabulary\n";
  }
  CHECK(run_cli("train-ae --max-steps 1" + wd) == 3);
  CHECK(run_cli("evaluate --hypotheses " + (dir / "corpus.txt").string() + " --references " +
                (dir / "missing.txt").string()) == 4);
}
