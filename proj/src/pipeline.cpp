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


#include "inset/pipeline.hpp"

#include <fstream>
#include <map>
#include <ostream>

#include "inset/checkpoint.hpp"
#include "inset/feature_cache.hpp"
#include "inset/metrics.hpp"
#include "inset/model_io.hpp"
#include "inset/parallel.hpp"
#include "inset/precompute.hpp"

namespace inset::pipeline {

namespace {

// Stream tags for parameter initialisation.
constexpr std::uint64_t kAutoencoderInit = 0xae17;
constexpr std::uint64_t kPlannerInit = 0x9a17;
constexpr std::uint64_t kKeywordInit = 0x4b17;

void require_file(const std::string& path, const std::string& what, const std::string& stage) {
  if (!file_exists(path)) throw DependencyError(what + " " + path + " not found; run " + stage + " first");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DependencyError("cannot open " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Checkpoint new_checkpoint(ModelKind kind, const BlockConfig& block, const Vocabulary& vocab,
                          std::uint64_t seed) {
  Checkpoint c;
  c.kind = kind;
  store_block_config(c, block);
  store_vocab(c, vocab);
  c.config["seed"] = std::to_string(seed);
  return c;
}

Checkpoint load_checked(const std::string& path, ModelKind kind, const std::string& stage) {
  require_file(path, to_string(kind) + " checkpoint", stage);
  auto c = Checkpoint::load(path);
  expect_kind(c, kind);
  return c;
}

SentenceAutoencoder<float> autoencoder_from(const Checkpoint& c) {
  Rng rng(0);
  SentenceAutoencoder<float> model(load_block_config(c), static_cast<int>(parse_int(c.get("vocab_size"), "vocab_size")),
                                   rng);
  load_parameters(c, model.parameters());
  return model;
}

std::vector<TokenSequence> encode_all(const std::vector<std::string>& sentences, const Vocabulary& vocab) {
  std::vector<TokenSequence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    out.push_back(vocab.encode(s));
    check_sentence_length(out.back());
  }
  return out;
}

void append_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::app);
  out << text;
}

}  // namespace

BlockConfig block_config(const RunConfig& cfg) {
  BlockConfig b;
  b.d_model = cfg.get_int("d_model");
  b.heads = cfg.get_int("heads");
  b.layers = cfg.get_int("layers");
  b.ffn = cfg.get_int("ffn");
  b.max_len = cfg.get_int("max_len");
  b.dropout = cfg.get_double("dropout");
  b.validate();
  return b;
}

AutoencoderTrainConfig autoencoder_config(const RunConfig& cfg) {
  AutoencoderTrainConfig c;
  c.batch_size = cfg.get_int("batch_size");
  c.max_steps = cfg.get_int("max_steps");
  c.learning_rate = cfg.get_double("learning_rate");
  c.mask_probability = cfg.get_double("mask_prob");
  c.dropout = cfg.get_double("dropout");
  c.eval_interval = cfg.get_int("eval_interval");
  c.patience = cfg.get_int("patience");
  c.seed = cfg.get_u64("seed");
  return c;
}

PlannerTrainConfig planner_config(const RunConfig& cfg) {
  PlannerTrainConfig c;
  c.batch_size = cfg.get_int("planner_batch_size");
  c.epochs = cfg.get_int("planner_epochs");
  c.learning_rate = cfg.get_double("planner_learning_rate");
  c.dropout = cfg.get_double("dropout");
  c.constraint_probability = cfg.get_double("constraint_probability");
  c.seed = cfg.get_u64("seed");
  return c;
}

ConstraintTrainConfig constraint_config(const RunConfig& cfg) {
  ConstraintTrainConfig c;
  c.batch_size = cfg.get_int("kw_batch_size");
  c.epochs = cfg.get_int("kw_epochs");
  c.learning_rate = cfg.get_double("kw_learning_rate");
  c.dropout = cfg.get_double("dropout");
  c.seed = cfg.get_u64("seed");
  return c;
}

DecodeMode decode_mode(const RunConfig& cfg) {
  const auto& d = cfg.get("decode");
  const int len = cfg.get_int("max_decode_len");
  if (d == "greedy") return DecodeMode::greedy(len);
  if (d == "topk") return DecodeMode::top_k(cfg.get_int("top_k"), len);
  return DecodeMode::beam(cfg.get_int("beam_width"), len);
}

int thread_count(const RunConfig& cfg) {
  const int t = cfg.get_int("threads");
  return t > 0 ? t : worker_count();
}

Corpus load_corpus(const RunConfig& cfg) {
  const auto path = cfg.path("corpus");
  require_file(path, "corpus", "gen-synthetic");
  return filter_corpus(read_corpus(path));
}

Vocabulary load_vocab(const RunConfig& cfg) {
  const auto path = cfg.path("vocab");
  require_file(path, "vocabulary", "build-vocab");
  return Vocabulary::load(path);
}

void gen_synthetic(const RunConfig& cfg, std::ostream& log) {
  const auto style = cfg.get("style") == "rule" ? SyntheticStyle::kRule : SyntheticStyle::kProcedural;
  const auto corpus = gen_synthetic(static_cast<std::size_t>(cfg.get_int("paragraphs")), cfg.get_u64("seed"), style);
  write_corpus(cfg.path("corpus"), corpus);
  log << "gen-synthetic: " << corpus.paragraphs.size() << " paragraphs, " << corpus.sentence_count()
      << " sentences -> " << cfg.path("corpus") << "\n";
}

void build_vocab(const RunConfig& cfg, std::ostream& log) {
  const auto vocab = inset::build_vocab(load_corpus(cfg), cfg.get_int("min_freq"));
  vocab.save(cfg.path("vocab"));
  log << "build-vocab: " << vocab.size() << " tokens -> " << cfg.path("vocab") << "\n";
}

void extract_keywords(const RunConfig& cfg, std::ostream& log) {
  const auto corpus = load_corpus(cfg);
  const auto vocab = load_vocab(cfg);
  const auto stop = load_stop_list(cfg.get("stopwords"));
  const auto sets = extract_all_keywords(corpus, stop, &vocab);
  write_keywords(cfg.path("keywords"), sets);
  log << "extract-keywords: " << sets.size() << " sentences -> " << cfg.path("keywords") << "\n";
}

TrainSummary train_ae(const RunConfig& cfg, std::ostream& log, bool resume) {
  const auto corpus = load_corpus(cfg);
  const auto vocab = load_vocab(cfg);
  const auto all = encode_all(corpus.sentences(), vocab);
  const std::size_t every = static_cast<std::size_t>(cfg.get_int("validation_every"));
  std::vector<TokenSequence> train, validation;
  for (std::size_t i = 0; i < all.size(); ++i) (i % every == every - 1 ? validation : train).push_back(all[i]);

  const auto block = block_config(cfg);
  const auto seed = cfg.get_u64("seed");
  Rng init(mix_seed(seed, kAutoencoderInit));
  SentenceAutoencoder<float> model(block, vocab.size(), init);
  AutoencoderTrainer<float> trainer(model, train, validation, autoencoder_config(cfg));
  const auto params = model.parameters();
  const auto last_path = cfg.path("ae_checkpoint") + ".last";
  const auto samples_path = cfg.path("samples");

  if (resume) {
    const auto last = load_checked(last_path, ModelKind::kAutoencoder, "train-ae");
    verify_vocab(last, vocab);
    load_parameters(last, params);
    load_optimizer(last, trainer.optimizer(), params);
    trainer.set_step_count(static_cast<int>(parse_int(last.get("step"), "step")));
    log << "train-ae: resuming at step " << trainer.step_count() << "\n";
  } else {
    write_file_bytes(samples_path, {});
  }

  const TokenSequence& probe_a = validation.empty() ? train.front() : validation.front();
  const TokenSequence& probe_b = validation.size() > 1 ? validation[1] : train.back();
  auto on_checkpoint = [&](int step, const SentenceAutoencoder<float>& m) {
    auto c = new_checkpoint(ModelKind::kAutoencoder, block, vocab, seed);
    c.config["step"] = std::to_string(step);
    store_parameters(c, params);
    store_optimizer(c, trainer.optimizer(), params);
    c.save(last_path);
    std::string text = "# step " + std::to_string(step) + "\n";
    text += "0\t" + vocab.decode(probe_a) + "\n";
    for (const auto& g : inset::interpolate(m, probe_a, probe_b, 3, DecodeMode::greedy()))
      text += "~\t" + vocab.decode(g.tokens) + "\n";
    text += "1\t" + vocab.decode(probe_b) + "\n";
    append_text(samples_path, text);
    log << "train-ae: step " << step << " validation loss " << trainer.validation_loss() << "\n";
  };
  const auto summary = trainer.run(on_checkpoint);

  auto c = new_checkpoint(ModelKind::kAutoencoder, block, vocab, seed);
  c.config["step"] = std::to_string(summary.best_step);
  store_parameters(c, params);
  c.save(cfg.path("ae_checkpoint"));
  log << "train-ae: best step " << summary.best_step << " validation loss " << summary.best_validation_loss
      << (summary.stopped_early ? " (stopped early)" : "") << " -> " << cfg.path("ae_checkpoint") << "\n";
  return summary;
}

void precompute(const RunConfig& cfg, std::ostream& log) {
  const auto corpus = load_corpus(cfg);
  const auto vocab = load_vocab(cfg);
  const auto ckpt = load_checked(cfg.path("ae_checkpoint"), ModelKind::kAutoencoder, "train-ae");
  verify_vocab(ckpt, vocab);
  const auto model = autoencoder_from(ckpt);
  const auto sentences = encode_all(corpus.sentences(), vocab);
  const int threads = thread_count(cfg);
  const auto cache = precompute_features(sentences, model, ckpt.digest(), threads);
  cache.save(cfg.path("features"));
  log << "precompute: " << cache.size() << " x " << cache.dimension() << " features -> " << cfg.path("features")
      << "\n";

  const auto kw_path = cfg.path("kw_checkpoint");
  const auto keywords_path = cfg.path("keywords");
  if (!file_exists(kw_path) || !file_exists(keywords_path)) return;
  const auto kw = load_checked(kw_path, ModelKind::kKeyword, "train-kw");
  verify_vocab(kw, vocab);
  Rng rng(0);
  ConstraintEncoder<float> encoder(load_block_config(kw), vocab.size(), rng);
  load_parameters(kw, encoder.parameters());
  std::vector<std::vector<std::string>> words(sentences.size());
  for (auto& ks : read_keywords(keywords_path))
    if (ks.sentence_id < words.size()) words[ks.sentence_id] = std::move(ks.words);
  std::vector<std::vector<float>> rows(sentences.size());
  parallel_for(sentences.size(), threads, [&](std::size_t i) {
    const auto f = encoder.encode(keyword_ids(words[i], vocab));
    rows[i].assign(f.data(), f.data() + f.size());
  });
  FeatureCache kw_cache(encoder.config().d_model, kw.digest());
  for (const auto& r : rows) kw_cache.append(r);
  kw_cache.save(cfg.path("kw_features"));
  log << "precompute: keyword features -> " << cfg.path("kw_features") << "\n";
}

std::vector<PlannerEpoch> train_planner(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.path("features"), "feature cache", "precompute");
  const auto ae = load_checked(cfg.path("ae_checkpoint"), ModelKind::kAutoencoder, "train-ae");
  const auto ae_digest = ae.digest();
  const auto cache = FeatureCache::load(cfg.path("features"), &ae_digest);
  const auto corpus = load_corpus(cfg);
  if (cache.size() != corpus.sentence_count()) {
    throw FormatError("feature cache holds " + std::to_string(cache.size()) + " sentences but the corpus has " +
                      std::to_string(corpus.sentence_count()) + "; rerun precompute");
  }

  std::vector<ParagraphWindow> train, validation;
  const auto offsets = corpus.paragraph_offsets();
  const std::size_t every = static_cast<std::size_t>(cfg.get_int("validation_every"));
  for (std::size_t p = 0; p < corpus.paragraphs.size(); ++p) {
    std::vector<std::size_t> ids(corpus.paragraphs[p].size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = offsets[p] + i;
    auto& dest = p % every == every - 1 ? validation : train;
    for (const auto& w : make_windows(ids)) dest.push_back(w);
  }

  std::optional<FeatureCache> kw_cache;
  const auto pcfg = planner_config(cfg);
  if (pcfg.constraint_probability > 0.0 && file_exists(cfg.path("kw_features")) &&
      file_exists(cfg.path("kw_checkpoint"))) {
    const auto kw_digest = Checkpoint::load(cfg.path("kw_checkpoint")).digest();
    kw_cache = FeatureCache::load(cfg.path("kw_features"), &kw_digest);
    log << "train-planner: mixing keyword features into " << pcfg.constraint_probability
        << " of windows\n";
  }

  const auto block = load_block_config(ae);
  Rng init(mix_seed(pcfg.seed, kPlannerInit));
  LatentPlanner<float> planner(block, init);
  PlannerTrainer<float> trainer(planner, cache, train, pcfg, kw_cache ? &*kw_cache : nullptr);
  const auto history = trainer.run(validation, [&](const PlannerEpoch& rec) {
    log << "train-planner: epoch " << rec.epoch << " steps " << rec.steps << " train " << rec.train_loss
        << " validation " << rec.validation_loss << "\n";
  });
  const auto params = planner.parameters();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& rec : history) best = std::min(best, rec.validation_loss);

  Checkpoint c;
  c.kind = ModelKind::kPlanner;
  store_block_config(c, block);
  c.config["vocab_size"] = ae.get("vocab_size");
  c.config["vocab_checksum"] = ae.get("vocab_checksum");
  c.config["seed"] = std::to_string(pcfg.seed);
  c.config["features_checksum"] = to_hex(ae_digest);
  c.config["keyword_features"] = kw_cache ? "1" : "0";
  store_parameters(c, params);
  c.save(cfg.path("planner_checkpoint"));
  log << "train-planner: best validation loss " << best << " -> " << cfg.path("planner_checkpoint") << "\n";
  return history;
}

std::vector<ConstraintEpoch> train_kw(const RunConfig& cfg, std::ostream& log) {
  const auto corpus = load_corpus(cfg);
  const auto vocab = load_vocab(cfg);
  require_file(cfg.path("keywords"), "keyword file", "extract-keywords");
  const auto ae = load_checked(cfg.path("ae_checkpoint"), ModelKind::kAutoencoder, "train-ae");
  verify_vocab(ae, vocab);
  const auto teacher = autoencoder_from(ae);
  const auto sentences = encode_all(corpus.sentences(), vocab);

  std::vector<KeywordSet> train_sets, validation_sets;
  const std::size_t every = static_cast<std::size_t>(cfg.get_int("validation_every"));
  for (auto& ks : read_keywords(cfg.path("keywords"))) {
    if (ks.words.empty()) continue;
    (ks.sentence_id % every == every - 1 ? validation_sets : train_sets).push_back(std::move(ks));
  }
  auto train = make_distill_pairs(teacher, sentences, train_sets, vocab);
  const auto validation = make_distill_pairs(teacher, sentences, validation_sets, vocab);

  const auto kcfg = constraint_config(cfg);
  const auto block = load_block_config(ae);
  Rng init(mix_seed(kcfg.seed, kKeywordInit));
  ConstraintEncoder<float> encoder(block, vocab.size(), init);
  ConstraintTrainer<float> trainer(encoder, std::move(train), kcfg);
  const auto history = trainer.run(validation);
  for (const auto& rec : history) {
    log << "train-kw: epoch " << rec.epoch << " train " << rec.train_loss << " validation " << rec.validation_loss
        << "\n";
  }

  auto c = new_checkpoint(ModelKind::kKeyword, block, vocab, kcfg.seed);
  c.config["teacher_checksum"] = to_hex(ae.digest());
  store_parameters(c, encoder.parameters());
  c.save(cfg.path("kw_checkpoint"));
  log << "train-kw: -> " << cfg.path("kw_checkpoint") << "\n";
  return history;
}

std::vector<std::string> interpolate(const RunConfig& cfg, const std::string& a, const std::string& b) {
  const auto vocab = load_vocab(cfg);
  const auto ckpt = load_checked(cfg.path("ae_checkpoint"), ModelKind::kAutoencoder, "train-ae");
  verify_vocab(ckpt, vocab);
  const auto model = autoencoder_from(ckpt);
  const auto sa = vocab.encode(a);
  const auto sb = vocab.encode(b);
  check_sentence_length(sa);
  check_sentence_length(sb);
  const int steps = cfg.get_int("interpolation_steps");
  const auto gens = inset::interpolate(model, sa, sb, steps, decode_mode(cfg));
  std::vector<std::string> out;
  for (int i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i + 1) / static_cast<double>(steps + 1);
    out.push_back(format_double(t) + "\t" + vocab.decode(gens[i].tokens));
  }
  return out;
}

std::string evaluate(const std::string& hypotheses, const std::string& references, const std::string& method) {
  const auto corpus = make_eval_corpus(read_lines(hypotheses), read_lines(references));
  return format_report({evaluate_all(corpus, method), evaluate_references(corpus)});
}

Models load_models(const RunConfig& cfg, bool with_keywords) {
  auto vocab = load_vocab(cfg);
  const auto ae = load_checked(cfg.path("ae_checkpoint"), ModelKind::kAutoencoder, "train-ae");
  verify_vocab(ae, vocab);
  const auto pl = load_checked(cfg.path("planner_checkpoint"), ModelKind::kPlanner, "train-planner");
  verify_vocab(pl, vocab);
  if (pl.get("features_checksum") != to_hex(ae.digest())) {
    throw ChecksumError("planner was trained on features of a different autoencoder checkpoint; rerun precompute "
                        "and train-planner");
  }
  Rng rng(0);
  Models m{std::move(vocab), autoencoder_from(ae), LatentPlanner<float>(load_block_config(pl), rng), std::nullopt};
  load_parameters(pl, m.planner.parameters());
  if (with_keywords) {
    const auto kw = load_checked(cfg.path("kw_checkpoint"), ModelKind::kKeyword, "train-kw");
    verify_vocab(kw, m.vocab);
    m.keywords.emplace(load_block_config(kw), m.vocab.size(), rng);
    load_parameters(kw, m.keywords->parameters());
  }
  return m;
}

InfillRequest parse_infill_input(const std::vector<std::string>& lines) {
  std::vector<std::string> body = lines;
  while (!body.empty() && body.back().find_first_not_of(" \t\r") == std::string::npos) body.pop_back();
  if (body.size() != static_cast<std::size_t>(kWindowSize)) {
    throw UsageError("infill: expected 7 lines (6 sentences and one " + std::string(kSlotMarker) + "), got " +
                     std::to_string(body.size()));
  }
  InfillRequest req;
  int markers = 0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const auto b = body[i].find_first_not_of(" \t\r");
    const auto e = body[i].find_last_not_of(" \t\r");
    const std::string line = b == std::string::npos ? "" : body[i].substr(b, e - b + 1);
    if (line == kSlotMarker) {
      ++markers;
      req.missing = static_cast<int>(i) + 1;
    } else if (next < req.context.size()) {
      req.context[next++] = line;
    }
  }
  if (markers != 1) {
    throw UsageError("infill: expected exactly one " + std::string(kSlotMarker) + " line, found " +
                     std::to_string(markers));
  }
  return req;
}

RowVector<float> plan(const Models& models, const InfillRequest& request) {
  std::vector<RowVector<float>> context;
  for (const auto& s : request.context) {
    const auto seq = models.vocab.encode(s);
    check_sentence_length(seq);
    context.push_back(models.autoencoder.encode(seq));
  }
  std::optional<RowVector<float>> constraint;
  if (!request.keywords.empty()) {
    if (!models.keywords) throw ContractError("infill: keywords given but no keyword encoder loaded");
    constraint = models.keywords->encode(keyword_ids(request.keywords, models.vocab));
  }
  return models.planner.predict(assemble<float>(context, request.missing, constraint));
}

Generation infill(const Models& models, const InfillRequest& request, const DecodeMode& mode, Rng* rng) {
  return models.autoencoder.generate(plan(models, request), mode, rng);
}

}  // namespace inset::pipeline
