// Copyright 2026 The closedie Authors.
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

// Command-line driver for the dataset, target, decoding and scoring stages.
// Every command writes its outputs plus a JSON manifest describing the run.
// Exit status: 0 on success, 2 on usage errors, 1 on data errors with a
// single-line JSON error on stderr.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "closedie/channel.h"
#include "closedie/decode.h"
#include "closedie/errors.h"
#include "closedie/eval.h"
#include "closedie/kb.h"
#include "closedie/linearize.h"
#include "closedie/pipeline.h"
#include "closedie/records.h"
#include "closedie/scorers.h"
#include "closedie/tokenizer.h"
#include "closedie/trie.h"
#include "closedie/util.h"
#include "json.hpp"

namespace closedie {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Flags {
  std::string kb_entities;
  std::string kb_relations;
  std::string kb_triples;
  std::string input;
  std::string output;
  std::string out_dir;
  std::string manifest;
  std::string templates;
  std::string scorer = "mock";
  std::string mock_train;
  std::string mode;
  std::string predictions;
  std::string gold;
  std::string split = "90,5,5";
  double threshold = 0.7;
  double neg_fraction = 0.5;
  double eos_bias = 0.0;
  double nli_default = 0.0;
  uint64_t seed = 0;
  size_t beam = 4;
  size_t max_len = 256;
  size_t min_words = 10;
  size_t max_in_flight = 4;
  int mock_order = 4;
  uint32_t mock_memorize = 1000000;
  bool no_years = false;
  bool record_timings = false;
};

// Error raised while validating flag values; reported as a usage error.
class UsageError : public Error {
 public:
  using Error::Error;
};

class Manifest {
 public:
  explicit Manifest(const std::string &command) {
    j_["command"] = command;
    j_["config"] = json::object();
    j_["inputs"] = json::object();
    j_["outputs"] = json::object();
    j_["counts"] = json::object();
  }

  json &config() { return j_["config"]; }
  void Input(const std::string &name, const std::string &path) {
    j_["inputs"][name] = path;
  }
  void Output(const std::string &name, const std::string &path) {
    j_["outputs"][name] = path;
  }
  void Count(const std::string &name, size_t n) { j_["counts"][name] = n; }

  void Write(const std::string &path, double seconds, bool with_timing) {
    json out = j_;
    if (with_timing) out["seconds"] = seconds;
    WriteFile(path, out.dump(2) + "\n");
  }

 private:
  json j_;
};

void RequireFlag(const std::string &value, const char *name) {
  if (value.empty()) throw UsageError(std::string("missing required flag ") + name);
}

KbStore LoadKb(const Flags &f, Manifest &m) {
  RequireFlag(f.kb_entities, "--kb-entities");
  RequireFlag(f.kb_relations, "--kb-relations");
  RequireFlag(f.kb_triples, "--kb-triples");
  m.Input("kb_entities", f.kb_entities);
  m.Input("kb_relations", f.kb_relations);
  m.Input("kb_triples", f.kb_triples);
  return KbStore::Load(f.kb_entities, f.kb_relations, f.kb_triples);
}

std::array<double, 3> ParseSplit(const std::string &text) {
  auto parts = Split(text, ',');
  if (parts.size() != 3) throw UsageError("--split needs three comma-separated values");
  std::array<double, 3> r;
  double sum = 0.0;
  for (size_t i = 0; i < 3; ++i) {
    try {
      r[i] = std::stod(std::string(Trim(parts[i])));
    } catch (const std::exception &) {
      throw UsageError("bad --split value " + text);
    }
    sum += r[i];
  }
  // Accept both percentages and fractions.
  if (sum > 1.5) {
    for (double &x : r) x /= 100.0;
  }
  return r;
}

std::string DefaultManifest(const Flags &f) {
  if (!f.manifest.empty()) return f.manifest;
  if (!f.out_dir.empty()) return (fs::path(f.out_dir) / "manifest.json").string();
  return f.output + ".manifest.json";
}

size_t CountTriples(const std::vector<DatasetRecord> &records) {
  size_t n = 0;
  for (const DatasetRecord &r : records) n += r.triples.size();
  return n;
}

void CmdBuildKb(const Flags &f, Manifest &m) {
  KbStore kb = LoadKb(f, m);
  json summary;
  summary["entities"] = kb.num_entities();
  summary["relations"] = kb.num_relations();
  summary["triples"] = kb.num_triples();
  summary["pairs"] = kb.num_pairs();
  RequireFlag(f.output, "--output");
  WriteFile(f.output, summary.dump(2) + "\n");
  m.Output("summary", f.output);
  m.Count("entities", kb.num_entities());
  m.Count("relations", kb.num_relations());
  m.Count("triples", kb.num_triples());
}

void CmdBuildTrie(const Flags &f, Manifest &m) {
  KbStore kb = LoadKb(f, m);
  RequireFlag(f.out_dir, "--out-dir");
  m.config()["include_years"] = !f.no_years;
  ByteTokenizer tok;
  KbTries tries = BuildKbTries(kb, tok, !f.no_years);
  fs::create_directories(f.out_dir);
  const std::pair<const char *, const ConstraintTrie *> files[] = {
      {"entity", &tries.entity},
      {"relation", &tries.relation},
      {"object", &tries.object},
  };
  for (const auto &[name, trie] : files) {
    std::string path = (fs::path(f.out_dir) / (std::string(name) + ".tri")).string();
    trie->Save(path);
    m.Output(name, path);
    m.Count(std::string(name) + "_nodes", trie->num_nodes());
    m.Count(std::string(name) + "_labels", trie->num_sequences());
  }
}

void CmdExtract(const Flags &f, Manifest &m) {
  KbStore kb = LoadKb(f, m);
  RequireFlag(f.input, "--input");
  RequireFlag(f.output, "--output");
  m.Input("sentences", f.input);
  m.config()["min_words"] = f.min_words;
  std::vector<DatasetRecord> in = ReadLinkedSentences(f.input);
  std::vector<DatasetRecord> out;
  for (DatasetRecord &r : in) {
    if (!LongEnough(r.sentence.text, f.min_words)) continue;
    r.triples = ExtractDsTriples(r.sentence, kb);
    out.push_back(std::move(r));
  }
  WriteDataset(f.output, out);
  m.Output("dataset", f.output);
  m.Count("sentences_read", in.size());
  m.Count("sentences_kept", out.size());
  m.Count("triples", CountTriples(out));
}

std::unique_ptr<NliScorer> MakeNliScorer(const Flags &f) {
  if (f.scorer.rfind("table:", 0) == 0) {
    return std::make_unique<TableNliScorer>(
        TableNliScorer::Load(f.scorer.substr(6), f.nli_default));
  }
  auto channel = OpenChannel(f.scorer);
  if (!channel) {
    throw UsageError("--scorer for filter must be table:<path>, exec:<cmd> or tcp:<addr>");
  }
  return std::make_unique<ExternalNliScorer>(std::move(channel));
}

void CmdFilter(const Flags &f, Manifest &m) {
  KbStore kb = LoadKb(f, m);
  RequireFlag(f.input, "--input");
  RequireFlag(f.output, "--output");
  m.Input("dataset", f.input);
  m.config()["threshold"] = f.threshold;
  m.config()["scorer"] = f.scorer;
  HypothesisTemplates templates;
  if (!f.templates.empty()) {
    templates = HypothesisTemplates::Load(f.templates);
    m.Input("templates", f.templates);
  }
  auto scorer = MakeNliScorer(f);
  std::vector<DatasetRecord> records = ReadDataset(f.input);
  size_t before = CountTriples(records);
  FilterCorpus(records, templates, kb, *scorer, f.threshold, f.max_in_flight);
  WriteDataset(f.output, records);
  m.Output("dataset", f.output);
  m.Count("records", records.size());
  m.Count("triples_in", before);
  m.Count("triples_kept", CountTriples(records));
}

void CmdNegatives(const Flags &f, Manifest &m) {
  RequireFlag(f.input, "--input");
  RequireFlag(f.output, "--output");
  m.Input("dataset", f.input);
  m.config()["neg_fraction"] = f.neg_fraction;
  m.config()["seed"] = f.seed;
  std::vector<DatasetRecord> records = ReadDataset(f.input);
  NegativeSample report;
  std::vector<DatasetRecord> out =
      AssembleBalanced(records, f.neg_fraction, f.seed, &report);
  WriteDataset(f.output, out);
  m.Output("dataset", f.output);
  m.Count("records", out.size());
  m.Count("positives", out.size() - report.indices.size());
  m.Count("negatives", report.indices.size());
  m.Count("few_entities", report.few_entities);
  m.Count("unrelated_entities", report.unrelated_entities);
  m.config()["backfilled"] = report.backfilled;
}

void CmdSplit(const Flags &f, Manifest &m) {
  RequireFlag(f.input, "--input");
  RequireFlag(f.out_dir, "--out-dir");
  m.Input("dataset", f.input);
  std::array<double, 3> ratios = ParseSplit(f.split);
  m.config()["split"] = ratios;
  m.config()["seed"] = f.seed;
  std::vector<DatasetRecord> records = ReadDataset(f.input);
  DatasetSplit split = SplitDataset(records, ratios, f.seed);
  fs::create_directories(f.out_dir);
  const std::pair<const char *, const std::vector<DatasetRecord> *> parts[] = {
      {"train", &split.train},
      {"validation", &split.validation},
      {"test", &split.test},
  };
  for (const auto &[name, part] : parts) {
    std::string path = (fs::path(f.out_dir) / (std::string(name) + ".jsonl")).string();
    WriteDataset(path, *part);
    m.Output(name, path);
    m.Count(name, part->size());
  }
}

void CmdTargets(const Flags &f, Manifest &m) {
  KbStore kb = LoadKb(f, m);
  RequireFlag(f.input, "--input");
  RequireFlag(f.output, "--output");
  const std::string mode = f.mode.empty() ? "linearized" : f.mode;
  if (mode != "linearized" && mode != "entity-prompt" &&
      mode != "artificial-prompt" && mode != "2lm-heads") {
    throw UsageError("unknown --mode " + mode);
  }
  m.Input("dataset", f.input);
  m.config()["mode"] = mode;
  m.config()["seed"] = f.seed;
  std::vector<DatasetRecord> records = ReadDataset(f.input);
  std::string out;
  size_t n = 0;
  std::vector<TrainingInstance> prompted;
  for (const DatasetRecord &r : records) {
    std::vector<Triple> ordered = OrderTriples(r.triples, r.sentence);
    std::string lin = Linearize(ordered, kb).text;
    if (mode == "linearized") {
      out += TrainingInstanceToJson({r.sentence.text, lin}) + "\n";
      ++n;
    } else if (mode == "entity-prompt") {
      out += TrainingInstanceToJson(
                 {r.sentence.text, BuildEntityPromptTarget(r.sentence, ordered, kb).text}) +
             "\n";
      ++n;
    } else if (mode == "artificial-prompt") {
      auto [el, tri] = BuildArtificialPromptInstances(
          r.sentence, BuildElChain(r.sentence, ordered, kb), lin);
      prompted.push_back(std::move(el));
      prompted.push_back(std::move(tri));
    } else {
      out += DualTargetInstanceToJson(BuildDualTargetInstance(
                 r.sentence, BuildElChain(r.sentence, ordered, kb), lin)) +
             "\n";
      ++n;
    }
  }
  if (mode == "artificial-prompt") {
    ShuffleInstances(prompted, f.seed);
    for (const TrainingInstance &t : prompted) out += TrainingInstanceToJson(t) + "\n";
    n = prompted.size();
  }
  WriteFile(f.output, out);
  m.Output("instances", f.output);
  m.Count("records", records.size());
  m.Count("instances", n);
}

std::unique_ptr<TokenScorer> MakeTokenScorer(const Flags &f, const KbStore &kb,
                                             const Tokenizer &tok, Manifest &m) {
  if (f.scorer == "mock") {
    auto mock = std::make_unique<MockNgramScorer>(tok, f.mock_order, f.eos_bias,
                                                  f.mock_memorize);
    m.config()["mock_order"] = f.mock_order;
    m.config()["eos_bias"] = f.eos_bias;
    m.config()["mock_memorize"] = f.mock_memorize;
    if (!f.mock_train.empty()) {
      m.Input("mock_train", f.mock_train);
      std::vector<std::pair<std::string, std::string>> pairs;
      for (const DatasetRecord &r : ReadDataset(f.mock_train)) {
        pairs.emplace_back(r.sentence.text,
                           Linearize(OrderTriples(r.triples, r.sentence), kb).text);
      }
      mock->Fit(pairs);
    }
    return mock;
  }
  auto channel = OpenChannel(f.scorer);
  if (!channel) throw UsageError("--scorer must be mock, exec:<cmd> or tcp:<addr>");
  return std::make_unique<ExternalTokenScorer>(std::move(channel));
}

void CmdDecode(const Flags &f, Manifest &m) {
  KbStore kb = LoadKb(f, m);
  RequireFlag(f.input, "--input");
  RequireFlag(f.output, "--output");
  if (f.beam == 0) throw UsageError("--beam must be at least 1");
  BeamOptions options;
  try {
    options.mode = ParseDecodeMode(f.mode.empty() ? "constrained" : f.mode);
  } catch (const ConfigError &e) {
    throw UsageError(e.what());
  }
  options.beam_size = f.beam;
  options.max_len = f.max_len;
  m.Input("dataset", f.input);
  m.config()["mode"] = f.mode.empty() ? "constrained" : f.mode;
  m.config()["beam"] = f.beam;
  m.config()["max_len"] = f.max_len;
  m.config()["scorer"] = f.scorer;

  ByteTokenizer tok;
  KbTries tries = BuildKbTries(kb, tok, !f.no_years);
  Constraints constraints(tries, tok);
  auto scorer = MakeTokenScorer(f, kb, tok, m);

  std::vector<DatasetRecord> records = ReadDataset(f.input);
  std::vector<Prediction> predictions;
  size_t empty = 0;
  for (const DatasetRecord &r : records) {
    scorer->SetSource(r.sentence.text);
    auto hyps = BeamSearch(*scorer, tok, &constraints, options);
    std::string text = HypothesisText(hyps.front(), tok);
    if (text.empty()) ++empty;
    predictions.push_back({r.id, std::move(text)});
  }
  WritePredictions(f.output, predictions);
  m.Output("predictions", f.output);
  m.Count("instances", predictions.size());
  m.Count("empty_outputs", empty);
}

void CmdScore(const Flags &f, Manifest &m) {
  KbStore kb = LoadKb(f, m);
  RequireFlag(f.predictions, "--predictions");
  RequireFlag(f.gold, "--gold");
  RequireFlag(f.output, "--output");
  m.Input("predictions", f.predictions);
  m.Input("gold", f.gold);
  EvalReport report =
      ScorePredictionFile(ReadPredictions(f.predictions), ReadDataset(f.gold), kb);
  WriteFile(f.output, report.ToJson() + "\n");
  std::cout << report.ToTable();
  m.Output("report", f.output);
  m.Count("n_pos", report.counts.n_pos);
  m.Count("n_neg", report.counts.n_neg);
}

void PrintError(const std::string &stage, const std::string &kind,
                const std::string &message) {
  json e;
  e["error"] = kind;
  e["stage"] = stage;
  e["message"] = message;
  std::cerr << e.dump() << std::endl;
}

const char *ErrorKind(const std::exception &e) {
  if (dynamic_cast<const LoadError *>(&e)) return "load";
  if (dynamic_cast<const IntegrityError *>(&e)) return "integrity";
  if (dynamic_cast<const ResolveError *>(&e)) return "resolve";
  if (dynamic_cast<const ConstraintViolation *>(&e)) return "constraint";
  if (dynamic_cast<const DecodeFailure *>(&e)) return "decode";
  if (dynamic_cast<const ScorerError *>(&e)) return "scorer";
  if (dynamic_cast<const ConfigError *>(&e)) return "config";
  return "error";
}

int Main(int argc, char **argv) {
  Flags f;
  CLI::App app{"Closed information extraction toolkit", "closedie"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  auto kb_flags = [&f](CLI::App *c) {
    c->add_option("--kb-entities", f.kb_entities, "Entities TSV (qid, title)");
    c->add_option("--kb-relations", f.kb_relations, "Relations TSV (pid, label, description)");
    c->add_option("--kb-triples", f.kb_triples, "Triples TSV (head, pid, tail)");
  };
  auto common = [&f](CLI::App *c) {
    c->add_option("--manifest", f.manifest, "Manifest path");
    c->add_flag("--record-timings", f.record_timings,
                "Store wall-clock time in the manifest");
  };
  auto io = [&f](CLI::App *c) {
    c->add_option("--input", f.input, "Input JSONL");
    c->add_option("--output", f.output, "Output path");
  };

  struct Command {
    CLI::App *app;
    void (*run)(const Flags &, Manifest &);
  };
  std::vector<Command> commands;

  auto *build_kb = app.add_subcommand("build-kb", "Load and check a KB, write its summary");
  kb_flags(build_kb);
  common(build_kb);
  build_kb->add_option("--output", f.output, "Summary JSON");
  commands.push_back({build_kb, CmdBuildKb});

  auto *build_trie = app.add_subcommand("build-trie", "Write constraint trie caches");
  kb_flags(build_trie);
  common(build_trie);
  build_trie->add_option("--out-dir", f.out_dir, "Output directory");
  build_trie->add_flag("--no-years", f.no_years, "Leave year literals out of the object trie");
  commands.push_back({build_trie, CmdBuildTrie});

  auto *extract = app.add_subcommand("extract", "Distant supervision over linked sentences");
  kb_flags(extract);
  common(extract);
  io(extract);
  extract->add_option("--min-words", f.min_words, "Shortest sentence kept");
  commands.push_back({extract, CmdExtract});

  auto *filter = app.add_subcommand("filter", "Entailment filtering of triples");
  kb_flags(filter);
  common(filter);
  io(filter);
  filter->add_option("--templates", f.templates, "Hypothesis templates JSONL");
  filter->add_option("--threshold", f.threshold, "Keep scores strictly above this")
      ->check(CLI::Range(0.0, 1.0));
  filter->add_option("--scorer", f.scorer, "table:<path>, exec:<cmd> or tcp:<host:port>")
      ->required();
  filter->add_option("--nli-default", f.nli_default, "Score for pairs missing from a table")
      ->check(CLI::Range(0.0, 1.0));
  filter->add_option("--max-in-flight", f.max_in_flight, "Concurrent scorer requests")
      ->check(CLI::PositiveNumber);
  commands.push_back({filter, CmdFilter});

  auto *negatives = app.add_subcommand("negatives", "Balance positives with sampled negatives");
  common(negatives);
  io(negatives);
  negatives->add_option("--neg-fraction", f.neg_fraction, "Share of negatives")
      ->check(CLI::Range(0.0, 0.999999));
  negatives->add_option("--seed", f.seed, "Random seed");
  commands.push_back({negatives, CmdNegatives});

  auto *split = app.add_subcommand("split", "Train/validation/test split");
  common(split);
  split->add_option("--input", f.input, "Dataset JSONL");
  split->add_option("--out-dir", f.out_dir, "Output directory");
  split->add_option("--split", f.split, "Ratios, e.g. 90,5,5");
  split->add_option("--seed", f.seed, "Random seed");
  commands.push_back({split, CmdSplit});

  auto *targets = app.add_subcommand("targets", "Build training instances");
  kb_flags(targets);
  common(targets);
  io(targets);
  targets->add_option("--mode", f.mode,
                      "linearized, entity-prompt, artificial-prompt or 2lm-heads");
  targets->add_option("--seed", f.seed, "Shuffle seed for artificial-prompt");
  commands.push_back({targets, CmdTargets});

  auto *decode = app.add_subcommand("decode", "Beam-search decoding");
  kb_flags(decode);
  common(decode);
  io(decode);
  decode->add_option("--mode", f.mode, "unconstrained, constrained or partial");
  decode->add_option("--beam", f.beam, "Beam size");
  decode->add_option("--max-len", f.max_len, "Maximum generated tokens")
      ->check(CLI::PositiveNumber);
  decode->add_option("--scorer", f.scorer, "mock, exec:<cmd> or tcp:<host:port>");
  decode->add_option("--mock-train", f.mock_train, "Dataset the mock scorer is fit on");
  decode->add_option("--mock-order", f.mock_order, "N-gram order of the mock scorer")
      ->check(CLI::Range(1, 16));
  decode->add_option("--mock-memorize", f.mock_memorize,
                     "Weight of per-sentence counts in the mock scorer")
      ->check(CLI::PositiveNumber);
  decode->add_option("--eos-bias", f.eos_bias, "Log-space EOS boost for the mock scorer");
  decode->add_flag("--no-years", f.no_years, "Leave year literals out of the object trie");
  decode->add_option("--seed", f.seed, "Unused; accepted for uniform pipelines");
  commands.push_back({decode, CmdDecode});

  auto *score = app.add_subcommand("score", "Micro precision/recall/F1");
  kb_flags(score);
  common(score);
  score->add_option("--predictions", f.predictions, "Predictions JSONL");
  score->add_option("--gold", f.gold, "Gold dataset JSONL");
  score->add_option("--output", f.output, "Report JSON");
  commands.push_back({score, CmdScore});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  for (const Command &c : commands) {
    if (!c.app->parsed()) continue;
    const std::string stage = c.app->get_name();
    try {
      Manifest manifest(stage);
      auto start = std::chrono::steady_clock::now();
      c.run(f, manifest);
      std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
      manifest.Write(DefaultManifest(f), took.count(), f.record_timings);
      return 0;
    } catch (const UsageError &e) {
      PrintError(stage, "usage", e.what());
      return 2;
    } catch (const std::exception &e) {
      PrintError(stage, ErrorKind(e), e.what());
      return 1;
    }
  }
  return 2;
}

}  // namespace
}  // namespace closedie

int main(int argc, char **argv) { return closedie::Main(argc, argv); }
