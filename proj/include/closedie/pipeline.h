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

#ifndef CLOSEDIE_PIPELINE_H_
#define CLOSEDIE_PIPELINE_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "closedie/channel.h"
#include "closedie/kb.h"
#include "closedie/records.h"

namespace closedie {

// Dataset construction: entity-linked sentences in, balanced and split
// distantly supervised records out.

// Year of a date mention. Recognizes "Month D, YYYY", "D Month YYYY",
// "YYYY-MM-DD" and a bare year of 1-4 digits; month names may be full or
// three-letter abbreviations, any case. Leading zeros are dropped.
std::optional<std::string> MapDateToYear(std::string_view surface);

// True if the sentence has at least `min_words` whitespace-separated words.
bool LongEnough(std::string_view text, size_t min_words = 10);

// Distant supervision: one triple per relation the KB holds between the
// links of two distinct spans, head span linked to an entity and tail span
// to an entity or a year. Deduplicated and in linearization order.
std::vector<Triple> ExtractDsTriples(const LinkedSentence &sentence,
                                     const KbStore &kb);

// Premise/hypothesis entailment probability.
class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual double Entail(const std::string &premise,
                        const std::string &hypothesis) = 0;
  virtual bool SerializesRequests() const { return true; }
};

// Lookup table for tests and fixtures. A premise of "*" matches any
// premise. Unlisted pairs score `default_score`.
class TableNliScorer : public NliScorer {
 public:
  explicit TableNliScorer(double default_score = 0.0)
      : default_score_(default_score) {}

  // JSONL rows {"premise","hypothesis","entail"}.
  static TableNliScorer Load(const std::string &path, double default_score = 0.0);

  void Set(const std::string &premise, const std::string &hypothesis, double p);
  double Entail(const std::string &premise,
                const std::string &hypothesis) override;
  bool SerializesRequests() const override { return false; }

 private:
  std::map<std::pair<std::string, std::string>, double> table_;
  double default_score_;
};

// {"type":"nli","premise":...,"hypothesis":...} -> {"entail":p}
class ExternalNliScorer : public NliScorer {
 public:
  explicit ExternalNliScorer(std::unique_ptr<LineChannel> channel)
      : channel_(std::move(channel)) {}
  double Entail(const std::string &premise,
                const std::string &hypothesis) override;

 private:
  std::unique_ptr<LineChannel> channel_;
};

// Per-relation hypothesis templates with "{head}" and "{tail}" slots.
// Relations without an entry fall back to "{head} <relation label> {tail}.".
class HypothesisTemplates {
 public:
  // JSONL rows {"pid","templates":[...]}. Throws LoadError.
  static HypothesisTemplates Load(const std::string &path);

  // Throws ConfigError if either placeholder is missing.
  void Add(const std::string &pid, const std::string &tmpl);

  // Hypotheses for a triple. Throws ResolveError if the pid has no
  // template and no KB label, or if an endpoint has no label.
  std::vector<std::string> Render(const Triple &triple, const KbStore &kb) const;

  bool Has(const std::string &pid) const { return templates_.count(pid) > 0; }

 private:
  std::map<std::string, std::vector<std::string>> templates_;
};

struct ScoredTriple {
  Triple triple;
  double score = 0.0;
};

// Scores each triple as the max entailment over its hypotheses, with the
// sentence text as premise, and keeps those scoring strictly above
// `threshold`. Input order is preserved.
std::vector<ScoredTriple> EntailmentFilter(const LinkedSentence &sentence,
                                           const std::vector<Triple> &triples,
                                           const HypothesisTemplates &templates,
                                           const KbStore &kb, NliScorer &scorer,
                                           double threshold);

// Runs EntailmentFilter over every record in place. Up to `max_in_flight`
// sentences are scored concurrently when the scorer allows it.
void FilterCorpus(std::vector<DatasetRecord> &records,
                  const HypothesisTemplates &templates, const KbStore &kb,
                  NliScorer &scorer, double threshold, size_t max_in_flight = 1);

enum class NegativeKind {
  kPositive,          // has triples; not a negative candidate
  kFewEntities,       // at most one linked span
  kUnrelatedEntities, // two or more linked spans, no surviving triple
};

NegativeKind ClassifyNegative(const DatasetRecord &record);

struct NegativeSample {
  std::vector<size_t> indices;  // into the pool, ascending
  size_t few_entities = 0;
  size_t unrelated_entities = 0;
  // True if one kind ran short and the other made up the difference.
  bool backfilled = false;
};

// Draws `count` negatives uniformly without replacement: ceil(count/2) of
// the few-entities kind and floor(count/2) of the unrelated kind, topping
// up from the other kind when one is short. Throws ConfigError if the pool
// has fewer than `count` candidates.
NegativeSample SampleNegatives(std::span<const DatasetRecord> pool, size_t count,
                               uint64_t seed);

// Keeps every positive record and adds sampled negatives so that negatives
// make up `negative_fraction` of the result (rounded to the nearest
// instance). Output keeps input order; sampled records get is_negative.
std::vector<DatasetRecord> AssembleBalanced(const std::vector<DatasetRecord> &records,
                                            double negative_fraction,
                                            uint64_t seed,
                                            NegativeSample *report = nullptr);

// Part sizes for `n` items: validation and test get floor(n * ratio), train
// gets the rest. Throws ConfigError unless ratios are non-negative and sum
// to 1.
std::array<size_t, 3> SplitSizes(size_t n, const std::array<double, 3> &ratios);

// Seeded random partition of [0, n) into train/validation/test index lists,
// each ascending.
std::array<std::vector<size_t>, 3> SplitIndices(size_t n,
                                                const std::array<double, 3> &ratios,
                                                uint64_t seed);

struct DatasetSplit {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> validation;
  std::vector<DatasetRecord> test;
};

DatasetSplit SplitDataset(const std::vector<DatasetRecord> &records,
                          const std::array<double, 3> &ratios, uint64_t seed);

struct PipelineConfig {
  double entail_threshold = 0.7;
  double negative_fraction = 0.5;
  std::array<double, 3> split = {0.90, 0.05, 0.05};
  uint64_t rng_seed = 0;
  size_t min_words = 10;

  // Throws ConfigError.
  void Validate() const;
};

}  // namespace closedie

#endif  // CLOSEDIE_PIPELINE_H_
