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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "closedie/errors.h"
#include "closedie/linearize.h"
#include "closedie/pipeline.h"
#include "closedie/util.h"
#include "filter_fixture.h"
#include "test_util.h"

namespace closedie {
namespace {

using testing::Data;
using testing::FilterFixture;
using testing::MakeSentence;
using testing::TempDir;
using testing::WorkedKb;

TEST_CASE("date mapping") {
  CHECK(MapDateToYear("October 10, 2018") == "2018");
  CHECK(MapDateToYear("2018") == "2018");
  CHECK_FALSE(MapDateToYear("next Tuesday"));
  CHECK(MapDateToYear("10 October 2018") == "2018");
  CHECK(MapDateToYear("oct 10, 2018") == "2018");
  CHECK(MapDateToYear("2018-10-10") == "2018");
  CHECK_FALSE(MapDateToYear("2018-13-10"));
  CHECK_FALSE(MapDateToYear("October 40, 2018"));
  CHECK(MapDateToYear("476") == "476");
  CHECK(MapDateToYear("0476") == "476");
  CHECK_FALSE(MapDateToYear("20180"));
  CHECK_FALSE(MapDateToYear(""));
}

TEST_CASE("short sentences") {
  CHECK(LongEnough("one two three four five six seven eight nine ten"));
  CHECK_FALSE(LongEnough("one two three four five six seven eight nine"));
  CHECK(LongEnough("a  b\tc", 3));
}

TEST_CASE("distant supervision on small fixtures") {
  KbStore kb = WorkedKb();
  CHECK(ExtractDsTriples(MakeSentence("Nothing linked here.", {}), kb).empty());
  CHECK(ExtractDsTriples(MakeSentence("Only London.", {{"London", "Q84"}}), kb).empty());
  auto two = ExtractDsTriples(
      MakeSentence("San Francisco, United States.", {{"San Francisco", "Q62"}, {"United States", "Q30"}}),
      kb);
  CHECK(two == std::vector<Triple>{{"Q62", "P17", "Q30"}});
  auto year = ExtractDsTriples(
      MakeSentence("In 1976 Apple Inc. appeared.", {{"1976", "1976"}, {"Apple Inc.", "Q312"}}), kb);
  CHECK(year == std::vector<Triple>{{"Q312", "P571", "1976"}});
  auto unlinked = ExtractDsTriples(
      MakeSentence("London, United Kingdom.", {{"London", std::nullopt}, {"United Kingdom", "Q145"}}),
      kb);
  CHECK(unlinked.empty());
}

// Oracle: every ordered pair of distinct linked spans against a scan of the
// raw triple list.
std::set<Triple> BruteForceDs(const LinkedSentence &s, const std::vector<Triple> &raw) {
  std::set<Triple> out;
  for (size_t i = 0; i < s.spans.size(); ++i) {
    for (size_t j = 0; j < s.spans.size(); ++j) {
      if (i == j || !s.spans[i].link || !s.spans[j].link) continue;
      for (const Triple &t : raw) {
        if (t.head == *s.spans[i].link && t.tail == *s.spans[j].link) out.insert(t);
      }
    }
  }
  return out;
}

TEST_CASE("distant supervision matches brute force") {
  KbStore kb = WorkedKb();
  std::vector<Triple> raw = {{"Q145", "P36", "Q84"},  {"Q84", "P17", "Q145"},
                             {"Q84", "P1376", "Q145"}, {"Q38", "P36", "Q220"},
                             {"Q220", "P17", "Q38"},  {"Q62", "P17", "Q30"},
                             {"Q312", "P112", "Q19837"}, {"Q312", "P571", "1976"}};
  LinkedSentence s = MakeSentence(
      "London and the United Kingdom, Rome and Italy, Apple Inc. in 1976.",
      {{"London", "Q84"}, {"United Kingdom", "Q145"}, {"Rome", "Q220"},
       {"Italy", "Q38"}, {"Apple Inc.", "Q312"}, {"1976", "1976"}});
  auto got = ExtractDsTriples(s, kb);
  CHECK(std::set<Triple>(got.begin(), got.end()) == BruteForceDs(s, raw));
  CHECK(got.size() == 6);
  CHECK(got == OrderTriples(got, s));
}

TEST_CASE("template rendering") {
  KbStore kb = WorkedKb();
  HypothesisTemplates t;
  CHECK(t.Render({"Q145", "P36", "Q84"}, kb) ==
        std::vector<std::string>{"United Kingdom capital London."});
  t.Add("P36", "The capital of {head} is {tail}.");
  t.Add("P36", "{tail} is {head}'s capital; {tail}!");
  CHECK(t.Render({"Q145", "P36", "Q84"}, kb) ==
        std::vector<std::string>{"The capital of United Kingdom is London.",
                                 "London is United Kingdom's capital; London!"});
  CHECK_THROWS_AS(t.Add("P17", "{head} only"), ConfigError);
  CHECK_THROWS_AS(t.Render({"Q145", "P999", "Q84"}, kb), ResolveError);
  HypothesisTemplates loaded = HypothesisTemplates::Load(Data("templates.jsonl"));
  CHECK(loaded.Has("P36"));
  CHECK_FALSE(loaded.Has("P19"));
}

TEST_CASE("filter extremes") {
  KbStore kb = WorkedKb();
  LinkedSentence s = MakeSentence("London, United Kingdom.", {{"London", "Q84"}, {"United Kingdom", "Q145"}});
  std::vector<Triple> t = {{"Q84", "P17", "Q145"}, {"Q145", "P36", "Q84"}};
  HypothesisTemplates templates;
  TableNliScorer one(1.0), zero(0.0);
  CHECK(EntailmentFilter(s, t, templates, kb, one, 0.7).size() == 2);
  CHECK(EntailmentFilter(s, t, templates, kb, zero, 0.7).empty());
  CHECK_THROWS_AS(EntailmentFilter(s, t, templates, kb, one, 1.5), ConfigError);
}

TEST_CASE("max over hypotheses, strictly above the threshold") {
  KbStore kb = WorkedKb();
  LinkedSentence s = MakeSentence("London, United Kingdom.", {{"London", "Q84"}, {"United Kingdom", "Q145"}});
  HypothesisTemplates templates;
  templates.Add("P36", "A {head} {tail}");
  templates.Add("P36", "B {head} {tail}");
  TableNliScorer nli;
  nli.Set(s.text, "A United Kingdom London", 0.4);
  nli.Set(s.text, "B United Kingdom London", 0.9);
  auto kept = EntailmentFilter(s, {{"Q145", "P36", "Q84"}}, templates, kb, nli, 0.7);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].score == 0.9);

  TableNliScorer exact;
  exact.Set("*", "B United Kingdom London", 0.7);
  CHECK(EntailmentFilter(s, {{"Q145", "P36", "Q84"}}, templates, kb, exact, 0.7).empty());
  CHECK_THROWS_AS(exact.Set("*", "x", 1.2), ConfigError);
}

TEST_CASE("ten-triple hand filter") {
  FilterFixture f;
  auto kept = EntailmentFilter(f.sentence, f.triples, f.templates, f.kb, f.nli, 0.7);
  std::vector<Triple> got;
  for (const auto &k : kept) got.push_back(k.triple);
  CHECK(got == FilterFixture::KeptAt07());
  CHECK(kept[2].score == 0.80);
}

TEST_CASE("raising the threshold never adds a triple") {
  FilterFixture f;
  std::set<Triple> prev(f.triples.begin(), f.triples.end());
  for (int step = 0; step <= 100; ++step) {
    double th = step / 100.0;
    std::set<Triple> now;
    for (const auto &k : EntailmentFilter(f.sentence, f.triples, f.templates, f.kb, f.nli, th)) {
      now.insert(k.triple);
    }
    CHECK(std::includes(prev.begin(), prev.end(), now.begin(), now.end()));
    prev = now;
  }
  CHECK(prev.empty());
}

TEST_CASE("threaded corpus filtering matches the serial result") {
  FilterFixture f;
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 40; ++i) {
    DatasetRecord r;
    r.id = std::to_string(i);
    r.sentence = f.sentence;
    r.triples = f.triples;
    if (i % 3 == 0) r.triples.resize(static_cast<size_t>(i % 10));
    records.push_back(r);
  }
  auto serial = records;
  FilterCorpus(serial, f.templates, f.kb, f.nli, 0.7, 1);
  auto threaded = records;
  FilterCorpus(threaded, f.templates, f.kb, f.nli, 0.7, 8);
  for (size_t i = 0; i < records.size(); ++i) CHECK(serial[i].triples == threaded[i].triples);
}

DatasetRecord Candidate(int linked, bool has_triple, const std::string &id) {
  DatasetRecord r;
  r.id = id;
  std::string text;
  std::vector<std::pair<std::string, std::optional<std::string>>> spans;
  for (int i = 0; i < linked; ++i) {
    text += "M" + std::to_string(i) + " ";
    spans.push_back({"M" + std::to_string(i), "Q" + std::to_string(i)});
  }
  text += "tail";
  r.sentence = MakeSentence(text, spans);
  if (has_triple) r.triples = {{"Q0", "P1", "Q1"}};
  return r;
}

std::vector<DatasetRecord> TwentyCandidates() {
  std::vector<DatasetRecord> pool;
  for (int i = 0; i < 10; ++i) pool.push_back(Candidate(i % 2, false, "few" + std::to_string(i)));
  for (int i = 0; i < 10; ++i) pool.push_back(Candidate(2 + i % 3, false, "unrel" + std::to_string(i)));
  return pool;
}

TEST_CASE("negative classification") {
  CHECK(ClassifyNegative(Candidate(0, false, "a")) == NegativeKind::kFewEntities);
  CHECK(ClassifyNegative(Candidate(1, false, "a")) == NegativeKind::kFewEntities);
  CHECK(ClassifyNegative(Candidate(2, false, "a")) == NegativeKind::kUnrelatedEntities);
  CHECK(ClassifyNegative(Candidate(2, true, "a")) == NegativeKind::kPositive);
}

TEST_CASE("negative sampling") {
  auto pool = TwentyCandidates();
  CHECK(SampleNegatives(pool, 0, 1).indices.empty());
  auto a = SampleNegatives(pool, 10, 42);
  CHECK(a.indices.size() == 10);
  CHECK(a.few_entities == 5);
  CHECK(a.unrelated_entities == 5);
  CHECK_FALSE(a.backfilled);
  auto b = SampleNegatives(pool, 10, 42);
  CHECK(a.indices == b.indices);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    auto s = SampleNegatives(pool, 7, seed);
    size_t few = 0, unrel = 0;
    std::set<size_t> distinct(s.indices.begin(), s.indices.end());
    CHECK(distinct.size() == 7);
    for (size_t i : s.indices) {
      (ClassifyNegative(pool[i]) == NegativeKind::kFewEntities ? few : unrel)++;
    }
    CHECK(few == 4);
    CHECK(unrel == 3);
  }
  CHECK(SampleNegatives(pool, 10, 1).indices != SampleNegatives(pool, 10, 2).indices);
}

TEST_CASE("negative sampling backfills and reports shortfalls") {
  std::vector<DatasetRecord> pool;
  for (int i = 0; i < 2; ++i) pool.push_back(Candidate(0, false, "f" + std::to_string(i)));
  for (int i = 0; i < 8; ++i) pool.push_back(Candidate(3, false, "u" + std::to_string(i)));
  pool.push_back(Candidate(2, true, "pos"));
  auto s = SampleNegatives(pool, 8, 3);
  CHECK(s.backfilled);
  CHECK(s.few_entities == 2);
  CHECK(s.unrelated_entities == 6);
  CHECK(std::find(s.indices.begin(), s.indices.end(), 10) == s.indices.end());
  CHECK_THROWS_AS(SampleNegatives(pool, 11, 3), ConfigError);
}

TEST_CASE("balanced assembly") {
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 30; ++i) records.push_back(Candidate(2, true, "p" + std::to_string(i)));
  auto pool = TwentyCandidates();
  for (int k = 0; k < 3; ++k) records.insert(records.end(), pool.begin(), pool.end());
  NegativeSample report;
  auto out = AssembleBalanced(records, 0.5, 9, &report);
  size_t neg = std::count_if(out.begin(), out.end(),
                             [](const DatasetRecord &r) { return r.sentence.is_negative; });
  CHECK(neg == 30);
  CHECK(out.size() == 60);
  CHECK(report.few_entities == 15);
  CHECK(report.unrelated_entities == 15);
  CHECK_THROWS_AS(AssembleBalanced(records, 1.0, 9), ConfigError);
}

TEST_CASE("split sizes") {
  std::array<double, 3> r = {0.90, 0.05, 0.05};
  CHECK(SplitSizes(100, r) == std::array<size_t, 3>{90, 5, 5});
  CHECK(SplitSizes(10000, r) == std::array<size_t, 3>{9000, 500, 500});
  CHECK(SplitSizes(1, r) == std::array<size_t, 3>{1, 0, 0});
  CHECK(SplitSizes(0, r) == std::array<size_t, 3>{0, 0, 0});
  CHECK(SplitSizes(39, r) == std::array<size_t, 3>{37, 1, 1});
  CHECK_THROWS_AS(SplitSizes(10, {0.9, 0.05, 0.04}), ConfigError);
  CHECK_THROWS_AS(SplitSizes(10, {1.1, -0.05, -0.05}), ConfigError);
}

TEST_CASE("splits partition the data and depend only on the seed") {
  Rng rng(2);
  for (int round = 0; round < 50; ++round) {
    size_t n = rng.Below(500);
    uint64_t seed = rng.Below(1000);
    auto parts = SplitIndices(n, {0.8, 0.1, 0.1}, seed);
    std::vector<size_t> all;
    for (const auto &p : parts) {
      CHECK(std::is_sorted(p.begin(), p.end()));
      all.insert(all.end(), p.begin(), p.end());
    }
    std::sort(all.begin(), all.end());
    std::vector<size_t> want(n);
    for (size_t i = 0; i < n; ++i) want[i] = i;
    CHECK(all == want);
    CHECK(SplitIndices(n, {0.8, 0.1, 0.1}, seed) == parts);
  }
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(Candidate(0, false, std::to_string(i)));
  DatasetSplit s = SplitDataset(records, {0.9, 0.05, 0.05}, 7);
  CHECK(s.train.size() == 90);
  CHECK(s.validation.size() == 5);
  CHECK(s.test.size() == 5);
}

TEST_CASE("pipeline config") {
  PipelineConfig c;
  CHECK(c.entail_threshold == 0.7);
  CHECK(c.negative_fraction == 0.5);
  CHECK_NOTHROW(c.Validate());
  c.entail_threshold = 1.2;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = PipelineConfig();
  c.split = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("table scorer file") {
  TableNliScorer t = TableNliScorer::Load(Data("nli_table.jsonl"));
  auto records = ReadLinkedSentences(Data("micro_corpus.jsonl"));
  CHECK(t.Entail(records[0].sentence.text, "London is located in United Kingdom.") == 0.95);
  CHECK(t.Entail("other", "London is located in United Kingdom.") == 0.0);
  TempDir dir;
  WriteFile(dir.File("bad.jsonl"), "{\"premise\":\"a\",\"hypothesis\":\"b\",\"entail\":2}\n");
  CHECK_THROWS(TableNliScorer::Load(dir.File("bad.jsonl")));
}

}  // namespace
}  // namespace closedie
