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

#include "closedie/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

#include "closedie/errors.h"
#include "closedie/linearize.h"
#include "closedie/util.h"
#include "json.hpp"

namespace closedie {

namespace {

constexpr const char *kMonthPattern =
    "(january|february|march|april|may|june|july|august|september|october|"
    "november|december|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|nov|dec)\\.?";

std::string StripLeadingZeros(const std::string &digits) {
  size_t i = 0;
  while (i + 1 < digits.size() && digits[i] == '0') ++i;
  return digits.substr(i);
}

void ReplaceAll(std::string *s, std::string_view slot, const std::string &value) {
  size_t pos = 0;
  while ((pos = s->find(slot, pos)) != std::string::npos) {
    s->replace(pos, slot.size(), value);
    pos += value.size();
  }
}

bool ValidDay(const std::string &d) {
  int v = std::stoi(d);
  return v >= 1 && v <= 31;
}

}  // namespace

std::optional<std::string> MapDateToYear(std::string_view surface) {
  static const std::regex kBareYear("^([0-9]{1,4})$");
  static const std::regex kMonthDayYear(
      std::string("^") + kMonthPattern + " ([0-9]{1,2}), ?([0-9]{1,4})$",
      std::regex::icase);
  static const std::regex kDayMonthYear(
      std::string("^([0-9]{1,2}) ") + kMonthPattern + ",? ([0-9]{1,4})$",
      std::regex::icase);
  static const std::regex kIso("^([0-9]{4})-([0-9]{2})-([0-9]{2})$");

  std::string s(Trim(surface));
  std::smatch m;
  if (std::regex_match(s, m, kBareYear)) return StripLeadingZeros(m[1]);
  if (std::regex_match(s, m, kMonthDayYear)) {
    if (!ValidDay(m[2])) return std::nullopt;
    return StripLeadingZeros(m[3]);
  }
  if (std::regex_match(s, m, kDayMonthYear)) {
    if (!ValidDay(m[1])) return std::nullopt;
    return StripLeadingZeros(m[3]);
  }
  if (std::regex_match(s, m, kIso)) {
    int month = std::stoi(m[2]);
    if (month < 1 || month > 12 || !ValidDay(m[3])) return std::nullopt;
    return StripLeadingZeros(m[1]);
  }
  return std::nullopt;
}

bool LongEnough(std::string_view text, size_t min_words) {
  return CountWords(text) >= min_words;
}

std::vector<Triple> ExtractDsTriples(const LinkedSentence &sentence,
                                     const KbStore &kb) {
  std::set<Triple> found;
  const auto &spans = sentence.spans;
  for (size_t i = 0; i < spans.size(); ++i) {
    if (!spans[i].link || IsYearLiteral(*spans[i].link)) continue;
    for (size_t j = 0; j < spans.size(); ++j) {
      if (i == j || !spans[j].link) continue;
      for (const std::string &pid :
           kb.RelationsBetween(*spans[i].link, *spans[j].link)) {
        found.insert({*spans[i].link, pid, *spans[j].link});
      }
    }
  }
  return OrderTriples({found.begin(), found.end()}, sentence);
}

TableNliScorer TableNliScorer::Load(const std::string &path,
                                    double default_score) {
  TableNliScorer scorer(default_score);
  size_t lineno = 0;
  for (const std::string &line : ReadLines(path)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      scorer.Set(j.at("premise").get<std::string>(),
                 j.at("hypothesis").get<std::string>(),
                 j.at("entail").get<double>());
    } catch (const nlohmann::json::exception &e) {
      throw LoadError(path, lineno, e.what());
    } catch (const ConfigError &e) {
      throw LoadError(path, lineno, e.what());
    }
  }
  return scorer;
}

void TableNliScorer::Set(const std::string &premise,
                         const std::string &hypothesis, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("entailment probability must lie in [0, 1]");
  }
  table_[{premise, hypothesis}] = p;
}

double TableNliScorer::Entail(const std::string &premise,
                              const std::string &hypothesis) {
  auto it = table_.find({premise, hypothesis});
  if (it != table_.end()) return it->second;
  it = table_.find({"*", hypothesis});
  if (it != table_.end()) return it->second;
  return default_score_;
}

double ExternalNliScorer::Entail(const std::string &premise,
                                 const std::string &hypothesis) {
  nlohmann::ordered_json req;
  req["type"] = "nli";
  req["premise"] = premise;
  req["hypothesis"] = hypothesis;
  std::string reply = channel_->Roundtrip(req.dump());
  double p;
  try {
    p = nlohmann::json::parse(reply).at("entail").get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw ScorerError(std::string("bad NLI response: ") + e.what());
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ScorerError("NLI scorer returned " + std::to_string(p) +
                      ", outside [0, 1]");
  }
  return p;
}

HypothesisTemplates HypothesisTemplates::Load(const std::string &path) {
  HypothesisTemplates out;
  size_t lineno = 0;
  for (const std::string &line : ReadLines(path)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      std::string pid = j.at("pid").get<std::string>();
      auto list = j.at("templates").get<std::vector<std::string>>();
      if (list.empty()) throw ConfigError("pid " + pid + " has no templates");
      for (const std::string &t : list) out.Add(pid, t);
    } catch (const nlohmann::json::exception &e) {
      throw LoadError(path, lineno, e.what());
    } catch (const ConfigError &e) {
      throw LoadError(path, lineno, e.what());
    }
  }
  return out;
}

void HypothesisTemplates::Add(const std::string &pid, const std::string &tmpl) {
  if (tmpl.find("{head}") == std::string::npos ||
      tmpl.find("{tail}") == std::string::npos) {
    throw ConfigError("template \"" + tmpl + "\" needs {head} and {tail}");
  }
  templates_[pid].push_back(tmpl);
}

std::vector<std::string> HypothesisTemplates::Render(const Triple &triple,
                                                     const KbStore &kb) const {
  auto head = kb.EndpointLabel(triple.head);
  auto tail = kb.EndpointLabel(triple.tail);
  if (!head || !tail) {
    throw ResolveError("no label for an endpoint of " + triple.head + " " +
                       triple.relation + " " + triple.tail);
  }
  std::vector<std::string> patterns;
  if (auto it = templates_.find(triple.relation); it != templates_.end()) {
    patterns = it->second;
  } else {
    auto label = kb.RelationLabel(triple.relation);
    if (!label) {
      throw ResolveError("relation " + triple.relation +
                         " has no template and no label");
    }
    patterns.push_back("{head} " + *label + " {tail}.");
  }
  std::vector<std::string> out;
  for (std::string p : patterns) {
    ReplaceAll(&p, "{head}", *head);
    ReplaceAll(&p, "{tail}", *tail);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ScoredTriple> EntailmentFilter(const LinkedSentence &sentence,
                                           const std::vector<Triple> &triples,
                                           const HypothesisTemplates &templates,
                                           const KbStore &kb, NliScorer &scorer,
                                           double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("entailment threshold must lie in [0, 1]");
  }
  std::vector<ScoredTriple> kept;
  for (const Triple &t : triples) {
    double best = 0.0;
    for (const std::string &hyp : templates.Render(t, kb)) {
      best = std::max(best, scorer.Entail(sentence.text, hyp));
    }
    if (best > threshold) kept.push_back({t, best});
  }
  return kept;
}

void FilterCorpus(std::vector<DatasetRecord> &records,
                  const HypothesisTemplates &templates, const KbStore &kb,
                  NliScorer &scorer, double threshold, size_t max_in_flight) {
  auto filter_one = [&](DatasetRecord &r) {
    std::vector<Triple> kept;
    for (ScoredTriple &s :
         EntailmentFilter(r.sentence, r.triples, templates, kb, scorer, threshold)) {
      kept.push_back(std::move(s.triple));
    }
    r.triples = std::move(kept);
  };
  size_t workers = scorer.SerializesRequests() ? 1 : std::max<size_t>(1, max_in_flight);
  workers = std::min(workers, records.size());
  if (workers <= 1) {
    for (DatasetRecord &r : records) filter_one(r);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < records.size(); i = next++) {
        try {
          filter_one(records[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread &t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

NegativeKind ClassifyNegative(const DatasetRecord &record) {
  if (!record.triples.empty()) return NegativeKind::kPositive;
  return record.sentence.NumLinked() <= 1 ? NegativeKind::kFewEntities
                                          : NegativeKind::kUnrelatedEntities;
}

NegativeSample SampleNegatives(std::span<const DatasetRecord> pool, size_t count,
                               uint64_t seed) {
  std::vector<size_t> few;
  std::vector<size_t> unrelated;
  for (size_t i = 0; i < pool.size(); ++i) {
    switch (ClassifyNegative(pool[i])) {
      case NegativeKind::kFewEntities: few.push_back(i); break;
      case NegativeKind::kUnrelatedEntities: unrelated.push_back(i); break;
      case NegativeKind::kPositive: break;
    }
  }
  if (few.size() + unrelated.size() < count) {
    throw ConfigError("need " + std::to_string(count) + " negatives but only " +
                      std::to_string(few.size() + unrelated.size()) +
                      " candidates exist (short by " +
                      std::to_string(count - few.size() - unrelated.size()) + ")");
  }
  size_t want_few = (count + 1) / 2;
  size_t want_unrelated = count / 2;
  NegativeSample out;
  if (few.size() < want_few) {
    want_unrelated += want_few - few.size();
    want_few = few.size();
    out.backfilled = true;
  } else if (unrelated.size() < want_unrelated) {
    want_few += want_unrelated - unrelated.size();
    want_unrelated = unrelated.size();
    out.backfilled = true;
  }
  Rng rng(seed);
  for (size_t k : rng.SampleIndices(few.size(), want_few)) {
    out.indices.push_back(few[k]);
  }
  for (size_t k : rng.SampleIndices(unrelated.size(), want_unrelated)) {
    out.indices.push_back(unrelated[k]);
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.few_entities = want_few;
  out.unrelated_entities = want_unrelated;
  return out;
}

std::vector<DatasetRecord> AssembleBalanced(const std::vector<DatasetRecord> &records,
                                            double negative_fraction,
                                            uint64_t seed, NegativeSample *report) {
  if (!(negative_fraction >= 0.0 && negative_fraction < 1.0)) {
    throw ConfigError("negative fraction must lie in [0, 1)");
  }
  std::vector<size_t> positives;
  std::vector<DatasetRecord> pool;
  std::vector<size_t> pool_origin;
  for (size_t i = 0; i < records.size(); ++i) {
    if (!records[i].triples.empty()) {
      positives.push_back(i);
    } else {
      pool.push_back(records[i]);
      pool_origin.push_back(i);
    }
  }
  size_t want = static_cast<size_t>(std::llround(
      static_cast<double>(positives.size()) * negative_fraction /
      (1.0 - negative_fraction)));
  NegativeSample sample = SampleNegatives(pool, want, seed);

  std::vector<bool> chosen(records.size(), false);
  std::vector<bool> negative(records.size(), false);
  for (size_t i : positives) chosen[i] = true;
  for (size_t k : sample.indices) {
    chosen[pool_origin[k]] = true;
    negative[pool_origin[k]] = true;
  }
  std::vector<DatasetRecord> out;
  out.reserve(positives.size() + sample.indices.size());
  for (size_t i = 0; i < records.size(); ++i) {
    if (!chosen[i]) continue;
    out.push_back(records[i]);
    out.back().sentence.is_negative = negative[i];
  }
  if (report != nullptr) *report = std::move(sample);
  return out;
}

std::array<size_t, 3> SplitSizes(size_t n, const std::array<double, 3> &ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ConfigError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1, got " + std::to_string(sum));
  }
  // The epsilon keeps products like 100 * 0.05 from flooring one short.
  auto part = [n](double r) {
    return static_cast<size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  size_t validation = part(ratios[1]);
  size_t test = part(ratios[2]);
  return {n - validation - test, validation, test};
}

std::array<std::vector<size_t>, 3> SplitIndices(size_t n,
                                                const std::array<double, 3> &ratios,
                                                uint64_t seed) {
  std::array<size_t, 3> sizes = SplitSizes(n, ratios);
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);
  std::array<std::vector<size_t>, 3> parts;
  size_t pos = 0;
  for (int p = 0; p < 3; ++p) {
    parts[p].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + sizes[p]));
    std::sort(parts[p].begin(), parts[p].end());
    pos += sizes[p];
  }
  return parts;
}

DatasetSplit SplitDataset(const std::vector<DatasetRecord> &records,
                          const std::array<double, 3> &ratios, uint64_t seed) {
  auto parts = SplitIndices(records.size(), ratios, seed);
  DatasetSplit out;
  for (size_t i : parts[0]) out.train.push_back(records[i]);
  for (size_t i : parts[1]) out.validation.push_back(records[i]);
  for (size_t i : parts[2]) out.test.push_back(records[i]);
  return out;
}

void PipelineConfig::Validate() const {
  if (!(entail_threshold >= 0.0 && entail_threshold <= 1.0)) {
    throw ConfigError("entailment threshold must lie in [0, 1]");
  }
  if (!(negative_fraction >= 0.0 && negative_fraction < 1.0)) {
    throw ConfigError("negative fraction must lie in [0, 1)");
  }
  SplitSizes(0, split);
}

}  // namespace closedie
