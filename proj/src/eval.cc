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

#include "closedie/eval.h"

#include <cstdio>
#include <set>
#include <unordered_map>

#include "closedie/errors.h"
#include "closedie/util.h"
#include "json.hpp"

namespace closedie {

namespace {

double Ratio(size_t num, size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<Triple> ResolveRawTriple(const RawTriple &raw, const KbStore &kb) {
  auto head = kb.ResolveTitle(raw.head_label);
  auto rel = kb.ResolveRelationLabel(raw.relation_label);
  auto tail = kb.ResolveTitle(raw.tail_label);
  if (!tail && IsYearLiteral(raw.tail_label)) tail = raw.tail_label;
  if (!head || !rel || !tail) return std::nullopt;
  return Triple{std::move(*head), std::move(*rel), std::move(*tail)};
}

EvalReport ScorePredictions(const std::vector<PredictedInstance> &predicted,
                            const std::vector<GoldInstance> &gold,
                            const KbStore &kb) {
  std::unordered_map<std::string, const PredictedInstance *> by_id;
  for (const PredictedInstance &p : predicted) {
    if (!by_id.emplace(p.id, &p).second) {
      throw Error("duplicate prediction id " + p.id);
    }
  }
  if (by_id.size() != gold.size()) {
    throw Error("predictions cover " + std::to_string(by_id.size()) +
                " ids but gold has " + std::to_string(gold.size()));
  }

  EvalCounts c;
  std::set<std::string> seen;
  for (const GoldInstance &g : gold) {
    if (!seen.insert(g.id).second) throw Error("duplicate gold id " + g.id);
    auto it = by_id.find(g.id);
    if (it == by_id.end()) throw Error("no prediction for id " + g.id);

    std::set<Triple> resolved;
    std::set<RawTriple> unresolved;
    for (const RawTriple &raw : it->second->triples) {
      if (auto t = ResolveRawTriple(raw, kb)) {
        resolved.insert(std::move(*t));
      } else {
        unresolved.insert(raw);
      }
    }
    std::set<Triple> gold_set(g.triples.begin(), g.triples.end());

    size_t tp = 0;
    for (const Triple &t : resolved) tp += gold_set.count(t);
    c.tp += tp;
    c.fp += resolved.size() - tp + unresolved.size();
    c.fn += gold_set.size() - tp;

    bool empty = resolved.empty() && unresolved.empty();
    if (gold_set.empty()) {
      ++c.n_neg;
      if (empty) ++c.neg_correct;
    } else {
      ++c.n_pos;
      if (empty) ++c.pos_empty;
    }
  }

  EvalReport r;
  r.counts = c;
  r.precision = Ratio(c.tp, c.tp + c.fp);
  r.recall = Ratio(c.tp, c.tp + c.fn);
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  r.accuracy_negative = Ratio(c.neg_correct, c.n_neg);
  r.empty_positive_rate = Ratio(c.pos_empty, c.n_pos);
  return r;
}

EvalReport ScorePredictionFile(const std::vector<Prediction> &predictions,
                               const std::vector<DatasetRecord> &gold,
                               const KbStore &kb) {
  std::vector<PredictedInstance> pred;
  pred.reserve(predictions.size());
  for (const Prediction &p : predictions) {
    pred.push_back({p.id, ParseLinearized(p.output)});
  }
  std::vector<GoldInstance> g;
  g.reserve(gold.size());
  for (const DatasetRecord &r : gold) g.push_back({r.id, r.triples});
  return ScorePredictions(pred, g, kb);
}

std::string EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["accuracy_negative"] = accuracy_negative;
  j["empty_positive_rate"] = empty_positive_rate;
  j["counts"] = {{"tp", counts.tp},       {"fp", counts.fp},
                 {"fn", counts.fn},       {"n_pos", counts.n_pos},
                 {"n_neg", counts.n_neg}};
  return j.dump(2);
}

std::string EvalReport::ToTable() const {
  std::string out;
  char line[96];
  auto row = [&](const char *name, double v) {
    std::snprintf(line, sizeof(line), "%-20s %10.6f\n", name, v);
    out += line;
  };
  auto count = [&](const char *name, size_t v) {
    std::snprintf(line, sizeof(line), "%-20s %10zu\n", name, v);
    out += line;
  };
  row("precision", precision);
  row("recall", recall);
  row("f1", f1);
  row("accuracy_negative", accuracy_negative);
  row("empty_positive_rate", empty_positive_rate);
  count("tp", counts.tp);
  count("fp", counts.fp);
  count("fn", counts.fn);
  count("n_pos", counts.n_pos);
  count("n_neg", counts.n_neg);
  return out;
}

}  // namespace closedie
