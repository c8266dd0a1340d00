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

#ifndef CLOSEDIE_EVAL_H_
#define CLOSEDIE_EVAL_H_

#include <optional>
#include <string>
#include <vector>

#include "closedie/kb.h"
#include "closedie/linearize.h"
#include "closedie/records.h"

namespace closedie {

struct EvalCounts {
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  size_t n_pos = 0;  // instances with gold triples
  size_t n_neg = 0;  // instances without
  size_t neg_correct = 0;    // negatives predicted empty
  size_t pos_empty = 0;      // positives predicted empty
};

// Micro-averaged scores over a corpus. Ratios with an empty denominator
// are reported as 0.
struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy_negative = 0.0;
  double empty_positive_rate = 0.0;
  EvalCounts counts;

  std::string ToJson() const;
  // Two-column plain-text table.
  std::string ToTable() const;
};

// Maps a label-level triple to ids: entity titles, relation labels, and
// year literals for tails that are not titles. Nullopt if any part misses.
std::optional<Triple> ResolveRawTriple(const RawTriple &raw, const KbStore &kb);

struct PredictedInstance {
  std::string id;
  std::vector<RawTriple> triples;
};

struct GoldInstance {
  std::string id;
  std::vector<Triple> triples;
};

// Per instance, predictions are deduplicated after resolution (unresolved
// ones by label) and compared to gold by exact (head, pid, tail) match.
// Unresolved predictions are false positives. Instances are matched by id;
// throws Error if the two id sets differ or contain duplicates.
EvalReport ScorePredictions(const std::vector<PredictedInstance> &predicted,
                            const std::vector<GoldInstance> &gold,
                            const KbStore &kb);

// Parses each prediction's linearized output and scores it against the
// dataset records.
EvalReport ScorePredictionFile(const std::vector<Prediction> &predictions,
                               const std::vector<DatasetRecord> &gold,
                               const KbStore &kb);

}  // namespace closedie

#endif  // CLOSEDIE_EVAL_H_
