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

#ifndef CLOSEDIE_LINEARIZE_H_
#define CLOSEDIE_LINEARIZE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "closedie/kb.h"
#include "closedie/records.h"

namespace closedie {

// Literal marker strings. Tokenizers map each to one reserved id.
inline constexpr std::string_view kSubToken = "<sub>";
inline constexpr std::string_view kRelToken = "<rel>";
inline constexpr std::string_view kObjToken = "<obj>";
inline constexpr std::string_view kEtToken = "<et>";
inline constexpr std::string_view kEntityToken = "[ENTITY]";
inline constexpr std::string_view kTripleToken = "[TRIPLE]";
inline constexpr std::string_view kElPromptToken = "<#el#>";
inline constexpr std::string_view kTriPromptToken = "<#tri#>";

// A triple at label level, as read back from generated text.
struct RawTriple {
  std::string head_label;
  std::string relation_label;
  std::string tail_label;

  auto operator<=>(const RawTriple &) const = default;
  bool operator==(const RawTriple &) const = default;
};

struct LinearizedTarget {
  std::string text;
  size_t triple_count = 0;
};

// Sorts triples by the first mention offset of the head, then of the tail,
// then by relation id so that the result does not depend on input order.
// Throws ResolveError if a head or tail has no linked span.
std::vector<Triple> OrderTriples(std::vector<Triple> triples,
                                 const LinkedSentence &sentence);

// "<sub> H <rel> R <obj> T <et>" blocks joined by single spaces; "" for no
// triples. Year tails pass through verbatim. Throws ResolveError for ids
// missing from the KB.
LinearizedTarget Linearize(const std::vector<Triple> &ordered,
                           const KbStore &kb);

// Label-level rendering of one triple, used by templates and tests.
RawTriple ToRawTriple(const Triple &triple, const KbStore &kb);

// Reads back "<sub> ... <rel> ... <obj> ... <et>" blocks from arbitrary
// text. Never fails. Scans left to right: a <sub> always opens a new block,
// a marker out of sequence abandons the current block, a trailing block
// without <et> is dropped, blocks with an empty (after trimming) field are
// dropped, and duplicates are kept.
std::vector<RawTriple> ParseLinearized(std::string_view text);

// "Span1 # Label1 | Span2 # Label2 | ..." over spans (in text order) whose
// link appears as head or tail of some triple.
std::string BuildElChain(const LinkedSentence &sentence,
                         const std::vector<Triple> &triples, const KbStore &kb);

// "[ENTITY] <el chain> [TRIPLE] <linearized triples>".
LinearizedTarget BuildEntityPromptTarget(const LinkedSentence &sentence,
                                         const std::vector<Triple> &ordered,
                                         const KbStore &kb);

// Two single-task instances: ("<#el#> " + text, el_target) and
// ("<#tri#> " + text, triple_target).
std::pair<TrainingInstance, TrainingInstance> BuildArtificialPromptInstances(
    const LinkedSentence &sentence, const std::string &el_target,
    const std::string &triple_target);

// One input with separate targets for the extraction and linking heads.
DualTargetInstance BuildDualTargetInstance(const LinkedSentence &sentence,
                                           const std::string &el_target,
                                           const std::string &triple_target);

// alpha * l_ie + (1 - alpha) * l_el. Throws std::domain_error for alpha
// outside [0, 1] or negative/non-finite losses.
double CombineLosses(double l_ie, double l_el, double alpha);

// Seeded shuffle used to mix instances of both prompt tasks.
void ShuffleInstances(std::vector<TrainingInstance> &instances, uint64_t seed);

}  // namespace closedie

#endif  // CLOSEDIE_LINEARIZE_H_
