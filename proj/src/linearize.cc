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

#include "closedie/linearize.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <unordered_set>

#include "closedie/errors.h"
#include "closedie/util.h"

namespace closedie {

namespace {

std::string Describe(const Triple &t) {
  return "(" + t.head + ", " + t.relation + ", " + t.tail + ")";
}

enum class Marker { kSub, kRel, kObj, kEt };

// Finds the next marker at or after `from`.
bool NextMarker(std::string_view text, size_t from, size_t *pos, Marker *m) {
  static constexpr std::array<std::pair<std::string_view, Marker>, 4> kMarkers{{
      {kSubToken, Marker::kSub},
      {kRelToken, Marker::kRel},
      {kObjToken, Marker::kObj},
      {kEtToken, Marker::kEt},
  }};
  size_t best = std::string_view::npos;
  for (const auto &[lit, marker] : kMarkers) {
    size_t p = text.find(lit, from);
    if (p < best) {
      best = p;
      *m = marker;
    }
  }
  *pos = best;
  return best != std::string_view::npos;
}

size_t MarkerLength(Marker m) {
  switch (m) {
    case Marker::kSub: return kSubToken.size();
    case Marker::kRel: return kRelToken.size();
    case Marker::kObj: return kObjToken.size();
    case Marker::kEt: return kEtToken.size();
  }
  return 0;
}

}  // namespace

std::vector<Triple> OrderTriples(std::vector<Triple> triples,
                                 const LinkedSentence &sentence) {
  using Key = std::tuple<size_t, size_t, std::string, std::string>;
  std::vector<std::pair<Key, Triple>> keyed;
  keyed.reserve(triples.size());
  for (Triple &t : triples) {
    auto head = sentence.FirstOffsetOf(t.head);
    auto tail = sentence.FirstOffsetOf(t.tail);
    if (!head || !tail) {
      throw ResolveError("triple " + Describe(t) + " has no " +
                         (head ? "tail" : "head") + " mention in the sentence");
    }
    Key key{*head, *tail, t.relation, t.tail};
    keyed.emplace_back(std::move(key), std::move(t));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  std::vector<Triple> out;
  out.reserve(keyed.size());
  for (auto &[key, t] : keyed) out.push_back(std::move(t));
  return out;
}

RawTriple ToRawTriple(const Triple &triple, const KbStore &kb) {
  auto head = kb.EndpointLabel(triple.head);
  auto rel = kb.RelationLabel(triple.relation);
  auto tail = kb.EndpointLabel(triple.tail);
  if (!head || !rel || !tail) {
    throw ResolveError("cannot resolve labels for triple " + Describe(triple));
  }
  return {std::move(*head), std::move(*rel), std::move(*tail)};
}

LinearizedTarget Linearize(const std::vector<Triple> &ordered,
                           const KbStore &kb) {
  LinearizedTarget target;
  for (const Triple &t : ordered) {
    RawTriple raw = ToRawTriple(t, kb);
    if (!target.text.empty()) target.text += ' ';
    target.text.append(kSubToken).append(" ").append(raw.head_label);
    target.text.append(" ").append(kRelToken).append(" ").append(raw.relation_label);
    target.text.append(" ").append(kObjToken).append(" ").append(raw.tail_label);
    target.text.append(" ").append(kEtToken);
  }
  target.triple_count = ordered.size();
  return target;
}

std::vector<RawTriple> ParseLinearized(std::string_view text) {
  enum class State { kIdle, kHead, kRelation, kTail };
  std::vector<RawTriple> out;
  State state = State::kIdle;
  RawTriple cur;
  size_t seg_begin = 0;
  size_t pos;
  Marker m = Marker::kSub;
  while (NextMarker(text, seg_begin, &pos, &m)) {
    std::string_view seg = Trim(text.substr(seg_begin, pos - seg_begin));
    seg_begin = pos + MarkerLength(m);
    if (m == Marker::kSub) {
      state = State::kHead;
      continue;
    }
    switch (state) {
      case State::kIdle:
        break;
      case State::kHead:
        if (m == Marker::kRel) {
          cur.head_label = seg;
          state = State::kRelation;
        } else {
          state = State::kIdle;
        }
        break;
      case State::kRelation:
        if (m == Marker::kObj) {
          cur.relation_label = seg;
          state = State::kTail;
        } else {
          state = State::kIdle;
        }
        break;
      case State::kTail:
        if (m == Marker::kEt) {
          cur.tail_label = seg;
          if (!cur.head_label.empty() && !cur.relation_label.empty() &&
              !cur.tail_label.empty()) {
            out.push_back(cur);
          }
        }
        state = State::kIdle;
        break;
    }
  }
  return out;
}

std::string BuildElChain(const LinkedSentence &sentence,
                         const std::vector<Triple> &triples, const KbStore &kb) {
  std::unordered_set<std::string> used;
  for (const Triple &t : triples) {
    used.insert(t.head);
    used.insert(t.tail);
  }
  std::string chain;
  for (const MentionSpan &span : sentence.spans) {
    if (!span.link || !used.count(*span.link)) continue;
    auto label = kb.EndpointLabel(*span.link);
    if (!label) throw ResolveError("unknown entity " + *span.link);
    if (!chain.empty()) chain += " | ";
    chain += span.surface;
    chain += " # ";
    chain += *label;
  }
  return chain;
}

LinearizedTarget BuildEntityPromptTarget(const LinkedSentence &sentence,
                                         const std::vector<Triple> &ordered,
                                         const KbStore &kb) {
  LinearizedTarget triples = Linearize(ordered, kb);
  std::string chain = BuildElChain(sentence, ordered, kb);
  LinearizedTarget target;
  target.text.append(kEntityToken);
  if (!chain.empty()) target.text.append(" ").append(chain);
  target.text.append(" ").append(kTripleToken);
  if (!triples.text.empty()) target.text.append(" ").append(triples.text);
  target.triple_count = triples.triple_count;
  return target;
}

std::pair<TrainingInstance, TrainingInstance> BuildArtificialPromptInstances(
    const LinkedSentence &sentence, const std::string &el_target,
    const std::string &triple_target) {
  std::string el_input(kElPromptToken);
  el_input += ' ';
  el_input += sentence.text;
  std::string tri_input(kTriPromptToken);
  tri_input += ' ';
  tri_input += sentence.text;
  return {TrainingInstance{std::move(el_input), el_target},
          TrainingInstance{std::move(tri_input), triple_target}};
}

DualTargetInstance BuildDualTargetInstance(const LinkedSentence &sentence,
                                           const std::string &el_target,
                                           const std::string &triple_target) {
  return {sentence.text, triple_target, el_target};
}

double CombineLosses(double l_ie, double l_el, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("loss weight alpha must lie in [0, 1]");
  }
  if (!std::isfinite(l_ie) || !std::isfinite(l_el) || l_ie < 0.0 || l_el < 0.0) {
    throw std::domain_error("losses must be finite and non-negative");
  }
  return alpha * l_ie + (1.0 - alpha) * l_el;
}

void ShuffleInstances(std::vector<TrainingInstance> &instances, uint64_t seed) {
  Rng rng(seed);
  rng.Shuffle(instances);
}

}  // namespace closedie
