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

#include "closedie/decode.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "closedie/errors.h"

namespace closedie {

namespace {

// Trie that governs a label phase.
const ConstraintTrie *TrieFor(Phase phase, const Constraints &c) {
  switch (phase) {
    case Phase::kInSubject: return c.entity;
    case Phase::kInRelation: return c.relation;
    case Phase::kInObject: return c.object;
    default: return nullptr;
  }
}

// Marker that closes a label phase.
Special CloserFor(Phase phase) {
  switch (phase) {
    case Phase::kInSubject: return Special::kRel;
    case Phase::kInRelation: return Special::kObj;
    default: return Special::kEt;
  }
}

void InsertSorted(std::vector<TokenId> *v, TokenId t) {
  auto it = std::lower_bound(v->begin(), v->end(), t);
  if (it == v->end() || *it != t) v->insert(it, t);
}

std::string TokenName(TokenId token, const Tokenizer &tok) {
  if (auto s = tok.AsSpecial(token)) return std::string(SpecialText(*s));
  return "#" + std::to_string(token);
}

[[noreturn]] void Violation(const GenState &state, TokenId token,
                            const Tokenizer &tok) {
  throw ConstraintViolation("token " + TokenName(token, tok) +
                            " not allowed in phase " +
                            std::string(PhaseName(state.phase)));
}

// A scored expansion waiting for selection. Only survivors get their token
// vector and state materialized.
struct Candidate {
  size_t parent;
  TokenId token;
  double score;
};

// Orders by score, then lexicographically by token sequence.
bool Better(double sa, const std::vector<TokenId> &ta, double sb,
            const std::vector<TokenId> &tb) {
  if (sa != sb) return sa > sb;
  return ta < tb;
}

}  // namespace

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kStart: return "START";
    case Phase::kInSubject: return "IN_SUBJECT";
    case Phase::kAwaitRel: return "AWAIT_REL";
    case Phase::kInRelation: return "IN_RELATION";
    case Phase::kAwaitObj: return "AWAIT_OBJ";
    case Phase::kInObject: return "IN_OBJECT";
    case Phase::kAfterTriple: return "AFTER_TRIPLE";
    case Phase::kUnconstrainedPrefix: return "UNCONSTRAINED_PREFIX";
    case Phase::kDone: return "DONE";
  }
  return "?";
}

std::vector<TokenId> AllowedTokens(const GenState &state, const Constraints &c) {
  const Tokenizer &tok = *c.tok;
  std::vector<TokenId> out;
  switch (state.phase) {
    case Phase::kStart:
    case Phase::kAfterTriple:
      out = {tok.SpecialId(Special::kEos), tok.SpecialId(Special::kSub)};
      std::sort(out.begin(), out.end());
      break;
    case Phase::kInSubject:
    case Phase::kInRelation:
    case Phase::kInObject: {
      Continuations next =
          TrieFor(state.phase, c)->AllowedContinuations(state.trie_prefix);
      out = std::move(next.tokens);
      if (next.complete) InsertSorted(&out, tok.SpecialId(CloserFor(state.phase)));
      break;
    }
    case Phase::kAwaitRel:
      out = {tok.SpecialId(Special::kRel)};
      break;
    case Phase::kAwaitObj:
      out = {tok.SpecialId(Special::kObj)};
      break;
    case Phase::kUnconstrainedPrefix:
      // [TRIPLE] is part of the vocabulary already.
      out.resize(tok.VocabSize());
      std::iota(out.begin(), out.end(), TokenId{0});
      break;
    case Phase::kDone:
      break;
  }
  return out;
}

GenState Advance(const GenState &state, TokenId token, const Constraints &c) {
  const Tokenizer &tok = *c.tok;
  const TokenId eos = tok.SpecialId(Special::kEos);
  GenState next = state;
  switch (state.phase) {
    case Phase::kStart:
    case Phase::kAfterTriple:
      if (token == eos) {
        next.phase = Phase::kDone;
      } else if (token == tok.SpecialId(Special::kSub)) {
        next.phase = Phase::kInSubject;
      } else {
        Violation(state, token, tok);
      }
      return next;
    case Phase::kAwaitRel:
      if (token != tok.SpecialId(Special::kRel)) Violation(state, token, tok);
      next.phase = Phase::kInRelation;
      return next;
    case Phase::kAwaitObj:
      if (token != tok.SpecialId(Special::kObj)) Violation(state, token, tok);
      next.phase = Phase::kInObject;
      return next;
    case Phase::kInSubject:
    case Phase::kInRelation:
    case Phase::kInObject: {
      const ConstraintTrie &trie = *TrieFor(state.phase, c);
      Continuations here = trie.AllowedContinuations(state.trie_prefix);
      if (here.complete && token == tok.SpecialId(CloserFor(state.phase))) {
        next.trie_prefix.clear();
        if (state.phase == Phase::kInSubject) {
          next.phase = Phase::kInRelation;
        } else if (state.phase == Phase::kInRelation) {
          next.phase = Phase::kInObject;
        } else {
          next.phase = Phase::kAfterTriple;
          ++next.triples_emitted;
        }
        return next;
      }
      if (!std::binary_search(here.tokens.begin(), here.tokens.end(), token)) {
        Violation(state, token, tok);
      }
      next.trie_prefix.push_back(token);
      Continuations after = trie.AllowedContinuations(next.trie_prefix);
      if (after.complete && after.tokens.empty()) {
        // A leaf: the label is finished and only the closer can follow.
        if (state.phase == Phase::kInSubject) {
          next.phase = Phase::kAwaitRel;
          next.trie_prefix.clear();
        } else if (state.phase == Phase::kInRelation) {
          next.phase = Phase::kAwaitObj;
          next.trie_prefix.clear();
        }
      }
      return next;
    }
    case Phase::kUnconstrainedPrefix:
      if (token < 0 || static_cast<size_t>(token) >= tok.VocabSize()) {
        Violation(state, token, tok);
      }
      if (token == eos) {
        next.phase = Phase::kDone;
      } else if (token == tok.SpecialId(Special::kTriple)) {
        next.phase = Phase::kStart;
      }
      return next;
    case Phase::kDone:
      Violation(state, token, tok);
  }
  return next;
}

DecodeMode ParseDecodeMode(std::string_view name) {
  if (name == "unconstrained") return DecodeMode::kUnconstrained;
  if (name == "constrained") return DecodeMode::kConstrained;
  if (name == "partial") return DecodeMode::kPartial;
  throw ConfigError("unknown decode mode \"" + std::string(name) + "\"");
}

std::vector<Hypothesis> BeamSearch(TokenScorer &scorer, const Tokenizer &tok,
                                   const Constraints *constraints,
                                   const BeamOptions &options) {
  if (options.beam_size < 1) throw ConfigError("beam size must be >= 1");
  if (options.max_len < 1) throw ConfigError("max length must be >= 1");
  const bool grammar = options.mode != DecodeMode::kUnconstrained;
  if (grammar && constraints == nullptr) {
    throw ConfigError("constrained decoding needs tries");
  }
  const TokenId eos = tok.SpecialId(Special::kEos);

  std::vector<TokenId> vocabulary(tok.VocabSize());
  std::iota(vocabulary.begin(), vocabulary.end(), TokenId{0});

  Hypothesis root;
  if (options.mode == DecodeMode::kPartial) {
    root.state.phase = Phase::kUnconstrainedPrefix;
  }
  std::vector<Hypothesis> live{root};
  std::vector<Hypothesis> finals;
  bool nonpositive = true;

  auto kth_final_score = [&]() {
    std::vector<double> scores;
    scores.reserve(finals.size());
    for (const Hypothesis &h : finals) scores.push_back(h.score);
    std::nth_element(scores.begin(), scores.begin() + (options.beam_size - 1),
                     scores.end(), std::greater<double>());
    return scores[options.beam_size - 1];
  };

  for (size_t step = 0; step < options.max_len && !live.empty(); ++step) {
    std::vector<Candidate> pending;
    for (size_t i = 0; i < live.size(); ++i) {
      const Hypothesis &h = live[i];
      std::vector<TokenId> allowed =
          grammar ? AllowedTokens(h.state, *constraints) : vocabulary;
      if (allowed.empty()) continue;
      std::vector<double> lp = scorer.Score(h.tokens, allowed);
      if (lp.size() != allowed.size()) {
        throw ScorerError("scorer returned " + std::to_string(lp.size()) +
                          " values for " + std::to_string(allowed.size()) +
                          " candidates");
      }
      for (size_t k = 0; k < allowed.size(); ++k) {
        if (!std::isfinite(lp[k])) throw ScorerError("non-finite score");
        if (lp[k] > 0.0) nonpositive = false;
        double score = h.score + lp[k];
        if (allowed[k] == eos) {
          Hypothesis done = h;
          done.tokens.push_back(eos);
          done.score = score;
          done.finished = true;
          done.state.phase = Phase::kDone;
          done.state.trie_prefix.clear();
          finals.push_back(std::move(done));
        } else {
          pending.push_back({i, allowed[k], score});
        }
      }
    }

    // All live hypotheses have the same length, so comparing (parent
    // tokens, token) is the lexicographic order on the extended sequences.
    auto better = [&](const Candidate &a, const Candidate &b) {
      if (a.score != b.score) return a.score > b.score;
      const auto &ta = live[a.parent].tokens;
      const auto &tb = live[b.parent].tokens;
      if (ta != tb) return ta < tb;
      return a.token < b.token;
    };
    size_t keep = std::min(options.beam_size, pending.size());
    std::partial_sort(pending.begin(), pending.begin() + keep, pending.end(),
                      better);

    std::vector<Hypothesis> next;
    next.reserve(keep);
    for (size_t k = 0; k < keep; ++k) {
      const Candidate &cand = pending[k];
      const Hypothesis &parent = live[cand.parent];
      Hypothesis h;
      h.tokens = parent.tokens;
      h.tokens.push_back(cand.token);
      h.score = cand.score;
      h.state = grammar ? Advance(parent.state, cand.token, *constraints)
                        : parent.state;
      next.push_back(std::move(h));
    }
    live = std::move(next);

    if (options.early_stop && nonpositive && !live.empty() &&
        finals.size() >= options.beam_size &&
        live.front().score < kth_final_score()) {
      live.clear();
    }
  }

  // Whatever is still live hit the length cap.
  for (Hypothesis &h : live) finals.push_back(std::move(h));
  if (finals.empty()) {
    throw DecodeFailure("no hypothesis survived: every path dead-ended");
  }
  size_t keep = std::min(options.beam_size, finals.size());
  std::partial_sort(finals.begin(), finals.begin() + keep, finals.end(),
                    [](const Hypothesis &a, const Hypothesis &b) {
                      return Better(a.score, a.tokens, b.score, b.tokens);
                    });
  finals.resize(keep);
  return finals;
}

std::string HypothesisText(const Hypothesis &h, const Tokenizer &tok) {
  std::span<const TokenId> ids(h.tokens);
  if (h.finished && !ids.empty()) ids = ids.first(ids.size() - 1);
  return tok.Decode(ids);
}

}  // namespace closedie
