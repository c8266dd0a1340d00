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

#ifndef CLOSEDIE_DECODE_H_
#define CLOSEDIE_DECODE_H_

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "closedie/tokenizer.h"
#include "closedie/trie.h"

namespace closedie {

// Where the decoder is within the "<sub> H <rel> R <obj> T <et>" grammar.
enum class Phase {
  kStart,                // may stop (empty output) or open a triple
  kInSubject,            // walking the entity trie
  kAwaitRel,             // subject is a complete leaf label; only <rel>
  kInRelation,           // walking the relation trie
  kAwaitObj,             // relation is a complete leaf label; only <obj>
  kInObject,             // walking the object trie
  kAfterTriple,          // may stop or open another triple
  kUnconstrainedPrefix,  // partial mode, before [TRIPLE]
  kDone,                 // EOS seen; accepts nothing
};

std::string_view PhaseName(Phase phase);

struct GenState {
  Phase phase = Phase::kStart;
  // Tokens of the label being generated; empty outside the kIn* phases.
  std::vector<TokenId> trie_prefix;
  int triples_emitted = 0;

  bool operator==(const GenState &) const = default;
};

// Tries and tokenizer shared by every decoding step. All must outlive it.
struct Constraints {
  const ConstraintTrie *entity = nullptr;
  const ConstraintTrie *relation = nullptr;
  const ConstraintTrie *object = nullptr;
  const Tokenizer *tok = nullptr;

  Constraints(const KbTries &tries, const Tokenizer &tokenizer)
      : entity(&tries.entity),
        relation(&tries.relation),
        object(&tries.object),
        tok(&tokenizer) {}
  Constraints(const ConstraintTrie &entity_trie,
              const ConstraintTrie &relation_trie,
              const ConstraintTrie &object_trie, const Tokenizer &tokenizer)
      : entity(&entity_trie),
        relation(&relation_trie),
        object(&object_trie),
        tok(&tokenizer) {}
};

// Tokens the grammar admits next, ascending.
std::vector<TokenId> AllowedTokens(const GenState &state, const Constraints &c);

// Applies one token. Throws ConstraintViolation naming the phase and token
// if AllowedTokens(state) does not contain it.
GenState Advance(const GenState &state, TokenId token, const Constraints &c);

// Black-box next-token model. Scores are log-probabilities; the beam search
// relies on them being <= 0 to stop early.
class TokenScorer {
 public:
  virtual ~TokenScorer() = default;

  // One finite log-probability per candidate, in candidate order.
  virtual std::vector<double> Score(std::span<const TokenId> prefix,
                                    std::span<const TokenId> candidates) = 0;

  // Conditions later Score() calls on a new input sentence.
  virtual void SetSource(std::string_view source) { (void)source; }

  // True if the implementation handles one request at a time, so callers
  // must not share it across threads.
  virtual bool SerializesRequests() const { return true; }
};

// Adapts a callable; used by tests and the Python bindings.
class FunctionScorer : public TokenScorer {
 public:
  using Fn = std::function<std::vector<double>(std::span<const TokenId>,
                                               std::span<const TokenId>)>;
  explicit FunctionScorer(Fn fn) : fn_(std::move(fn)) {}

  std::vector<double> Score(std::span<const TokenId> prefix,
                            std::span<const TokenId> candidates) override {
    return fn_(prefix, candidates);
  }

 private:
  Fn fn_;
};

enum class DecodeMode { kUnconstrained, kConstrained, kPartial };

// Parses "unconstrained", "constrained" or "partial"; throws ConfigError.
DecodeMode ParseDecodeMode(std::string_view name);

struct BeamOptions {
  DecodeMode mode = DecodeMode::kConstrained;
  size_t beam_size = 4;
  size_t max_len = 256;
  // Stop once no live hypothesis can beat the beam_size-th finished one.
  // Only sound for scorers whose values are <= 0. Skipped after a positive
  // score has been observed.
  bool early_stop = true;
};

struct Hypothesis {
  // Generated tokens, ending in EOS unless the length cap was hit.
  std::vector<TokenId> tokens;
  double score = 0.0;
  GenState state;
  bool finished = false;  // ended with EOS
};

// Length-capped beam search. Each step expands every live hypothesis by
// every admissible token (the whole vocabulary when unconstrained, the
// grammar's allowed set otherwise), keeps the beam_size best non-final
// expansions, and collects EOS-terminated ones. Hypotheses still live at
// max_len are kept as unfinished. Returns up to beam_size hypotheses by
// descending score; equal scores go to the lexicographically smaller token
// sequence. No length normalization.
//
// Partial mode decodes freely until [TRIPLE] and then follows the grammar
// from kStart. `constraints` may be null only in unconstrained mode.
//
// Throws DecodeFailure if every hypothesis dead-ends before finishing and
// ScorerError if the scorer returns the wrong number of values or a
// non-finite one.
std::vector<Hypothesis> BeamSearch(TokenScorer &scorer, const Tokenizer &tok,
                                   const Constraints *constraints,
                                   const BeamOptions &options);

// Text of a hypothesis without its trailing EOS.
std::string HypothesisText(const Hypothesis &h, const Tokenizer &tok);

}  // namespace closedie

#endif  // CLOSEDIE_DECODE_H_
