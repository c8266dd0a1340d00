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

// Scorers, a tiny tokenizer and a brute-force decoder used as oracles by the
// decoding tests and the acceptance suite.

#ifndef CLOSEDIE_TESTS_SCORER_FIXTURES_H_
#define CLOSEDIE_TESTS_SCORER_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "closedie/decode.h"
#include "closedie/tokenizer.h"

namespace closedie {
namespace testing {

// Vocabulary of `n` plain tokens where the last one is EOS. The other
// specials get ids outside the vocabulary and are never generated.
class TinyTokenizer : public Tokenizer {
 public:
  explicit TinyTokenizer(size_t n) : n_(n) {}
  std::vector<TokenId> Encode(std::string_view text) const override {
    std::vector<TokenId> ids;
    for (char c : text) ids.push_back(c - 'a');
    return ids;
  }
  std::string Decode(std::span<const TokenId> ids) const override {
    std::string s;
    for (TokenId t : ids) s += static_cast<char>('a' + t);
    return s;
  }
  size_t VocabSize() const override { return n_; }
  TokenId SpecialId(Special s) const override {
    if (s == Special::kEos) return static_cast<TokenId>(n_ - 1);
    return 1000 + static_cast<TokenId>(s);
  }

 private:
  size_t n_;
};

inline uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Pseudo-random next-token model: logits are a hash of (seed, prefix,
// token), log-softmax normalized over the offered candidates. Setting
// `context_free` drops the prefix from the hash. `eos_first` makes EOS the
// most likely candidate on the empty prefix.
class HashScorer : public TokenScorer {
 public:
  HashScorer(uint64_t seed, TokenId eos, bool context_free = false,
             bool eos_first = false, double spread = 4.0)
      : seed_(seed), eos_(eos), context_free_(context_free),
        eos_first_(eos_first), spread_(spread) {}

  std::vector<double> Score(std::span<const TokenId> prefix,
                            std::span<const TokenId> candidates) override {
    uint64_t h = Mix(seed_);
    if (!context_free_) {
      for (TokenId t : prefix) h = Mix(h ^ static_cast<uint64_t>(t + 7));
      h = Mix(h ^ prefix.size());
    }
    std::vector<double> logits;
    double top = -1e300;
    for (TokenId c : candidates) {
      uint64_t v = Mix(h ^ (static_cast<uint64_t>(c) * 0x100000001b3ULL));
      double x = spread_ * static_cast<double>(v >> 11) / 9007199254740992.0;
      if (eos_first_ && prefix.empty() && c == eos_) x = spread_ + 1.0;
      logits.push_back(x);
      top = std::max(top, x);
    }
    double z = 0.0;
    for (double x : logits) z += std::exp(x - top);
    double log_z = top + std::log(z);
    for (double &x : logits) x = std::min(0.0, x - log_z);
    return logits;
  }

 private:
  uint64_t seed_;
  TokenId eos_;
  bool context_free_;
  bool eos_first_;
  double spread_;
};

// Prefers target[i] at position i (EOS past the end) and penalizes
// everything else, whatever the prefix looks like. An early EOS costs
// `early_eos` instead of the usual miss penalty.
class TargetScorer : public TokenScorer {
 public:
  TargetScorer(std::vector<TokenId> target, TokenId eos, double early_eos = -6.0)
      : target_(std::move(target)), eos_(eos), early_eos_(early_eos) {}
  std::vector<double> Score(std::span<const TokenId> prefix,
                            std::span<const TokenId> candidates) override {
    TokenId want = prefix.size() < target_.size() ? target_[prefix.size()] : eos_;
    std::vector<double> out;
    for (TokenId c : candidates) {
      if (c == want) {
        out.push_back(-0.01);
      } else {
        out.push_back(c == eos_ ? early_eos_ : -6.0);
      }
    }
    return out;
  }

 private:
  std::vector<TokenId> target_;
  TokenId eos_;
  double early_eos_;
};

struct Scored {
  std::vector<TokenId> tokens;
  double score;
  bool finished;
};

// Every unconstrained sequence the beam search could return: EOS-terminated
// ones of length <= max_len plus the length-capped ones without EOS.
// Sorted best first with the beam search's tie-break.
inline std::vector<Scored> Exhaustive(TokenScorer &scorer, const Tokenizer &tok,
                                      size_t max_len) {
  const TokenId eos = tok.SpecialId(Special::kEos);
  std::vector<TokenId> vocab(tok.VocabSize());
  for (size_t i = 0; i < vocab.size(); ++i) vocab[i] = static_cast<TokenId>(i);
  std::vector<Scored> out;
  std::vector<Scored> frontier{{{}, 0.0, false}};
  for (size_t step = 0; step < max_len; ++step) {
    std::vector<Scored> next;
    for (const Scored &s : frontier) {
      std::vector<double> lp = scorer.Score(s.tokens, vocab);
      for (size_t k = 0; k < vocab.size(); ++k) {
        Scored e{s.tokens, s.score + lp[k], vocab[k] == eos};
        e.tokens.push_back(vocab[k]);
        (e.finished ? out : next).push_back(std::move(e));
      }
    }
    frontier = std::move(next);
  }
  for (Scored &s : frontier) out.push_back(std::move(s));
  std::sort(out.begin(), out.end(), [](const Scored &a, const Scored &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tokens < b.tokens;
  });
  return out;
}

}  // namespace testing
}  // namespace closedie

#endif  // CLOSEDIE_TESTS_SCORER_FIXTURES_H_
