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

#ifndef CLOSEDIE_SCORERS_H_
#define CLOSEDIE_SCORERS_H_

#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "closedie/channel.h"
#include "closedie/decode.h"

namespace closedie {

// Token n-gram counts with add-one smoothing.
class NgramCounts {
 public:
  explicit NgramCounts(int order) : order_(order) {}

  // Counts every position of `sequence` (which should end in EOS) under
  // contexts of length 0 .. order-1, padding the start with -1.
  void Add(const std::vector<TokenId> &sequence, uint32_t weight = 1);

  // Longest context length (<= order-1) ending `prefix` that was seen in
  // training, or -1 if none was.
  int LongestSeen(std::span<const TokenId> prefix) const;

  // Add-one smoothed log p(token | last `context_len` tokens of prefix).
  double LogProb(std::span<const TokenId> prefix, int context_len,
                 TokenId token, size_t vocab_size) const;

 private:
  struct Row {
    std::unordered_map<TokenId, uint32_t> next;
    uint64_t total = 0;
  };
  std::string Key(std::span<const TokenId> prefix, int context_len) const;

  int order_;
  std::unordered_map<std::string, Row> rows_;
};

// Deterministic stand-in for a trained decoder. It is fit on gold target
// strings; when the current source sentence was seen in training, counts
// from that sentence's own target take precedence over corpus counts, so
// decoding a training sentence tends to reproduce its target.
//
// Per-sentence counts are added `memorize_weight` times. With add-one
// smoothing over the whole vocabulary a single observation gives each
// token well under 1% probability, which no multi-token output can
// survive against an immediate EOS.
//
// `eos_bias` multiplies the EOS probability by exp(eos_bias) before
// renormalizing; a large value makes every output empty.
class MockNgramScorer : public TokenScorer {
 public:
  MockNgramScorer(const Tokenizer &tok, int order = 4, double eos_bias = 0.0,
                  uint32_t memorize_weight = 1000000);

  // Corpus-level training on targets.
  void Fit(const std::vector<std::string> &targets);
  // Training on (source, target) pairs; also updates corpus counts.
  void Fit(const std::vector<std::pair<std::string, std::string>> &pairs);

  std::vector<double> Score(std::span<const TokenId> prefix,
                            std::span<const TokenId> candidates) override;
  void SetSource(std::string_view source) override;
  bool SerializesRequests() const override { return false; }

 private:
  // Full normalized log distribution over the vocabulary.
  std::vector<double> Distribution(std::span<const TokenId> prefix) const;

  const Tokenizer &tok_;
  int order_;
  double eos_bias_;
  uint32_t memorize_weight_;
  NgramCounts corpus_;
  std::unordered_map<std::string, NgramCounts> by_source_;
  const NgramCounts *current_ = nullptr;
};

// Scorer reached over the line protocol:
//   {"type":"lm","prefix":[ids],"candidates":[ids]}  ->  {"logprobs":[...]}
// When a source sentence has been set, requests also carry "source".
class ExternalTokenScorer : public TokenScorer {
 public:
  explicit ExternalTokenScorer(std::unique_ptr<LineChannel> channel)
      : channel_(std::move(channel)) {}

  std::vector<double> Score(std::span<const TokenId> prefix,
                            std::span<const TokenId> candidates) override;
  void SetSource(std::string_view source) override { source_ = source; }

 private:
  std::unique_ptr<LineChannel> channel_;
  std::string source_;
};

// Request line for the token scorer protocol. Exposed for tests.
std::string LmRequestJson(std::span<const TokenId> prefix,
                          std::span<const TokenId> candidates,
                          const std::string &source);

}  // namespace closedie

#endif  // CLOSEDIE_SCORERS_H_
