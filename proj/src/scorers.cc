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

#include "closedie/scorers.h"

#include <algorithm>
#include <cmath>

#include "closedie/errors.h"
#include "json.hpp"

namespace closedie {

void NgramCounts::Add(const std::vector<TokenId> &sequence, uint32_t weight) {
  std::span<const TokenId> all(sequence);
  for (size_t i = 0; i < sequence.size(); ++i) {
    for (int len = 0; len < order_; ++len) {
      Row &row = rows_[Key(all.first(i), len)];
      row.next[sequence[i]] += weight;
      row.total += weight;
    }
  }
}

std::string NgramCounts::Key(std::span<const TokenId> prefix,
                             int context_len) const {
  std::string key(1, static_cast<char>(context_len));
  for (int j = context_len; j > 0; --j) {
    TokenId t = prefix.size() >= static_cast<size_t>(j)
                    ? prefix[prefix.size() - static_cast<size_t>(j)]
                    : -1;
    key.append(reinterpret_cast<const char *>(&t), sizeof(t));
  }
  return key;
}

int NgramCounts::LongestSeen(std::span<const TokenId> prefix) const {
  for (int len = order_ - 1; len >= 0; --len) {
    if (rows_.count(Key(prefix, len))) return len;
  }
  return -1;
}

double NgramCounts::LogProb(std::span<const TokenId> prefix, int context_len,
                            TokenId token, size_t vocab_size) const {
  uint64_t count = 0;
  uint64_t total = 0;
  if (context_len >= 0) {
    auto it = rows_.find(Key(prefix, context_len));
    if (it != rows_.end()) {
      total = it->second.total;
      auto c = it->second.next.find(token);
      if (c != it->second.next.end()) count = c->second;
    }
  }
  return std::log(static_cast<double>(count + 1)) -
         std::log(static_cast<double>(total + vocab_size));
}

MockNgramScorer::MockNgramScorer(const Tokenizer &tok, int order,
                                 double eos_bias, uint32_t memorize_weight)
    : tok_(tok),
      order_(order),
      eos_bias_(eos_bias),
      memorize_weight_(memorize_weight),
      corpus_(order) {
  if (order < 1) throw ConfigError("n-gram order must be >= 1");
  if (memorize_weight < 1) throw ConfigError("memorize weight must be >= 1");
}

void MockNgramScorer::Fit(const std::vector<std::string> &targets) {
  for (const std::string &t : targets) {
    std::vector<TokenId> ids = tok_.Encode(t);
    ids.push_back(tok_.SpecialId(Special::kEos));
    corpus_.Add(ids);
  }
}

void MockNgramScorer::Fit(
    const std::vector<std::pair<std::string, std::string>> &pairs) {
  for (const auto &[source, target] : pairs) {
    std::vector<TokenId> ids = tok_.Encode(target);
    ids.push_back(tok_.SpecialId(Special::kEos));
    corpus_.Add(ids);
    by_source_.try_emplace(source, order_).first->second.Add(ids, memorize_weight_);
  }
}

void MockNgramScorer::SetSource(std::string_view source) {
  auto it = by_source_.find(std::string(source));
  current_ = it == by_source_.end() ? nullptr : &it->second;
}

std::vector<double> MockNgramScorer::Score(std::span<const TokenId> prefix,
                                           std::span<const TokenId> candidates) {
  const NgramCounts *counts = &corpus_;
  int len = corpus_.LongestSeen(prefix);
  if (current_ != nullptr) {
    int own = current_->LongestSeen(prefix);
    if (own >= len && own >= 0) {
      counts = current_;
      len = own;
    }
  }
  const size_t vocab = tok_.VocabSize();
  const TokenId eos = tok_.SpecialId(Special::kEos);
  double log_norm = 0.0;
  if (eos_bias_ != 0.0) {
    double p_eos = std::exp(counts->LogProb(prefix, len, eos, vocab));
    log_norm = std::log1p(p_eos * std::expm1(eos_bias_));
  }
  std::vector<double> out;
  out.reserve(candidates.size());
  for (TokenId t : candidates) {
    double lp = counts->LogProb(prefix, len, t, vocab) - log_norm;
    if (t == eos) lp += eos_bias_;
    out.push_back(std::min(lp, 0.0));
  }
  return out;
}

std::string LmRequestJson(std::span<const TokenId> prefix,
                          std::span<const TokenId> candidates,
                          const std::string &source) {
  nlohmann::ordered_json j;
  j["type"] = "lm";
  j["prefix"] = std::vector<TokenId>(prefix.begin(), prefix.end());
  j["candidates"] = std::vector<TokenId>(candidates.begin(), candidates.end());
  if (!source.empty()) j["source"] = source;
  return j.dump();
}

std::vector<double> ExternalTokenScorer::Score(
    std::span<const TokenId> prefix, std::span<const TokenId> candidates) {
  std::string reply = channel_->Roundtrip(LmRequestJson(prefix, candidates, source_));
  try {
    nlohmann::json j = nlohmann::json::parse(reply);
    std::vector<double> lp = j.at("logprobs").get<std::vector<double>>();
    if (lp.size() != candidates.size()) {
      throw ScorerError("scorer returned " + std::to_string(lp.size()) +
                        " logprobs for " + std::to_string(candidates.size()) +
                        " candidates");
    }
    return lp;
  } catch (const nlohmann::json::exception &e) {
    throw ScorerError(std::string("bad scorer response: ") + e.what());
  }
}

}  // namespace closedie
