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

#ifndef CLOSEDIE_TOKENIZER_H_
#define CLOSEDIE_TOKENIZER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace closedie {

using TokenId = int32_t;

enum class Special : int {
  kSub = 0,
  kRel,
  kObj,
  kEt,
  kEntity,
  kTriple,
  kElPrompt,
  kTriPrompt,
  kEos,
};
inline constexpr int kNumSpecials = 9;

// Literal text of a special token. EOS renders as "</s>".
std::string_view SpecialText(Special s);

// Maps text to token ids and back. Each special token is atomic: it has
// exactly one reserved id and is never split.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<TokenId> Encode(std::string_view text) const = 0;
  virtual std::string Decode(std::span<const TokenId> ids) const = 0;

  // Ids are dense in [0, VocabSize()).
  virtual size_t VocabSize() const = 0;
  virtual TokenId SpecialId(Special s) const = 0;

  bool IsSpecial(TokenId id) const;
  std::optional<Special> AsSpecial(TokenId id) const;
};

// Bytes 0-255 map to themselves; specials take ids 256 and up.
//
// Special tokens absorb one adjacent ASCII space on each side when encoding
// and Decode() puts exactly one space between a special and its neighbours.
// Subword tokenizers for seq2seq models treat their added tokens the same
// way, and it lets "<sub> A <rel> r <obj> B <et>" and the constrained
// sequence [<sub>, 'A', <rel>, 'r', <obj>, 'B', <et>] be one and the same.
// Decode(Encode(x)) == x for any string without special-token literals and
// for canonically spaced linearized targets.
class ByteTokenizer : public Tokenizer {
 public:
  static constexpr TokenId kFirstSpecial = 256;

  std::vector<TokenId> Encode(std::string_view text) const override;
  std::string Decode(std::span<const TokenId> ids) const override;
  size_t VocabSize() const override { return kFirstSpecial + kNumSpecials; }
  TokenId SpecialId(Special s) const override {
    return kFirstSpecial + static_cast<TokenId>(s);
  }
};

}  // namespace closedie

#endif  // CLOSEDIE_TOKENIZER_H_
