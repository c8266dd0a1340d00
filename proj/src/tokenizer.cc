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

#include "closedie/tokenizer.h"

#include "closedie/linearize.h"

namespace closedie {

namespace {

constexpr std::array<std::string_view, kNumSpecials> kSpecialTexts = {
    kSubToken,    kRelToken,    kObjToken,       kEtToken,        kEntityToken,
    kTripleToken, kElPromptToken, kTriPromptToken, "</s>",
};

// Special literal starting at `pos`, if any. No literal is a prefix of
// another, so the first match is the only one.
std::optional<Special> MatchSpecial(std::string_view text, size_t pos) {
  for (int i = 0; i < kNumSpecials; ++i) {
    if (text.compare(pos, kSpecialTexts[i].size(), kSpecialTexts[i]) == 0) {
      return static_cast<Special>(i);
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view SpecialText(Special s) {
  return kSpecialTexts[static_cast<int>(s)];
}

bool Tokenizer::IsSpecial(TokenId id) const { return AsSpecial(id).has_value(); }

std::optional<Special> Tokenizer::AsSpecial(TokenId id) const {
  for (int i = 0; i < kNumSpecials; ++i) {
    if (SpecialId(static_cast<Special>(i)) == id) return static_cast<Special>(i);
  }
  return std::nullopt;
}

std::vector<TokenId> ByteTokenizer::Encode(std::string_view text) const {
  std::vector<TokenId> ids;
  ids.reserve(text.size());
  size_t i = 0;
  bool after_special = false;
  while (i < text.size()) {
    if (text[i] == '<' || text[i] == '[') {
      if (auto s = MatchSpecial(text, i)) {
        // Drop one space right before the special.
        if (!after_special && !ids.empty() && ids.back() == ' ') ids.pop_back();
        ids.push_back(SpecialId(*s));
        i += SpecialText(*s).size();
        // And one right after it.
        if (i < text.size() && text[i] == ' ') ++i;
        after_special = true;
        continue;
      }
    }
    ids.push_back(static_cast<unsigned char>(text[i]));
    after_special = false;
    ++i;
  }
  return ids;
}

std::string ByteTokenizer::Decode(std::span<const TokenId> ids) const {
  std::string out;
  bool prev_special = false;
  for (size_t i = 0; i < ids.size(); ++i) {
    TokenId id = ids[i];
    if (id >= 0 && id < kFirstSpecial) {
      if (prev_special) out += ' ';
      out += static_cast<char>(id);
      prev_special = false;
    } else if (auto s = AsSpecial(id)) {
      if (i > 0) out += ' ';
      out += SpecialText(*s);
      prev_special = true;
    }
  }
  return out;
}

}  // namespace closedie
