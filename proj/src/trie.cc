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

#include "closedie/trie.h"

#include <algorithm>

#include "closedie/errors.h"
#include "closedie/util.h"

namespace closedie {

namespace {

constexpr std::string_view kMagic = "TRI1";

void PutVarint(std::string *out, uint64_t v) {
  while (v >= 0x80) {
    out->push_back(static_cast<char>((v & 0x7F) | 0x80));
    v >>= 7;
  }
  out->push_back(static_cast<char>(v));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  uint64_t Varint() {
    uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      uint8_t b = Byte();
      v |= static_cast<uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80)) return v;
    }
    throw LoadError("trie cache: varint too long");
  }

  uint8_t Byte() {
    if (pos_ >= data_.size()) throw LoadError("trie cache: truncated");
    return static_cast<uint8_t>(data_[pos_++]);
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  size_t pos_ = 0;
};

}  // namespace

ConstraintTrie::ConstraintTrie() : nodes_(1) {}

ConstraintTrie ConstraintTrie::Build(const std::vector<std::string> &labels,
                                     const Tokenizer &tok) {
  ConstraintTrie trie;
  for (const std::string &label : labels) {
    if (label.empty()) throw Error("trie: empty label");
    std::vector<TokenId> ids = tok.Encode(label);
    for (TokenId id : ids) {
      if (tok.IsSpecial(id)) {
        throw Error("trie: label \"" + label + "\" contains a special token");
      }
    }
    trie.Insert(ids);
  }
  return trie;
}

std::optional<uint32_t> ConstraintTrie::Child(uint32_t node,
                                              TokenId token) const {
  const auto &kids = nodes_[node].children;
  auto it = std::lower_bound(
      kids.begin(), kids.end(), token,
      [](const std::pair<TokenId, uint32_t> &c, TokenId t) { return c.first < t; });
  if (it == kids.end() || it->first != token) return std::nullopt;
  return it->second;
}

bool ConstraintTrie::Insert(std::span<const TokenId> sequence) {
  if (sequence.empty()) throw Error("trie: empty sequence");
  uint32_t node = 0;
  for (TokenId token : sequence) {
    auto &kids = nodes_[node].children;
    auto it = std::lower_bound(
        kids.begin(), kids.end(), token,
        [](const std::pair<TokenId, uint32_t> &c, TokenId t) { return c.first < t; });
    if (it != kids.end() && it->first == token) {
      node = it->second;
      continue;
    }
    uint32_t child = static_cast<uint32_t>(nodes_.size());
    kids.insert(it, {token, child});
    // `kids` may dangle after this push_back; it is not used again.
    nodes_.emplace_back();
    node = child;
  }
  if (nodes_[node].terminal) return false;
  nodes_[node].terminal = true;
  ++num_sequences_;
  return true;
}

std::optional<uint32_t> ConstraintTrie::Walk(
    std::span<const TokenId> prefix) const {
  uint32_t node = 0;
  for (TokenId token : prefix) {
    auto next = Child(node, token);
    if (!next) return std::nullopt;
    node = *next;
  }
  return node;
}

bool ConstraintTrie::Contains(std::span<const TokenId> sequence) const {
  auto node = Walk(sequence);
  return node && nodes_[*node].terminal;
}

Continuations ConstraintTrie::AllowedContinuations(
    std::span<const TokenId> prefix) const {
  Continuations out;
  auto node = Walk(prefix);
  if (!node) return out;
  const Node &n = nodes_[*node];
  out.tokens.reserve(n.children.size());
  for (const auto &[token, child] : n.children) out.tokens.push_back(token);
  out.complete = n.terminal;
  return out;
}

std::string ConstraintTrie::Serialize() const {
  std::string out(kMagic);
  PutVarint(&out, nodes_.size());
  // Explicit stack of (node, incoming token); children pushed in reverse so
  // they pop in ascending token order.
  std::vector<std::pair<uint32_t, TokenId>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [node, token] = stack.back();
    stack.pop_back();
    const Node &n = nodes_[node];
    PutVarint(&out, static_cast<uint32_t>(token));
    PutVarint(&out, n.children.size());
    out.push_back(n.terminal ? 1 : 0);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      stack.emplace_back(it->second, it->first);
    }
  }
  return out;
}

ConstraintTrie ConstraintTrie::Deserialize(std::string_view data) {
  if (data.substr(0, kMagic.size()) != kMagic) {
    throw LoadError("trie cache: bad magic");
  }
  Reader in(data.substr(kMagic.size()));
  uint64_t count = in.Varint();
  if (count == 0) throw LoadError("trie cache: no root node");
  ConstraintTrie trie;
  trie.nodes_.clear();
  trie.nodes_.reserve(count);
  // Each frame is a node still waiting for `remaining` children.
  struct Frame {
    uint32_t node;
    uint64_t remaining;
  };
  std::vector<Frame> stack;
  for (uint64_t i = 0; i < count; ++i) {
    uint64_t token = in.Varint();
    uint64_t kids = in.Varint();
    uint8_t terminal = in.Byte();
    if (terminal > 1) throw LoadError("trie cache: bad terminal flag");
    uint32_t id = static_cast<uint32_t>(trie.nodes_.size());
    trie.nodes_.emplace_back();
    trie.nodes_[id].terminal = terminal == 1;
    if (terminal) ++trie.num_sequences_;
    if (i == 0) {
      if (token != 0) throw LoadError("trie cache: root token must be 0");
    } else {
      if (stack.empty()) throw LoadError("trie cache: orphan node");
      Frame &parent = stack.back();
      auto &siblings = trie.nodes_[parent.node].children;
      TokenId t = static_cast<TokenId>(token);
      if (!siblings.empty() && siblings.back().first >= t) {
        throw LoadError("trie cache: children out of order");
      }
      siblings.emplace_back(t, id);
      if (--parent.remaining == 0) stack.pop_back();
    }
    if (kids > 0) {
      stack.push_back({id, kids});
    } else if (!terminal && i > 0) {
      throw LoadError("trie cache: dead-end node");
    }
  }
  if (!stack.empty() || !in.done()) {
    throw LoadError("trie cache: node count does not match structure");
  }
  return trie;
}

void ConstraintTrie::Save(const std::string &path) const {
  WriteFile(path, Serialize());
}

ConstraintTrie ConstraintTrie::LoadFile(const std::string &path) {
  return Deserialize(ReadFile(path));
}

bool ConstraintTrie::operator==(const ConstraintTrie &other) const {
  return Serialize() == other.Serialize();
}

std::vector<std::string> YearLabels(int first, int last) {
  std::vector<std::string> years;
  for (int y = first; y <= last; ++y) years.push_back(std::to_string(y));
  return years;
}

KbTries BuildKbTries(const KbStore &kb, const Tokenizer &tok,
                     bool include_years) {
  std::vector<std::string> entity_labels;
  entity_labels.reserve(kb.num_entities());
  for (const Entity &e : kb.entities()) entity_labels.push_back(e.title);
  std::vector<std::string> relation_labels;
  for (const Relation &r : kb.relations()) relation_labels.push_back(r.label);

  KbTries tries;
  tries.entity = ConstraintTrie::Build(entity_labels, tok);
  tries.relation = ConstraintTrie::Build(relation_labels, tok);
  tries.object = tries.entity;
  if (include_years) {
    for (const std::string &y : YearLabels()) tries.object.Insert(tok.Encode(y));
  }
  return tries;
}

}  // namespace closedie
