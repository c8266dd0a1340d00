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

#ifndef CLOSEDIE_TRIE_H_
#define CLOSEDIE_TRIE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "closedie/kb.h"
#include "closedie/tokenizer.h"

namespace closedie {

// Tokens that may follow a prefix, and whether the prefix is itself a
// complete label.
struct Continuations {
  std::vector<TokenId> tokens;  // ascending
  bool complete = false;
};

// Token-level prefix tree over a label vocabulary. Nodes live in a flat
// array; children are kept sorted by token id so iteration and
// serialization are deterministic. Read-only after construction.
class ConstraintTrie {
 public:
  ConstraintTrie();

  // Encodes every label with `tok` and inserts it. Duplicates are ignored.
  // Throws Error for an empty label or one whose encoding contains a
  // special token.
  static ConstraintTrie Build(const std::vector<std::string> &labels,
                              const Tokenizer &tok);

  // Returns false if the sequence was already present. Throws Error for an
  // empty sequence.
  bool Insert(std::span<const TokenId> sequence);

  bool Contains(std::span<const TokenId> sequence) const;

  // Tokens u such that prefix + u is a prefix of some stored sequence.
  // A prefix that leaves the trie yields no tokens and complete == false.
  Continuations AllowedContinuations(std::span<const TokenId> prefix) const;

  size_t num_nodes() const { return nodes_.size(); }
  size_t num_sequences() const { return num_sequences_; }

  // Binary cache: "TRI1", varint node count, then per node in preorder
  // varint token id (0 for the root), varint child count, terminal byte.
  std::string Serialize() const;
  static ConstraintTrie Deserialize(std::string_view data);

  void Save(const std::string &path) const;
  static ConstraintTrie LoadFile(const std::string &path);

  bool operator==(const ConstraintTrie &other) const;

 private:
  struct Node {
    std::vector<std::pair<TokenId, uint32_t>> children;
    bool terminal = false;
  };

  std::optional<uint32_t> Walk(std::span<const TokenId> prefix) const;
  std::optional<uint32_t> Child(uint32_t node, TokenId token) const;

  std::vector<Node> nodes_;
  size_t num_sequences_ = 0;
};

// Year strings "1" through "2100", the tail labels admitted for dates.
std::vector<std::string> YearLabels(int first = 1, int last = 2100);

// The three tries used during constrained decoding. The object trie is the
// entity vocabulary plus year literals; subject positions use entities only.
struct KbTries {
  ConstraintTrie entity;
  ConstraintTrie relation;
  ConstraintTrie object;
};

KbTries BuildKbTries(const KbStore &kb, const Tokenizer &tok,
                     bool include_years = true);

}  // namespace closedie

#endif  // CLOSEDIE_TRIE_H_
