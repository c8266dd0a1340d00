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

#ifndef CLOSEDIE_KB_H_
#define CLOSEDIE_KB_H_

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace closedie {

struct Entity {
  std::string qid;
  std::string title;
};

struct Relation {
  std::string pid;
  std::string label;
  std::string description;
};

// A KB fact. The tail is either an entity id or a year literal.
struct Triple {
  std::string head;
  std::string relation;
  std::string tail;

  auto operator<=>(const Triple &) const = default;
  bool operator==(const Triple &) const = default;
};

// In-memory knowledge base. Entities and relations are bijections between
// ids and labels; triples are indexed by directed (head, tail) pair so that
// distant supervision can ask which relations hold between two mentions.
//
// The store is filled once through Add*() or Load() and is read-only
// afterwards, so concurrent lookups need no locking.
class KbStore {
 public:
  // Loads the three TSV files (qid/title, pid/label/description,
  // head/pid/tail). Throws LoadError on malformed lines and IntegrityError
  // on duplicate ids or labels and on triples with unknown endpoints.
  static KbStore Load(const std::string &entities_path,
                      const std::string &relations_path,
                      const std::string &triples_path);

  void AddEntity(std::string qid, std::string title);
  void AddRelation(std::string pid, std::string label,
                   std::string description = "");
  // Returns false if the triple was already present.
  bool AddTriple(const Triple &triple);

  // Pids of stored triples with exactly this directed (head, tail). Unknown
  // ids give an empty set.
  const std::set<std::string> &RelationsBetween(std::string_view head,
                                                std::string_view tail) const;

  std::optional<std::string> ResolveTitle(std::string_view title) const;
  std::optional<std::string> EntityLabel(std::string_view qid) const;
  std::optional<std::string> ResolveRelationLabel(std::string_view label) const;
  std::optional<std::string> RelationLabel(std::string_view pid) const;

  // Label for a triple endpoint: the entity title, or the literal itself
  // for year tails.
  std::optional<std::string> EndpointLabel(std::string_view value) const;

  bool HasEntity(std::string_view qid) const;
  bool HasRelation(std::string_view pid) const;

  size_t num_entities() const { return entities_.size(); }
  size_t num_relations() const { return relations_.size(); }
  size_t num_triples() const { return num_triples_; }
  size_t num_pairs() const { return pairs_.size(); }

  // Entities and relations in insertion order.
  const std::vector<Entity> &entities() const { return entities_; }
  const std::vector<Relation> &relations() const { return relations_; }

 private:
  static std::string PairKey(std::string_view head, std::string_view tail);

  std::vector<Entity> entities_;
  std::vector<Relation> relations_;
  std::unordered_map<std::string, size_t> entity_by_qid_;
  std::unordered_map<std::string, size_t> entity_by_title_;
  std::unordered_map<std::string, size_t> relation_by_pid_;
  std::unordered_map<std::string, size_t> relation_by_label_;
  std::unordered_map<std::string, std::set<std::string>> pairs_;
  size_t num_triples_ = 0;
};

}  // namespace closedie

#endif  // CLOSEDIE_KB_H_
