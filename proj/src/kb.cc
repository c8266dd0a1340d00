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

#include "closedie/kb.h"

#include "closedie/errors.h"
#include "closedie/util.h"

namespace closedie {

namespace {

const std::set<std::string> &EmptySet() {
  static const std::set<std::string> empty;
  return empty;
}

// Splits a TSV line into exactly `n` non-empty fields. The last field may
// be empty when `allow_empty_last` is set (relation descriptions).
std::vector<std::string> Fields(const std::string &path, size_t lineno,
                                const std::string &line, size_t n,
                                bool allow_empty_last) {
  std::vector<std::string_view> parts = Split(line, '\t');
  if (parts.size() != n) {
    throw LoadError(path, lineno,
                    "expected " + std::to_string(n) + " tab-separated fields, got " +
                        std::to_string(parts.size()));
  }
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    if (parts[i].empty() && !(allow_empty_last && i + 1 == n)) {
      throw LoadError(path, lineno, "empty field " + std::to_string(i + 1));
    }
    out.emplace_back(parts[i]);
  }
  return out;
}

}  // namespace

KbStore KbStore::Load(const std::string &entities_path,
                      const std::string &relations_path,
                      const std::string &triples_path) {
  KbStore kb;
  size_t lineno = 0;
  for (const std::string &line : ReadLines(entities_path)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = Fields(entities_path, lineno, line, 2, false);
    kb.AddEntity(std::move(f[0]), std::move(f[1]));
  }
  lineno = 0;
  for (const std::string &line : ReadLines(relations_path)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = Fields(relations_path, lineno, line, 3, true);
    kb.AddRelation(std::move(f[0]), std::move(f[1]), std::move(f[2]));
  }
  lineno = 0;
  for (const std::string &line : ReadLines(triples_path)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = Fields(triples_path, lineno, line, 3, false);
    try {
      kb.AddTriple({std::move(f[0]), std::move(f[1]), std::move(f[2])});
    } catch (const IntegrityError &e) {
      throw IntegrityError(triples_path + ":" + std::to_string(lineno) + ": " +
                           e.what());
    }
  }
  return kb;
}

void KbStore::AddEntity(std::string qid, std::string title) {
  if (qid.empty() || title.empty()) {
    throw IntegrityError("entity with empty qid or title");
  }
  if (entity_by_qid_.count(qid)) {
    throw IntegrityError("duplicate entity id " + qid);
  }
  if (entity_by_title_.count(title)) {
    throw IntegrityError("duplicate entity title \"" + title + "\"");
  }
  size_t index = entities_.size();
  entity_by_qid_.emplace(qid, index);
  entity_by_title_.emplace(title, index);
  entities_.push_back({std::move(qid), std::move(title)});
}

void KbStore::AddRelation(std::string pid, std::string label,
                          std::string description) {
  if (pid.empty() || label.empty()) {
    throw IntegrityError("relation with empty pid or label");
  }
  if (relation_by_pid_.count(pid)) {
    throw IntegrityError("duplicate relation id " + pid);
  }
  if (relation_by_label_.count(label)) {
    throw IntegrityError("duplicate relation label \"" + label + "\"");
  }
  size_t index = relations_.size();
  relation_by_pid_.emplace(pid, index);
  relation_by_label_.emplace(label, index);
  relations_.push_back({std::move(pid), std::move(label), std::move(description)});
}

bool KbStore::AddTriple(const Triple &triple) {
  if (!HasEntity(triple.head)) {
    throw IntegrityError("triple head " + triple.head + " is not an entity");
  }
  if (!HasRelation(triple.relation)) {
    throw IntegrityError("triple relation " + triple.relation +
                         " is not a relation");
  }
  if (!HasEntity(triple.tail) && !IsYearLiteral(triple.tail)) {
    throw IntegrityError("triple tail " + triple.tail +
                         " is neither an entity nor a year");
  }
  auto &pids = pairs_[PairKey(triple.head, triple.tail)];
  bool inserted = pids.insert(triple.relation).second;
  if (inserted) ++num_triples_;
  return inserted;
}

const std::set<std::string> &KbStore::RelationsBetween(
    std::string_view head, std::string_view tail) const {
  auto it = pairs_.find(PairKey(head, tail));
  return it == pairs_.end() ? EmptySet() : it->second;
}

std::optional<std::string> KbStore::ResolveTitle(std::string_view title) const {
  auto it = entity_by_title_.find(std::string(title));
  if (it == entity_by_title_.end()) return std::nullopt;
  return entities_[it->second].qid;
}

std::optional<std::string> KbStore::EntityLabel(std::string_view qid) const {
  auto it = entity_by_qid_.find(std::string(qid));
  if (it == entity_by_qid_.end()) return std::nullopt;
  return entities_[it->second].title;
}

std::optional<std::string> KbStore::ResolveRelationLabel(
    std::string_view label) const {
  auto it = relation_by_label_.find(std::string(label));
  if (it == relation_by_label_.end()) return std::nullopt;
  return relations_[it->second].pid;
}

std::optional<std::string> KbStore::RelationLabel(std::string_view pid) const {
  auto it = relation_by_pid_.find(std::string(pid));
  if (it == relation_by_pid_.end()) return std::nullopt;
  return relations_[it->second].label;
}

std::optional<std::string> KbStore::EndpointLabel(std::string_view value) const {
  if (auto label = EntityLabel(value)) return label;
  if (IsYearLiteral(value)) return std::string(value);
  return std::nullopt;
}

bool KbStore::HasEntity(std::string_view qid) const {
  return entity_by_qid_.count(std::string(qid)) > 0;
}

bool KbStore::HasRelation(std::string_view pid) const {
  return relation_by_pid_.count(std::string(pid)) > 0;
}

std::string KbStore::PairKey(std::string_view head, std::string_view tail) {
  // Tabs never occur inside TSV fields, so the key is unambiguous.
  std::string key;
  key.reserve(head.size() + tail.size() + 1);
  key.append(head);
  key.push_back('\t');
  key.append(tail);
  return key;
}

}  // namespace closedie
