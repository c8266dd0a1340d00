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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>
#include <string>
#include <vector>

#include "closedie/errors.h"
#include "closedie/kb.h"
#include "closedie/util.h"
#include "test_util.h"

namespace closedie {
namespace {

using testing::Data;
using testing::TempDir;

struct KbFiles {
  std::string entities, relations, triples;
};

KbFiles Write(const TempDir &dir, const std::string &ent, const std::string &rel,
              const std::string &tri) {
  KbFiles f{dir.File("e.tsv"), dir.File("r.tsv"), dir.File("t.tsv")};
  WriteFile(f.entities, ent);
  WriteFile(f.relations, rel);
  WriteFile(f.triples, tri);
  return f;
}

KbStore Load(const KbFiles &f) { return KbStore::Load(f.entities, f.relations, f.triples); }

TEST_CASE("empty files give an empty store") {
  TempDir dir;
  KbStore kb = Load(Write(dir, "", "", ""));
  CHECK(kb.num_entities() == 0);
  CHECK(kb.num_relations() == 0);
  CHECK(kb.num_triples() == 0);
  CHECK(kb.RelationsBetween("Q1", "Q2").empty());
  CHECK_FALSE(kb.ResolveTitle("anything"));
  CHECK_FALSE(kb.EntityLabel("Q1"));
  CHECK_FALSE(kb.RelationLabel("P1"));
}

TEST_CASE("title resolution and labels on the fixture files") {
  KbStore kb = KbStore::Load(Data("kb_entities.tsv"), Data("kb_relations.tsv"),
                             Data("kb_triples.tsv"));
  CHECK(kb.ResolveTitle("United Kingdom") == "Q145");
  CHECK(kb.EntityLabel("Q38") == "Italy");
  CHECK_FALSE(kb.ResolveTitle("no-such-title"));
  CHECK(kb.ResolveRelationLabel("capital") == "P36");
  CHECK(kb.RelationLabel("P17") == "country");
  for (const Entity &e : kb.entities()) {
    CHECK(kb.ResolveTitle(*kb.EntityLabel(e.qid)) == e.qid);
    CHECK(kb.EntityLabel(*kb.ResolveTitle(e.title)) == e.title);
  }
  // The fixture lists one triple twice.
  CHECK(kb.num_triples() == 28);
}

TEST_CASE("duplicate triples are merged into the pair index") {
  TempDir dir;
  KbStore kb = Load(Write(dir, "Q62\tSan Francisco\nQ30\tUnited States\n",
                          "P17\tcountry\tsovereign state\nP131\tlocated in\t\n",
                          "Q62\tP17\tQ30\nQ62\tP131\tQ30\nQ62\tP17\tQ30\n"
                          "Q30\tP131\tQ62\n"));
  CHECK(kb.num_triples() == 3);
  CHECK(kb.num_pairs() == 2);
  CHECK(kb.RelationsBetween("Q62", "Q30") == std::set<std::string>{"P17", "P131"});
  CHECK(kb.RelationsBetween("Q30", "Q62") == std::set<std::string>{"P131"});
}

TEST_CASE("relations are directional") {
  KbStore kb;
  kb.AddEntity("Q62", "San Francisco");
  kb.AddEntity("Q30", "United States");
  kb.AddRelation("P17", "country");
  CHECK(kb.AddTriple({"Q62", "P17", "Q30"}));
  CHECK_FALSE(kb.AddTriple({"Q62", "P17", "Q30"}));
  CHECK(kb.RelationsBetween("Q62", "Q30") == std::set<std::string>{"P17"});
  CHECK(kb.RelationsBetween("Q30", "Q62").empty());
}

TEST_CASE("year tails are stored as literals") {
  KbStore kb;
  kb.AddEntity("Q312", "Apple Inc.");
  kb.AddRelation("P571", "inception");
  kb.AddTriple({"Q312", "P571", "1976"});
  CHECK(kb.RelationsBetween("Q312", "1976") == std::set<std::string>{"P571"});
  CHECK(kb.EndpointLabel("1976") == "1976");
  CHECK(kb.EndpointLabel("Q312") == "Apple Inc.");
  CHECK_THROWS_AS(kb.AddTriple({"Q312", "P571", "19760"}), IntegrityError);
}

TEST_CASE("malformed lines report their line number") {
  TempDir dir;
  auto f = Write(dir, "Q1\tOne\nQ2 Two\n", "", "");
  try {
    Load(f);
    FAIL("expected LoadError");
  } catch (const LoadError &e) {
    CHECK(e.line() == 2);
  }
  f = Write(dir, "Q1\tOne\n", "P1\tr\td\n", "Q1\tP1\n");
  CHECK_THROWS_AS(Load(f), LoadError);
}

TEST_CASE("integrity errors") {
  TempDir dir;
  CHECK_THROWS_AS(Load(Write(dir, "Q1\tOne\nQ1\tUno\n", "", "")), IntegrityError);
  CHECK_THROWS_AS(Load(Write(dir, "Q1\tOne\nQ2\tOne\n", "", "")), IntegrityError);
  CHECK_THROWS_AS(Load(Write(dir, "", "P1\ta\t\nP1\tb\t\n", "")), IntegrityError);
  CHECK_THROWS_AS(Load(Write(dir, "", "P1\ta\t\nP2\ta\t\n", "")), IntegrityError);
  CHECK_THROWS_AS(Load(Write(dir, "Q1\tOne\n", "P1\ta\t\n", "Q9\tP1\tQ1\n")),
                  IntegrityError);
  CHECK_THROWS_AS(Load(Write(dir, "Q1\tOne\n", "P1\ta\t\n", "Q1\tP9\tQ1\n")),
                  IntegrityError);
}

TEST_CASE("titles are case sensitive") {
  KbStore kb;
  kb.AddEntity("Q1", "Apple");
  kb.AddEntity("Q2", "apple");
  CHECK(kb.ResolveTitle("Apple") == "Q1");
  CHECK(kb.ResolveTitle("apple") == "Q2");
  CHECK_FALSE(kb.ResolveTitle("APPLE"));
}

TEST_CASE("relations_between matches a scan of the raw triples") {
  Rng rng(11);
  for (int round = 0; round < 20; ++round) {
    TempDir dir;
    const int n_ent = 30, n_rel = 6;
    std::string ent, rel, tri;
    for (int i = 0; i < n_ent; ++i) {
      ent += "Q" + std::to_string(i) + "\tEntity " + std::to_string(i) + "\n";
    }
    for (int i = 0; i < n_rel; ++i) {
      rel += "P" + std::to_string(i) + "\trel " + std::to_string(i) + "\t\n";
    }
    std::vector<Triple> raw;
    for (int i = 0; i < 300; ++i) {
      Triple t{"Q" + std::to_string(rng.Below(n_ent)), "P" + std::to_string(rng.Below(n_rel)),
               rng.Below(5) == 0 ? std::to_string(1900 + rng.Below(100))
                                 : "Q" + std::to_string(rng.Below(n_ent))};
      raw.push_back(t);
      tri += t.head + "\t" + t.relation + "\t" + t.tail + "\n";
    }
    auto files = Write(dir, ent, rel, tri);
    KbStore kb = Load(files);
    KbStore again = Load(files);

    std::map<std::pair<std::string, std::string>, std::set<std::string>> oracle;
    for (const Triple &t : raw) oracle[{t.head, t.tail}].insert(t.relation);
    CHECK(kb.num_pairs() == oracle.size());
    std::set<Triple> distinct(raw.begin(), raw.end());
    CHECK(kb.num_triples() == distinct.size());

    std::vector<std::string> tails;
    for (int i = 0; i < n_ent; ++i) tails.push_back("Q" + std::to_string(i));
    for (int y = 1900; y < 2000; ++y) tails.push_back(std::to_string(y));
    for (int h = 0; h < n_ent; ++h) {
      std::string head = "Q" + std::to_string(h);
      for (const std::string &tail : tails) {
        auto it = oracle.find({head, tail});
        const std::set<std::string> want =
            it == oracle.end() ? std::set<std::string>{} : it->second;
        REQUIRE(kb.RelationsBetween(head, tail) == want);
        REQUIRE(again.RelationsBetween(head, tail) == want);
      }
    }
  }
}

}  // namespace
}  // namespace closedie
