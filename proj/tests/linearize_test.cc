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

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "closedie/errors.h"
#include "closedie/linearize.h"
#include "closedie/util.h"
#include "test_util.h"

namespace closedie {
namespace {

using testing::MakeSentence;
using testing::WorkedKb;

LinkedSentence UkLondon() {
  return MakeSentence("The UK government sits in London.", {{"UK", "Q145"}, {"London", "Q84"}});
}

TEST_CASE("single triple orders to itself") {
  std::vector<Triple> t = {{"Q145", "P36", "Q84"}};
  CHECK(OrderTriples(t, UkLondon()) == t);
}

TEST_CASE("shared head orders by tail offset") {
  // Tails at code points 10 and 40.
  LinkedSentence s;
  s.text = std::string(10, 'x') + "AAAA" + std::string(26, 'y') + "BBBB" + "z";
  s.spans = {{0, 4, "xxxx", "H"}, {10, 14, "AAAA", "T10"}, {40, 44, "BBBB", "T40"}};
  ValidateSpans(s);
  std::vector<Triple> in = {{"H", "P1", "T40"}, {"H", "P1", "T10"}};
  auto out = OrderTriples(in, s);
  CHECK(out[0].tail == "T10");
  CHECK(out[1].tail == "T40");
}

TEST_CASE("ordering ignores input permutation") {
  LinkedSentence s = MakeSentence(
      "London and Rome, capitals of the United Kingdom and Italy, with Apple Inc.",
      {{"London", "Q84"}, {"Rome", "Q220"}, {"United Kingdom", "Q145"},
       {"Italy", "Q38"}, {"Apple Inc.", "Q312"}});
  std::vector<Triple> base = {{"Q84", "P17", "Q145"},
                              {"Q84", "P1376", "Q145"},
                              {"Q220", "P17", "Q38"},
                              {"Q145", "P36", "Q84"},
                              {"Q38", "P36", "Q220"}};
  // Oracle: sort by (first head offset, first tail offset, pid).
  std::vector<Triple> want = base;
  std::sort(want.begin(), want.end(), [&](const Triple &a, const Triple &b) {
    auto key = [&](const Triple &t) {
      return std::make_tuple(*s.FirstOffsetOf(t.head), *s.FirstOffsetOf(t.tail), t.relation);
    };
    return key(a) < key(b);
  });
  std::vector<Triple> perm = base;
  std::sort(perm.begin(), perm.end());
  do {
    REQUIRE(OrderTriples(perm, s) == want);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("triples without mentions are rejected") {
  CHECK_THROWS_AS(OrderTriples({{"Q145", "P36", "Q220"}}, UkLondon()), ResolveError);
  try {
    OrderTriples({{"Q9", "P36", "Q84"}}, UkLondon());
  } catch (const ResolveError &e) {
    CHECK(std::string(e.what()).find("Q9") != std::string::npos);
  }
}

TEST_CASE("linearize") {
  KbStore kb = WorkedKb();
  CHECK(Linearize({}, kb).text.empty());
  CHECK(Linearize({}, kb).triple_count == 0);
  auto one = Linearize({{"Q145", "P36", "Q84"}}, kb);
  CHECK(one.text == "<sub> United Kingdom <rel> capital <obj> London <et>");
  CHECK(one.triple_count == 1);
  auto year = Linearize({{"Q312", "P571", "1976"}}, kb);
  CHECK(year.text == "<sub> Apple Inc. <rel> inception <obj> 1976 <et>");
  CHECK_THROWS_AS(Linearize({{"Q145", "P999", "Q84"}}, kb), ResolveError);
}

TEST_CASE("round trip of a three-triple fixture") {
  KbStore kb = WorkedKb();
  std::vector<Triple> t = {{"Q145", "P36", "Q84"}, {"Q84", "P17", "Q145"}, {"Q312", "P571", "1976"}};
  auto lin = Linearize(t, kb);
  auto back = ParseLinearized(lin.text);
  REQUIRE(back.size() == 3);
  for (size_t i = 0; i < t.size(); ++i) CHECK(back[i] == ToRawTriple(t[i], kb));
}

TEST_CASE("parse tolerates malformed output") {
  CHECK(ParseLinearized("").empty());
  CHECK(ParseLinearized("<sub> A <rel> r <obj>").empty());
  CHECK(ParseLinearized("<sub> <rel> r <obj> B <et>").empty());
  CHECK(ParseLinearized("<sub> A <obj> B <et>").empty());
  CHECK(ParseLinearized("no markers at all").empty());
  auto dup = ParseLinearized("<sub> A <rel> r <obj> B <et> <sub> A <rel> r <obj> B <et>");
  CHECK(dup.size() == 2);
  // A fresh <sub> abandons the open block.
  auto restart = ParseLinearized("<sub> X <rel> <sub>  A  <rel> r<obj>B<et> junk");
  REQUIRE(restart.size() == 1);
  CHECK(restart[0] == RawTriple{"A", "r", "B"});
  auto prefixed = ParseLinearized("[ENTITY] A # A [TRIPLE] <sub> A <rel> r <obj> B <et>");
  REQUIRE(prefixed.size() == 1);
}

TEST_CASE("parse is total on random strings") {
  const std::vector<std::string> pieces = {"<sub>", "<rel>", "<obj>", "<et>", " ", "a",
                                           "bc", "<", ">", "<su", "b>", "\xc3\xa9", "#"};
  Rng rng(5);
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    size_t n = rng.Below(30);
    for (size_t k = 0; k < n; ++k) s += pieces[rng.Below(pieces.size())];
    std::vector<RawTriple> out;
    REQUIRE_NOTHROW(out = ParseLinearized(s));
    for (const RawTriple &t : out) {
      REQUIRE_FALSE(t.head_label.empty());
      REQUIRE_FALSE(t.relation_label.empty());
      REQUIRE_FALSE(t.tail_label.empty());
    }
  }
}

TEST_CASE("entity prompt target") {
  KbStore kb = WorkedKb();
  LinkedSentence s = UkLondon();
  CHECK(BuildEntityPromptTarget(s, {}, kb).text == "[ENTITY] [TRIPLE]");
  auto t = BuildEntityPromptTarget(s, {{"Q145", "P36", "Q84"}}, kb);
  CHECK(t.text ==
        "[ENTITY] UK # United Kingdom | London # London [TRIPLE] "
        "<sub> United Kingdom <rel> capital <obj> London <et>");
  CHECK(t.triple_count == 1);
  CHECK(ParseLinearized(t.text).size() == 1);
}

TEST_CASE("entity chain keeps only spans used by some triple") {
  KbStore kb = WorkedKb();
  LinkedSentence s = MakeSentence(
      "Rome is in Italy, far from San Francisco and Steve Jobs in 1976.",
      {{"Rome", "Q220"}, {"Italy", "Q38"}, {"San Francisco", "Q62"},
       {"Steve Jobs", "Q19837"}, {"1976", "1976"}});
  std::vector<Triple> t = {{"Q220", "P17", "Q38"}};
  std::string chain = BuildElChain(s, t, kb);
  CHECK(chain == "Rome # Rome | Italy # Italy");
  // Oracle: linked spans minus those absent from all triples.
  for (const MentionSpan &m : s.spans) {
    bool used = *m.link == "Q220" || *m.link == "Q38";
    CHECK((chain.find(m.surface + " #") != std::string::npos) == used);
  }
}

TEST_CASE("repeated mentions appear once per occurrence") {
  KbStore kb = WorkedKb();
  LinkedSentence s = MakeSentence("Rome, Italy. Rome again.",
                                  {{"Rome", "Q220"}, {"Italy", "Q38"}, {"Rome", "Q220"}});
  CHECK(BuildElChain(s, {{"Q220", "P17", "Q38"}}, kb) ==
        "Rome # Rome | Italy # Italy | Rome # Rome");
}

TEST_CASE("year tails render as the bare year") {
  KbStore kb = WorkedKb();
  LinkedSentence s = MakeSentence("Apple Inc. started in 1976.",
                                  {{"Apple Inc.", "Q312"}, {"1976", "1976"}});
  CHECK(BuildEntityPromptTarget(s, {{"Q312", "P571", "1976"}}, kb).text ==
        "[ENTITY] Apple Inc. # Apple Inc. | 1976 # 1976 [TRIPLE] "
        "<sub> Apple Inc. <rel> inception <obj> 1976 <et>");
}

TEST_CASE("artificial prompt instances") {
  LinkedSentence empty;
  auto [el0, tri0] = BuildArtificialPromptInstances(empty, "", "");
  CHECK(el0.input == "<#el#> ");
  CHECK(tri0.input == "<#tri#> ");

  LinkedSentence s = UkLondon();
  auto [el, tri] = BuildArtificialPromptInstances(s, "UK # United Kingdom", "<sub> x");
  CHECK(el.input == "<#el#> The UK government sits in London.");
  CHECK(tri.input == "<#tri#> The UK government sits in London.");
  CHECK(el.target == "UK # United Kingdom");
  CHECK(tri.target == "<sub> x");
  CHECK(el.input.substr(el.input.find(' ')) == tri.input.substr(tri.input.find(' ')));
}

TEST_CASE("shuffling keeps the multiset of instances") {
  std::vector<TrainingInstance> v;
  for (int i = 0; i < 200; ++i) {
    v.push_back({"in" + std::to_string(i % 37), "out" + std::to_string(i)});
  }
  auto shuffled = v;
  ShuffleInstances(shuffled, 3);
  CHECK(shuffled != v);
  auto again = v;
  ShuffleInstances(again, 3);
  CHECK(again == shuffled);
  std::sort(shuffled.begin(), shuffled.end());
  std::sort(v.begin(), v.end());
  CHECK(shuffled == v);
}

TEST_CASE("dual target instance") {
  LinkedSentence s = UkLondon();
  DualTargetInstance d = BuildDualTargetInstance(s, "el", "ie");
  CHECK(d.input == s.text);
  CHECK(d.target_ie == "ie");
  CHECK(d.target_el == "el");
  LinkedSentence empty;
  DualTargetInstance e = BuildDualTargetInstance(empty, "", "");
  CHECK(e.input.empty());
}

TEST_CASE("combine losses") {
  CHECK(CombineLosses(2.0, 4.0, 0.5) == 3.0);
  CHECK(CombineLosses(2.0, 4.0, 0.75) == doctest::Approx(2.5));
  CHECK(CombineLosses(1.25, 9.0, 1.0) == 1.25);
  CHECK(CombineLosses(1.25, 9.0, 0.0) == 9.0);
  CHECK_THROWS_AS(CombineLosses(1, 1, 1.5), std::domain_error);
  CHECK_THROWS_AS(CombineLosses(1, 1, -0.1), std::domain_error);
  CHECK_THROWS_AS(CombineLosses(-1, 1, 0.5), std::domain_error);
  // Linear in each argument.
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    double a = rng.Below(1000) / 10.0, b = rng.Below(1000) / 10.0, c = rng.Below(1000) / 10.0;
    double alpha = rng.Below(101) / 100.0;
    CHECK(CombineLosses(a + c, b, alpha) ==
          doctest::Approx(CombineLosses(a, b, alpha) + alpha * c));
  }
}

}  // namespace
}  // namespace closedie
