/*
 * Copyright (c) 2026, pgasrob authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pgasrob/mha.hh"
#include "support/random_program.hh"

namespace pgasrob {
namespace {

constexpr Letter kA = 0, kB = 1, kC = 2;

std::set<Word> AnBnCnUpTo(int n) {
  std::set<Word> out;
  for (int k = 0; k <= n; ++k) {
    Word w;
    w.insert(w.end(), k, kA);
    w.insert(w.end(), k, kB);
    w.insert(w.end(), k, kC);
    out.insert(w);
  }
  return out;
}

std::set<Word> Filter(const std::set<Word>& words, const Nfa& v) {
  std::set<Word> out;
  for (const Word& w : words) {
    if (v.Accepts(w)) out.insert(w);
  }
  return out;
}

// Counts letter a modulo 2.
class ParityOf : public DfaComponent {
 public:
  explicit ParityOf(Letter a) : a_(a) {}
  int states() const override { return 2; }
  int initial() const override { return 0; }
  int Step(int state, Letter l) const override {
    return l == a_ ? 1 - state : state;
  }

 private:
  Letter a_;
};

// Rejects every word containing b followed later by a.
class NoBThenA : public DfaComponent {
 public:
  int states() const override { return 2; }
  int initial() const override { return 0; }
  int Step(int state, Letter l) const override {
    if (l == kB) return 1;
    if (l == kA && state == 1) return -1;
    return state;
  }
};

TEST_CASE("comp concatenates the head projections") {
  std::vector<MhaLabel> run = {{2, kB}, {1, kA}, {0, 0}, {3, kC}, {1, kA},
                               {2, kC}};
  CHECK(Comp(run, 3) == Word{kA, kA, kB, kC, kC});
  CHECK(Comp({}, 2).empty());
  std::vector<MhaLabel> only_eps = {{0, 0}, {0, 0}};
  CHECK(Comp(only_eps, 1).empty());
}

TEST_CASE("a^n b^n c^n as a 3-headed automaton") {
  MultiheadedAutomaton m = testing::AnBnCn(kA, kB, kC);
  CHECK(BoundedLanguage(m, 12) == AnBnCnUpTo(4));
  CHECK_THROWS_AS(m.AddTransition(0, 4, kA, 0), std::invalid_argument);
  CHECK_THROWS_AS(m.AddTransition(0, 0, kA, 0), std::invalid_argument);
}

TEST_CASE("intersection with a*b*c*") {
  MultiheadedAutomaton u = testing::AnBnCn(kA, kB, kC);
  Nfa v = testing::StarABC(kA, kB, kC);
  MultiheadedAutomaton x = Intersect(u, v);
  CHECK(x.heads() == 3);
  CHECK(BoundedLanguage(x, 12) == AnBnCnUpTo(4));
  auto w = Witness(x);
  REQUIRE(w.has_value());
  CHECK(w->status == SearchStatus::kFound);
  CHECK(w->word.empty());

  ExplicitView uv(u);
  LazyIntersection lazy(uv, v);
  CHECK(BoundedLanguage(lazy, 12) == AnBnCnUpTo(4));
  CHECK_FALSE(IsEmpty(lazy));
}

TEST_CASE("empty V and unreachable finals give empty intersections") {
  MultiheadedAutomaton u = testing::AnBnCn(kA, kB, kC);
  Nfa none;
  none.AddState();
  none.AddTransition(0, kA, 0);
  MultiheadedAutomaton x = Intersect(u, none);
  CHECK(IsEmpty(x));
  CHECK_FALSE(Witness(x).has_value());
  ExplicitView uv(u);
  CHECK(IsEmpty(LazyIntersection(uv, none)));

  MultiheadedAutomaton island(2);
  int s0 = island.AddState();
  int s1 = island.AddState();
  int s2 = island.AddState(true);
  island.AddTransition(s0, 1, kA, s1);
  island.AddTransition(s1, 2, kB, s0);
  island.AddTransition(s2, 1, kA, s2);
  CHECK(IsEmpty(island));
  CHECK(BoundedLanguage(island, 8).empty());
  ExplicitView iv(island);
  SearchResult r = FindWitness(iv);
  CHECK(r.status == SearchStatus::kEmpty);
  CHECK(r.states == 2);
}

TEST_CASE("one-headed view of an NFA") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    Nfa v = testing::RandomNfa(rng, 4, 2);
    MultiheadedAutomaton m = FromNfa(v);
    CHECK(m.heads() == 1);
    CHECK(BoundedLanguage(m, 6) == BoundedLanguage(v, 6));
    // L(V) intersected with itself is L(V).
    CHECK(BoundedLanguage(Intersect(m, v), 6) == BoundedLanguage(v, 6));
  }
}

TEST_CASE("even-length filter") {
  Nfa even;
  int e = even.AddState(true);
  int o = even.AddState();
  for (Letter l : {kA, kB, kC}) {
    even.AddTransition(e, l, o);
    even.AddTransition(o, l, e);
  }
  MultiheadedAutomaton x = Intersect(testing::AnBnCn(kA, kB, kC), even);
  std::set<Word> want = Filter(AnBnCnUpTo(4), even);
  CHECK(want.size() == 3);
  CHECK(BoundedLanguage(x, 12) == want);
}

TEST_CASE("summary intersection with a product DFA") {
  MultiheadedAutomaton u = testing::AnBnCn(kA, kB, kC);
  ProductDfa v;
  v.parts = {std::make_shared<ParityOf>(kA), std::make_shared<ParityOf>(kC)};
  v.accept = [](std::span<const int> s) { return s[0] == 0 && s[1] == 0; };
  ExplicitView uv(u);
  SummaryIntersection x(uv, v);
  std::set<Word> got = BoundedLanguage(x, 15);
  std::set<Word> want;
  for (const Word& w : AnBnCnUpTo(5)) {
    if (v.Accepts(w)) want.insert(w);
  }
  CHECK(got == want);
  CHECK(want.size() == 3);

  std::vector<Letter> sigma = {kA, kB, kC};
  Nfa explicit_v = v.Materialize(sigma);
  CHECK(BoundedLanguage(Intersect(u, explicit_v), 15) == want);
}

TEST_CASE("summary intersection composes head summaries in order") {
  // Head 2 emits b before head 1 emits a, yet comp puts a first.
  MultiheadedAutomaton u(2);
  int s0 = u.AddState();
  int s1 = u.AddState();
  int s2 = u.AddState(true);
  u.AddTransition(s0, 2, kB, s1);
  u.AddTransition(s1, 1, kA, s2);
  MultiheadedAutomaton back(2);
  int t0 = back.AddState();
  int t1 = back.AddState();
  int t2 = back.AddState(true);
  back.AddTransition(t0, 1, kB, t1);
  back.AddTransition(t1, 2, kA, t2);

  ProductDfa v;
  v.parts = {std::make_shared<NoBThenA>()};
  v.accept = [](std::span<const int>) { return true; };
  ExplicitView uv(u), bv(back);
  CHECK_FALSE(IsEmpty(SummaryIntersection(uv, v)));
  CHECK(IsEmpty(SummaryIntersection(bv, v)));
}

TEST_CASE("summary, guess and literal intersections agree") {
  std::mt19937_64 rng(23);
  std::vector<Letter> sigma = {kA, kB};
  for (int i = 0; i < 60; ++i) {
    MultiheadedAutomaton u = testing::RandomMha(rng, 2, 3, 2);
    ProductDfa v;
    v.parts = {std::make_shared<ParityOf>(kA), std::make_shared<NoBThenA>()};
    v.accept = [](std::span<const int> s) { return s[0] == 1; };
    Nfa mv = v.Materialize(sigma);
    ExplicitView uv(u);
    std::set<Word> summary = BoundedLanguage(SummaryIntersection(uv, v), 6);
    std::set<Word> lazy = BoundedLanguage(LazyIntersection(uv, mv), 6);
    std::set<Word> literal = BoundedLanguage(Intersect(u, mv), 6);
    std::set<Word> want;
    for (const Word& w : BoundedLanguage(u, 6)) {
      if (v.Accepts(w)) want.insert(w);
    }
    CHECK(summary == want);
    CHECK(lazy == want);
    CHECK(literal == want);
  }
}

TEST_CASE("materialized product DFA agrees with the product") {
  ProductDfa v;
  v.parts = {std::make_shared<ParityOf>(kA), std::make_shared<NoBThenA>()};
  v.accept = [](std::span<const int> s) { return s[0] == 0; };
  std::vector<Letter> sigma = {kA, kB};
  Nfa n = v.Materialize(sigma);
  std::set<Word> all = {Word{}};
  for (int len = 1; len <= 6; ++len) {
    for (int bits = 0; bits < (1 << len); ++bits) {
      Word w;
      for (int k = 0; k < len; ++k) w.push_back((bits >> k) & 1);
      all.insert(w);
    }
  }
  for (const Word& w : all) CHECK(n.Accepts(w) == v.Accepts(w));
}

TEST_CASE("witness search respects the state cap") {
  MultiheadedAutomaton u = testing::AnBnCn(kA, kB, kC);
  u.SetFinal(0, false);
  u.SetFinal(2);
  ExplicitView uv(u);
  SearchResult full = FindWitness(uv);
  REQUIRE(full.status == SearchStatus::kFound);
  CHECK(full.run.size() == 2);
  CHECK(full.word == Word{kA, kB});
  CHECK(FindWitness(uv, 1).status == SearchStatus::kExhausted);
}

TEST_CASE("text format round-trips") {
  Alphabet sigma;
  const char* text =
      "heads 2\n"
      "initial 0\n"
      "final 2\n"
      "0 1 a 1   # first head\n"
      "1 2 b 2\n"
      "2 eps 0\n";
  MultiheadedAutomaton m = ParseMha(text, sigma);
  CHECK(m.heads() == 2);
  CHECK(m.size() == 3);
  CHECK(m.TransitionCount() == 3);
  CHECK(sigma.size() == 2);
  REQUIRE(sigma.Find("a").has_value());
  Letter a = *sigma.Find("a"), b = *sigma.Find("b");
  CHECK(BoundedLanguage(m, 4) ==
        std::set<Word>{{a, b}, {a, a, b, b}});
  std::string printed = PrintMha(m, sigma);
  MultiheadedAutomaton again = ParseMha(printed, sigma);
  CHECK(PrintMha(again, sigma) == printed);
  CHECK(MhaToDot(m, sigma).rfind("digraph", 0) == 0);

  CHECK_THROWS(ParseMha("heads 0\n", sigma));
  CHECK_THROWS(ParseMha("0 x a 1\n", sigma));
  CHECK_THROWS(ParseMha("heads 1\n0 2 a 1\n", sigma));
  CHECK_THROWS(ParseMha("0 1 a\n", sigma));
}

}  // namespace
}  // namespace pgasrob
