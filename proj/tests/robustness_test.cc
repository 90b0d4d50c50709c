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

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "pgasrob/robustness.hh"
#include "support/random_program.hh"

namespace pgasrob {
namespace {

using testing::CorpusPath;

Instance Corpus(const std::string& name, int nodes, int domain) {
  return Instance{LoadProgram(CorpusPath(name)), nodes, domain};
}

// Accepts exactly one word.
class WordDfa : public DfaComponent {
 public:
  explicit WordDfa(Word w) : w_(std::move(w)) {}
  int states() const override { return static_cast<int>(w_.size()) + 1; }
  int initial() const override { return 0; }
  int Step(int s, Letter a) const override {
    return s < static_cast<int>(w_.size()) && w_[s] == a ? s + 1 : -1;
  }
  int size() const { return static_cast<int>(w_.size()); }

 private:
  Word w_;
};

ProductDfa Exactly(const Word& w) {
  auto d = std::make_shared<WordDfa>(w);
  ProductDfa p;
  p.parts = {d};
  int n = d->size();
  p.accept = [n](std::span<const int> s) { return s[0] == n; };
  return p;
}

Word Marked(const Computation& c, const std::vector<unsigned>& marks) {
  Word w;
  for (size_t i = 0; i < c.size(); ++i) w.push_back(EncodeEvent(c[i], marks[i]));
  return w;
}

// 0 w1, 1 popA1, 2 w2, 3 popA2, 4 b1, 5 b2, 6 load1, 7 popB1, 8 popB2
Computation TauNormal() {
  return ParseComputation(
      "write 1 _ q=0\npopA 1 (1,0) q=0\nwrite 2 _ q=0\npopA 2 (2,0) q=0\n"
      "barrier 1 _\nbarrier 2 _\nload 1 (1,1)\npopB 1 (2,1) q=0\n"
      "popB 2 (1,1) q=0\n");
}

Computation Tau() {
  return ParseComputation(
      "write 1 _ q=0\nwrite 2 _ q=0\npopA 2 (2,0) q=0\npopA 1 (1,0) q=0\n"
      "barrier 1 _\nbarrier 2 _\nload 1 (1,1)\npopB 2 (1,1) q=0\n"
      "popB 1 (2,1) q=0\n");
}

const std::vector<unsigned> kExampleMarks = {0, 0, 0, 0, kEnter, kLeave,
                                             kLeave, 0, kEnter};

bool WAccepts(const Instance& inst, const Word& w, WsOptions opts = {}) {
  WsAutomaton ws(inst, opts);
  ProductDfa p = Exactly(w);
  return !IsEmpty(SummaryIntersection(ws, p));
}

TEST_CASE("event letters round-trip") {
  for (Letter l : EventAlphabet(3, 3, {0, kEnter, kLeave, kEnter | kLeave})) {
    Event e = DecodeEvent(l);
    CHECK(EncodeEvent(e, MarksOf(l)) == l);
    CHECK(StripMarks(l) == EncodeEvent(e));
  }
  CHECK(EventAlphabet(2, 2).size() ==
        2 * (2 * 2 + 3 + 2 * (2 + 2 * 2 * 2)));
  Event w{EventKind::kWrite, 2, std::nullopt, 1};
  Letter l = EncodeEvent(w, kLeave);
  CHECK(DecodeEvent(l) == w);
  CHECK(MarksOf(l) == kLeave);
  CHECK(FormatMarks(kEnter | kLeave) == "{enter,leave}");
}

TEST_CASE("issue rule emits on the heads of its parts") {
  Instance inst = Corpus("onetoone_core", 2, 2);
  Machine m(inst);
  WsState s = WsInitial(m);
  CHECK(s.pa == std::vector<std::uint8_t>(4, 1));
  int q1 = m.QueueIndex(1, 0);
  s.pa[q1] = 2;
  s.pb[q1] = 4;
  bool found = false;
  for (const WsMove& mv : WsSteps(m, s)) {
    if (mv.emissions.empty()) continue;
    Event first = DecodeEvent(mv.emissions[0].letter);
    if (first.kind != EventKind::kWrite || first.rank != 1) continue;
    found = true;
    REQUIRE(mv.emissions.size() == 3);
    CHECK(mv.emissions[0].head == 1);
    CHECK(mv.emissions[1].head == 2);
    CHECK(mv.emissions[2].head == 4);
    CHECK(DecodeEvent(mv.emissions[1].letter).kind == EventKind::kPopA);
    CHECK(DecodeEvent(mv.emissions[2].letter).kind == EventKind::kPopB);
    CHECK(mv.next.mem == s.mem);
  }
  CHECK(found);
}

TEST_CASE("part guesses are monotone and bounded") {
  Instance inst = Corpus("onetoone_core", 2, 2);
  Machine m(inst);
  WsState s = WsInitial(m);
  int q1 = m.QueueIndex(1, 0);
  s.pa[q1] = 3;
  s.pb[q1] = 3;
  int bumps_a = 0, bumps_b = 0;
  for (const WsMove& mv : WsSteps(m, s)) {
    if (!mv.emissions.empty()) continue;
    if (mv.next.pa[q1] != s.pa[q1]) ++bumps_a;
    if (mv.next.pb[q1] != s.pb[q1]) ++bumps_b;
  }
  CHECK(bumps_a == 0);
  CHECK(bumps_b == 1);
  s.pb[q1] = 4;
  s.pa[q1] = 4;
  for (const WsMove& mv : WsSteps(m, s)) {
    if (mv.emissions.empty()) CHECK(mv.next.pb[q1] == s.pb[q1]);
  }
  // Fused mode offers every reachable (pa, pb) pair at issue time.
  WsState f = WsInitial(m);
  std::set<std::pair<int, int>> parts;
  for (const WsMove& mv : WsSteps(m, f, true)) {
    CHECK_FALSE(mv.emissions.empty());
    Event first = DecodeEvent(mv.emissions[0].letter);
    if (first.rank == 1) parts.insert({mv.next.pa[q1], mv.next.pb[q1]});
  }
  CHECK(parts.size() == 10);
}

TEST_CASE("a transfer in part 1 updates memory at issue time") {
  Instance inst{ParseProgram("mem[0] <- 1;\nwrite(0, 2, 1, 0);"), 2, 2};
  Machine m(inst);
  WsState s = WsInitial(m);
  s.pc = {1, 1};
  s.mem[m.MemSlot(1, 0)] = 1;
  int checked = 0;
  for (int pb : {1, 2}) {
    s.pb[m.QueueIndex(1, 0)] = static_cast<std::uint8_t>(pb);
    for (const WsMove& mv : WsSteps(m, s)) {
      if (mv.emissions.empty() || DecodeEvent(mv.emissions[0].letter).rank != 1) {
        continue;
      }
      ++checked;
      CHECK(mv.next.mem[m.MemSlot(2, 1)] == (pb == 1 ? 1 : 0));
    }
  }
  CHECK(checked == 2);
}

TEST_CASE("W accepts the normal-form violation but not tau") {
  Instance inst = Corpus("onetoone_core", 2, 2);
  Word nf = Marked(TauNormal(), std::vector<unsigned>(9, 0));
  Word raw = Marked(Tau(), std::vector<unsigned>(9, 0));
  CHECK(WAccepts(inst, nf));
  CHECK_FALSE(WAccepts(inst, raw));
  CHECK(WAccepts(inst, nf, WsOptions{.fused = true}));
  CHECK_FALSE(WAccepts(inst, raw, WsOptions{.fused = true}));
  CHECK(WAccepts(inst, {}));
}

TEST_CASE("W of the empty program accepts only the empty word") {
  Instance inst{ParseProgram(""), 2, 2};
  CHECK(BoundedLanguage(WsAutomaton(inst), 5) == std::set<Word>{{}});
  CHECK(BoundedLanguage(WsAutomaton(inst, WsOptions{.fused = true}), 5) ==
        std::set<Word>{{}});
}

TEST_CASE("literal and fused W have the same bounded language") {
  std::vector<Instance> insts = {Corpus("onetoone_core", 1, 2),
                                 Corpus("footnote_abc", 1, 2),
                                 Corpus("local_only", 1, 2),
                                 Corpus("onetoone_wait", 1, 3)};
  for (const Instance& inst : insts) {
    std::set<Word> literal = BoundedLanguage(WsAutomaton(inst), 6);
    std::set<Word> fused =
        BoundedLanguage(WsAutomaton(inst, WsOptions{.fused = true}), 6);
    CHECK(literal == fused);
    CHECK(literal.count(Word{}) == 1);
  }
}

TEST_CASE("marked computation of the worked example") {
  Instance inst = Corpus("onetoone_core", 2, 2);
  WsOptions marked{.fused = true, .marked = true};
  Word w = Marked(TauNormal(), kExampleMarks);
  CHECK(WAccepts(inst, w, marked));

  Word stripped;
  for (Letter l : w) stripped.push_back(StripMarks(l));
  CHECK(WAccepts(inst, stripped));

  // At most one enter per rank.
  std::vector<unsigned> two_enters = kExampleMarks;
  two_enters[6] = kEnter;
  CHECK_FALSE(WAccepts(inst, Marked(TauNormal(), two_enters), marked));
  // An enter without a later leave leaves the run non-final.
  std::vector<unsigned> dangling(9, 0);
  dangling[4] = kEnter;
  CHECK_FALSE(WAccepts(inst, Marked(TauNormal(), dangling), marked));

  CHECK(CycleTypeDfa({1, 2}, 2, 2).Accepts(w));
  CHECK_FALSE(CycleTypeDfa({1, 2}, 2, 2).Accepts(stripped));
}

TEST_CASE("pair automata for the worked example") {
  Word w = Marked(TauNormal(), kExampleMarks);
  auto run = [&](const HbPairDfa& d, const Word& word) {
    int s = d.initial();
    for (Letter l : word) {
      s = d.Step(s, l);
      if (s < 0) break;
    }
    return s;
  };
  CHECK(run(HbPairDfa(1, 2, 2, 2), w) == HbPairDfa::kAcceptCf);
  CHECK(run(HbPairDfa(2, 1, 2, 2), w) == HbPairDfa::kAcceptBar);

  // A write to the watched cell between leave and enter breaks the link.
  Computation c = ParseComputation(
      "load 1 (1,1)\nstore 1 (1,1)\nwrite 2 _ q=0\npopA 2 (2,0) q=0\n"
      "popB 2 (1,1) q=0\n");
  Word direct = Marked(c, {kLeave, 0, 0, 0, kEnter});
  CHECK(run(HbPairDfa(1, 2, 2, 2), direct) == -1);
  c.erase(c.begin() + 1);
  Word ok = Marked(c, {kLeave, 0, 0, kEnter});
  CHECK(run(HbPairDfa(1, 2, 2, 2), ok) == HbPairDfa::kAcceptCf);

  Nfa n = BuildHbNfa(1, 2, 2, 2);
  CHECK(n.Accepts(w));
  CHECK_FALSE(n.Accepts(direct));
}

TEST_CASE("cycle types") {
  auto types = CycleTypes(3);
  CHECK(types.size() == 8);
  CHECK(types.front() == std::vector<int>{1});
  CHECK(types.back() == std::vector<int>{1, 3, 2});
  CHECK(std::find(types.begin(), types.end(), std::vector<int>{1, 2, 3}) !=
        types.end());
  CHECK(CycleTypes(1).size() == 1);
  CHECK(CycleTypes(2).size() == 3);
}

TEST_CASE("checker on the worked example") {
  Instance inst = Corpus("onetoone_core", 2, 2);
  Verdict v = CheckRobustness(inst);
  REQUIRE(v.outcome == Outcome::kNotRobust);
  CHECK(v.cycle_type == std::vector<int>{1, 2});
  CHECK(v.computation.size() == 9);
  CHECK(VerifyWitness(inst, v) == "");
  CHECK(IsNormalForm(v.computation, v.cuts));
  CHECK(Accepts(inst, v.computation));

  Verdict tampered = v;
  std::reverse(tampered.computation.begin(), tampered.computation.end());
  CHECK_FALSE(VerifyWitness(inst, tampered).empty());
  Verdict no_cycle = v;
  no_cycle.hb_cycle.segments.clear();
  CHECK_FALSE(VerifyWitness(inst, no_cycle).empty());
}

TEST_CASE("checker modes agree") {
  std::vector<Instance> insts = {
      Corpus("empty", 2, 2),         Corpus("local_only", 2, 2),
      Corpus("onetoone_core", 2, 2), Corpus("footnote_abc", 1, 2),
      Corpus("onetoone_core", 1, 2), Corpus("producer_consumer", 2, 3)};
  for (const Instance& inst : insts) {
    Verdict base = CheckRobustness(inst);
    CheckOptions threads;
    threads.threads = 2;
    Verdict v = CheckRobustness(inst, threads);
    CHECK(v.outcome == base.outcome);
    CHECK(v.cycle_type == base.cycle_type);
    CHECK(v.computation == base.computation);
  }
  // Guessing and literal W are exponentially larger; small instances only.
  std::vector<Instance> small = {
      Corpus("empty", 2, 2), Corpus("local_only", 2, 2),
      Corpus("footnote_abc", 1, 2), Corpus("onetoone_core", 1, 2)};
  for (const Instance& inst : small) {
    Verdict base = CheckRobustness(inst);
    CheckOptions guess;
    guess.mode = IntersectionMode::kGuess;
    CheckOptions literal;
    literal.fused = false;
    for (const CheckOptions& o : {guess, literal}) {
      Verdict v = CheckRobustness(inst, o);
      CHECK(v.outcome == base.outcome);
      if (v.outcome == Outcome::kNotRobust) {
        CHECK(v.computation.size() == base.computation.size());
        CHECK(VerifyWitness(inst, v) == "");
      }
    }
  }
}

TEST_CASE("resource bound and invalid input") {
  Instance inst = Corpus("onetoone", 2, 2);
  CheckOptions tiny;
  tiny.max_states = 1;
  CHECK(CheckRobustness(inst, tiny).outcome == Outcome::kResourceBound);
  CHECK_THROWS_AS(CheckRobustness(Instance{ParseProgram("mem[0] <- 5;"), 2, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CheckRobustness(Instance{ParseProgram(""), 0, 2}),
                  std::invalid_argument);
}

TEST_CASE("robust programs") {
  CHECK(CheckRobustness(Corpus("empty", 4, 2)).outcome == Outcome::kRobust);
  Verdict v = CheckRobustness(Corpus("local_only", 3, 2));
  CHECK(v.outcome == Outcome::kRobust);
  CHECK(v.cycle_types_checked == 8);
  CHECK(CheckRobustness(Corpus("producer_consumer", 2, 3)).outcome ==
        Outcome::kRobust);
}

}  // namespace
}  // namespace pgasrob
