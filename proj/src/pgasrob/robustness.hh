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

#ifndef PGASROB_ROBUSTNESS_HH_
#define PGASROB_ROBUSTNESS_HH_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgasrob/mha.hh"
#include "pgasrob/semantics.hh"
#include "pgasrob/traces.hh"

namespace pgasrob {

constexpr unsigned kEnter = 1;
constexpr unsigned kLeave = 2;

// Bits 0-3 kind, 4-11 rank, 12 has-cell, 13-20 cell rank, 21-28 cell
// address, 29-37 queue + 1, 38-39 marks. seq is not encoded.
Letter EncodeEvent(const Event& e, unsigned marks = 0);
Event DecodeEvent(Letter l);
unsigned MarksOf(Letter l);
inline Letter StripMarks(Letter l) { return l & ((Letter{1} << 38) - 1); }
std::string FormatMarks(unsigned marks);

// Every letter E(P, N) can emit, once per marking in marks.
std::vector<Letter> EventAlphabet(int nodes, int domain,
                                  const std::vector<unsigned>& marks = {0});

struct WsState {
  std::vector<int> pc;
  std::vector<std::uint8_t> mem;
  // Part index in 1..4, indexed like Machine::QueueIndex.
  std::vector<std::uint8_t> pa;
  std::vector<std::uint8_t> pb;

  bool operator==(const WsState&) const = default;
};

// One rule application: gA'/gB' have no emissions, the others emit their
// letters in order through fresh auxiliary states.
struct WsMove {
  std::vector<MhaLabel> emissions;
  WsState next;
};

WsState WsInitial(const Machine& m);
// In fused mode gA'/gB' are folded into read'/write': the pop parts are
// chosen at issue time among all values the epsilon moves could reach.
std::vector<WsMove> WsSteps(const Machine& m, const WsState& s,
                            bool fused = false);

struct WsOptions {
  bool fused = false;
  bool marked = false;
  // Ranks allowed to carry marks (index rank - 1); empty means all.
  std::vector<bool> markable;
};

// W(P, N), or W'(P, N) when marked, as a lazy 4-headed automaton.
class WsAutomaton : public MhaView {
 public:
  WsAutomaton(const Instance& inst, WsOptions opts = {});

  const Machine& machine() const { return m_; }
  int heads() const override { return 4; }
  StateKey Initial() const override;
  bool IsFinal(const StateKey& s) const override;
  void Successors(const StateKey& s, std::vector<MhaEdge>& out) const override;

  WsState BaseState(const StateKey& s) const;
  bool IsAux(const StateKey& s) const { return s[0] != 0; }

 private:
  StateKey Encode(const WsState& base, const std::vector<std::uint8_t>& mu,
                  bool m6, std::span<const MhaLabel> rest) const;
  void Emit(const WsState& next, const std::vector<std::uint8_t>& mu, bool m6,
            std::span<const MhaLabel> chain, std::vector<MhaEdge>& out) const;

  Machine m_;
  WsOptions opts_;
  int base_bytes_ = 0;
};

// HB^{r1,r2}: the unique leave-marked event of r1 is linked to the unique
// enter-marked event of r2 by a conflict edge or a matching barrier.
class HbPairDfa : public DfaComponent {
 public:
  enum : int {
    kInit = 0,
    kAcceptCf = 1,
    kAcceptBar = 2,
    kBarFromLeave = 3,
    kBarFromEnter = 4,
    kWatch = 5,
  };

  HbPairDfa(int r1, int r2, int nodes, int domain);

  int states() const override { return kWatch + 2 * cells_; }
  int initial() const override { return kInit; }
  int Step(int state, Letter a) const override;

  static bool IsAccepting(int state) {
    return state == kAcceptCf || state == kAcceptBar;
  }

 private:
  int CellIndex(const Cell& c) const {
    return (c.rank - 1) * domain_ + c.addr;
  }

  int r1_, r2_, domain_, cells_;
};

// Turns on at the first event carrying exactly one mark.
class SingleMarkDfa : public DfaComponent {
 public:
  int states() const override { return 2; }
  int initial() const override { return 0; }
  int Step(int state, Letter a) const override;
};

Nfa BuildHbNfa(int r1, int r2, int nodes, int domain);

// B^theta: every pair automaton accepts and the cycle is not contained in
// the identity relation.
ProductDfa CycleTypeDfa(const std::vector<int>& theta, int nodes, int domain);

// Distinct-rank sequences starting at their minimum rank, by length, then
// lexicographically.
std::vector<std::vector<int>> CycleTypes(int nodes);

enum class Outcome { kRobust, kNotRobust, kResourceBound };
const char* OutcomeName(Outcome o);

enum class IntersectionMode { kSummary, kGuess };

struct CheckOptions {
  int threads = 1;
  // Per cycle type; 0 means unbounded.
  std::uint64_t max_states = 0;
  bool fused = true;
  IntersectionMode mode = IntersectionMode::kSummary;
};

struct MarkedEvent {
  int head = 1;
  Event event;
  unsigned marks = 0;
};

struct Verdict {
  Outcome outcome = Outcome::kRobust;
  std::vector<int> cycle_type;
  std::vector<MarkedEvent> marked_run;
  Computation computation;
  Cuts cuts;
  std::vector<HbEdge> violation;
  CycCycle hb_cycle;
  int cycle_types_checked = 0;
  std::uint64_t states = 0;
};

class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Throws std::invalid_argument for invalid instances and InternalError when a
// witness fails re-verification.
Verdict CheckRobustness(const Instance& inst, const CheckOptions& opts = {});

// Re-verifies a witness run of W'(P, N) x B^theta. Empty when all checks
// pass, otherwise the first failing check.
std::string VerifyWitness(const Instance& inst, const Verdict& v);

}  // namespace pgasrob

#endif  // PGASROB_ROBUSTNESS_HH_
