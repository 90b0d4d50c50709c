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

#ifndef PGASROB_SEMANTICS_HH_
#define PGASROB_SEMANTICS_HH_

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgasrob/dsl.hh"

namespace pgasrob {

enum class EventKind : std::uint8_t {
  kLoad,
  kStore,
  kAssign,
  kAssume,
  kRead,
  kWrite,
  kPopA,
  kPopB,
  kBarrier,
};

constexpr int kEventKindCount = 9;

const char* EventKindName(EventKind kind);
std::optional<EventKind> EventKindFromName(std::string_view name);

inline bool IsPop(EventKind k) {
  return k == EventKind::kPopA || k == EventKind::kPopB;
}
inline bool IsIssue(EventKind k) {
  return k == EventKind::kRead || k == EventKind::kWrite;
}
inline bool IsWriteAccess(EventKind k) {
  return k == EventKind::kStore || k == EventKind::kPopB;
}
inline bool HasCell(EventKind k) {
  return k == EventKind::kLoad || k == EventKind::kStore ||
         k == EventKind::kPopA || k == EventKind::kPopB;
}
inline bool HasQueue(EventKind k) { return IsIssue(k) || IsPop(k); }

struct Cell {
  int rank = 0;
  int addr = 0;

  auto operator<=>(const Cell&) const = default;
};

struct Event {
  EventKind kind = EventKind::kAssign;
  int rank = 1;
  std::optional<Cell> cell;
  int queue = -1;
  // Per-(rank, queue) issue index for queue events, per-rank barrier index
  // for barriers. Derived positionally by Annotate; ignored by ==.
  int seq = -1;

  bool operator==(const Event& o) const {
    return kind == o.kind && rank == o.rank && cell == o.cell &&
           queue == o.queue;
  }
};

using Computation = std::vector<Event>;

void Annotate(Computation& c);

std::string FormatEvent(const Event& e);
std::string FormatComputation(const Computation& c);
// Accepts the FormatComputation layout; seq annotations are recomputed.
Computation ParseComputation(std::string_view text);

struct RequestA {
  std::uint8_t src_rank, src_addr, dst_rank, dst_addr;
  bool operator==(const RequestA&) const = default;
};

struct TransferB {
  std::uint8_t dst_rank, dst_addr, value;
  bool operator==(const TransferB&) const = default;
};

struct MachineState {
  std::vector<int> pc;
  // Rank-major: for each rank its registers, then its addresses.
  std::vector<std::uint8_t> mem;
  // Indexed (rank - 1) * queues + queue.
  std::vector<std::deque<RequestA>> qa;
  std::vector<std::deque<TransferB>> qb;

  bool IsFinal() const;
  std::string Key() const;
  bool operator==(const MachineState&) const = default;
};

struct Step {
  std::vector<Event> events;
  MachineState next;
};

// E(P, N) for one instance. Validates the instance on construction.
class Machine {
 public:
  explicit Machine(Instance inst);

  const Instance& instance() const { return inst_; }
  int nodes() const { return inst_.nodes; }
  int domain() const { return inst_.domain; }
  int queues() const { return inst_.domain; }
  int registers() const {
    return static_cast<int>(inst_.code.registers.size());
  }
  int SlotsPerRank() const { return registers() + inst_.domain; }
  int RegSlot(int rank, int reg) const {
    return (rank - 1) * SlotsPerRank() + reg;
  }
  int MemSlot(int rank, int addr) const {
    return (rank - 1) * SlotsPerRank() + registers() + addr;
  }
  int QueueIndex(int rank, int queue) const {
    return (rank - 1) * queues() + queue;
  }
  const std::vector<std::vector<int>>& outgoing() const { return outgoing_; }

  MachineState Initial() const;
  std::vector<Step> EnabledSteps(const MachineState& s) const;

  // Minimum number of pop events needed to empty every queue.
  int Drain(const MachineState& s) const;

  EvalEnv Env(const MachineState& s, int rank) const;

  // Applies a non-barrier command for one rank. Returns false if the
  // command is disabled (failing assume or rank out of range).
  bool ApplyCommand(const MachineState& s, int rank, const Transition& t,
                    MachineState& next, Event& ev) const;

 private:
  Instance inst_;
  std::vector<std::vector<int>> outgoing_;
};

MachineState InitialState(const Instance& inst);
std::vector<Step> EnabledSteps(const Instance& inst, const MachineState& s);

struct ScheduleResult {
  Computation computation;
  MachineState final_state;
  bool accepting = false;
  bool stuck = false;
  std::string stuck_reason;
  int steps = 0;
};

ScheduleResult RunSchedule(const Instance& inst, std::span<const int> choices);
ScheduleResult RunRandom(const Instance& inst, std::uint64_t seed,
                         int max_steps);

// Visits the accepted computations of length at most max_len once each, in
// lexicographic order of step choices. The visitor returns false to stop.
void EnumerateComputations(const Instance& inst, int max_len,
                           const std::function<bool(const Computation&)>& visit);
std::vector<Computation> EnumerateComputations(const Instance& inst,
                                               int max_len);

// Membership of a computation in the language of E(P, N).
bool Accepts(const Instance& inst, const Computation& c);

}  // namespace pgasrob

#endif  // PGASROB_SEMANTICS_HH_
