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

#include "pgasrob/oracle.hh"

#include <bitset>
#include <deque>
#include <stdexcept>
#include <string>

namespace pgasrob {

const char* OracleStatusName(OracleStatus s) {
  switch (s) {
    case OracleStatus::kViolationFound:
      return "violation_found";
    case OracleStatus::kNoViolationWithin:
      return "no_violation_within";
    case OracleStatus::kExhausted:
      return "exhausted";
  }
  return "?";
}

namespace {

using Bits = std::bitset<kMaxOracleBound>;

// Happens-before of a growing prefix with its transitive closure.
struct Trace {
  struct CellState {
    int last_write = -1;
    std::vector<int> reads;
  };

  Computation events;
  std::vector<Bits> reach;
  std::vector<std::pair<int, int>> strict;
  std::vector<int> rep;
  std::vector<int> last_non_pop;
  std::vector<CellState> cells;
  std::vector<std::deque<int>> pending_a;
  std::vector<std::deque<std::pair<int, int>>> pending_b;
  int block_start = -1;
  int descents = 0;
  bool violating = false;

  explicit Trace(const Machine& m)
      : last_non_pop(m.nodes() + 1, -1),
        cells(static_cast<size_t>(m.nodes()) * m.domain()),
        pending_a(static_cast<size_t>(m.nodes()) * m.queues()),
        pending_b(static_cast<size_t>(m.nodes()) * m.queues()) {}

  void Add(const Machine& m, const Event& e) {
    const int n = static_cast<int>(events.size());
    std::vector<int> in, out;
    auto strict_in = [&](int u) {
      in.push_back(u);
      strict.emplace_back(u, n);
    };
    if (!IsPop(e.kind)) {
      if (last_non_pop[e.rank] >= 0) strict_in(last_non_pop[e.rank]);
      last_non_pop[e.rank] = n;
    }
    if (e.cell) {
      CellState& st = cells[(e.cell->rank - 1) * m.domain() + e.cell->addr];
      if (st.last_write >= 0) strict_in(st.last_write);
      if (IsWriteAccess(e.kind)) {
        for (int r : st.reads) strict_in(r);
        st.last_write = n;
        st.reads.clear();
      } else {
        st.reads.push_back(n);
      }
    }
    int r = n;
    if (HasQueue(e.kind)) {
      int qi = m.QueueIndex(e.rank, e.queue);
      if (IsIssue(e.kind)) {
        pending_a[qi].push_back(n);
      } else if (e.kind == EventKind::kPopA) {
        r = pending_a[qi].front();
        pending_a[qi].pop_front();
        pending_b[qi].emplace_back(r, n);
        in.push_back(r);
        out.push_back(r);
      } else {
        auto [issue, pa] = pending_b[qi].front();
        pending_b[qi].pop_front();
        r = issue;
        in.insert(in.end(), {issue, pa});
        out.insert(out.end(), {issue, pa});
      }
    } else if (e.kind == EventKind::kBarrier) {
      if (e.rank == 1) block_start = n;
      r = block_start;
      for (int u = block_start; u < n; ++u) {
        in.push_back(u);
        out.push_back(u);
      }
    }
    if (n > 0 && r < rep.back()) ++descents;
    rep.push_back(r);
    events.push_back(e);

    Bits mine;
    for (int o : out) {
      mine.set(o);
      mine |= reach[o];
    }
    reach.push_back(mine);
    Bits from;
    for (int i : in) from.set(i);
    Bits gain = mine;
    gain.set(n);
    for (int u = 0; u <= n; ++u) {
      if (from.test(u) || (reach[u] & from).any()) reach[u] |= gain;
    }
    if (!violating && reach[n].test(n)) {
      for (auto [u, v] : strict) {
        if (reach[v].test(u)) {
          violating = true;
          break;
        }
      }
    }
  }
};

class Search {
 public:
  Search(const Instance& inst, int bound, std::uint64_t cap, bool nf)
      : m_(inst), bound_(bound), cap_(cap), nf_(nf) {
    if (bound < 0 || bound > kMaxOracleBound) {
      throw std::invalid_argument("oracle bound must lie in 0.." +
                                  std::to_string(kMaxOracleBound));
    }
  }

  OracleVerdict Run() {
    OracleVerdict v;
    v.bound = bound_;
    v.state_cap = cap_;
    best_ = bound_ + 1;
    exact_ = -1;
    Trace t(m_);
    if (!Dfs(m_.Initial(), t)) return Exhausted(v);
    if (best_ > bound_) {
      v.nodes = nodes_;
      return v;
    }
    exact_ = best_;
    Trace t2(m_);
    found_.reset();
    if (!Dfs(m_.Initial(), t2)) return Exhausted(v);
    if (!found_) {
      throw std::logic_error("oracle lost the violation of length " +
                             std::to_string(exact_));
    }
    v.status = OracleStatus::kViolationFound;
    v.computation = *found_;
    Annotate(v.computation);
    HbRelation hb = HappensBefore(v.computation);
    if (auto cyc = FindViolation(hb)) v.violation = *cyc;
    v.hb_cycle = ExtractCycCycle(v.computation, hb);
    v.nodes = nodes_;
    return v;
  }

 private:
  OracleVerdict Exhausted(OracleVerdict v) {
    v.status = OracleStatus::kExhausted;
    v.nodes = nodes_;
    return v;
  }

  bool Accepting(const Trace& t, const MachineState& s) const {
    return t.violating && s.IsFinal() &&
           (!nf_ || FindNormalFormCuts(t.events).has_value());
  }

  // Returns false when the node cap is hit; in the exact pass, stops at the
  // first accepted violating computation of length exact_.
  bool Dfs(const MachineState& s, const Trace& t) {
    if (cap_ != 0 && ++nodes_ > cap_) return false;
    if (cap_ == 0) ++nodes_;
    const int len = static_cast<int>(t.events.size());
    if (exact_ < 0) {
      if (t.violating && !nf_) {
        best_ = std::min(best_, len + m_.Drain(s));
        return true;
      }
      if (Accepting(t, s)) {
        best_ = std::min(best_, len);
        return true;
      }
    } else if (len == exact_ && Accepting(t, s)) {
      found_ = t.events;
      return true;
    }
    const int limit = exact_ >= 0 ? exact_ : std::min(bound_, best_ - 1);
    for (Step& st : m_.EnabledSteps(s)) {
      int next_len = len + static_cast<int>(st.events.size());
      if (next_len + m_.Drain(st.next) > limit) continue;
      if (nf_ && !IsPop(st.events.front().kind) && t.descents > 0) continue;
      Trace t2 = t;
      for (const Event& e : st.events) t2.Add(m_, e);
      if (nf_ && t2.descents > 3) continue;
      if (!Dfs(st.next, t2)) return false;
      if (found_) return true;
    }
    return true;
  }

  Machine m_;
  int bound_;
  std::uint64_t cap_;
  bool nf_;
  std::uint64_t nodes_ = 0;
  int best_ = 0;
  int exact_ = -1;
  std::optional<Computation> found_;
};

}  // namespace

OracleVerdict OracleCheck(const Instance& inst, int bound,
                          std::uint64_t state_cap) {
  return Search(inst, bound, state_cap, false).Run();
}

OracleVerdict OracleNormalFormCheck(const Instance& inst, int bound,
                                    std::uint64_t state_cap) {
  return Search(inst, bound, state_cap, true).Run();
}

}  // namespace pgasrob
