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

#include "pgasrob/robustness.hh"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

namespace pgasrob {

namespace {

constexpr int kMarkShift = 38;

Letter Field(Letter l, int shift, int bits) {
  return (l >> shift) & ((Letter{1} << bits) - 1);
}

}  // namespace

Letter EncodeEvent(const Event& e, unsigned marks) {
  Letter l = static_cast<Letter>(e.kind);
  l |= static_cast<Letter>(e.rank) << 4;
  if (e.cell) {
    l |= Letter{1} << 12;
    l |= static_cast<Letter>(e.cell->rank) << 13;
    l |= static_cast<Letter>(e.cell->addr) << 21;
  }
  l |= static_cast<Letter>(e.queue + 1) << 29;
  l |= static_cast<Letter>(marks & 3) << kMarkShift;
  return l;
}

Event DecodeEvent(Letter l) {
  Event e;
  e.kind = static_cast<EventKind>(Field(l, 0, 4));
  e.rank = static_cast<int>(Field(l, 4, 8));
  if (Field(l, 12, 1)) {
    e.cell = Cell{static_cast<int>(Field(l, 13, 8)),
                  static_cast<int>(Field(l, 21, 8))};
  }
  e.queue = static_cast<int>(Field(l, 29, 9)) - 1;
  return e;
}

unsigned MarksOf(Letter l) {
  return static_cast<unsigned>(Field(l, kMarkShift, 2));
}

std::string FormatMarks(unsigned marks) {
  switch (marks & 3) {
    case kEnter:
      return "{enter}";
    case kLeave:
      return "{leave}";
    case kEnter | kLeave:
      return "{enter,leave}";
    default:
      return "{}";
  }
}

std::vector<Letter> EventAlphabet(int nodes, int domain,
                                  const std::vector<unsigned>& marks) {
  std::vector<Event> events;
  for (int r = 1; r <= nodes; ++r) {
    for (int a = 0; a < domain; ++a) {
      events.push_back({EventKind::kLoad, r, Cell{r, a}, -1});
      events.push_back({EventKind::kStore, r, Cell{r, a}, -1});
    }
    events.push_back({EventKind::kAssign, r, std::nullopt, -1});
    events.push_back({EventKind::kAssume, r, std::nullopt, -1});
    events.push_back({EventKind::kBarrier, r, std::nullopt, -1});
    for (int q = 0; q < domain; ++q) {
      events.push_back({EventKind::kRead, r, std::nullopt, q});
      events.push_back({EventKind::kWrite, r, std::nullopt, q});
      for (int cr = 1; cr <= nodes; ++cr) {
        for (int a = 0; a < domain; ++a) {
          events.push_back({EventKind::kPopA, r, Cell{cr, a}, q});
          events.push_back({EventKind::kPopB, r, Cell{cr, a}, q});
        }
      }
    }
  }
  std::vector<Letter> out;
  for (const Event& e : events) {
    for (unsigned m : marks) out.push_back(EncodeEvent(e, m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

WsState WsInitial(const Machine& m) {
  MachineState s = m.Initial();
  WsState w;
  w.pc = s.pc;
  w.mem = s.mem;
  w.pa.assign(s.qa.size(), 1);
  w.pb.assign(s.qa.size(), 1);
  return w;
}

std::vector<WsMove> WsSteps(const Machine& m, const WsState& s, bool fused) {
  std::vector<WsMove> out;
  if (!fused) {
    for (size_t qi = 0; qi < s.pa.size(); ++qi) {
      if (s.pa[qi] < s.pb[qi]) {
        WsMove mv{{}, s};
        ++mv.next.pa[qi];
        out.push_back(std::move(mv));
      }
      if (s.pb[qi] < 4) {
        WsMove mv{{}, s};
        ++mv.next.pb[qi];
        out.push_back(std::move(mv));
      }
    }
  }
  MachineState ms = m.Initial();
  ms.pc = s.pc;
  ms.mem = s.mem;
  for (Step& st : m.EnabledSteps(ms)) {
    const Event& ev = st.events.front();
    if (!IsIssue(ev.kind)) {
      WsMove mv;
      mv.next = {st.next.pc, st.next.mem, s.pa, s.pb};
      for (const Event& e : st.events) {
        mv.emissions.push_back({1, EncodeEvent(e)});
      }
      out.push_back(std::move(mv));
      continue;
    }
    int qi = m.QueueIndex(ev.rank, ev.queue);
    const RequestA& req = st.next.qa[qi].front();
    Event pop_a{EventKind::kPopA, ev.rank, Cell{req.src_rank, req.src_addr},
                ev.queue};
    Event pop_b{EventKind::kPopB, ev.rank, Cell{req.dst_rank, req.dst_addr},
                ev.queue};
    auto add = [&](int part_a, int part_b) {
      WsMove mv;
      mv.next = {st.next.pc, s.mem, s.pa, s.pb};
      mv.next.pa[qi] = static_cast<std::uint8_t>(part_a);
      mv.next.pb[qi] = static_cast<std::uint8_t>(part_b);
      if (part_b == 1) {
        mv.next.mem[m.MemSlot(req.dst_rank, req.dst_addr)] =
            s.mem[m.MemSlot(req.src_rank, req.src_addr)];
      }
      mv.emissions = {{1, EncodeEvent(ev)},
                      {part_a, EncodeEvent(pop_a)},
                      {part_b, EncodeEvent(pop_b)}};
      out.push_back(std::move(mv));
    };
    if (!fused) {
      add(s.pa[qi], s.pb[qi]);
    } else {
      for (int n = s.pb[qi]; n <= 4; ++n) {
        for (int a = s.pa[qi]; a <= n; ++a) add(a, n);
      }
    }
  }
  return out;
}

WsAutomaton::WsAutomaton(const Instance& inst, WsOptions opts)
    : m_(inst), opts_(std::move(opts)) {
  if (inst.code.state_count > 0xffff) {
    throw std::invalid_argument("too many control states");
  }
  if (opts_.markable.empty()) opts_.markable.assign(m_.nodes(), true);
  WsState s0 = WsInitial(m_);
  base_bytes_ = 2 * m_.nodes() + static_cast<int>(s0.mem.size()) +
                2 * static_cast<int>(s0.pa.size());
}

StateKey WsAutomaton::Encode(const WsState& base,
                             const std::vector<std::uint8_t>& mu, bool m6,
                             std::span<const MhaLabel> rest) const {
  StateKey k;
  k.reserve(1 + base_bytes_ + mu.size() + 1 + rest.size() * 9);
  k.push_back(rest.empty() ? 0 : 1);
  for (int pc : base.pc) {
    k.push_back(static_cast<char>(pc & 0xff));
    k.push_back(static_cast<char>(pc >> 8));
  }
  k.append(base.mem.begin(), base.mem.end());
  k.append(base.pa.begin(), base.pa.end());
  k.append(base.pb.begin(), base.pb.end());
  if (opts_.marked) {
    k.append(mu.begin(), mu.end());
    k.push_back(m6 ? 1 : 0);
  }
  for (const MhaLabel& l : rest) {
    k.push_back(static_cast<char>(l.head));
    k.append(reinterpret_cast<const char*>(&l.letter), sizeof(Letter));
  }
  return k;
}

WsState WsAutomaton::BaseState(const StateKey& s) const {
  WsState w = WsInitial(m_);
  const auto* p = reinterpret_cast<const unsigned char*>(s.data()) + 1;
  for (int& pc : w.pc) {
    pc = p[0] | (p[1] << 8);
    p += 2;
  }
  std::memcpy(w.mem.data(), p, w.mem.size());
  p += w.mem.size();
  std::memcpy(w.pa.data(), p, w.pa.size());
  p += w.pa.size();
  std::memcpy(w.pb.data(), p, w.pb.size());
  return w;
}

StateKey WsAutomaton::Initial() const {
  return Encode(WsInitial(m_), std::vector<std::uint8_t>(m_.nodes(), 0), false,
                {});
}

bool WsAutomaton::IsFinal(const StateKey& s) const {
  if (IsAux(s)) return false;
  if (!opts_.marked) return true;
  const char* mu = s.data() + 1 + base_bytes_;
  for (int r = 0; r < m_.nodes(); ++r) {
    if (mu[r] == kEnter) return false;
  }
  return true;
}

void WsAutomaton::Emit(const WsState& next, const std::vector<std::uint8_t>& mu,
                       bool m6, std::span<const MhaLabel> chain,
                       std::vector<MhaEdge>& out) const {
  const MhaLabel& first = chain.front();
  std::span<const MhaLabel> rest = chain.subspan(1);
  Event ev = DecodeEvent(first.letter);
  int r = ev.rank - 1;
  auto push = [&](unsigned marks, const std::vector<std::uint8_t>& mu2,
                  bool m6_2) {
    out.push_back({{first.head, first.letter | (Letter{marks} << kMarkShift)},
                   Encode(next, mu2, m6_2, rest)});
  };
  if (m6) {
    std::vector<std::uint8_t> mu2 = mu;
    mu2[r] = kLeave;
    push(kEnter, mu2, false);
    return;
  }
  push(0, mu, false);
  if (!opts_.marked || !opts_.markable[r]) return;
  if (!ev.cell && ev.kind != EventKind::kBarrier) return;
  std::vector<std::uint8_t> mu2 = mu;
  if (mu[r] == 0) {
    mu2[r] = kEnter;
    push(kEnter, mu2, false);
    mu2[r] = kLeave;
    push(kEnter | kLeave, mu2, false);
    if (ev.kind == EventKind::kPopA && !rest.empty() &&
        DecodeEvent(rest.front().letter).kind == EventKind::kPopB) {
      push(kLeave, mu, true);
    }
  } else if (mu[r] == kEnter) {
    mu2[r] = kLeave;
    push(kLeave, mu2, false);
  }
}

void WsAutomaton::Successors(const StateKey& s,
                             std::vector<MhaEdge>& out) const {
  WsState base = BaseState(s);
  std::vector<std::uint8_t> mu(m_.nodes(), 0);
  bool m6 = false;
  size_t off = 1 + base_bytes_;
  if (opts_.marked) {
    std::memcpy(mu.data(), s.data() + off, mu.size());
    m6 = s[off + mu.size()] != 0;
    off += mu.size() + 1;
  }
  if (IsAux(s)) {
    std::vector<MhaLabel> rest;
    for (; off < s.size(); off += 9) {
      MhaLabel l;
      l.head = static_cast<unsigned char>(s[off]);
      std::memcpy(&l.letter, s.data() + off + 1, sizeof(Letter));
      rest.push_back(l);
    }
    Emit(base, mu, m6, rest, out);
    return;
  }
  for (const WsMove& mv : WsSteps(m_, base, opts_.fused)) {
    if (mv.emissions.empty()) {
      out.push_back({{}, Encode(mv.next, mu, false, {})});
    } else {
      Emit(mv.next, mu, false, mv.emissions, out);
    }
  }
}

HbPairDfa::HbPairDfa(int r1, int r2, int nodes, int domain)
    : r1_(r1), r2_(r2), domain_(domain), cells_(nodes * domain) {}

int HbPairDfa::Step(int state, Letter a) const {
  Event e = DecodeEvent(a);
  unsigned marks = MarksOf(a);
  bool barrier = e.kind == EventKind::kBarrier;
  bool leave = e.rank == r1_ && (marks & kLeave);
  bool enter = e.rank == r2_ && (marks & kEnter);
  switch (state) {
    case kInit:
      if (leave) {
        if (barrier) return kBarFromLeave;
        if (!e.cell) return -1;
        return kWatch + (IsWriteAccess(e.kind) ? cells_ : 0) +
               CellIndex(*e.cell);
      }
      if (enter) return barrier ? kBarFromEnter : -1;
      return kInit;
    case kAcceptCf:
    case kAcceptBar:
      return state;
    case kBarFromLeave:
    case kBarFromEnter:
      if (!barrier || e.rank == 1) return -1;
      if (state == kBarFromLeave ? enter : leave) return kAcceptBar;
      if (e.rank != r1_ && e.rank != r2_) return state;
      return -1;
    default: {
      int w = state - kWatch;
      bool is_write = w >= cells_;
      int cell = w % cells_;
      bool same = e.cell && CellIndex(*e.cell) == cell;
      if (enter) {
        return same && (is_write || IsWriteAccess(e.kind)) ? kAcceptCf : -1;
      }
      if (same && IsWriteAccess(e.kind)) return -1;
      return state;
    }
  }
}

int SingleMarkDfa::Step(int state, Letter a) const {
  unsigned m = MarksOf(a);
  return state == 1 || m == kEnter || m == kLeave ? 1 : 0;
}

Nfa BuildHbNfa(int r1, int r2, int nodes, int domain) {
  ProductDfa p;
  p.parts.push_back(std::make_shared<HbPairDfa>(r1, r2, nodes, domain));
  p.accept = [](std::span<const int> st) {
    return HbPairDfa::IsAccepting(st[0]);
  };
  std::vector<Letter> sigma =
      EventAlphabet(nodes, domain, {0, kEnter, kLeave, kEnter | kLeave});
  return p.Materialize(sigma);
}

ProductDfa CycleTypeDfa(const std::vector<int>& theta, int nodes, int domain) {
  ProductDfa p;
  size_t k = theta.size();
  for (size_t i = 0; i < k; ++i) {
    p.parts.push_back(std::make_shared<HbPairDfa>(theta[i], theta[(i + 1) % k],
                                                  nodes, domain));
  }
  p.parts.push_back(std::make_shared<SingleMarkDfa>());
  p.accept = [k](std::span<const int> st) {
    bool cf = false;
    for (size_t i = 0; i < k; ++i) {
      if (!HbPairDfa::IsAccepting(st[i])) return false;
      cf = cf || st[i] == HbPairDfa::kAcceptCf;
    }
    return cf || st[k] == 1;
  };
  return p;
}

std::vector<std::vector<int>> CycleTypes(int nodes) {
  std::vector<std::vector<int>> out;
  for (int k = 1; k <= nodes; ++k) {
    std::vector<std::vector<int>> level;
    std::vector<int> cur;
    std::vector<bool> used(nodes + 1, false);
    std::function<void()> rec = [&]() {
      if (static_cast<int>(cur.size()) == k) {
        level.push_back(cur);
        return;
      }
      int lo = cur.empty() ? 1 : cur.front() + 1;
      for (int r = lo; r <= nodes; ++r) {
        if (used[r]) continue;
        used[r] = true;
        cur.push_back(r);
        rec();
        cur.pop_back();
        used[r] = false;
      }
    };
    rec();
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

const char* OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kRobust:
      return "robust";
    case Outcome::kNotRobust:
      return "not_robust";
    case Outcome::kResourceBound:
      return "resource_bound";
  }
  return "?";
}

namespace {

SearchResult SearchCycleType(const Instance& inst, const std::vector<int>& theta,
                             const CheckOptions& opts) {
  WsOptions wo;
  wo.fused = opts.fused;
  wo.marked = true;
  wo.markable.assign(inst.nodes, false);
  for (int r : theta) wo.markable[r - 1] = true;
  WsAutomaton w(inst, wo);
  ProductDfa b = CycleTypeDfa(theta, inst.nodes, inst.domain);
  if (opts.mode == IntersectionMode::kSummary) {
    SummaryIntersection x(w, b);
    return FindWitness(x, opts.max_states);
  }
  Nfa v = b.Materialize(EventAlphabet(inst.nodes, inst.domain,
                                      {0, kEnter, kLeave, kEnter | kLeave}));
  LazyIntersection x(w, v);
  return FindWitness(x, opts.max_states);
}

std::string Join(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

}  // namespace

std::string VerifyWitness(const Instance& inst, const Verdict& v) {
  std::vector<MhaLabel> run;
  for (const MarkedEvent& me : v.marked_run) {
    run.push_back({me.head, EncodeEvent(me.event)});
  }
  Computation c;
  for (Letter l : Comp(run, 4)) c.push_back(DecodeEvent(l));
  Annotate(c);
  if (c != v.computation) return "computation differs from comp of the run";
  for (size_t i = 0; i < v.marked_run.size(); ++i) {
    const MarkedEvent& me = v.marked_run[i];
    EventKind k = me.event.kind;
    if (!IsPop(k) && me.head != 1) return "non-pop event off head 1";
    if (IsIssue(k)) {
      if (i + 2 >= v.marked_run.size()) return "issue without its pops";
      const MarkedEvent& a = v.marked_run[i + 1];
      const MarkedEvent& b = v.marked_run[i + 2];
      if (a.event.kind != EventKind::kPopA || b.event.kind != EventKind::kPopB ||
          a.event.rank != me.event.rank || b.event.rank != me.event.rank ||
          a.event.queue != me.event.queue || b.event.queue != me.event.queue) {
        return "pops not immediately after their issue";
      }
      if (a.head > b.head) return "popA emitted to a later part than popB";
    }
    if (k == EventKind::kPopA &&
        (i == 0 || !IsIssue(v.marked_run[i - 1].event.kind))) {
      return "popA not immediately after its issue";
    }
    if (me.marks != 0 &&
        std::find(v.cycle_type.begin(), v.cycle_type.end(), me.event.rank) ==
            v.cycle_type.end()) {
      return "mark outside the cycle type";
    }
  }
  for (int r : v.cycle_type) {
    int enter = 0, leave = 0;
    for (const MarkedEvent& me : v.marked_run) {
      if (me.event.rank != r) continue;
      enter += (me.marks & kEnter) ? 1 : 0;
      leave += (me.marks & kLeave) ? 1 : 0;
    }
    if (enter != 1 || leave != 1) return "rank without exactly one enter/leave";
  }
  if (!Accepts(inst, c)) return "computation not accepted by E(P,N)";
  if (!IsNormalForm(c, v.cuts)) return "computation not in normal form";
  if (!IsViolating(c)) return "computation not violating";
  HbRelation hb = HappensBefore(c);
  std::string why = CheckCycCycle(c, hb, v.hb_cycle);
  if (!why.empty()) return "(CYC) cycle malformed: " + why;
  return "";
}

Verdict CheckRobustness(const Instance& inst, const CheckOptions& opts) {
  Machine check(inst);
  std::vector<std::vector<int>> types = CycleTypes(inst.nodes);
  std::vector<SearchResult> results(types.size());
  std::vector<char> done(types.size(), 0);
  std::atomic<size_t> next{0};
  std::atomic<size_t> found{std::numeric_limits<size_t>::max()};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= types.size() || i > found.load()) return;
      try {
        results[i] = SearchCycleType(inst, types[i], opts);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        found.store(0);
        return;
      }
      done[i] = 1;
      spdlog::debug("cycle type [{}]: {} states, {}", Join(types[i]),
                    results[i].states,
                    results[i].status == SearchStatus::kFound   ? "found"
                    : results[i].status == SearchStatus::kEmpty ? "empty"
                                                                : "exhausted");
      if (results[i].status == SearchStatus::kFound) {
        size_t cur = found.load();
        while (i < cur && !found.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };
  int threads = std::max(1, opts.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  Verdict v;
  bool exhausted = false;
  for (size_t i = 0; i < types.size(); ++i) {
    if (!done[i]) continue;
    const SearchResult& r = results[i];
    v.states += r.states;
    if (r.status == SearchStatus::kExhausted) exhausted = true;
    if (r.status != SearchStatus::kFound) continue;
    v.outcome = Outcome::kNotRobust;
    v.cycle_type = types[i];
    v.cycle_types_checked = static_cast<int>(i + 1);
    for (const MhaLabel& l : r.run) {
      if (l.epsilon()) continue;
      v.marked_run.push_back({l.head, DecodeEvent(l.letter), MarksOf(l.letter)});
    }
    for (Letter l : r.word) v.computation.push_back(DecodeEvent(l));
    Annotate(v.computation);
    HbRelation hb = HappensBefore(v.computation);
    if (auto cyc = FindViolation(hb)) v.violation = *cyc;
    if (auto cyc = ExtractCycCycle(v.computation, hb)) v.hb_cycle = *cyc;
    if (auto cuts = FindNormalFormCuts(v.computation)) v.cuts = *cuts;
    std::string why = VerifyWitness(inst, v);
    if (!why.empty()) {
      throw InternalError("witness for cycle type [" + Join(types[i]) +
                          "] failed re-verification: " + why + "\n" +
                          FormatComputation(v.computation));
    }
    return v;
  }
  v.cycle_types_checked = static_cast<int>(types.size());
  v.outcome = exhausted ? Outcome::kResourceBound : Outcome::kRobust;
  return v;
}

}  // namespace pgasrob
