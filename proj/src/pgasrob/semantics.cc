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

#include "pgasrob/semantics.hh"

#include <map>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pgasrob {

namespace {

const char* kKindNames[kEventKindCount] = {
    "load", "store", "assign", "assume", "read",
    "write", "popA", "popB", "barrier"};

}  // namespace

const char* EventKindName(EventKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<EventKind> EventKindFromName(std::string_view name) {
  for (int i = 0; i < kEventKindCount; ++i) {
    if (name == kKindNames[i]) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

void Annotate(Computation& c) {
  std::map<std::pair<int, int>, int> issues, pop_a, pop_b;
  std::map<int, int> barriers;
  for (Event& e : c) {
    std::pair<int, int> key{e.rank, e.queue};
    switch (e.kind) {
      case EventKind::kRead:
      case EventKind::kWrite: e.seq = issues[key]++; break;
      case EventKind::kPopA: e.seq = pop_a[key]++; break;
      case EventKind::kPopB: e.seq = pop_b[key]++; break;
      case EventKind::kBarrier: e.seq = barriers[e.rank]++; break;
      default: e.seq = -1; break;
    }
  }
}

std::string FormatEvent(const Event& e) {
  std::ostringstream os;
  os << EventKindName(e.kind) << " " << e.rank << " ";
  if (e.cell) {
    os << "(" << e.cell->rank << "," << e.cell->addr << ")";
  } else {
    os << "⊥";
  }
  os << " q=";
  if (e.queue >= 0) {
    os << e.queue;
  } else {
    os << "-";
  }
  os << " #";
  if (e.seq >= 0) {
    os << e.seq;
  } else {
    os << "-";
  }
  return os.str();
}

std::string FormatComputation(const Computation& c) {
  std::string out;
  for (const Event& e : c) {
    out += FormatEvent(e);
    out += "\n";
  }
  return out;
}

Computation ParseComputation(std::string_view text) {
  Computation out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find("//"); hash != std::string::npos) {
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::string kind, addr, q, seq;
    int rank = 0;
    if (!(ls >> kind)) continue;
    auto fail = [&](const std::string& what) {
      throw std::runtime_error("computation line " + std::to_string(lineno) +
                               ": " + what);
    };
    auto k = EventKindFromName(kind);
    if (!k) fail("unknown event kind '" + kind + "'");
    if (!(ls >> rank) || rank < 1) fail("expected a rank");
    Event e;
    e.kind = *k;
    e.rank = rank;
    if (ls >> addr) {
      if (addr == "⊥" || addr == "_" || addr == "bot") {
      } else {
        Cell cell;
        char lp = 0, comma = 0, rp = 0;
        std::istringstream as(addr);
        if (!(as >> lp >> cell.rank >> comma >> cell.addr >> rp) ||
            lp != '(' || comma != ',' || rp != ')') {
          fail("malformed address '" + addr + "'");
        }
        e.cell = cell;
      }
    }
    if (ls >> q) {
      if (q.rfind("q=", 0) != 0) fail("expected q=<id>");
      std::string v = q.substr(2);
      if (v != "-") {
        try {
          e.queue = std::stoi(v);
        } catch (const std::exception&) {
          fail("malformed queue '" + v + "'");
        }
      }
    }
    if (HasCell(e.kind) != e.cell.has_value()) {
      fail(std::string(EventKindName(e.kind)) +
           (e.cell ? " carries no address" : " needs an address"));
    }
    if (HasQueue(e.kind) != (e.queue >= 0)) {
      fail(std::string(EventKindName(e.kind)) +
           (e.queue >= 0 ? " carries no queue" : " needs a queue"));
    }
    out.push_back(e);
  }
  Annotate(out);
  return out;
}

bool MachineState::IsFinal() const {
  for (const auto& q : qa) {
    if (!q.empty()) return false;
  }
  for (const auto& q : qb) {
    if (!q.empty()) return false;
  }
  return true;
}

std::string MachineState::Key() const {
  std::string k;
  k.reserve(pc.size() * 2 + mem.size() + qa.size() * 2 + 8);
  for (int p : pc) {
    k.push_back(static_cast<char>(p & 0xff));
    k.push_back(static_cast<char>(p >> 8));
  }
  k.append(reinterpret_cast<const char*>(mem.data()), mem.size());
  for (const auto& q : qa) {
    k.push_back(static_cast<char>(q.size()));
    for (const RequestA& r : q) {
      k.append({static_cast<char>(r.src_rank), static_cast<char>(r.src_addr),
                static_cast<char>(r.dst_rank), static_cast<char>(r.dst_addr)});
    }
  }
  for (const auto& q : qb) {
    k.push_back(static_cast<char>(q.size()));
    for (const TransferB& t : q) {
      k.append({static_cast<char>(t.dst_rank), static_cast<char>(t.dst_addr),
                static_cast<char>(t.value)});
    }
  }
  return k;
}

Machine::Machine(Instance inst) : inst_(std::move(inst)) {
  auto diags = Validate(inst_);
  if (!diags.empty()) {
    throw std::invalid_argument(
        RenderDiagnostic(inst_.code.source_name, diags.front()));
  }
  outgoing_ = inst_.code.Outgoing();
}

MachineState Machine::Initial() const {
  MachineState s;
  s.pc.assign(nodes(), inst_.code.initial);
  s.mem.assign(static_cast<size_t>(nodes()) * SlotsPerRank(), 0);
  s.qa.resize(static_cast<size_t>(nodes()) * queues());
  s.qb.resize(static_cast<size_t>(nodes()) * queues());
  return s;
}

EvalEnv Machine::Env(const MachineState& s, int rank) const {
  EvalEnv env;
  env.regs = std::span<const std::uint8_t>(s.mem).subspan(RegSlot(rank, 0),
                                                         registers());
  env.rank = rank;
  env.nodes = nodes();
  env.domain = domain();
  return env;
}

bool Machine::ApplyCommand(const MachineState& s, int rank,
                           const Transition& t, MachineState& next,
                           Event& ev) const {
  const Command& c = t.command;
  EvalEnv env = Env(s, rank);
  auto data = [&](int i) {
    return WrapDomain(Eval(c.args[i], env, EvalSort::kData), domain());
  };
  ev = Event{};
  ev.rank = rank;
  switch (c.kind) {
    case CommandKind::kLoad: {
      int a = data(0);
      next = s;
      next.mem[RegSlot(rank, c.reg)] = s.mem[MemSlot(rank, a)];
      ev.kind = EventKind::kLoad;
      ev.cell = Cell{rank, a};
      break;
    }
    case CommandKind::kStore: {
      int a = data(0);
      int v = data(1);
      next = s;
      next.mem[MemSlot(rank, a)] = static_cast<std::uint8_t>(v);
      ev.kind = EventKind::kStore;
      ev.cell = Cell{rank, a};
      break;
    }
    case CommandKind::kAssign: {
      int v = data(0);
      next = s;
      next.mem[RegSlot(rank, c.reg)] = static_cast<std::uint8_t>(v);
      ev.kind = EventKind::kAssign;
      break;
    }
    case CommandKind::kAssume: {
      if (Eval(c.args[0], env, EvalSort::kData) == 0) return false;
      next = s;
      ev.kind = EventKind::kAssume;
      break;
    }
    case CommandKind::kRead:
    case CommandKind::kWrite: {
      long rk = Eval(c.args[1], env, EvalSort::kRank);
      if (rk < 1 || rk > nodes()) return false;
      int local = data(0);
      int remote = data(2);
      int q = data(3);
      next = s;
      RequestA req;
      if (c.kind == CommandKind::kRead) {
        req = {static_cast<std::uint8_t>(rk), static_cast<std::uint8_t>(remote),
               static_cast<std::uint8_t>(rank),
               static_cast<std::uint8_t>(local)};
        ev.kind = EventKind::kRead;
      } else {
        req = {static_cast<std::uint8_t>(rank), static_cast<std::uint8_t>(local),
               static_cast<std::uint8_t>(rk),
               static_cast<std::uint8_t>(remote)};
        ev.kind = EventKind::kWrite;
      }
      next.qa[QueueIndex(rank, q)].push_back(req);
      ev.queue = q;
      break;
    }
    case CommandKind::kBarrier:
      return false;
  }
  next.pc[rank - 1] = t.to;
  return true;
}

std::vector<Step> Machine::EnabledSteps(const MachineState& s) const {
  std::vector<Step> out;
  const auto& trans = inst_.code.transitions;
  for (int rank = 1; rank <= nodes(); ++rank) {
    for (int ti : outgoing_[s.pc[rank - 1]]) {
      const Transition& t = trans[ti];
      if (t.command.kind == CommandKind::kBarrier) continue;
      Step step;
      Event ev;
      if (ApplyCommand(s, rank, t, step.next, ev)) {
        step.events.push_back(ev);
        out.push_back(std::move(step));
      }
    }
    for (int q = 0; q < queues(); ++q) {
      int qi = QueueIndex(rank, q);
      if (!s.qa[qi].empty()) {
        const RequestA& r = s.qa[qi].front();
        Step step;
        step.next = s;
        step.next.qa[qi].pop_front();
        std::uint8_t v = s.mem[MemSlot(r.src_rank, r.src_addr)];
        step.next.qb[qi].push_back(TransferB{r.dst_rank, r.dst_addr, v});
        Event ev;
        ev.kind = EventKind::kPopA;
        ev.rank = rank;
        ev.cell = Cell{r.src_rank, r.src_addr};
        ev.queue = q;
        step.events.push_back(ev);
        out.push_back(std::move(step));
      }
      if (!s.qb[qi].empty()) {
        const TransferB& t = s.qb[qi].front();
        Step step;
        step.next = s;
        step.next.qb[qi].pop_front();
        step.next.mem[MemSlot(t.dst_rank, t.dst_addr)] = t.value;
        Event ev;
        ev.kind = EventKind::kPopB;
        ev.rank = rank;
        ev.cell = Cell{t.dst_rank, t.dst_addr};
        ev.queue = q;
        step.events.push_back(ev);
        out.push_back(std::move(step));
      }
    }
  }
  // Barrier: one block over every combination of barrier transitions.
  std::vector<std::vector<int>> choices(nodes());
  for (int rank = 1; rank <= nodes(); ++rank) {
    for (int ti : outgoing_[s.pc[rank - 1]]) {
      if (trans[ti].command.kind == CommandKind::kBarrier) {
        choices[rank - 1].push_back(ti);
      }
    }
    if (choices[rank - 1].empty()) return out;
  }
  std::vector<size_t> idx(nodes(), 0);
  for (;;) {
    Step step;
    step.next = s;
    for (int rank = 1; rank <= nodes(); ++rank) {
      step.next.pc[rank - 1] = trans[choices[rank - 1][idx[rank - 1]]].to;
      Event ev;
      ev.kind = EventKind::kBarrier;
      ev.rank = rank;
      step.events.push_back(ev);
    }
    out.push_back(std::move(step));
    int r = nodes() - 1;
    while (r >= 0 && ++idx[r] == choices[r].size()) {
      idx[r] = 0;
      --r;
    }
    if (r < 0) break;
  }
  return out;
}

int Machine::Drain(const MachineState& s) const {
  int d = 0;
  for (const auto& q : s.qa) d += 2 * static_cast<int>(q.size());
  for (const auto& q : s.qb) d += static_cast<int>(q.size());
  return d;
}

MachineState InitialState(const Instance& inst) {
  return Machine(inst).Initial();
}

std::vector<Step> EnabledSteps(const Instance& inst, const MachineState& s) {
  return Machine(inst).EnabledSteps(s);
}

namespace {

void Append(Computation& c, const std::vector<Event>& events) {
  c.insert(c.end(), events.begin(), events.end());
}

}  // namespace

ScheduleResult RunSchedule(const Instance& inst, std::span<const int> choices) {
  Machine m(inst);
  ScheduleResult r;
  r.final_state = m.Initial();
  for (int choice : choices) {
    auto steps = m.EnabledSteps(r.final_state);
    if (choice < 0 || choice >= static_cast<int>(steps.size())) {
      r.stuck = true;
      r.stuck_reason = "step " + std::to_string(r.steps) + ": choice " +
                       std::to_string(choice) + " out of range (" +
                       std::to_string(steps.size()) + " enabled)";
      break;
    }
    Append(r.computation, steps[choice].events);
    r.final_state = std::move(steps[choice].next);
    ++r.steps;
  }
  Annotate(r.computation);
  r.accepting = r.final_state.IsFinal();
  return r;
}

ScheduleResult RunRandom(const Instance& inst, std::uint64_t seed,
                         int max_steps) {
  Machine m(inst);
  std::mt19937_64 rng(seed);
  ScheduleResult r;
  r.final_state = m.Initial();
  while (r.steps < max_steps) {
    auto steps = m.EnabledSteps(r.final_state);
    if (steps.empty()) break;
    std::uniform_int_distribution<size_t> pick(0, steps.size() - 1);
    size_t choice = pick(rng);
    Append(r.computation, steps[choice].events);
    r.final_state = std::move(steps[choice].next);
    ++r.steps;
  }
  Annotate(r.computation);
  r.accepting = r.final_state.IsFinal();
  return r;
}

namespace {

std::string EncodeComputation(const Computation& c) {
  std::string k;
  for (const Event& e : c) {
    k.push_back(static_cast<char>(e.kind));
    k.push_back(static_cast<char>(e.rank));
    k.push_back(static_cast<char>(e.cell ? e.cell->rank : 0));
    k.push_back(static_cast<char>(e.cell ? e.cell->addr : 0));
    k.push_back(static_cast<char>(e.queue + 1));
  }
  return k;
}

struct Enumerator {
  const Machine& m;
  int max_len;
  const std::function<bool(const Computation&)>& visit;
  std::unordered_set<std::string> seen;
  Computation prefix;
  bool stopped = false;

  void Dfs(const MachineState& s) {
    if (stopped) return;
    int len = static_cast<int>(prefix.size());
    if (s.IsFinal()) {
      if (seen.insert(EncodeComputation(prefix)).second) {
        Computation c = prefix;
        Annotate(c);
        if (!visit(c)) {
          stopped = true;
          return;
        }
      }
    }
    for (Step& step : m.EnabledSteps(s)) {
      int n = static_cast<int>(step.events.size());
      if (len + n + m.Drain(step.next) > max_len) continue;
      Append(prefix, step.events);
      Dfs(step.next);
      prefix.resize(len);
      if (stopped) return;
    }
  }
};

}  // namespace

void EnumerateComputations(
    const Instance& inst, int max_len,
    const std::function<bool(const Computation&)>& visit) {
  Machine m(inst);
  Enumerator en{m, max_len, visit, {}, {}, false};
  MachineState init = m.Initial();
  if (m.Drain(init) <= max_len) en.Dfs(init);
}

std::vector<Computation> EnumerateComputations(const Instance& inst,
                                               int max_len) {
  std::vector<Computation> out;
  EnumerateComputations(inst, max_len, [&](const Computation& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

bool Accepts(const Instance& inst, const Computation& c) {
  Machine m(inst);
  const int len = static_cast<int>(c.size());
  // Frontier per position; barrier blocks advance by several events.
  std::vector<std::unordered_map<std::string, MachineState>> at(len + 1);
  MachineState init = m.Initial();
  at[0].emplace(init.Key(), init);
  for (int pos = 0; pos <= len; ++pos) {
    if (pos == len) break;
    for (const auto& [key, s] : at[pos]) {
      for (Step& step : m.EnabledSteps(s)) {
        int n = static_cast<int>(step.events.size());
        if (pos + n > len) continue;
        bool match = true;
        for (int i = 0; i < n && match; ++i) {
          match = step.events[i] == c[pos + i];
        }
        if (match) at[pos + n].emplace(step.next.Key(), std::move(step.next));
      }
    }
    at[pos].clear();
  }
  for (const auto& [key, s] : at[len]) {
    if (s.IsFinal()) return true;
  }
  return false;
}

}  // namespace pgasrob
