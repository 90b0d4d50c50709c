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

#include "pgasrob/mha.hh"

#include <algorithm>
#include <cstring>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace pgasrob {

Word Comp(std::span<const MhaLabel> run, int heads) {
  Word out;
  for (int k = 1; k <= heads; ++k) {
    for (const MhaLabel& l : run) {
      if (l.head == k) out.push_back(l.letter);
    }
  }
  return out;
}

Letter Alphabet::Intern(const std::string& name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  Letter l = names_.size();
  names_.push_back(name);
  ids_[name] = l;
  return l;
}

std::optional<Letter> Alphabet::Find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

int Nfa::AddState(bool final) {
  final_.push_back(final);
  out_.emplace_back();
  eps_.emplace_back();
  return size() - 1;
}

void Nfa::AddTransition(int from, Letter a, int to) {
  out_.at(from).emplace_back(a, to);
}

void Nfa::AddEpsilon(int from, int to) { eps_.at(from).push_back(to); }

std::set<int> Nfa::Closure(std::set<int> states) const {
  std::vector<int> stack(states.begin(), states.end());
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int t : eps_[s]) {
      if (states.insert(t).second) stack.push_back(t);
    }
  }
  return states;
}

bool Nfa::Accepts(std::span<const Letter> word) const {
  if (size() == 0) return false;
  std::set<int> cur = Closure({initial_});
  for (Letter a : word) {
    std::set<int> next;
    for (int s : cur) {
      for (auto [b, t] : out_[s]) {
        if (a == b) next.insert(t);
      }
    }
    cur = Closure(std::move(next));
  }
  for (int s : cur) {
    if (final_[s]) return true;
  }
  return false;
}

std::vector<bool> Nfa::Reachable(int s) const {
  std::vector<bool> seen(size(), false);
  std::vector<int> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    auto visit = [&](int t) {
      if (!seen[t]) {
        seen[t] = true;
        stack.push_back(t);
      }
    };
    for (auto [a, t] : out_[u]) visit(t);
    for (int t : eps_[u]) visit(t);
  }
  return seen;
}

int MultiheadedAutomaton::AddState(bool final) {
  final_.push_back(final);
  out_.emplace_back();
  return size() - 1;
}

void MultiheadedAutomaton::AddTransition(int from, int head, Letter a, int to) {
  if (head < 1 || head > heads_) {
    throw std::invalid_argument("head " + std::to_string(head) +
                                " out of range");
  }
  out_.at(from).push_back({from, {head, a}, to});
}

void MultiheadedAutomaton::AddEpsilon(int from, int to) {
  out_.at(from).push_back({from, {0, 0}, to});
}

int MultiheadedAutomaton::TransitionCount() const {
  int n = 0;
  for (const auto& o : out_) n += static_cast<int>(o.size());
  return n;
}

StateKey ExplicitView::Key(int s) {
  StateKey k(4, '\0');
  std::memcpy(k.data(), &s, 4);
  return k;
}

int ExplicitView::State(const StateKey& k) {
  int s;
  std::memcpy(&s, k.data(), 4);
  return s;
}

void ExplicitView::Successors(const StateKey& s,
                              std::vector<MhaEdge>& out) const {
  for (const MhaTransition& t : a_.Out(State(s))) {
    out.push_back({t.label, Key(t.to)});
  }
}

MultiheadedAutomaton FromNfa(const Nfa& v) {
  MultiheadedAutomaton a(1);
  for (int s = 0; s < v.size(); ++s) a.AddState(v.IsFinal(s));
  if (v.size() == 0) {
    a.AddState(false);
    return a;
  }
  a.SetInitial(v.initial());
  for (int s = 0; s < v.size(); ++s) {
    for (auto [l, t] : v.Out(s)) a.AddTransition(s, 1, l, t);
    for (int t : v.Eps(s)) a.AddEpsilon(s, t);
  }
  return a;
}

namespace {

void EnumerateGuesses(const Nfa& v, const std::vector<std::vector<bool>>& reach,
                      int n, std::vector<int>& w,
                      const std::function<void(const std::vector<int>&)>& emit) {
  if (static_cast<int>(w.size()) == n) {
    emit(w);
    return;
  }
  int prev = w.back();
  for (int s = 0; s < v.size(); ++s) {
    if (!reach[prev][s]) continue;
    w.push_back(s);
    EnumerateGuesses(v, reach, n, w, emit);
    w.pop_back();
  }
}

std::vector<std::vector<bool>> AllReach(const Nfa& v) {
  std::vector<std::vector<bool>> r;
  for (int s = 0; s < v.size(); ++s) r.push_back(v.Reachable(s));
  return r;
}

bool GuessFinal(const Nfa& v, const std::vector<int>& w1,
                const std::vector<int>& w2) {
  int n = static_cast<int>(w1.size());
  if (!v.IsFinal(w1[n - 1])) return false;
  for (int k = 0; k + 1 < n; ++k) {
    if (w1[k] != w2[k + 1]) return false;
  }
  return true;
}

}  // namespace

MultiheadedAutomaton Intersect(const MultiheadedAutomaton& u, const Nfa& v) {
  const int n = u.heads();
  MultiheadedAutomaton w(n);
  int init = w.AddState(false);
  w.SetInitial(init);
  if (v.size() == 0 || u.size() == 0) return w;
  auto reach = AllReach(v);
  using Tuple = std::tuple<int, std::vector<int>, std::vector<int>>;
  std::map<Tuple, int> ids;
  std::deque<Tuple> queue;
  auto id_of = [&](int q, const std::vector<int>& w1,
                   const std::vector<int>& w2) {
    Tuple t{q, w1, w2};
    auto it = ids.find(t);
    if (it != ids.end()) return it->second;
    int s = w.AddState(u.IsFinal(q) && GuessFinal(v, w1, w2));
    ids.emplace(t, s);
    queue.push_back(t);
    return s;
  };
  std::vector<int> guess{v.initial()};
  EnumerateGuesses(v, reach, n, guess, [&](const std::vector<int>& g) {
    w.AddEpsilon(init, id_of(u.initial(), g, g));
  });
  while (!queue.empty()) {
    auto [q, w1, w2] = queue.front();
    queue.pop_front();
    int from = ids.at({q, w1, w2});
    for (const MhaTransition& t : u.Out(q)) {
      if (t.label.epsilon()) {
        w.AddEpsilon(from, id_of(t.to, w1, w2));
        continue;
      }
      int k = t.label.head - 1;
      for (auto [a, vt] : v.Out(w1[k])) {
        if (a != t.label.letter) continue;
        std::vector<int> next = w1;
        next[k] = vt;
        w.AddTransition(from, t.label.head, a, id_of(t.to, next, w2));
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int vt : v.Eps(w1[k])) {
        std::vector<int> next = w1;
        next[k] = vt;
        w.AddEpsilon(from, id_of(q, next, w2));
      }
    }
  }
  return w;
}

LazyIntersection::LazyIntersection(const MhaView& u, const Nfa& v)
    : u_(u), v_(v), reach_(AllReach(v)) {}

StateKey LazyIntersection::Initial() const { return "I"; }

StateKey LazyIntersection::Encode(const StateKey& u, const std::vector<int>& w1,
                                  const std::vector<int>& w2) const {
  StateKey k = "S";
  std::uint32_t len = static_cast<std::uint32_t>(u.size());
  k.append(reinterpret_cast<const char*>(&len), 4);
  k += u;
  k.append(reinterpret_cast<const char*>(w1.data()), w1.size() * sizeof(int));
  k.append(reinterpret_cast<const char*>(w2.data()), w2.size() * sizeof(int));
  return k;
}

LazyIntersection::Decoded LazyIntersection::Decode(const StateKey& s) const {
  Decoded d;
  std::uint32_t len;
  std::memcpy(&len, s.data() + 1, 4);
  d.u = s.substr(5, len);
  int n = heads();
  d.w1.resize(n);
  d.w2.resize(n);
  std::memcpy(d.w1.data(), s.data() + 5 + len, n * sizeof(int));
  std::memcpy(d.w2.data(), s.data() + 5 + len + n * sizeof(int),
              n * sizeof(int));
  return d;
}

bool LazyIntersection::IsFinal(const StateKey& s) const {
  if (s == "I") return false;
  Decoded d = Decode(s);
  return u_.IsFinal(d.u) && GuessFinal(v_, d.w1, d.w2);
}

void LazyIntersection::Successors(const StateKey& s,
                                  std::vector<MhaEdge>& out) const {
  if (v_.size() == 0) return;
  if (s == "I") {
    StateKey u0 = u_.Initial();
    std::vector<int> guess{v_.initial()};
    EnumerateGuesses(v_, reach_, heads(), guess,
                     [&](const std::vector<int>& g) {
                       out.push_back({{0, 0}, Encode(u0, g, g)});
                     });
    return;
  }
  Decoded d = Decode(s);
  std::vector<MhaEdge> us;
  u_.Successors(d.u, us);
  for (const MhaEdge& e : us) {
    if (e.label.epsilon()) {
      out.push_back({e.label, Encode(e.target, d.w1, d.w2)});
      continue;
    }
    int k = e.label.head - 1;
    for (auto [a, vt] : v_.Out(d.w1[k])) {
      if (a != e.label.letter) continue;
      std::vector<int> next = d.w1;
      next[k] = vt;
      out.push_back({e.label, Encode(e.target, next, d.w2)});
    }
  }
  for (int k = 0; k < heads(); ++k) {
    for (int vt : v_.Eps(d.w1[k])) {
      std::vector<int> next = d.w1;
      next[k] = vt;
      out.push_back({{0, 0}, Encode(d.u, next, d.w2)});
    }
  }
}

bool ProductDfa::Accepts(std::span<const Letter> word) const {
  std::vector<int> s;
  for (const auto& p : parts) s.push_back(p->initial());
  for (Letter a : word) {
    for (size_t j = 0; j < parts.size(); ++j) {
      s[j] = parts[j]->Step(s[j], a);
      if (s[j] < 0) return false;
    }
  }
  return accept(s);
}

Nfa ProductDfa::Materialize(std::span<const Letter> alphabet) const {
  Nfa v;
  std::map<std::vector<int>, int> ids;
  std::deque<std::vector<int>> queue;
  auto id_of = [&](const std::vector<int>& t) {
    auto it = ids.find(t);
    if (it != ids.end()) return it->second;
    int s = v.AddState(accept(t));
    ids.emplace(t, s);
    queue.push_back(t);
    return s;
  };
  std::vector<int> init;
  for (const auto& p : parts) init.push_back(p->initial());
  v.SetInitial(id_of(init));
  while (!queue.empty()) {
    std::vector<int> t = queue.front();
    queue.pop_front();
    int from = ids.at(t);
    for (Letter a : alphabet) {
      std::vector<int> next(t.size());
      bool dead = false;
      for (size_t j = 0; j < parts.size() && !dead; ++j) {
        next[j] = parts[j]->Step(t[j], a);
        dead = next[j] < 0;
      }
      if (!dead) v.AddTransition(from, a, id_of(next));
    }
  }
  return v;
}

namespace {

constexpr unsigned char kDead = 0xff;

}  // namespace

SummaryIntersection::SummaryIntersection(const MhaView& u, const ProductDfa& v)
    : u_(u), v_(v) {
  for (const auto& p : v.parts) {
    if (p->states() >= kDead) {
      throw std::invalid_argument("DFA component with too many states");
    }
    sizes_.push_back(p->states());
    summary_bytes_ += p->states();
  }
}

StateKey SummaryIntersection::Initial() const {
  StateKey u0 = u_.Initial();
  std::uint32_t len = static_cast<std::uint32_t>(u0.size());
  StateKey k(reinterpret_cast<const char*>(&len), 4);
  k += u0;
  for (const auto& p : v_.parts) k.push_back(static_cast<char>(p->initial()));
  for (int h = 2; h <= heads(); ++h) {
    for (int size : sizes_) {
      for (int x = 0; x < size; ++x) k.push_back(static_cast<char>(x));
    }
  }
  return k;
}

bool SummaryIntersection::IsFinal(const StateKey& s) const {
  std::uint32_t len;
  std::memcpy(&len, s.data(), 4);
  if (!u_.IsFinal(s.substr(4, len))) return false;
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(s.data()) + 4 + len;
  size_t m = v_.parts.size();
  std::vector<int> st(p, p + m);
  const unsigned char* tables = p + m;
  for (int h = 2; h <= heads(); ++h) {
    const unsigned char* t = tables + (h - 2) * summary_bytes_;
    for (size_t j = 0; j < m; ++j) {
      unsigned char next = t[st[j]];
      if (next == kDead) return false;
      st[j] = next;
      t += sizes_[j];
    }
  }
  return v_.accept(st);
}

void SummaryIntersection::Successors(const StateKey& s,
                                     std::vector<MhaEdge>& out) const {
  std::uint32_t len;
  std::memcpy(&len, s.data(), 4);
  StateKey ukey = s.substr(4, len);
  size_t rest = 4 + len;
  std::vector<MhaEdge> us;
  u_.Successors(ukey, us);
  size_t m = v_.parts.size();
  for (MhaEdge& e : us) {
    std::uint32_t nlen = static_cast<std::uint32_t>(e.target.size());
    StateKey k(reinterpret_cast<const char*>(&nlen), 4);
    k += e.target;
    size_t base = k.size();
    k.append(s, rest, std::string::npos);
    unsigned char* p = reinterpret_cast<unsigned char*>(k.data()) + base;
    bool dead = false;
    if (e.label.head == 1) {
      for (size_t j = 0; j < m && !dead; ++j) {
        int next = v_.parts[j]->Step(p[j], e.label.letter);
        if (next < 0) dead = true;
        p[j] = static_cast<unsigned char>(next);
      }
    } else if (e.label.head >= 2) {
      unsigned char* t = p + m + (e.label.head - 2) * summary_bytes_;
      for (size_t j = 0; j < m && !dead; ++j) {
        bool alive = false;
        for (int x = 0; x < sizes_[j]; ++x) {
          if (t[x] == kDead) continue;
          int next = v_.parts[j]->Step(t[x], e.label.letter);
          t[x] = next < 0 ? kDead : static_cast<unsigned char>(next);
          alive |= next >= 0;
        }
        dead = !alive;
        t += sizes_[j];
      }
    }
    if (!dead) out.push_back({e.label, std::move(k)});
  }
}

SearchResult FindWitness(const MhaView& a, std::uint64_t max_states) {
  struct Node {
    int parent;
    MhaLabel label;
  };
  SearchResult r;
  std::unordered_map<StateKey, int> index;
  std::vector<Node> nodes;
  std::deque<std::pair<const StateKey*, int>> queue;
  auto init = index.emplace(a.Initial(), 0).first;
  nodes.push_back({-1, {}});
  queue.emplace_back(&init->first, 0);
  std::vector<MhaEdge> succ;
  while (!queue.empty()) {
    auto [key, id] = queue.front();
    queue.pop_front();
    if (a.IsFinal(*key)) {
      for (int v = id; nodes[v].parent >= 0; v = nodes[v].parent) {
        r.run.push_back(nodes[v].label);
      }
      std::reverse(r.run.begin(), r.run.end());
      r.word = Comp(r.run, a.heads());
      r.status = SearchStatus::kFound;
      r.states = nodes.size();
      return r;
    }
    succ.clear();
    a.Successors(*key, succ);
    std::sort(succ.begin(), succ.end(), [](const MhaEdge& x, const MhaEdge& y) {
      if (x.label != y.label) return x.label < y.label;
      return x.target < y.target;
    });
    for (MhaEdge& e : succ) {
      auto [it, fresh] =
          index.emplace(std::move(e.target), static_cast<int>(nodes.size()));
      if (!fresh) continue;
      nodes.push_back({id, e.label});
      queue.emplace_back(&it->first, it->second);
      if (max_states && nodes.size() > max_states) {
        r.status = SearchStatus::kExhausted;
        r.states = nodes.size();
        return r;
      }
    }
  }
  r.status = SearchStatus::kEmpty;
  r.states = nodes.size();
  return r;
}

bool IsEmpty(const MhaView& a) {
  return FindWitness(a).status == SearchStatus::kEmpty;
}

bool IsEmpty(const MultiheadedAutomaton& a) {
  return IsEmpty(ExplicitView(a));
}

std::optional<SearchResult> Witness(const MultiheadedAutomaton& a) {
  SearchResult r = FindWitness(ExplicitView(a));
  if (r.status != SearchStatus::kFound) return std::nullopt;
  return r;
}

std::set<Word> BoundedLanguage(const MhaView& a, int max_len) {
  std::set<Word> out;
  const int n = a.heads();
  struct Config {
    StateKey state;
    std::vector<Word> parts;
    int len = 0;
  };
  auto pack = [](const Config& c) {
    std::string k = c.state;
    k.push_back('\0');
    for (const Word& w : c.parts) {
      k.push_back(static_cast<char>(w.size()));
      k.append(reinterpret_cast<const char*>(w.data()),
               w.size() * sizeof(Letter));
    }
    return k;
  };
  std::unordered_set<std::string> seen;
  std::vector<Config> stack;
  stack.push_back(Config{a.Initial(), std::vector<Word>(n), 0});
  seen.insert(pack(stack.back()));
  std::vector<MhaEdge> succ;
  while (!stack.empty()) {
    Config cfg = std::move(stack.back());
    stack.pop_back();
    if (a.IsFinal(cfg.state)) {
      Word w;
      for (const Word& part : cfg.parts) w.insert(w.end(), part.begin(), part.end());
      out.insert(std::move(w));
    }
    succ.clear();
    a.Successors(cfg.state, succ);
    for (MhaEdge& e : succ) {
      if (!e.label.epsilon() && cfg.len + 1 > max_len) continue;
      Config next{std::move(e.target), cfg.parts, cfg.len};
      if (!e.label.epsilon()) {
        next.parts[e.label.head - 1].push_back(e.label.letter);
        ++next.len;
      }
      if (seen.insert(pack(next)).second) stack.push_back(std::move(next));
    }
  }
  return out;
}

std::set<Word> BoundedLanguage(const MultiheadedAutomaton& a, int max_len) {
  return BoundedLanguage(ExplicitView(a), max_len);
}

std::set<Word> BoundedLanguage(const Nfa& a, int max_len) {
  MultiheadedAutomaton m = FromNfa(a);
  return BoundedLanguage(m, max_len);
}

MultiheadedAutomaton ParseMha(std::string_view text, Alphabet& sigma) {
  std::istringstream in{std::string(text)};
  std::string line;
  int heads = 1;
  int initial = 0;
  std::vector<int> finals;
  struct Raw {
    int from;
    int head;
    std::string letter;
    int to;
  };
  std::vector<Raw> raw;
  int max_state = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto fail = [&]() {
      throw std::runtime_error("automaton line " + std::to_string(lineno) +
                               ": malformed");
    };
    if (first == "heads") {
      if (!(ls >> heads) || heads < 1) fail();
    } else if (first == "initial") {
      if (!(ls >> initial) || initial < 0) fail();
      max_state = std::max(max_state, initial);
    } else if (first == "final") {
      int s;
      while (ls >> s) {
        if (s < 0) fail();
        finals.push_back(s);
        max_state = std::max(max_state, s);
      }
    } else {
      Raw r;
      std::string head;
      try {
        r.from = std::stoi(first);
      } catch (const std::exception&) {
        fail();
      }
      if (!(ls >> head)) fail();
      if (head == "eps") {
        r.head = 0;
        if (!(ls >> r.to)) fail();
      } else {
        try {
          r.head = std::stoi(head);
        } catch (const std::exception&) {
          fail();
        }
        if (!(ls >> r.letter >> r.to)) fail();
      }
      if (r.from < 0 || r.to < 0) fail();
      max_state = std::max({max_state, r.from, r.to});
      raw.push_back(r);
    }
  }
  MultiheadedAutomaton a(heads);
  for (int s = 0; s <= max_state; ++s) a.AddState(false);
  a.SetInitial(initial);
  for (int s : finals) a.SetFinal(s);
  for (const Raw& r : raw) {
    if (r.head == 0) {
      a.AddEpsilon(r.from, r.to);
    } else {
      a.AddTransition(r.from, r.head, sigma.Intern(r.letter), r.to);
    }
  }
  return a;
}

std::string PrintMha(const MultiheadedAutomaton& a, const Alphabet& sigma) {
  std::ostringstream os;
  os << "heads " << a.heads() << "\ninitial " << a.initial() << "\nfinal";
  for (int s = 0; s < a.size(); ++s) {
    if (a.IsFinal(s)) os << " " << s;
  }
  os << "\n";
  for (int s = 0; s < a.size(); ++s) {
    for (const MhaTransition& t : a.Out(s)) {
      if (t.label.epsilon()) {
        os << t.from << " eps " << t.to << "\n";
      } else {
        os << t.from << " " << t.label.head << " " << sigma.Name(t.label.letter)
           << " " << t.to << "\n";
      }
    }
  }
  return os.str();
}

std::string MhaToDot(const MultiheadedAutomaton& a, const Alphabet& sigma) {
  std::ostringstream os;
  os << "digraph mha {\n  rankdir=LR;\n  start [shape=point];\n  start -> s"
     << a.initial() << ";\n";
  for (int s = 0; s < a.size(); ++s) {
    os << "  s" << s << " [shape=" << (a.IsFinal(s) ? "doublecircle" : "circle")
       << "];\n";
  }
  for (int s = 0; s < a.size(); ++s) {
    for (const MhaTransition& t : a.Out(s)) {
      os << "  s" << t.from << " -> s" << t.to << " [label=\"";
      if (t.label.epsilon()) {
        os << "ε";
      } else {
        os << t.label.head << "," << sigma.Name(t.label.letter);
      }
      os << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace pgasrob
