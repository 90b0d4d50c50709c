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

#include "pgasrob/traces.hh"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace pgasrob {

const char* EdgeKindName(EdgeKind k) {
  switch (k) {
    case EdgeKind::kPo: return "po";
    case EdgeKind::kCf: return "cf";
    case EdgeKind::kEq: return "eq";
  }
  return "?";
}

std::vector<HbEdge> HbRelation::Edges() const {
  std::vector<HbEdge> out;
  out.reserve(po.size() + cf.size() + eq.size());
  for (auto [a, b] : po) out.push_back({a, b, EdgeKind::kPo});
  for (auto [a, b] : cf) out.push_back({a, b, EdgeKind::kCf});
  for (auto [a, b] : eq) out.push_back({a, b, EdgeKind::kEq});
  return out;
}

HbRelation HappensBefore(const Computation& input) {
  Computation c = input;
  Annotate(c);
  const int n = static_cast<int>(c.size());
  HbRelation hb;
  hb.size = n;
  hb.rep.assign(n, -1);
  int max_rank = 0;
  for (int i = 0; i < n; ++i) {
    const Event& e = c[i];
    if (e.rank < 1) throw MalformedComputation("event with rank below 1");
    if (HasCell(e.kind) != e.cell.has_value()) {
      throw MalformedComputation("event " + std::to_string(i) +
                                 " has an address field unfit for its kind");
    }
    if (HasQueue(e.kind) != (e.queue >= 0)) {
      throw MalformedComputation("event " + std::to_string(i) +
                                 " has a queue field unfit for its kind");
    }
    max_rank = std::max(max_rank, e.rank);
  }

  // Program order: successor relation on non-pop events of each rank.
  std::map<int, int> last;
  for (int i = 0; i < n; ++i) {
    if (IsPop(c[i].kind)) continue;
    auto it = last.find(c[i].rank);
    if (it != last.end()) hb.po.emplace_back(it->second, i);
    last[c[i].rank] = i;
  }

  // Conflict order: immediate pairs on a cell, at least one write.
  struct CellState {
    int last_write = -1;
    std::vector<int> reads;
  };
  std::map<Cell, CellState> cells;
  for (int i = 0; i < n; ++i) {
    if (!c[i].cell) continue;
    CellState& st = cells[*c[i].cell];
    if (IsWriteAccess(c[i].kind)) {
      if (st.last_write >= 0) hb.cf.emplace_back(st.last_write, i);
      for (int r : st.reads) hb.cf.emplace_back(r, i);
      st.last_write = i;
      st.reads.clear();
    } else {
      if (st.last_write >= 0) hb.cf.emplace_back(st.last_write, i);
      st.reads.push_back(i);
    }
  }
  std::sort(hb.cf.begin(), hb.cf.end());

  // Identity: issue, popA and popB of one request; barriers of one block.
  std::map<std::tuple<int, int, int>, std::vector<int>> groups;
  std::map<int, std::vector<int>> blocks;
  for (int i = 0; i < n; ++i) {
    const Event& e = c[i];
    if (IsIssue(e.kind) || IsPop(e.kind)) {
      auto& g = groups[{e.rank, e.queue, e.seq}];
      if (e.kind == EventKind::kPopA && g.size() != 1) {
        throw MalformedComputation("popA at " + std::to_string(i) +
                                   " has no matching issue");
      }
      if (e.kind == EventKind::kPopB && g.size() != 2) {
        throw MalformedComputation("popB at " + std::to_string(i) +
                                   " has no matching popA");
      }
      g.push_back(i);
      hb.rep[i] = g[0];
    } else if (e.kind == EventKind::kBarrier) {
      auto& b = blocks[e.seq];
      if (!b.empty() && c[b.back()].rank >= e.rank) {
        throw MalformedComputation("barrier block out of rank order");
      }
      b.push_back(i);
      hb.rep[i] = b.front();
    } else {
      hb.rep[i] = i;
    }
  }
  for (const auto& [seq, b] : blocks) {
    if (static_cast<int>(b.size()) != max_rank) {
      throw MalformedComputation("barrier block " + std::to_string(seq) +
                                 " does not cover every rank");
    }
  }
  auto link_all = [&](const std::vector<int>& g) {
    for (int a : g) {
      for (int b : g) {
        if (a != b) hb.eq.emplace_back(a, b);
      }
    }
  };
  for (const auto& [k, g] : groups) link_all(g);
  for (const auto& [k, b] : blocks) link_all(b);
  std::sort(hb.eq.begin(), hb.eq.end());
  return hb;
}

std::optional<std::vector<HbEdge>> FindViolation(const HbRelation& hb) {
  const int n = hb.size;
  std::vector<std::vector<HbEdge>> adj(n);
  for (const HbEdge& e : hb.Edges()) adj[e.from].push_back(e);
  for (auto& a : adj) std::sort(a.begin(), a.end());

  // Strongly connected components (iterative Tarjan).
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  int counter = 0, comps = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<std::pair<int, size_t>> work{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, i] = work.back();
      if (i < adj[v].size()) {
        int w = adj[v][i++].to;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      int done = v;
      work.pop_back();
      if (!work.empty()) {
        int parent = work.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }

  std::optional<std::vector<HbEdge>> best;
  for (const HbEdge& start : hb.Edges()) {
    if (start.kind == EdgeKind::kEq) continue;
    if (comp[start.from] != comp[start.to]) continue;
    // Shortest path start.to ->* start.from.
    std::vector<int> prev_edge(n, -2);
    std::vector<HbEdge> via(n);
    std::deque<int> queue{start.to};
    prev_edge[start.to] = -1;
    while (!queue.empty() && prev_edge[start.from] == -2) {
      int v = queue.front();
      queue.pop_front();
      for (const HbEdge& e : adj[v]) {
        if (prev_edge[e.to] != -2) continue;
        prev_edge[e.to] = v;
        via[e.to] = e;
        queue.push_back(e.to);
      }
    }
    std::vector<HbEdge> cycle;
    for (int v = start.from; v != start.to; v = prev_edge[v]) {
      cycle.push_back(via[v]);
    }
    cycle.push_back(start);
    std::reverse(cycle.begin(), cycle.end());
    if (!best || cycle.size() < best->size()) best = std::move(cycle);
  }
  return best;
}

bool IsViolating(const Computation& c) {
  return FindViolation(HappensBefore(c)).has_value();
}

bool IsNormalForm(const Computation& c, Cuts cuts) {
  const int n = static_cast<int>(c.size());
  if (cuts.c1 < 0 || cuts.c1 > cuts.c2 || cuts.c2 > cuts.c3 || cuts.c3 > n) {
    throw std::out_of_range("cut positions out of range");
  }
  HbRelation hb = HappensBefore(c);
  for (int i = cuts.c1; i < n; ++i) {
    if (!IsPop(c[i].kind)) return false;
  }
  int bounds[5] = {0, cuts.c1, cuts.c2, cuts.c3, n};
  for (int part = 0; part < 4; ++part) {
    for (int u = bounds[part]; u < bounds[part + 1]; ++u) {
      for (int v = u + 1; v < bounds[part + 1]; ++v) {
        // a = rep(v), b = rep(u): a before b in tau_1 forces v before u.
        int a = hb.rep[v], b = hb.rep[u];
        if (a == b) continue;
        if (a >= cuts.c1 || b >= cuts.c1) continue;
        if (a < b) return false;
      }
    }
  }
  return true;
}

std::optional<Cuts> FindNormalFormCuts(const Computation& c) {
  const int n = static_cast<int>(c.size());
  HbRelation hb = HappensBefore(c);
  int last_non_pop = -1;
  for (int i = 0; i < n; ++i) {
    if (!IsPop(c[i].kind)) last_non_pop = i;
  }
  int m = 0;
  while (m < n && (m == 0 || hb.rep[m - 1] <= hb.rep[m])) ++m;
  if (m < last_non_pop + 1) return std::nullopt;
  std::vector<int> cut{m};
  for (int i = m + 1; i < n; ++i) {
    if (hb.rep[i] < hb.rep[i - 1]) cut.push_back(i);
  }
  if (cut.size() > 3) return std::nullopt;
  while (cut.size() < 3) cut.push_back(n);
  return Cuts{cut[0], cut[1], cut[2]};
}

std::vector<int> CycCycle::Ranks() const {
  std::vector<int> r;
  for (const CycSegment& s : segments) r.push_back(s.rank);
  return r;
}

namespace {

bool Nontrivial(const std::vector<CycSegment>& segs) {
  for (const CycSegment& s : segs) {
    if (s.link == EdgeKind::kCf || s.b != s.c) return true;
  }
  return false;
}

}  // namespace

std::optional<CycCycle> ExtractCycCycle(const Computation& c) {
  return ExtractCycCycle(c, HappensBefore(c));
}

std::optional<CycCycle> ExtractCycCycle(const Computation& c,
                                        const HbRelation& hb) {
  auto cycle = FindViolation(hb);
  if (!cycle) return std::nullopt;
  auto is_link = [&](const HbEdge& e) {
    return e.kind == EdgeKind::kCf ||
           (e.kind == EdgeKind::kEq && c[e.from].rank != c[e.to].rank);
  };
  // Rotate so the cycle starts right after a link edge.
  auto& edges = *cycle;
  int m = static_cast<int>(edges.size());
  int first_link = -1;
  for (int i = 0; i < m; ++i) {
    if (is_link(edges[i])) {
      first_link = i;
      break;
    }
  }
  if (first_link < 0) return std::nullopt;
  std::rotate(edges.begin(), edges.begin() + first_link + 1, edges.end());

  auto own = [&](int i) {
    return c[i].kind == EventKind::kBarrier ? i : hb.rep[i];
  };
  std::vector<CycSegment> segs;
  int start = edges.front().from;
  for (const HbEdge& e : edges) {
    if (!is_link(e)) continue;
    CycSegment s;
    s.rank = c[start].rank;
    s.a = start;
    s.b = own(start);
    s.d = e.from;
    s.c = own(e.from);
    s.link = e.kind;
    segs.push_back(s);
    start = e.to;
  }

  // Splice out repeated ranks.
  for (;;) {
    int n = static_cast<int>(segs.size());
    int fi = -1, fj = -1;
    for (int i = 0; i < n && fi < 0; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (segs[i].rank == segs[j].rank) {
          fi = i;
          fj = j;
          break;
        }
      }
    }
    if (fi < 0) break;
    const CycSegment& si = segs[fi];
    const CycSegment& sj = segs[fj];
    std::optional<std::vector<CycSegment>> former, latter;
    if (si.b <= sj.c) {
      std::vector<CycSegment> f(segs.begin(), segs.begin() + fi);
      f.push_back({si.rank, si.a, si.b, sj.c, sj.d, sj.link});
      f.insert(f.end(), segs.begin() + fj + 1, segs.end());
      former = std::move(f);
    }
    if (sj.b <= si.c) {
      std::vector<CycSegment> l;
      l.push_back({sj.rank, sj.a, sj.b, si.c, si.d, si.link});
      l.insert(l.end(), segs.begin() + fi + 1, segs.begin() + fj);
      latter = std::move(l);
    }
    if (former && (Nontrivial(*former) || !latter)) {
      segs = std::move(*former);
    } else if (latter) {
      segs = std::move(*latter);
    } else {
      return std::nullopt;
    }
  }

  auto min_it = std::min_element(
      segs.begin(), segs.end(),
      [](const CycSegment& x, const CycSegment& y) { return x.rank < y.rank; });
  std::rotate(segs.begin(), min_it, segs.end());
  return CycCycle{std::move(segs)};
}

std::string CheckCycCycle(const Computation& c, const HbRelation& hb,
                          const CycCycle& cyc) {
  const auto& s = cyc.segments;
  if (s.empty()) return "empty cycle";
  std::set<std::pair<int, int>> po(hb.po.begin(), hb.po.end());
  std::set<std::pair<int, int>> cf(hb.cf.begin(), hb.cf.end());
  std::set<std::pair<int, int>> eq(hb.eq.begin(), hb.eq.end());
  std::set<int> ranks;
  for (size_t i = 0; i < s.size(); ++i) {
    const CycSegment& g = s[i];
    for (int x : {g.a, g.b, g.c, g.d}) {
      if (x < 0 || x >= hb.size) return "event index out of range";
      if (c[x].rank != g.rank) return "segment event of foreign rank";
    }
    if (!ranks.insert(g.rank).second) return "rank visited twice";
    if (!hb.SameClass(g.a, g.b)) return "a and b not identity related";
    if (!hb.SameClass(g.c, g.d)) return "c and d not identity related";
    if (IsPop(c[g.b].kind) || IsPop(c[g.c].kind)) return "b or c is a pop";
    if (g.b > g.c) return "b after c in program order";
    int na = s[(i + 1) % s.size()].a;
    std::pair<int, int> link{g.d, na};
    if (g.link == EdgeKind::kCf && !cf.count(link)) return "missing cf link";
    if (g.link == EdgeKind::kEq && !eq.count(link)) return "missing eq link";
    if (g.link == EdgeKind::kPo) return "po used as link";
  }
  if (!Nontrivial(s)) return "cycle uses identity edges only";
  return "";
}

Computation Cancel(const Computation& c) {
  if (c.empty()) return c;
  HbRelation hb = HappensBefore(c);
  int victim = -1;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
    if (!IsPop(c[i].kind)) {
      victim = i;
      break;
    }
  }
  Computation out;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    if (victim >= 0 && hb.rep[i] == hb.rep[victim]) continue;
    out.push_back(c[i]);
  }
  Annotate(out);
  return out;
}

std::string HbToDot(const Computation& c, const HbRelation& hb,
                    const std::vector<HbEdge>& highlight) {
  std::set<HbEdge> hot(highlight.begin(), highlight.end());
  std::ostringstream os;
  os << "digraph hb {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n";
  std::map<int, std::vector<int>> by_rank;
  for (int i = 0; i < hb.size; ++i) by_rank[c[i].rank].push_back(i);
  for (const auto& [rank, evs] : by_rank) {
    os << "  subgraph cluster_" << rank << " {\n    label=\"rank " << rank
       << "\";\n";
    for (int i : evs) {
      os << "    e" << i << " [label=\"" << i << ": " << FormatEvent(c[i])
         << "\"];\n";
    }
    os << "  }\n";
  }
  for (const HbEdge& e : hb.Edges()) {
    if (e.kind == EdgeKind::kEq && e.from > e.to &&
        !hot.count(e)) {
      continue;
    }
    os << "  e" << e.from << " -> e" << e.to << " [label=\""
       << EdgeKindName(e.kind) << "\"";
    if (e.kind == EdgeKind::kEq) os << ", style=dashed, dir=both";
    if (e.kind == EdgeKind::kCf) os << ", color=red";
    if (hot.count(e)) os << ", penwidth=3";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace pgasrob
