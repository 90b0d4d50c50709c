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

#include "pgasrob/report.hh"

#include <sstream>
#include <stdexcept>

namespace pgasrob {

Json EventToJson(const Event& e) {
  Json j;
  j["kind"] = EventKindName(e.kind);
  j["rank"] = e.rank;
  j["addr"] = e.cell ? Json::array({e.cell->rank, e.cell->addr}) : Json();
  j["queue"] = e.queue >= 0 ? Json(e.queue) : Json();
  j["seq"] = e.seq >= 0 ? Json(e.seq) : Json();
  return j;
}

Event EventFromJson(const Json& j) {
  Event e;
  auto kind = EventKindFromName(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown event kind");
  e.kind = *kind;
  e.rank = j.at("rank").get<int>();
  if (j.contains("addr") && !j["addr"].is_null()) {
    e.cell = Cell{j["addr"].at(0).get<int>(), j["addr"].at(1).get<int>()};
  }
  if (j.contains("queue") && !j["queue"].is_null()) {
    e.queue = j["queue"].get<int>();
  }
  return e;
}

Json ComputationToJson(const Computation& c) {
  Json a = Json::array();
  for (const Event& e : c) a.push_back(EventToJson(e));
  return a;
}

Computation ComputationFromJson(const Json& j) {
  Computation c;
  for (const Json& e : j) c.push_back(EventFromJson(e));
  Annotate(c);
  return c;
}

Json CycToJson(const CycCycle& cyc) {
  Json a = Json::array();
  for (const CycSegment& s : cyc.segments) {
    a.push_back({{"rank", s.rank},
                 {"a", s.a},
                 {"b", s.b},
                 {"c", s.c},
                 {"d", s.d},
                 {"link", EdgeKindName(s.link)}});
  }
  return a;
}

CycCycle CycFromJson(const Json& j) {
  CycCycle cyc;
  for (const Json& s : j) {
    CycSegment g;
    g.rank = s.at("rank").get<int>();
    g.a = s.at("a").get<int>();
    g.b = s.at("b").get<int>();
    g.c = s.at("c").get<int>();
    g.d = s.at("d").get<int>();
    std::string link = s.at("link").get<std::string>();
    g.link = link == "cf" ? EdgeKind::kCf
             : link == "eq" ? EdgeKind::kEq
                            : EdgeKind::kPo;
    cyc.segments.push_back(g);
  }
  return cyc;
}

Json EdgesToJson(const std::vector<HbEdge>& edges) {
  Json a = Json::array();
  for (const HbEdge& e : edges) {
    a.push_back({{"from", e.from}, {"to", e.to}, {"kind", EdgeKindName(e.kind)}});
  }
  return a;
}

Json VerdictToJson(const Verdict& v) {
  Json j;
  j["verdict"] = OutcomeName(v.outcome);
  j["cycle_type"] = v.cycle_type;
  j["computation"] = ComputationToJson(v.computation);
  j["hb_cycle"] = CycToJson(v.hb_cycle);
  if (v.outcome == Outcome::kNotRobust) {
    Json run = Json::array();
    for (const MarkedEvent& me : v.marked_run) {
      Json e = EventToJson(me.event);
      e.erase("seq");
      e["head"] = me.head;
      Json marks = Json::array();
      if (me.marks & kEnter) marks.push_back("enter");
      if (me.marks & kLeave) marks.push_back("leave");
      e["marks"] = marks;
      run.push_back(e);
    }
    j["marked_run"] = run;
    j["cuts"] = {v.cuts.c1, v.cuts.c2, v.cuts.c3};
    j["violation"] = EdgesToJson(v.violation);
  }
  j["cycle_types_checked"] = v.cycle_types_checked;
  j["states"] = v.states;
  return j;
}

Json OracleToJson(const OracleVerdict& v, bool normal_form) {
  Json j;
  j["verdict"] = OracleStatusName(v.status);
  j["normal_form"] = normal_form;
  j["bound"] = v.bound;
  if (v.status == OracleStatus::kExhausted) j["state_cap"] = v.state_cap;
  j["computation"] = ComputationToJson(v.computation);
  j["hb_cycle"] = v.hb_cycle ? CycToJson(*v.hb_cycle) : Json::array();
  j["violation"] = EdgesToJson(v.violation);
  j["nodes"] = v.nodes;
  return j;
}

Json ScheduleToJson(const ScheduleResult& r) {
  Json j;
  j["verdict"] = r.stuck       ? "stuck"
                 : r.accepting ? "accepting"
                               : "not_accepting";
  j["accepting"] = r.accepting;
  j["stuck"] = r.stuck;
  if (r.stuck) j["stuck_reason"] = r.stuck_reason;
  j["steps"] = r.steps;
  j["computation"] = ComputationToJson(r.computation);
  HbRelation hb = HappensBefore(r.computation);
  auto cyc = FindViolation(hb);
  j["hb"] = {{"po", hb.po.size()},
             {"cf", hb.cf.size()},
             {"eq", hb.eq.size()},
             {"violating", cyc.has_value()}};
  if (cyc) j["violation"] = EdgesToJson(*cyc);
  return j;
}

Json HbToJson(const Computation& c, const HbRelation& hb) {
  Json j;
  auto cyc = FindViolation(hb);
  j["verdict"] = cyc ? "violating" : "acyclic";
  j["computation"] = ComputationToJson(c);
  auto pairs = [](const std::vector<std::pair<int, int>>& v) {
    Json a = Json::array();
    for (auto [x, y] : v) a.push_back({x, y});
    return a;
  };
  j["po"] = pairs(hb.po);
  j["cf"] = pairs(hb.cf);
  j["eq"] = pairs(hb.eq);
  j["violating"] = cyc.has_value();
  j["violation"] = cyc ? EdgesToJson(*cyc) : Json::array();
  auto segs = ExtractCycCycle(c, hb);
  j["hb_cycle"] = segs ? CycToJson(*segs) : Json::array();
  return j;
}

Json DiagnosticsToJson(const std::string& file,
                       const std::vector<Diagnostic>& diags) {
  Json a = Json::array();
  for (const Diagnostic& d : diags) {
    a.push_back({{"line", d.loc.line},
                 {"column", d.loc.column},
                 {"message", d.message},
                 {"rendered", RenderDiagnostic(file, d)}});
  }
  return {{"diagnostics", a}};
}

namespace {

void WriteComputation(std::ostream& os, const Computation& c) {
  for (size_t i = 0; i < c.size(); ++i) {
    os << "  " << (i < 10 ? " " : "") << i << "  " << FormatEvent(c[i])
       << "\n";
  }
}

void WriteCyc(std::ostream& os, const Computation& c, const CycCycle& cyc) {
  os << "hb cycle (k=" << cyc.segments.size() << "):\n";
  for (const CycSegment& s : cyc.segments) {
    os << "  rank " << s.rank << ": a=" << s.a << " b=" << s.b
       << " c=" << s.c << " d=" << s.d << "  (" << EventKindName(c[s.a].kind)
       << " .. " << EventKindName(c[s.d].kind) << ") --" << EdgeKindName(s.link)
       << "-->\n";
  }
}

}  // namespace

std::string VerdictText(const Verdict& v) {
  std::ostringstream os;
  switch (v.outcome) {
    case Outcome::kRobust:
      os << "verdict: robust (" << v.cycle_types_checked
         << " cycle types, " << v.states << " states)\n";
      break;
    case Outcome::kResourceBound:
      os << "verdict: resource bound exceeded (" << v.states
         << " states explored)\n";
      break;
    case Outcome::kNotRobust:
      os << "verdict: not robust\ncycle type:";
      for (int r : v.cycle_type) os << " " << r;
      os << "\ncomputation (" << v.computation.size() << " events, cuts "
         << v.cuts.c1 << "/" << v.cuts.c2 << "/" << v.cuts.c3 << "):\n";
      WriteComputation(os, v.computation);
      WriteCyc(os, v.computation, v.hb_cycle);
      break;
  }
  return os.str();
}

std::string OracleText(const OracleVerdict& v, bool normal_form) {
  std::ostringstream os;
  const char* what = normal_form ? "normal-form violation" : "violation";
  switch (v.status) {
    case OracleStatus::kNoViolationWithin:
      os << "no " << what << " within bound " << v.bound << " (" << v.nodes
         << " search nodes)\n";
      break;
    case OracleStatus::kExhausted:
      os << "exhausted: state cap " << v.state_cap << " reached before bound "
         << v.bound << "\n";
      break;
    case OracleStatus::kViolationFound:
      os << what << " found (" << v.computation.size() << " events):\n";
      WriteComputation(os, v.computation);
      if (v.hb_cycle) WriteCyc(os, v.computation, *v.hb_cycle);
      break;
  }
  return os.str();
}

std::string ScheduleText(const ScheduleResult& r) {
  std::ostringstream os;
  WriteComputation(os, r.computation);
  HbRelation hb = HappensBefore(r.computation);
  os << (r.accepting ? "accepting" : "not accepting (queues not empty)")
     << ", " << r.steps << " steps\n";
  if (r.stuck) os << "stuck: " << r.stuck_reason << "\n";
  os << "hb: " << hb.po.size() << " po, " << hb.cf.size() << " cf, "
     << hb.eq.size() << " eq; "
     << (FindViolation(hb) ? "violating" : "not violating") << "\n";
  return os.str();
}

std::string HbText(const Computation& c, const HbRelation& hb) {
  std::ostringstream os;
  WriteComputation(os, c);
  auto list = [&](const char* name, const std::vector<std::pair<int, int>>& v) {
    os << name << ":";
    for (auto [x, y] : v) os << " " << x << "->" << y;
    os << "\n";
  };
  list("po", hb.po);
  list("cf", hb.cf);
  list("eq", hb.eq);
  auto cyc = FindViolation(hb);
  if (!cyc) {
    os << "not violating\n";
    return os.str();
  }
  os << "violating cycle:";
  for (const HbEdge& e : *cyc) {
    os << " " << e.from << " -" << EdgeKindName(e.kind) << "-> " << e.to << ";";
  }
  os << "\n";
  if (auto segs = ExtractCycCycle(c, hb)) WriteCyc(os, c, *segs);
  return os.str();
}

}  // namespace pgasrob
