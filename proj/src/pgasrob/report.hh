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

#ifndef PGASROB_REPORT_HH_
#define PGASROB_REPORT_HH_

#include <string>

#include "json.hpp"

#include "pgasrob/oracle.hh"
#include "pgasrob/robustness.hh"

namespace pgasrob {

using Json = nlohmann::ordered_json;

// Events are {kind, rank, addr: [rank, addr] | null, queue: q | null, seq}.
Json EventToJson(const Event& e);
Event EventFromJson(const Json& j);
Json ComputationToJson(const Computation& c);
Computation ComputationFromJson(const Json& j);
Json CycToJson(const CycCycle& cyc);
CycCycle CycFromJson(const Json& j);
Json EdgesToJson(const std::vector<HbEdge>& edges);

// {verdict, cycle_type, computation, hb_cycle, ...}
Json VerdictToJson(const Verdict& v);
Json OracleToJson(const OracleVerdict& v, bool normal_form);
Json ScheduleToJson(const ScheduleResult& r);
Json HbToJson(const Computation& c, const HbRelation& hb);
Json DiagnosticsToJson(const std::string& file,
                       const std::vector<Diagnostic>& diags);

std::string VerdictText(const Verdict& v);
std::string OracleText(const OracleVerdict& v, bool normal_form);
std::string ScheduleText(const ScheduleResult& r);
std::string HbText(const Computation& c, const HbRelation& hb);

}  // namespace pgasrob

#endif  // PGASROB_REPORT_HH_
