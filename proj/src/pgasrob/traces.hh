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

#ifndef PGASROB_TRACES_HH_
#define PGASROB_TRACES_HH_

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgasrob/semantics.hh"

namespace pgasrob {

enum class EdgeKind : std::uint8_t { kPo, kCf, kEq };

const char* EdgeKindName(EdgeKind k);

struct HbEdge {
  int from = 0;
  int to = 0;
  EdgeKind kind = EdgeKind::kPo;

  auto operator<=>(const HbEdge&) const = default;
};

class MalformedComputation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HbRelation {
  int size = 0;
  std::vector<std::pair<int, int>> po;
  std::vector<std::pair<int, int>> cf;
  // Every ordered pair of distinct events of one class.
  std::vector<std::pair<int, int>> eq;
  // For every event, the non-pop event of its identity class (the issue for
  // pops, the first barrier of the block for barriers, itself otherwise).
  std::vector<int> rep;

  std::vector<HbEdge> Edges() const;
  bool SameClass(int a, int b) const { return rep[a] == rep[b]; }
};

// Throws MalformedComputation on pops without a matching issue, barrier
// blocks that do not cover every rank, or address/queue fields that do not
// fit the event kind.
HbRelation HappensBefore(const Computation& c);

// A minimal-length cycle that uses a po or cf edge, if any.
std::optional<std::vector<HbEdge>> FindViolation(const HbRelation& hb);
bool IsViolating(const Computation& c);

struct Cuts {
  int c1 = 0;
  int c2 = 0;
  int c3 = 0;

  bool operator==(const Cuts&) const = default;
};

// The normal-form conditions checked literally for the given split. Throws std::out_of_range
// unless 0 <= c1 <= c2 <= c3 <= |c|.
bool IsNormalForm(const Computation& c, Cuts cuts);
// Some split under which c is in normal form, if one exists.
std::optional<Cuts> FindNormalFormCuts(const Computation& c);

struct CycSegment {
  int rank = 0;
  int a = 0, b = 0, c = 0, d = 0;
  // Edge from d to the a of the next segment.
  EdgeKind link = EdgeKind::kCf;

  bool operator==(const CycSegment&) const = default;
};

struct CycCycle {
  std::vector<CycSegment> segments;

  std::vector<int> Ranks() const;
};

std::optional<CycCycle> ExtractCycCycle(const Computation& c);
std::optional<CycCycle> ExtractCycCycle(const Computation& c,
                                        const HbRelation& hb);
// Empty if cyc is a well-formed non-trivial (CYC) cycle of c; otherwise
// the first violated condition.
std::string CheckCycCycle(const Computation& c, const HbRelation& hb,
                          const CycCycle& cyc);

// Removes the last non-pop event and its identity class (Cancellation).
Computation Cancel(const Computation& c);

std::string HbToDot(const Computation& c, const HbRelation& hb,
                    const std::vector<HbEdge>& highlight = {});

}  // namespace pgasrob

#endif  // PGASROB_TRACES_HH_
