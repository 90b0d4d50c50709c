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

#ifndef PGASROB_ORACLE_HH_
#define PGASROB_ORACLE_HH_

#include <cstdint>
#include <optional>
#include <vector>

#include "pgasrob/semantics.hh"
#include "pgasrob/traces.hh"

namespace pgasrob {

enum class OracleStatus { kViolationFound, kNoViolationWithin, kExhausted };
const char* OracleStatusName(OracleStatus s);

constexpr int kMaxOracleBound = 128;

struct OracleVerdict {
  OracleStatus status = OracleStatus::kNoViolationWithin;
  int bound = 0;
  std::uint64_t state_cap = 0;
  // Shortest violating computation, first in step-choice order among those.
  Computation computation;
  std::vector<HbEdge> violation;
  std::optional<CycCycle> hb_cycle;
  std::uint64_t nodes = 0;
};

// Exhaustive search over the accepted computations of length <= bound.
// state_cap bounds the number of visited search nodes (0 = unbounded).
// Throws std::invalid_argument for invalid instances or bounds.
OracleVerdict OracleCheck(const Instance& inst, int bound,
                          std::uint64_t state_cap = 0);
// The same restricted to computations in normal form.
OracleVerdict OracleNormalFormCheck(const Instance& inst, int bound,
                                    std::uint64_t state_cap = 0);

}  // namespace pgasrob

#endif  // PGASROB_ORACLE_HH_
