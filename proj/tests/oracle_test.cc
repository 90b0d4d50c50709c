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

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "pgasrob/oracle.hh"
#include "support/random_program.hh"

namespace pgasrob {
namespace {

using testing::CorpusPath;

Instance Corpus(const std::string& name, int nodes, int domain) {
  return Instance{LoadProgram(CorpusPath(name)), nodes, domain};
}

TEST_CASE("shortest violations of the corpus") {
  OracleVerdict core = OracleCheck(Corpus("onetoone_core", 2, 2), 12);
  REQUIRE(core.status == OracleStatus::kViolationFound);
  CHECK(core.computation.size() == 9);
  CHECK(IsViolating(core.computation));
  CHECK(Accepts(Corpus("onetoone_core", 2, 2), core.computation));
  REQUIRE(core.hb_cycle.has_value());
  CHECK(CheckCycCycle(core.computation, HappensBefore(core.computation),
                      *core.hb_cycle) == "");
  CHECK_FALSE(core.violation.empty());

  OracleVerdict full = OracleCheck(Corpus("onetoone", 2, 2), 14);
  REQUIRE(full.status == OracleStatus::kViolationFound);
  CHECK(full.computation.size() == 13);

  OracleVerdict self = OracleCheck(Corpus("footnote_abc", 1, 2), 6);
  REQUIRE(self.status == OracleStatus::kViolationFound);
  REQUIRE(self.hb_cycle.has_value());
  CHECK(self.hb_cycle->segments.size() == 1);
}

TEST_CASE("minimality: nothing shorter is found below the length") {
  OracleVerdict v = OracleCheck(Corpus("onetoone_core", 2, 2), 8);
  CHECK(v.status == OracleStatus::kNoViolationWithin);
  CHECK(v.bound == 8);
  CHECK(v.computation.empty());
  CHECK(OracleNormalFormCheck(Corpus("onetoone_core", 2, 2), 8).status ==
        OracleStatus::kNoViolationWithin);
}

TEST_CASE("normal-form oracle") {
  Instance inst = Corpus("onetoone_core", 2, 2);
  OracleVerdict v = OracleNormalFormCheck(inst, 12);
  REQUIRE(v.status == OracleStatus::kViolationFound);
  CHECK(v.computation.size() == 9);
  CHECK(FindNormalFormCuts(v.computation).has_value());
  CHECK(IsViolating(v.computation));
}

TEST_CASE("robust programs have no violation within the bound") {
  for (const Instance& inst :
       {Corpus("empty", 3, 2), Corpus("local_only", 2, 2),
        Corpus("producer_consumer", 2, 3)}) {
    OracleVerdict v = OracleCheck(inst, 10);
    CHECK(v.status == OracleStatus::kNoViolationWithin);
    CHECK(v.nodes > 0);
  }
}

TEST_CASE("node cap and bad arguments") {
  Instance inst = Corpus("onetoone", 2, 2);
  OracleVerdict v = OracleCheck(inst, 14, 50);
  CHECK(v.status == OracleStatus::kExhausted);
  CHECK(v.state_cap == 50);
  CHECK(OracleNormalFormCheck(inst, 14, 50).status == OracleStatus::kExhausted);
  CHECK_THROWS_AS(OracleCheck(inst, -1), std::invalid_argument);
  CHECK_THROWS_AS(OracleCheck(inst, kMaxOracleBound + 1), std::invalid_argument);
  CHECK_THROWS_AS(OracleCheck(Instance{ParseProgram("mem[0] <- 7;"), 1, 2}, 4),
                  std::invalid_argument);
  CHECK(OracleCheck(inst, 0).status == OracleStatus::kNoViolationWithin);
}

TEST_CASE("the oracle is deterministic") {
  std::mt19937_64 rng(29);
  int found = 0;
  for (int i = 0; i < 25; ++i) {
    Instance inst = testing::RandomInstance(rng);
    if (!Validate(inst).empty()) continue;
    OracleVerdict a = OracleCheck(inst, 9, 2'000'000);
    OracleVerdict b = OracleCheck(inst, 9, 2'000'000);
    CHECK(a.status == b.status);
    CHECK(a.computation == b.computation);
    CHECK(a.nodes == b.nodes);
    if (a.status == OracleStatus::kViolationFound) {
      ++found;
      CHECK(IsViolating(a.computation));
      CHECK(Accepts(inst, a.computation));
    }
  }
  CHECK(found > 0);
}

}  // namespace
}  // namespace pgasrob
