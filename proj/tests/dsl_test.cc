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
#include "pgasrob/dsl.hh"
#include "pgasrob/semantics.hh"
#include "support/random_program.hh"

namespace pgasrob {
namespace {

using testing::CorpusPath;

const std::vector<std::string> kCorpus = {
    "empty",         "local_only",        "onetoone",
    "onetoone_core", "onetoone_wait",     "producer_consumer",
    "ring3",         "gpi_split_queue",   "footnote_abc"};

std::vector<CommandKind> Kinds(const ProgramCode& code) {
  std::vector<CommandKind> out;
  for (const Transition& t : code.transitions) out.push_back(t.command.kind);
  return out;
}

TEST_CASE("empty program text gives one state and no transitions") {
  ProgramCode code = ParseProgram("");
  CHECK(code.state_count == 1);
  CHECK(code.transitions.empty());
  CHECK(ParseProgram("  # only a comment\n").transitions.empty());
}

TEST_CASE("onetoone parses to a 6-edge chain") {
  ProgramCode code = LoadProgram(CorpusPath("onetoone"));
  REQUIRE(code.transitions.size() == 6);
  CHECK(Kinds(code) ==
        std::vector<CommandKind>{CommandKind::kStore, CommandKind::kStore,
                                 CommandKind::kWrite, CommandKind::kBarrier,
                                 CommandKind::kLoad, CommandKind::kAssume});
  CHECK(code.state_count == 7);
  for (size_t i = 0; i < code.transitions.size(); ++i) {
    CHECK(code.transitions[i].to == code.transitions[i].from + 1);
  }
  // assert(mem[y] == 1) loads y into a fresh register and assumes on it.
  const Command& load = code.transitions[4].command;
  const Command& assume = code.transitions[5].command;
  CHECK(load.args[0] == Expr::Const(1));
  CHECK(assume.args[0].op == ExprOp::kEq);
  CHECK(assume.args[0].args[0] == Expr::Reg(load.reg));
}

TEST_CASE("syntax errors carry line and column") {
  try {
    ParseProgram("regs r;\nread(x);\n", "bad.pgas");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.loc().line == 2);
    CHECK(e.loc().column >= 1);
    CHECK(std::string(e.what()).rfind("bad.pgas:2:", 0) == 0);
  }
  CHECK_THROWS_AS(ParseProgram("r <- 1;"), ParseError);
  CHECK_THROWS_AS(ParseProgram("frobnicate(1);"), ParseError);
  CHECK_THROWS_AS(ParseProgram("goto nowhere;"), ParseError);
  CHECK_THROWS_AS(ParseProgram("write(0, 1, 0);"), ParseError);
}

TEST_CASE("structured control desugars into assume-guarded edges") {
  ProgramCode code =
      ParseProgram("regs r;\nwhile (r == 0) { r <- mem[0]; }\nbarrier;\n");
  int assumes = 0;
  for (const Transition& t : code.transitions) {
    if (t.command.kind == CommandKind::kAssume) ++assumes;
  }
  CHECK(assumes == 2);
  CHECK(code.transitions.size() == 4);
}

TEST_CASE("validate") {
  Instance onetoone{LoadProgram(CorpusPath("onetoone")), 2, 2};
  CHECK(Validate(onetoone).empty());

  Instance nine{ParseProgram("mem[0] <- 9;"), 2, 4};
  auto diags = Validate(nine);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].loc.line == 1);
  CHECK(RenderDiagnostic("p.pgas", diags[0]).rfind("p.pgas:1:", 0) == 0);

  Instance undeclared;
  undeclared.code.transitions.push_back(
      Transition{0, Command::Assign(0, Expr::Const(0)), 0});
  CHECK(Validate(undeclared).size() == 1);

  // Rank operands may name any rank; data operands must lie in D.
  Instance rank{ParseProgram("write(0, 3, 0, 0);"), 3, 2};
  CHECK(Validate(rank).empty());
  Instance addr{ParseProgram("write(0, 1, 2, 0);"), 3, 2};
  CHECK(Validate(addr).size() == 1);

  CHECK_FALSE(Validate(Instance{ProgramCode{}, 0, 2}).empty());
  CHECK_FALSE(Validate(Instance{ProgramCode{}, 1, 0}).empty());
}

TEST_CASE("expression evaluation is two-sorted") {
  std::vector<std::uint8_t> regs = {3};
  EvalEnv env{regs, 2, 3, 4};
  Expr sum = Expr::Binary(ExprOp::kAdd, Expr::Reg(0), Expr::Const(2));
  CHECK(WrapDomain(Eval(sum, env, EvalSort::kData), 4) == 1);
  CHECK(Eval(sum, env, EvalSort::kRank) == 5);
  Expr right = Expr::Binary(
      ExprOp::kAdd, Expr::Binary(ExprOp::kMod, Expr::MyRank(), Expr::NumProcs()),
      Expr::Const(1));
  CHECK(Eval(right, env, EvalSort::kRank) == 3);
  Expr lt = Expr::Binary(ExprOp::kLt, Expr::Const(1), Expr::Reg(0));
  CHECK(Eval(lt, env, EvalSort::kData) == 1);
  Expr conj = Expr::Binary(ExprOp::kAnd, lt,
                           Expr::Binary(ExprOp::kNe, Expr::MyRank(),
                                        Expr::Const(2)));
  CHECK(Eval(conj, env, EvalSort::kData) == 0);
  CHECK(WrapDomain(-1, 4) == 3);
}

TEST_CASE("print and parse round-trip on the corpus") {
  for (const std::string& name : kCorpus) {
    CAPTURE(name);
    ProgramCode code = LoadProgram(CorpusPath(name));
    std::string printed = PrintProgram(code);
    ProgramCode again = ParseProgram(printed);
    CHECK(PrintProgram(again) == printed);
    CHECK(again.state_count == code.state_count);
    CHECK(again.transitions == code.transitions);
  }
}

TEST_CASE("print and parse round-trip on random programs") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Instance inst = testing::RandomInstance(rng);
    // The parser keeps only reachable states, so normalize once.
    Instance norm = inst;
    norm.code = ParseProgram(PrintProgram(inst.code));
    std::string printed = PrintProgram(norm.code);
    CAPTURE(printed);
    CHECK(PrintProgram(ParseProgram(printed)) == printed);
    if (Validate(inst).empty()) {
      CHECK(EnumerateComputations(norm, 6) == EnumerateComputations(inst, 6));
    }
  }
}

TEST_CASE("parsing arbitrary bytes never crashes") {
  std::mt19937_64 rng(11);
  std::vector<std::string> seeds;
  for (const std::string& name : kCorpus) {
    seeds.push_back(PrintProgram(LoadProgram(CorpusPath(name))));
  }
  const std::string alphabet = "(){};,<-=!&|+*%#:_ \n\tabcdemoqrswxy0129";
  int parsed = 0;
  for (int i = 0; i < 5000; ++i) {
    std::string text;
    if (i % 2 == 0) {
      int len = std::uniform_int_distribution<int>(0, 80)(rng);
      for (int k = 0; k < len; ++k) {
        text += static_cast<char>(
            std::uniform_int_distribution<int>(0, 255)(rng));
      }
    } else {
      text = seeds[i % seeds.size()];
      int edits = std::uniform_int_distribution<int>(1, 6)(rng);
      for (int k = 0; k < edits && !text.empty(); ++k) {
        size_t at = std::uniform_int_distribution<size_t>(0, text.size() - 1)(rng);
        char c = alphabet[std::uniform_int_distribution<size_t>(
            0, alphabet.size() - 1)(rng)];
        switch (k % 3) {
          case 0:
            text[at] = c;
            break;
          case 1:
            text.insert(text.begin() + at, c);
            break;
          default:
            text.erase(at, 1);
        }
      }
    }
    try {
      ProgramCode code = ParseProgram(text);
      ++parsed;
      CHECK(code.state_count >= 1);
    } catch (const ParseError&) {
    }
  }
  CHECK(parsed > 0);
  std::string deep(10000, '(');
  CHECK_THROWS_AS(ParseProgram("assume(" + deep + ");"), ParseError);
}

}  // namespace
}  // namespace pgasrob
