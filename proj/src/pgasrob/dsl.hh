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

#ifndef PGASROB_DSL_HH_
#define PGASROB_DSL_HH_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pgasrob {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

enum class ExprOp : std::uint8_t {
  kConst,
  kReg,
  kMyRank,
  kNumProcs,
  kAdd,
  kSub,
  kMul,
  kMod,
  kEq,
  kNe,
  kLt,
  kAnd,
  kOr,
};

struct Expr {
  ExprOp op = ExprOp::kConst;
  // Constant value for kConst, register index for kReg.
  int value = 0;
  std::vector<Expr> args;
  SourceLoc loc;

  static Expr Const(int v, SourceLoc loc = {});
  static Expr Reg(int index, SourceLoc loc = {});
  static Expr MyRank(SourceLoc loc = {});
  static Expr NumProcs(SourceLoc loc = {});
  static Expr Binary(ExprOp op, Expr lhs, Expr rhs, SourceLoc loc = {});

  bool operator==(const Expr& other) const;
};

// Expressions in rank position are evaluated over the integers; everything
// else wraps arithmetic modulo the domain size.
enum class EvalSort { kData, kRank };

struct EvalEnv {
  std::span<const std::uint8_t> regs;
  int rank = 1;
  int nodes = 1;
  int domain = 1;
};

long Eval(const Expr& e, const EvalEnv& env, EvalSort sort);

// Reduces v into 0..domain-1.
inline int WrapDomain(long v, int domain) {
  long m = v % domain;
  return static_cast<int>(m < 0 ? m + domain : m);
}

enum class CommandKind : std::uint8_t {
  kLoad,
  kStore,
  kAssign,
  kAssume,
  kRead,
  kWrite,
  kBarrier,
};

// Operand layout per kind:
//   load    reg <- mem[args[0]]
//   store   mem[args[0]] <- args[1]
//   assign  reg <- args[0]
//   assume  args[0]
//   read    local=args[0] rank=args[1] remote=args[2] queue=args[3]
//   write   local=args[0] rank=args[1] remote=args[2] queue=args[3]
//   barrier (none)
struct Command {
  CommandKind kind = CommandKind::kBarrier;
  int reg = -1;
  std::vector<Expr> args;
  SourceLoc loc;

  static Command Load(int reg, Expr addr);
  static Command Store(Expr addr, Expr value);
  static Command Assign(int reg, Expr value);
  static Command Assume(Expr cond);
  static Command Read(Expr local, Expr rank, Expr remote, Expr queue);
  static Command Write(Expr local, Expr rank, Expr remote, Expr queue);
  static Command Barrier();

  bool operator==(const Command& other) const;
};

int Arity(CommandKind kind);
const char* CommandKindName(CommandKind kind);

struct Transition {
  int from = 0;
  Command command;
  int to = 0;

  bool operator==(const Transition&) const = default;
};

// The program code P: a finite automaton over commands, every state final.
struct ProgramCode {
  std::string source_name = "<input>";
  int state_count = 1;
  int initial = 0;
  std::vector<Transition> transitions;
  std::vector<std::string> registers;

  // Transition indices leaving each state, in transition order.
  std::vector<std::vector<int>> Outgoing() const;
};

struct Instance {
  ProgramCode code;
  int nodes = 1;
  int domain = 2;
};

struct Diagnostic {
  SourceLoc loc;
  std::string message;
};

std::string RenderDiagnostic(const std::string& file, const Diagnostic& d);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, SourceLoc loc, const std::string& message);

  const std::string& file() const { return file_; }
  SourceLoc loc() const { return loc_; }
  const std::string& bare_message() const { return bare_; }

 private:
  std::string file_;
  SourceLoc loc_;
  std::string bare_;
};

ProgramCode ParseProgram(std::string_view text,
                         const std::string& source_name = "<input>");

ProgramCode LoadProgram(const std::string& path);

std::string PrintExpr(const Expr& e, const ProgramCode& code);
std::string PrintCommand(const Command& c, const ProgramCode& code);
std::string PrintProgram(const ProgramCode& code);

std::vector<Diagnostic> Validate(const Instance& inst);

}  // namespace pgasrob

#endif  // PGASROB_DSL_HH_
