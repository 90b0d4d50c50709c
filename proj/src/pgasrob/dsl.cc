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

#include "pgasrob/dsl.hh"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace pgasrob {

Expr Expr::Const(int v, SourceLoc loc) {
  Expr e;
  e.op = ExprOp::kConst;
  e.value = v;
  e.loc = loc;
  return e;
}

Expr Expr::Reg(int index, SourceLoc loc) {
  Expr e;
  e.op = ExprOp::kReg;
  e.value = index;
  e.loc = loc;
  return e;
}

Expr Expr::MyRank(SourceLoc loc) {
  Expr e;
  e.op = ExprOp::kMyRank;
  e.loc = loc;
  return e;
}

Expr Expr::NumProcs(SourceLoc loc) {
  Expr e;
  e.op = ExprOp::kNumProcs;
  e.loc = loc;
  return e;
}

Expr Expr::Binary(ExprOp op, Expr lhs, Expr rhs, SourceLoc loc) {
  Expr e;
  e.op = op;
  e.loc = loc;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

bool Expr::operator==(const Expr& other) const {
  return op == other.op && value == other.value && args == other.args;
}

namespace {

long EuclidMod(long a, long b) {
  if (b == 0) return 0;
  long m = a % b;
  if (m < 0) m += (b < 0 ? -b : b);
  return m;
}

}  // namespace

long Eval(const Expr& e, const EvalEnv& env, EvalSort sort) {
  switch (e.op) {
    case ExprOp::kConst:
      return e.value;
    case ExprOp::kReg:
      return env.regs[e.value];
    case ExprOp::kMyRank:
      return env.rank;
    case ExprOp::kNumProcs:
      return env.nodes;
    default:
      break;
  }
  long l = Eval(e.args[0], env, sort);
  long r = Eval(e.args[1], env, sort);
  long v = 0;
  bool arith = true;
  switch (e.op) {
    case ExprOp::kAdd: v = l + r; break;
    case ExprOp::kSub: v = l - r; break;
    case ExprOp::kMul: v = l * r; break;
    case ExprOp::kMod: v = EuclidMod(l, r); break;
    case ExprOp::kEq: v = l == r; arith = false; break;
    case ExprOp::kNe: v = l != r; arith = false; break;
    case ExprOp::kLt: v = l < r; arith = false; break;
    case ExprOp::kAnd: v = (l != 0) && (r != 0); arith = false; break;
    case ExprOp::kOr: v = (l != 0) || (r != 0); arith = false; break;
    default: break;
  }
  if (arith && sort == EvalSort::kData) v = WrapDomain(v, env.domain);
  return v;
}

Command Command::Load(int reg, Expr addr) {
  Command c;
  c.kind = CommandKind::kLoad;
  c.reg = reg;
  c.args.push_back(std::move(addr));
  return c;
}

Command Command::Store(Expr addr, Expr value) {
  Command c;
  c.kind = CommandKind::kStore;
  c.args.push_back(std::move(addr));
  c.args.push_back(std::move(value));
  return c;
}

Command Command::Assign(int reg, Expr value) {
  Command c;
  c.kind = CommandKind::kAssign;
  c.reg = reg;
  c.args.push_back(std::move(value));
  return c;
}

Command Command::Assume(Expr cond) {
  Command c;
  c.kind = CommandKind::kAssume;
  c.args.push_back(std::move(cond));
  return c;
}

Command Command::Read(Expr local, Expr rank, Expr remote, Expr queue) {
  Command c;
  c.kind = CommandKind::kRead;
  c.args = {std::move(local), std::move(rank), std::move(remote),
            std::move(queue)};
  return c;
}

Command Command::Write(Expr local, Expr rank, Expr remote, Expr queue) {
  Command c = Read(std::move(local), std::move(rank), std::move(remote),
                   std::move(queue));
  c.kind = CommandKind::kWrite;
  return c;
}

Command Command::Barrier() { return Command{}; }

bool Command::operator==(const Command& other) const {
  return kind == other.kind && reg == other.reg && args == other.args;
}

int Arity(CommandKind kind) {
  switch (kind) {
    case CommandKind::kLoad: return 1;
    case CommandKind::kStore: return 2;
    case CommandKind::kAssign: return 1;
    case CommandKind::kAssume: return 1;
    case CommandKind::kRead: return 4;
    case CommandKind::kWrite: return 4;
    case CommandKind::kBarrier: return 0;
  }
  return 0;
}

const char* CommandKindName(CommandKind kind) {
  switch (kind) {
    case CommandKind::kLoad: return "load";
    case CommandKind::kStore: return "store";
    case CommandKind::kAssign: return "assign";
    case CommandKind::kAssume: return "assume";
    case CommandKind::kRead: return "read";
    case CommandKind::kWrite: return "write";
    case CommandKind::kBarrier: return "barrier";
  }
  return "?";
}

std::vector<std::vector<int>> ProgramCode::Outgoing() const {
  std::vector<std::vector<int>> out(state_count);
  for (int i = 0; i < static_cast<int>(transitions.size()); ++i) {
    out[transitions[i].from].push_back(i);
  }
  return out;
}

std::string RenderDiagnostic(const std::string& file, const Diagnostic& d) {
  std::ostringstream os;
  os << file << ":" << d.loc.line << ":" << d.loc.column << ": " << d.message;
  return os.str();
}

ParseError::ParseError(std::string file, SourceLoc loc,
                       const std::string& message)
    : std::runtime_error(RenderDiagnostic(file, Diagnostic{loc, message})),
      file_(std::move(file)),
      loc_(loc),
      bare_(message) {}

ProgramCode LoadProgram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseProgram(ss.str(), path);
}

namespace {

int Precedence(ExprOp op) {
  switch (op) {
    case ExprOp::kOr: return 1;
    case ExprOp::kAnd: return 2;
    case ExprOp::kEq:
    case ExprOp::kNe: return 3;
    case ExprOp::kLt: return 4;
    case ExprOp::kAdd:
    case ExprOp::kSub: return 5;
    case ExprOp::kMul:
    case ExprOp::kMod: return 6;
    default: return 7;
  }
}

const char* OpText(ExprOp op) {
  switch (op) {
    case ExprOp::kAdd: return "+";
    case ExprOp::kSub: return "-";
    case ExprOp::kMul: return "*";
    case ExprOp::kMod: return "%";
    case ExprOp::kEq: return "==";
    case ExprOp::kNe: return "!=";
    case ExprOp::kLt: return "<";
    case ExprOp::kAnd: return "&&";
    case ExprOp::kOr: return "||";
    default: return "?";
  }
}

void PrintExprTo(std::ostream& os, const Expr& e, const ProgramCode& code) {
  switch (e.op) {
    case ExprOp::kConst: os << e.value; return;
    case ExprOp::kReg:
      if (e.value >= 0 && e.value < static_cast<int>(code.registers.size())) {
        os << code.registers[e.value];
      } else {
        os << "$" << e.value;
      }
      return;
    case ExprOp::kMyRank: os << "myrank"; return;
    case ExprOp::kNumProcs: os << "nprocs"; return;
    default: break;
  }
  int p = Precedence(e.op);
  const Expr& l = e.args[0];
  const Expr& r = e.args[1];
  bool lp = Precedence(l.op) < p;
  bool rp = Precedence(r.op) <= p;
  if (lp) os << "(";
  PrintExprTo(os, l, code);
  if (lp) os << ")";
  os << " " << OpText(e.op) << " ";
  if (rp) os << "(";
  PrintExprTo(os, r, code);
  if (rp) os << ")";
}

std::string RegName(int reg, const ProgramCode& code) {
  if (reg >= 0 && reg < static_cast<int>(code.registers.size())) {
    return code.registers[reg];
  }
  return "$" + std::to_string(reg);
}

}  // namespace

std::string PrintExpr(const Expr& e, const ProgramCode& code) {
  std::ostringstream os;
  PrintExprTo(os, e, code);
  return os.str();
}

std::string PrintCommand(const Command& c, const ProgramCode& code) {
  auto x = [&](int i) { return PrintExpr(c.args[i], code); };
  switch (c.kind) {
    case CommandKind::kLoad:
      return RegName(c.reg, code) + " <- mem[" + x(0) + "]";
    case CommandKind::kStore:
      return "mem[" + x(0) + "] <- " + x(1);
    case CommandKind::kAssign:
      return RegName(c.reg, code) + " <- " + x(0);
    case CommandKind::kAssume:
      return "assume(" + x(0) + ")";
    case CommandKind::kRead:
    case CommandKind::kWrite:
      return std::string(CommandKindName(c.kind)) + "(" + x(0) + ", " + x(1) +
             ", " + x(2) + ", " + x(3) + ")";
    case CommandKind::kBarrier:
      return "barrier";
  }
  return "";
}

std::string PrintProgram(const ProgramCode& code) {
  std::ostringstream os;
  if (!code.registers.empty()) {
    os << "regs ";
    for (size_t i = 0; i < code.registers.size(); ++i) {
      if (i) os << ", ";
      os << code.registers[i];
    }
    os << ";\n";
  }
  auto out = code.Outgoing();
  auto label = [](int s) { return "q" + std::to_string(s); };
  // The initial state is printed first; the parser starts there.
  std::vector<int> order{code.initial};
  for (int s = 0; s < code.state_count; ++s) {
    if (s != code.initial) order.push_back(s);
  }
  for (int s : order) {
    const auto& edges = out[s];
    if (edges.empty()) {
      os << label(s) << ": halt;\n";
      continue;
    }
    if (edges.size() == 1) {
      const Transition& t = code.transitions[edges[0]];
      os << label(s) << ": " << PrintCommand(t.command, code) << "; goto "
         << label(t.to) << ";\n";
      continue;
    }
    os << label(s) << ": goto ";
    for (size_t i = 0; i < edges.size(); ++i) {
      if (i) os << ", ";
      os << label(s) << "_" << i;
    }
    os << ";\n";
    for (size_t i = 0; i < edges.size(); ++i) {
      const Transition& t = code.transitions[edges[i]];
      os << label(s) << "_" << i << ": " << PrintCommand(t.command, code)
         << "; goto " << label(t.to) << ";\n";
    }
  }
  return os.str();
}

namespace {

struct Validator {
  const Instance& inst;
  std::vector<Diagnostic> out;

  void Note(SourceLoc loc, std::string msg) {
    out.push_back(Diagnostic{loc, std::move(msg)});
  }

  void CheckReg(int reg, SourceLoc loc) {
    if (reg < 0 || reg >= static_cast<int>(inst.code.registers.size())) {
      Note(loc, "undeclared register $" + std::to_string(reg));
    }
  }

  void CheckExpr(const Expr& e, EvalSort sort) {
    int limit = sort == EvalSort::kRank ? std::max(inst.domain - 1, inst.nodes)
                                        : inst.domain - 1;
    switch (e.op) {
      case ExprOp::kConst:
        if (e.value < 0 || e.value > limit) {
          Note(e.loc, "constant " + std::to_string(e.value) +
                          " outside the value domain 0.." +
                          std::to_string(limit));
        }
        return;
      case ExprOp::kReg:
        CheckReg(e.value, e.loc);
        return;
      case ExprOp::kMyRank:
      case ExprOp::kNumProcs:
        return;
      default:
        break;
    }
    if (e.args.size() != 2) {
      Note(e.loc, "malformed binary expression");
      return;
    }
    CheckExpr(e.args[0], sort);
    CheckExpr(e.args[1], sort);
  }
};

}  // namespace

std::vector<Diagnostic> Validate(const Instance& inst) {
  Validator v{inst, {}};
  const ProgramCode& code = inst.code;
  if (inst.nodes < 1) v.Note({}, "node count must be at least 1");
  if (inst.nodes > 200) v.Note({}, "node count above 200 is not supported");
  if (inst.domain < 1) v.Note({}, "domain size must be at least 1");
  if (inst.domain > 256) v.Note({}, "domain size above 256 is not supported");
  if (code.state_count < 1) v.Note({}, "program has no control states");
  if (code.initial < 0 || code.initial >= code.state_count) {
    v.Note({}, "initial state out of range");
  }
  if (!v.out.empty()) return v.out;
  for (const Transition& t : code.transitions) {
    const Command& c = t.command;
    if (t.from < 0 || t.from >= code.state_count || t.to < 0 ||
        t.to >= code.state_count) {
      v.Note(c.loc, "transition endpoint out of range");
    }
    if (static_cast<int>(c.args.size()) != Arity(c.kind)) {
      v.Note(c.loc, std::string("wrong number of operands for ") +
                        CommandKindName(c.kind));
      continue;
    }
    if (c.kind == CommandKind::kLoad || c.kind == CommandKind::kAssign) {
      v.CheckReg(c.reg, c.loc);
    }
    bool remote = c.kind == CommandKind::kRead || c.kind == CommandKind::kWrite;
    for (size_t i = 0; i < c.args.size(); ++i) {
      v.CheckExpr(c.args[i],
                  remote && i == 1 ? EvalSort::kRank : EvalSort::kData);
    }
  }
  return v.out;
}

}  // namespace pgasrob
