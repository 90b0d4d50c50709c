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

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>

#include "pgasrob/dsl.hh"

namespace pgasrob {
namespace {

enum class Tok { kIdent, kInt, kPunct, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  long value = 0;
  SourceLoc loc;
};

constexpr int kMaxDepth = 200;
constexpr long kMaxLiteral = 1 << 20;

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file)
      : text_(text), file_(file) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    for (;;) {
      SkipBlank();
      Token t;
      t.loc = {line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      unsigned char c = text_[pos_];
      if (std::isalpha(c) || c == '_') {
        t.kind = Tok::kIdent;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_')) {
          t.text += text_[pos_];
          Advance();
        }
      } else if (std::isdigit(c)) {
        t.kind = Tok::kInt;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          t.value = t.value * 10 + (text_[pos_] - '0');
          if (t.value > kMaxLiteral) {
            throw ParseError(file_, t.loc, "integer literal too large");
          }
          t.text += text_[pos_];
          Advance();
        }
      } else {
        t.kind = Tok::kPunct;
        static const char* kTwo[] = {"<-", "==", "!=", "&&", "||"};
        for (const char* two : kTwo) {
          if (text_.substr(pos_, 2) == two) t.text = two;
        }
        if (t.text.empty()) {
          static const std::string kOne = ";,:()[]{}+-*%<=";
          if (kOne.find(static_cast<char>(c)) == std::string::npos) {
            std::string shown = std::isprint(c)
                                    ? std::string(1, static_cast<char>(c))
                                    : "\\x" + Hex(c);
            throw ParseError(file_, t.loc,
                             "unexpected character '" + shown + "'");
          }
          t.text = std::string(1, static_cast<char>(c));
        }
        for (size_t i = 0; i < t.text.size(); ++i) Advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static std::string Hex(unsigned char c) {
    static const char* d = "0123456789abcdef";
    return {d[c >> 4], d[c & 15]};
  }

  void Advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void SkipBlank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') Advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        Advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  const std::string& file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::set<std::string> kKeywords = {
    "regs",   "const", "goto",  "halt",    "skip",   "barrier", "assume",
    "assert", "read",  "write", "mem",     "if",     "else",    "while",
    "myrank", "nprocs"};

struct Edge {
  int from;
  Command command;
  int to;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::string& file)
      : toks_(std::move(toks)), file_(file) {}

  ProgramCode Run() {
    cur_ = NewState();
    int initial = cur_;
    while (Peek().kind != Tok::kEnd) Statement(0);
    for (const auto& [name, loc] : label_uses_) {
      if (!label_defined_.count(name)) {
        throw ParseError(file_, loc, "undefined label '" + name + "'");
      }
    }
    return Build(initial);
  }

 private:
  const Token& Peek(int k = 0) const {
    size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }

  Token Next() {
    Token t = Peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  bool IsPunct(const char* p, int k = 0) const {
    return Peek(k).kind == Tok::kPunct && Peek(k).text == p;
  }

  bool IsWord(const char* w, int k = 0) const {
    return Peek(k).kind == Tok::kIdent && Peek(k).text == w;
  }

  [[noreturn]] void Fail(const Token& t, const std::string& msg) const {
    throw ParseError(file_, t.loc, msg);
  }

  static std::string Describe(const Token& t) {
    switch (t.kind) {
      case Tok::kEnd: return "end of input";
      case Tok::kInt: return "'" + t.text + "'";
      default: return "'" + t.text + "'";
    }
  }

  void Expect(const char* p) {
    if (!IsPunct(p)) {
      Fail(Peek(), std::string("expected '") + p + "' but found " +
                       Describe(Peek()));
    }
    Next();
  }

  std::string ExpectIdent(const char* what) {
    if (Peek().kind != Tok::kIdent || kKeywords.count(Peek().text)) {
      Fail(Peek(), std::string("expected ") + what + " but found " +
                       Describe(Peek()));
    }
    return Next().text;
  }

  int NewState() { return state_count_++; }

  void AddEdge(Command c, int to) {
    edges_.push_back(Edge{cur_, std::move(c), to});
  }

  void Emit(Command c) {
    int t = NewState();
    AddEdge(std::move(c), t);
    cur_ = t;
  }

  int LabelState(const std::string& name) {
    auto it = labels_.find(name);
    if (it != labels_.end()) return it->second;
    int s = NewState();
    labels_[name] = s;
    return s;
  }

  void Statement(int depth) {
    if (depth > kMaxDepth) Fail(Peek(), "nesting too deep");
    const Token& t = Peek();
    if (t.kind == Tok::kPunct && t.text == "{") {
      Block(depth);
      return;
    }
    if (t.kind == Tok::kPunct && t.text == ";") {
      Next();
      return;
    }
    if (t.kind != Tok::kIdent) {
      Fail(t, "expected a statement but found " + Describe(t));
    }
    if (IsPunct(":", 1)) {
      Token name = Next();
      Next();
      if (kKeywords.count(name.text)) Fail(name, "keyword used as label");
      if (label_defined_.count(name.text)) {
        Fail(name, "duplicate label '" + name.text + "'");
      }
      label_defined_.insert(name.text);
      int s = LabelState(name.text);
      eps_.push_back({cur_, s});
      cur_ = s;
      return;
    }
    const std::string& w = t.text;
    if (w == "regs") return RegsDecl();
    if (w == "const") return ConstDecl();
    if (w == "goto") return Goto();
    if (w == "halt") {
      Next();
      Expect(";");
      cur_ = NewState();
      return;
    }
    if (w == "skip") {
      Next();
      Expect(";");
      return;
    }
    if (w == "if") return If(depth);
    if (w == "while") return While(depth);
    if (w == "barrier") {
      Token k = Next();
      Expect(";");
      Command c = Command::Barrier();
      c.loc = k.loc;
      Emit(std::move(c));
      return;
    }
    if (w == "assume" || w == "assert") return AssumeLike(w == "assert");
    if (w == "read" || w == "write") return Transfer(w == "write");
    if (w == "mem") return StoreStmt();
    if (IsPunct("<-", 1)) return AssignOrLoad();
    if (IsPunct("(", 1)) Fail(t, "unknown command '" + w + "'");
    Fail(t, "unknown command '" + w + "'");
  }

  void Block(int depth) {
    Expect("{");
    while (!IsPunct("}")) {
      if (Peek().kind == Tok::kEnd) Fail(Peek(), "expected '}'");
      Statement(depth + 1);
    }
    Next();
  }

  void RegsDecl() {
    Next();
    for (;;) {
      Token name = Peek();
      std::string n = ExpectIdent("register name");
      if (reg_index_.count(n) || consts_.count(n)) {
        Fail(name, "duplicate declaration of '" + n + "'");
      }
      reg_index_[n] = static_cast<int>(registers_.size());
      registers_.push_back(n);
      if (IsPunct(",")) {
        Next();
        continue;
      }
      break;
    }
    Expect(";");
  }

  void ConstDecl() {
    Next();
    for (;;) {
      Token name = Peek();
      std::string n = ExpectIdent("constant name");
      if (reg_index_.count(n) || consts_.count(n)) {
        Fail(name, "duplicate declaration of '" + n + "'");
      }
      Expect("=");
      if (Peek().kind != Tok::kInt) Fail(Peek(), "expected integer literal");
      consts_[n] = static_cast<int>(Next().value);
      if (IsPunct(",")) {
        Next();
        continue;
      }
      break;
    }
    Expect(";");
  }

  void Goto() {
    Next();
    for (;;) {
      Token name = Peek();
      std::string n = ExpectIdent("label");
      label_uses_.emplace(n, name.loc);
      eps_.push_back({cur_, LabelState(n)});
      if (IsPunct(",")) {
        Next();
        continue;
      }
      break;
    }
    Expect(";");
    cur_ = NewState();
  }

  void If(int depth) {
    Token k = Next();
    Expect("(");
    Expr cond = ParseExpr(0);
    Expect(")");
    int head = cur_;
    int join = NewState();
    Command yes = Command::Assume(cond);
    yes.loc = k.loc;
    Emit(std::move(yes));
    Block(depth);
    eps_.push_back({cur_, join});
    cur_ = head;
    Command no = Command::Assume(Negate(cond));
    no.loc = k.loc;
    Emit(std::move(no));
    if (IsWord("else")) {
      Next();
      if (IsWord("if")) {
        If(depth + 1);
      } else {
        Block(depth);
      }
    }
    eps_.push_back({cur_, join});
    cur_ = join;
  }

  void While(int depth) {
    Token k = Next();
    Expect("(");
    Expr cond = ParseExpr(0);
    Expect(")");
    int head = NewState();
    eps_.push_back({cur_, head});
    cur_ = head;
    Command yes = Command::Assume(cond);
    yes.loc = k.loc;
    Emit(std::move(yes));
    Block(depth);
    eps_.push_back({cur_, head});
    cur_ = head;
    Command no = Command::Assume(Negate(cond));
    no.loc = k.loc;
    Emit(std::move(no));
  }

  static Expr Negate(const Expr& e) {
    return Expr::Binary(ExprOp::kEq, e, Expr::Const(0, e.loc), e.loc);
  }

  void AssumeLike(bool is_assert) {
    Token k = Next();
    Expect("(");
    std::vector<std::pair<int, Expr>> loads;
    Expr cond = ParseExpr(0, is_assert ? &loads : nullptr);
    Expect(")");
    Expect(";");
    for (auto& [reg, addr] : loads) {
      Command c = Command::Load(reg, std::move(addr));
      c.loc = k.loc;
      Emit(std::move(c));
    }
    Command c = Command::Assume(std::move(cond));
    c.loc = k.loc;
    Emit(std::move(c));
  }

  void Transfer(bool is_write) {
    Token k = Next();
    Expect("(");
    std::vector<Expr> args;
    if (!IsPunct(")")) {
      args.push_back(ParseExpr(0));
      while (IsPunct(",")) {
        Next();
        args.push_back(ParseExpr(0));
      }
    }
    Expect(")");
    if (args.size() != 4) {
      Fail(k, k.text + " expects 4 operands (local, rank, remote, queue), got " +
                  std::to_string(args.size()));
    }
    Expect(";");
    Command c = is_write ? Command::Write(args[0], args[1], args[2], args[3])
                         : Command::Read(args[0], args[1], args[2], args[3]);
    c.loc = k.loc;
    Emit(std::move(c));
  }

  void StoreStmt() {
    Token k = Next();
    Expect("[");
    Expr addr = ParseExpr(0);
    Expect("]");
    Expect("<-");
    Expr value = ParseExpr(0);
    Expect(";");
    Command c = Command::Store(std::move(addr), std::move(value));
    c.loc = k.loc;
    Emit(std::move(c));
  }

  void AssignOrLoad() {
    Token name = Next();
    auto it = reg_index_.find(name.text);
    if (it == reg_index_.end()) {
      Fail(name, "undeclared register '" + name.text + "'");
    }
    Next();
    Command c;
    if (IsWord("mem")) {
      Next();
      Expect("[");
      Expr addr = ParseExpr(0);
      Expect("]");
      c = Command::Load(it->second, std::move(addr));
    } else {
      c = Command::Assign(it->second, ParseExpr(0));
    }
    Expect(";");
    c.loc = name.loc;
    Emit(std::move(c));
  }

  static int BinaryPrec(const std::string& op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<") return 4;
    if (op == "+" || op == "-") return 5;
    if (op == "*" || op == "%") return 6;
    return 0;
  }

  static ExprOp BinaryOp(const std::string& op) {
    if (op == "||") return ExprOp::kOr;
    if (op == "&&") return ExprOp::kAnd;
    if (op == "==") return ExprOp::kEq;
    if (op == "!=") return ExprOp::kNe;
    if (op == "<") return ExprOp::kLt;
    if (op == "+") return ExprOp::kAdd;
    if (op == "-") return ExprOp::kSub;
    if (op == "*") return ExprOp::kMul;
    return ExprOp::kMod;
  }

  Expr ParseExpr(int depth, std::vector<std::pair<int, Expr>>* loads = nullptr,
                 int min_prec = 1) {
    if (depth > kMaxDepth) Fail(Peek(), "expression nesting too deep");
    Expr lhs = Primary(depth, loads);
    for (;;) {
      const Token& t = Peek();
      int p = t.kind == Tok::kPunct ? BinaryPrec(t.text) : 0;
      if (p < min_prec || p == 0) return lhs;
      Token op = Next();
      Expr rhs = ParseExpr(depth + 1, loads, p + 1);
      lhs = Expr::Binary(BinaryOp(op.text), std::move(lhs), std::move(rhs),
                         op.loc);
    }
  }

  Expr Primary(int depth, std::vector<std::pair<int, Expr>>* loads) {
    Token t = Next();
    if (t.kind == Tok::kInt) return Expr::Const(static_cast<int>(t.value), t.loc);
    if (t.kind == Tok::kPunct && t.text == "(") {
      Expr e = ParseExpr(depth + 1, loads);
      Expect(")");
      return e;
    }
    if (t.kind != Tok::kIdent) {
      Fail(t, "expected an expression but found " + Describe(t));
    }
    if (t.text == "myrank") return Expr::MyRank(t.loc);
    if (t.text == "nprocs") return Expr::NumProcs(t.loc);
    if (t.text == "mem") {
      if (!loads) Fail(t, "memory access is only allowed in a load or assert");
      Expect("[");
      Expr addr = ParseExpr(depth + 1, loads);
      Expect("]");
      int reg = FreshRegister();
      loads->emplace_back(reg, std::move(addr));
      return Expr::Reg(reg, t.loc);
    }
    if (auto c = consts_.find(t.text); c != consts_.end()) {
      return Expr::Const(c->second, t.loc);
    }
    if (auto r = reg_index_.find(t.text); r != reg_index_.end()) {
      return Expr::Reg(r->second, t.loc);
    }
    if (kKeywords.count(t.text)) {
      Fail(t, "expected an expression but found '" + t.text + "'");
    }
    Fail(t, "undeclared register '" + t.text + "'");
  }

  int FreshRegister() {
    std::string name;
    do {
      name = "__t" + std::to_string(fresh_++);
    } while (reg_index_.count(name) || consts_.count(name));
    reg_index_[name] = static_cast<int>(registers_.size());
    registers_.push_back(name);
    return reg_index_[name];
  }

  // Removes goto/label epsilon edges, merges states whose only exit is a
  // single goto into its target, drops unreachable states and numbers the
  // remaining ones in breadth-first order from the initial state.
  ProgramCode Build(int initial) {
    std::vector<std::vector<int>> eps(state_count_);
    for (auto [a, b] : eps_) eps[a].push_back(b);
    std::vector<std::vector<int>> out(state_count_);
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
      out[edges_[i].from].push_back(i);
    }
    auto forward = [&](int t) {
      for (int hops = 0; hops < state_count_ && out[t].empty() &&
                         eps[t].size() == 1;
           ++hops) {
        t = eps[t][0];
      }
      return t;
    };
    std::vector<std::vector<Edge>> closed(state_count_);
    for (int s = 0; s < state_count_; ++s) {
      std::vector<bool> seen(state_count_, false);
      std::vector<int> stack{s};
      std::vector<int> members;
      seen[s] = true;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        members.push_back(u);
        for (int v : eps[u]) {
          if (!seen[v]) {
            seen[v] = true;
            stack.push_back(v);
          }
        }
      }
      std::sort(members.begin(), members.end());
      for (int u : members) {
        for (int i : out[u]) {
          const Edge& e = edges_[i];
          int to = forward(e.to);
          bool dup = false;
          for (const Edge& have : closed[s]) {
            if (have.to == to && have.command == e.command) dup = true;
          }
          if (!dup) closed[s].push_back(Edge{s, e.command, to});
        }
      }
    }
    initial = forward(initial);
    std::vector<int> number(state_count_, -1);
    std::deque<int> queue{initial};
    number[initial] = 0;
    int next = 1;
    ProgramCode code;
    code.source_name = file_;
    code.registers = registers_;
    while (!queue.empty()) {
      int s = queue.front();
      queue.pop_front();
      for (const Edge& e : closed[s]) {
        if (number[e.to] < 0) {
          number[e.to] = next++;
          queue.push_back(e.to);
        }
      }
    }
    std::vector<int> by_number(next);
    for (int s = 0; s < state_count_; ++s) {
      if (number[s] >= 0) by_number[number[s]] = s;
    }
    for (int n = 0; n < next; ++n) {
      for (const Edge& e : closed[by_number[n]]) {
        code.transitions.push_back(Transition{n, e.command, number[e.to]});
      }
    }
    code.state_count = next;
    code.initial = 0;
    return code;
  }

  std::vector<Token> toks_;
  const std::string& file_;
  size_t pos_ = 0;

  int state_count_ = 0;
  int cur_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::pair<int, int>> eps_;
  std::map<std::string, int> labels_;
  std::set<std::string> label_defined_;
  std::multimap<std::string, SourceLoc> label_uses_;

  std::vector<std::string> registers_;
  std::map<std::string, int> reg_index_;
  std::map<std::string, int> consts_;
  int fresh_ = 0;
};

}  // namespace

ProgramCode ParseProgram(std::string_view text, const std::string& source_name) {
  Lexer lexer(text, source_name);
  Parser parser(lexer.Run(), source_name);
  return parser.Run();
}

}  // namespace pgasrob
