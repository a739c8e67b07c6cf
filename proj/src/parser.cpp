// Copyright 2026 The tajpar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Recursive-descent parser for TAJ text. One statement per line; `//`
// starts a comment.

#include <cctype>
#include <charconv>

#include "tajpar/ir.h"

namespace tajpar {
namespace {

enum class Tok { kIdent, kInt, kPunct, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  int64_t value = 0;
  int line = 0;
  int column = 0;
};

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool IsIdentChar(char c) {
  return IsIdentStart(c) || std::isdigit(static_cast<unsigned char>(c));
}

std::vector<Token> Lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t k) {
    for (size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (src.substr(i, 8) == "<clinit>") {
      t.type = Tok::kIdent;
      t.text = "<clinit>";
      advance(8);
    } else if (IsIdentStart(c)) {
      size_t j = i;
      while (j < src.size() && IsIdentChar(src[j])) ++j;
      t.type = Tok::kIdent;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
        ++j;
      t.type = Tok::kInt;
      t.text = std::string(src.substr(i, j - i));
      auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, t.value);
      if (ec != std::errc()) throw ParseError(line, col, "integer overflow");
      advance(j - i);
    } else {
      static constexpr std::string_view kTwo[] = {":=", "<=", ">=", "==",
                                                  "!="};
      std::string_view two = src.substr(i, 2);
      t.type = Tok::kPunct;
      bool matched = false;
      for (std::string_view p : kTwo) {
        if (two == p) {
          t.text = std::string(p);
          advance(2);
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string_view(":=[](){},;.@+-*<>").find(c) ==
            std::string_view::npos) {
          throw ParseError(line, col,
                           std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
        advance(1);
      }
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program Run() {
    Program p;
    std::optional<Token> entry_name;
    while (Peek().type != Tok::kEnd) {
      const Token& t = Peek();
      if (IsWord("global")) {
        Next();
        p.globals.push_back(ParseGlobal());
      } else if (IsWord("extern")) {
        Next();
        ExpectWord("func");
        ExternDecl e;
        e.name = ExpectIdent("extern name");
        Expect("(");
        if (!IsPunct(")")) {
          e.params.push_back(ParseKind());
          while (Accept(",")) e.params.push_back(ParseKind());
        }
        Expect(")");
        Expect(":");
        e.result = ParseResult();
        if (p.externs.count(e.name)) {
          throw ParseError(t.line, t.column, "duplicate extern " + e.name);
        }
        p.externs.emplace(e.name, std::move(e));
      } else if (IsWord("entry")) {
        Next();
        entry_name = Peek();
        ExpectIdent("entry function name");
      } else if (IsWord("func")) {
        Next();
        FunctionDef f = ParseFunction();
        std::string sig = f.signature();
        if (p.functions.count(sig)) {
          throw ParseError(t.line, t.column, "duplicate function " + sig);
        }
        p.functions.emplace(sig, std::move(f));
      } else {
        throw ParseError(t.line, t.column,
                         "expected 'global', 'extern', 'entry' or 'func'");
      }
    }
    if (entry_name) {
      const FunctionDef* f = p.FindFunctionByName(entry_name->text);
      if (!f) {
        throw ParseError(entry_name->line, entry_name->column,
                         "unknown entry function " + entry_name->text);
      }
      p.entry = f->signature();
    }
    return p;
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
  bool IsPunct(std::string_view p, int k = 0) const {
    return Peek(k).type == Tok::kPunct && Peek(k).text == p;
  }
  bool IsWord(std::string_view w, int k = 0) const {
    return Peek(k).type == Tok::kIdent && Peek(k).text == w;
  }
  bool Accept(std::string_view p) {
    if (!IsPunct(p)) return false;
    Next();
    return true;
  }
  [[noreturn]] void Error(const std::string& msg) const {
    const Token& t = Peek();
    std::string found = t.type == Tok::kEnd ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, msg + ", found " + found);
  }
  void Expect(std::string_view p) {
    if (!Accept(p)) Error("expected '" + std::string(p) + "'");
  }
  void ExpectWord(std::string_view w) {
    if (!IsWord(w)) Error("expected '" + std::string(w) + "'");
    Next();
  }
  std::string ExpectIdent(const std::string& what) {
    if (Peek().type != Tok::kIdent) Error("expected " + what);
    return Next().text;
  }
  int64_t ExpectInt(const std::string& what) {
    bool neg = Accept("-");
    if (Peek().type != Tok::kInt) Error("expected " + what);
    int64_t v = Next().value;
    return neg ? -v : v;
  }
  int ExpectIndex(const std::string& what) {
    if (Peek().type != Tok::kInt) Error("expected " + what);
    int64_t v = Peek().value;
    if (v > 1'000'000'000) Error(what + " too large");
    Next();
    return static_cast<int>(v);
  }

  ValueKind ParseKind() {
    std::string w = ExpectIdent("kind");
    if (w == "array") {
      Expect("-");
      std::string e = ExpectIdent("element kind");
      if (e == "int") return ValueKind::kArrayInt;
      if (e == "real") return ValueKind::kArrayReal;
      Error("expected 'int' or 'real' element kind");
    }
    if (w == "int") return ValueKind::kInt;
    if (w == "real") return ValueKind::kReal;
    if (w == "object") return ValueKind::kObject;
    --pos_;
    Error("unknown kind");
  }

  std::optional<ValueKind> ParseResult() {
    if (IsWord("void")) {
      Next();
      return std::nullopt;
    }
    return ParseKind();
  }

  GlobalDecl ParseGlobal() {
    GlobalDecl g;
    g.name = ExpectIdent("global name");
    Expect(":");
    std::string w = ExpectIdent("global kind");
    if (w == "scalar") {
      Expect("-");
      w = ExpectIdent("scalar kind");
    } else if (w == "array") {
      Expect("-");
      w = "array-" + ExpectIdent("element kind");
    }
    if (w == "int") {
      g.kind = GlobalKind::kScalarInt;
    } else if (w == "real") {
      g.kind = GlobalKind::kScalarReal;
    } else if (w == "array-int") {
      g.kind = GlobalKind::kArrayInt;
    } else if (w == "array-real") {
      g.kind = GlobalKind::kArrayReal;
    } else {
      --pos_;
      Error("unknown global kind");
    }
    if (Accept("[")) {
      g.init_size = ExpectInt("array size");
      Expect("]");
    }
    return g;
  }

  Operand ParseOperand() {
    if (Peek().type == Tok::kIdent) return Operand::Local(Next().text);
    if (Peek().type == Tok::kInt || IsPunct("-")) {
      return Operand::Const(ExpectInt("operand"));
    }
    Error("expected operand");
  }

  std::vector<Operand> ParseArgs() {
    std::vector<Operand> args;
    Expect("(");
    if (!IsPunct(")")) {
      args.push_back(ParseOperand());
      while (Accept(",")) args.push_back(ParseOperand());
    }
    Expect(")");
    return args;
  }

  std::optional<CompareOp> PeekCompare() const {
    if (Peek().type != Tok::kPunct) return std::nullopt;
    const std::string& t = Peek().text;
    if (t == "<") return CompareOp::kLt;
    if (t == "<=") return CompareOp::kLe;
    if (t == ">") return CompareOp::kGt;
    if (t == ">=") return CompareOp::kGe;
    if (t == "==") return CompareOp::kEq;
    if (t == "!=") return CompareOp::kNe;
    return std::nullopt;
  }

  std::optional<BinaryOp> PeekBinary() const {
    if (IsPunct("+")) return BinaryOp::kAdd;
    if (IsPunct("-")) return BinaryOp::kSub;
    if (IsPunct("*")) return BinaryOp::kMul;
    return std::nullopt;
  }

  StatementKind ParseRhs(std::string target) {
    if (IsWord("new")) {
      Next();
      NewStmt n{std::move(target), ParseKind(), std::nullopt};
      if (Accept("[")) {
        n.size = ParseOperand();
        Expect("]");
      }
      return n;
    }
    if (IsWord("call")) {
      Next();
      CallStmt c;
      c.target = std::move(target);
      c.callee = ExpectIdent("callee name");
      c.args = ParseArgs();
      return c;
    }
    if (Accept("@")) {
      return GlobalLoadStmt{std::move(target), ExpectIdent("global name")};
    }
    if (Peek().type == Tok::kIdent && IsPunct("[", 1)) {
      std::string base = Next().text;
      Next();
      Operand idx = ParseOperand();
      Expect("]");
      return ArrayLoadStmt{std::move(target), std::move(base), std::move(idx)};
    }
    if (Peek().type == Tok::kIdent && IsPunct(".", 1)) {
      std::string obj = Next().text;
      Next();
      return FieldLoadStmt{std::move(target), std::move(obj),
                           ExpectIdent("field name")};
    }
    Operand lhs = ParseOperand();
    if (auto op = PeekBinary()) {
      Next();
      return AssignStmt{std::move(target),
                        Expr::Binary(*op, std::move(lhs), ParseOperand())};
    }
    return AssignStmt{std::move(target), Expr::Atom(std::move(lhs))};
  }

  StatementKind ParseStatementBody() {
    if (IsWord("if")) {
      Next();
      CondExpr c;
      c.lhs = ParseOperand();
      auto op = PeekCompare();
      if (!op) Error("expected comparison operator");
      Next();
      c.op = *op;
      c.rhs = ParseOperand();
      ExpectWord("goto");
      return IfGotoStmt{std::move(c), ExpectIndex("branch target")};
    }
    if (IsWord("goto")) {
      Next();
      return GotoStmt{ExpectIndex("branch target")};
    }
    if (IsWord("return")) {
      int line = Next().line;
      ReturnStmt r;
      if (Peek().type != Tok::kEnd && Peek().line == line && !IsPunct("}")) {
        r.value = ParseOperand();
      }
      return r;
    }
    if (IsWord("call")) {
      Next();
      CallStmt c;
      c.callee = ExpectIdent("callee name");
      c.args = ParseArgs();
      return c;
    }
    if (Accept("@")) {
      std::string g = ExpectIdent("global name");
      Expect("=");
      return GlobalStoreStmt{std::move(g), ParseOperand()};
    }
    std::string name = ExpectIdent("statement");
    if (Accept(":=")) {
      ExpectWord("param");
      return IdentityStmt{std::move(name), ExpectIndex("parameter position")};
    }
    if (Accept("[")) {
      Operand idx = ParseOperand();
      Expect("]");
      Expect("=");
      return ArrayStoreStmt{std::move(name), std::move(idx), ParseOperand()};
    }
    if (Accept(".")) {
      std::string field = ExpectIdent("field name");
      Expect("=");
      return FieldStoreStmt{std::move(name), std::move(field), ParseOperand()};
    }
    Expect("=");
    return ParseRhs(std::move(name));
  }

  FunctionDef ParseFunction() {
    FunctionDef f;
    f.name = ExpectIdent("function name");
    Expect("(");
    if (!IsPunct(")")) {
      do {
        Param prm;
        prm.name = ExpectIdent("parameter name");
        Expect(":");
        prm.kind = ParseKind();
        f.params.push_back(std::move(prm));
      } while (Accept(","));
    }
    Expect(")");
    Expect(":");
    f.result = ParseResult();
    Expect("{");
    if (IsWord("locals")) {
      Next();
      Expect("{");
      while (!Accept("}")) {
        LocalVarEntry e;
        e.name = ExpectIdent("local name");
        Expect(":");
        e.kind = ParseKind();
        ExpectWord("slot");
        e.slot = static_cast<int>(ExpectInt("slot"));
        ExpectWord("span");
        Expect("[");
        e.start = static_cast<int>(ExpectInt("span start"));
        Expect(",");
        int end = static_cast<int>(ExpectInt("span end"));
        Expect(")");
        Expect(";");
        e.length = end - e.start;
        f.locals.push_back(std::move(e));
      }
    }
    while (!Accept("}")) {
      const Token& t = Peek();
      int idx = ExpectIndex("statement index");
      if (idx != f.size()) {
        throw ParseError(t.line, t.column,
                         "statement index " + std::to_string(idx) +
                             " out of sequence (expected " +
                             std::to_string(f.size()) + ")");
      }
      Expect(":");
      f.statements.push_back(Statement{idx, ParseStatementBody()});
    }
    return f;
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

Program ParseProgram(std::string_view text) {
  Program p = Parser(Lex(text)).Run();
  ValidateProgram(p);
  return p;
}

}  // namespace tajpar
