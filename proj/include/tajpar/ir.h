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

// TAJ: a typed three-address IR with an explicit local-variable table.
// Statement indices play the role of bytecode indices.

#ifndef TAJPAR_IR_H_
#define TAJPAR_IR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tajpar {

// Thrown for malformed IR text. Carries a 1-based source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Thrown when a syntactically valid program breaks a structural invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueKind { kInt, kReal, kArrayInt, kArrayReal, kObject };

std::string_view KindName(ValueKind kind);
std::optional<ValueKind> KindFromName(std::string_view name);
inline bool IsReferenceKind(ValueKind k) {
  return k == ValueKind::kArrayInt || k == ValueKind::kArrayReal ||
         k == ValueKind::kObject;
}

// `$`-prefixed names are compiler temporaries.
inline bool IsTemporary(std::string_view name) {
  return !name.empty() && name.front() == '$';
}

// An atomic operand: a local name or an integer constant.
class Operand {
 public:
  Operand() : value_(int64_t{0}) {}
  static Operand Const(int64_t v) { return Operand(v); }
  static Operand Local(std::string name) { return Operand(std::move(name)); }

  bool is_const() const { return std::holds_alternative<int64_t>(value_); }
  bool is_local() const { return !is_const(); }
  int64_t value() const { return std::get<int64_t>(value_); }
  const std::string& name() const { return std::get<std::string>(value_); }

  std::string ToString() const;
  friend bool operator==(const Operand&, const Operand&) = default;

 private:
  explicit Operand(int64_t v) : value_(v) {}
  explicit Operand(std::string n) : value_(std::move(n)) {}
  std::variant<int64_t, std::string> value_;
};

enum class BinaryOp { kAdd, kSub, kMul };
std::string_view OpSymbol(BinaryOp op);

// IntConst | LocalRef when `op` is empty, otherwise `lhs op rhs`.
struct Expr {
  std::optional<BinaryOp> op;
  Operand lhs;
  Operand rhs;

  static Expr Atom(Operand a) { return Expr{std::nullopt, std::move(a), {}}; }
  static Expr Binary(BinaryOp op, Operand l, Operand r) {
    return Expr{op, std::move(l), std::move(r)};
  }
  bool is_atom() const { return !op.has_value(); }
  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class CompareOp { kLt, kLe, kGt, kGe, kEq, kNe };
std::string_view OpSymbol(CompareOp op);
// a op b  <=>  b Swapped(op) a
CompareOp Swapped(CompareOp op);
// !(a op b)  <=>  a Negated(op) b
CompareOp Negated(CompareOp op);

struct CondExpr {
  CompareOp op;
  Operand lhs;
  Operand rhs;
  friend bool operator==(const CondExpr&, const CondExpr&) = default;
};

struct IdentityStmt {
  std::string target;
  int param = 0;
  friend bool operator==(const IdentityStmt&, const IdentityStmt&) = default;
};
struct AssignStmt {
  std::string target;
  Expr value;
  friend bool operator==(const AssignStmt&, const AssignStmt&) = default;
};
struct ArrayLoadStmt {
  std::string target;
  std::string base;
  Operand index;
  friend bool operator==(const ArrayLoadStmt&, const ArrayLoadStmt&) = default;
};
struct ArrayStoreStmt {
  std::string base;
  Operand index;
  Operand value;
  friend bool operator==(const ArrayStoreStmt&,
                         const ArrayStoreStmt&) = default;
};
struct FieldLoadStmt {
  std::string target;
  std::string object;
  std::string field;
  friend bool operator==(const FieldLoadStmt&, const FieldLoadStmt&) = default;
};
struct FieldStoreStmt {
  std::string object;
  std::string field;
  Operand value;
  friend bool operator==(const FieldStoreStmt&,
                         const FieldStoreStmt&) = default;
};
struct GlobalLoadStmt {
  std::string target;
  std::string global;
  friend bool operator==(const GlobalLoadStmt&,
                         const GlobalLoadStmt&) = default;
};
struct GlobalStoreStmt {
  std::string global;
  Operand value;
  friend bool operator==(const GlobalStoreStmt&,
                         const GlobalStoreStmt&) = default;
};
// `kind` is kArrayInt, kArrayReal (with size) or kObject (without).
struct NewStmt {
  std::string target;
  ValueKind kind = ValueKind::kObject;
  std::optional<Operand> size;
  friend bool operator==(const NewStmt&, const NewStmt&) = default;
};
// `callee` is a function or extern name; calls are direct.
struct CallStmt {
  std::optional<std::string> target;
  std::string callee;
  std::vector<Operand> args;
  friend bool operator==(const CallStmt&, const CallStmt&) = default;
};
struct IfGotoStmt {
  CondExpr cond;
  int target = 0;
  friend bool operator==(const IfGotoStmt&, const IfGotoStmt&) = default;
};
struct GotoStmt {
  int target = 0;
  friend bool operator==(const GotoStmt&, const GotoStmt&) = default;
};
struct ReturnStmt {
  std::optional<Operand> value;
  friend bool operator==(const ReturnStmt&, const ReturnStmt&) = default;
};

using StatementKind =
    std::variant<IdentityStmt, AssignStmt, ArrayLoadStmt, ArrayStoreStmt,
                 FieldLoadStmt, FieldStoreStmt, GlobalLoadStmt,
                 GlobalStoreStmt, NewStmt, CallStmt, IfGotoStmt, GotoStmt,
                 ReturnStmt>;

struct Statement {
  int index = 0;
  StatementKind kind;

  template <typename T>
  const T* As() const {
    return std::get_if<T>(&kind);
  }
  template <typename T>
  bool Is() const {
    return std::holds_alternative<T>(kind);
  }
  friend bool operator==(const Statement&, const Statement&) = default;
};

// The local written by `s`, if any.
std::optional<std::string> DefinedLocal(const Statement& s);
// Every local read by `s` (bases, indices, values, arguments, conditions).
std::vector<std::string> UsedLocals(const Statement& s);
// Branch targets of `s` (empty unless IfGoto/Goto).
std::vector<int> BranchTargets(const Statement& s);
std::string StatementText(const Statement& s);

struct Param {
  std::string name;
  ValueKind kind;
  friend bool operator==(const Param&, const Param&) = default;
};

// One row of the local-variable table. The live range is
// [start, start + length) in statement indices.
struct LocalVarEntry {
  std::string name;
  ValueKind kind = ValueKind::kInt;
  int slot = 0;
  int start = 0;
  int length = 0;

  int end() const { return start + length; }
  friend bool operator==(const LocalVarEntry&, const LocalVarEntry&) = default;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  std::optional<ValueKind> result;
  std::vector<LocalVarEntry> locals;
  std::vector<Statement> statements;

  bool returns_value() const { return result.has_value(); }
  // name(kind,kind,...):ret
  std::string signature() const;
  const Param* FindParam(std::string_view local) const;
  int size() const { return static_cast<int>(statements.size()); }
  friend bool operator==(const FunctionDef&, const FunctionDef&) = default;
};

std::optional<LocalVarEntry> LookupLocalEntry(const FunctionDef& f,
                                              std::string_view name);

enum class GlobalKind { kScalarInt, kScalarReal, kArrayInt, kArrayReal };

struct GlobalDecl {
  std::string name;
  GlobalKind kind = GlobalKind::kScalarInt;
  std::optional<int64_t> init_size;
  friend bool operator==(const GlobalDecl&, const GlobalDecl&) = default;
};

// A library routine without a body; calling it is always external.
struct ExternDecl {
  std::string name;
  std::vector<ValueKind> params;
  std::optional<ValueKind> result;
  std::string signature() const;
  friend bool operator==(const ExternDecl&, const ExternDecl&) = default;
};

struct Program {
  std::vector<GlobalDecl> globals;
  std::map<std::string, FunctionDef> functions;  // keyed by signature
  std::map<std::string, ExternDecl> externs;     // keyed by name
  std::optional<std::string> entry;              // signature

  const FunctionDef* FindFunction(std::string_view signature) const;
  const FunctionDef* FindFunctionByName(std::string_view name) const;
  const GlobalDecl* FindGlobal(std::string_view name) const;
  // Signature of the function or extern named `callee`, if declared.
  std::optional<std::string> ResolveCallee(std::string_view callee) const;
  bool IsExternal(std::string_view callee) const;
  friend bool operator==(const Program&, const Program&) = default;
};

// Parses and validates TAJ source text.
Program ParseProgram(std::string_view text);
// Checks every structural invariant; throws ValidationError on the first
// violation.
void ValidateProgram(const Program& p);
std::string PrintProgram(const Program& p);

}  // namespace tajpar

#endif  // TAJPAR_IR_H_
