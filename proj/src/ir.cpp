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

#include "tajpar/ir.h"

#include <algorithm>
#include <set>
#include <sstream>

namespace tajpar {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void AddLocal(const Operand& op, std::vector<std::string>* out) {
  if (op.is_local()) out->push_back(op.name());
}

std::string_view GlobalKindName(GlobalKind kind) {
  switch (kind) {
    case GlobalKind::kScalarInt:
      return "int";
    case GlobalKind::kScalarReal:
      return "real";
    case GlobalKind::kArrayInt:
      return "array-int";
    case GlobalKind::kArrayReal:
      return "array-real";
  }
  return "?";
}

std::string KindList(const std::vector<ValueKind>& kinds) {
  std::string out;
  for (size_t i = 0; i < kinds.size(); ++i) {
    if (i) out += ',';
    out += KindName(kinds[i]);
  }
  return out;
}

std::string ResultName(const std::optional<ValueKind>& r) {
  return r ? std::string(KindName(*r)) : std::string("void");
}

}  // namespace

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

std::string_view KindName(ValueKind kind) {
  switch (kind) {
    case ValueKind::kInt:
      return "int";
    case ValueKind::kReal:
      return "real";
    case ValueKind::kArrayInt:
      return "array-int";
    case ValueKind::kArrayReal:
      return "array-real";
    case ValueKind::kObject:
      return "object";
  }
  return "?";
}

std::optional<ValueKind> KindFromName(std::string_view name) {
  for (ValueKind k : {ValueKind::kInt, ValueKind::kReal, ValueKind::kArrayInt,
                      ValueKind::kArrayReal, ValueKind::kObject}) {
    if (KindName(k) == name) return k;
  }
  return std::nullopt;
}

std::string Operand::ToString() const {
  return is_const() ? std::to_string(value()) : name();
}

std::string_view OpSymbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd:
      return "+";
    case BinaryOp::kSub:
      return "-";
    case BinaryOp::kMul:
      return "*";
  }
  return "?";
}

std::string_view OpSymbol(CompareOp op) {
  switch (op) {
    case CompareOp::kLt:
      return "<";
    case CompareOp::kLe:
      return "<=";
    case CompareOp::kGt:
      return ">";
    case CompareOp::kGe:
      return ">=";
    case CompareOp::kEq:
      return "==";
    case CompareOp::kNe:
      return "!=";
  }
  return "?";
}

CompareOp Swapped(CompareOp op) {
  switch (op) {
    case CompareOp::kLt:
      return CompareOp::kGt;
    case CompareOp::kLe:
      return CompareOp::kGe;
    case CompareOp::kGt:
      return CompareOp::kLt;
    case CompareOp::kGe:
      return CompareOp::kLe;
    default:
      return op;
  }
}

CompareOp Negated(CompareOp op) {
  switch (op) {
    case CompareOp::kLt:
      return CompareOp::kGe;
    case CompareOp::kLe:
      return CompareOp::kGt;
    case CompareOp::kGt:
      return CompareOp::kLe;
    case CompareOp::kGe:
      return CompareOp::kLt;
    case CompareOp::kEq:
      return CompareOp::kNe;
    case CompareOp::kNe:
      return CompareOp::kEq;
  }
  return op;
}

std::optional<std::string> DefinedLocal(const Statement& s) {
  return std::visit(
      Overloaded{
          [](const IdentityStmt& x) -> std::optional<std::string> {
            return x.target;
          },
          [](const AssignStmt& x) -> std::optional<std::string> {
            return x.target;
          },
          [](const ArrayLoadStmt& x) -> std::optional<std::string> {
            return x.target;
          },
          [](const FieldLoadStmt& x) -> std::optional<std::string> {
            return x.target;
          },
          [](const GlobalLoadStmt& x) -> std::optional<std::string> {
            return x.target;
          },
          [](const NewStmt& x) -> std::optional<std::string> {
            return x.target;
          },
          [](const CallStmt& x) -> std::optional<std::string> {
            return x.target;
          },
          [](const auto&) -> std::optional<std::string> {
            return std::nullopt;
          }},
      s.kind);
}

std::vector<std::string> UsedLocals(const Statement& s) {
  std::vector<std::string> out;
  std::visit(Overloaded{
                 [](const IdentityStmt&) {},
                 [&](const AssignStmt& x) {
                   AddLocal(x.value.lhs, &out);
                   if (x.value.op) AddLocal(x.value.rhs, &out);
                 },
                 [&](const ArrayLoadStmt& x) {
                   out.push_back(x.base);
                   AddLocal(x.index, &out);
                 },
                 [&](const ArrayStoreStmt& x) {
                   out.push_back(x.base);
                   AddLocal(x.index, &out);
                   AddLocal(x.value, &out);
                 },
                 [&](const FieldLoadStmt& x) { out.push_back(x.object); },
                 [&](const FieldStoreStmt& x) {
                   out.push_back(x.object);
                   AddLocal(x.value, &out);
                 },
                 [](const GlobalLoadStmt&) {},
                 [&](const GlobalStoreStmt& x) { AddLocal(x.value, &out); },
                 [&](const NewStmt& x) {
                   if (x.size) AddLocal(*x.size, &out);
                 },
                 [&](const CallStmt& x) {
                   for (const Operand& a : x.args) AddLocal(a, &out);
                 },
                 [&](const IfGotoStmt& x) {
                   AddLocal(x.cond.lhs, &out);
                   AddLocal(x.cond.rhs, &out);
                 },
                 [](const GotoStmt&) {},
                 [&](const ReturnStmt& x) {
                   if (x.value) AddLocal(*x.value, &out);
                 }},
             s.kind);
  return out;
}

std::vector<int> BranchTargets(const Statement& s) {
  if (const auto* g = s.As<GotoStmt>()) return {g->target};
  if (const auto* b = s.As<IfGotoStmt>()) return {b->target};
  return {};
}

std::string StatementText(const Statement& s) {
  std::ostringstream os;
  std::visit(
      Overloaded{
          [&](const IdentityStmt& x) {
            os << x.target << " := param " << x.param;
          },
          [&](const AssignStmt& x) {
            os << x.target << " = " << x.value.lhs.ToString();
            if (x.value.op) {
              os << ' ' << OpSymbol(*x.value.op) << ' '
                 << x.value.rhs.ToString();
            }
          },
          [&](const ArrayLoadStmt& x) {
            os << x.target << " = " << x.base << '[' << x.index.ToString()
               << ']';
          },
          [&](const ArrayStoreStmt& x) {
            os << x.base << '[' << x.index.ToString()
               << "] = " << x.value.ToString();
          },
          [&](const FieldLoadStmt& x) {
            os << x.target << " = " << x.object << '.' << x.field;
          },
          [&](const FieldStoreStmt& x) {
            os << x.object << '.' << x.field << " = " << x.value.ToString();
          },
          [&](const GlobalLoadStmt& x) {
            os << x.target << " = @" << x.global;
          },
          [&](const GlobalStoreStmt& x) {
            os << '@' << x.global << " = " << x.value.ToString();
          },
          [&](const NewStmt& x) {
            os << x.target << " = new " << KindName(x.kind);
            if (x.size) os << '[' << x.size->ToString() << ']';
          },
          [&](const CallStmt& x) {
            if (x.target) os << *x.target << " = ";
            os << "call " << x.callee << '(';
            for (size_t i = 0; i < x.args.size(); ++i) {
              if (i) os << ", ";
              os << x.args[i].ToString();
            }
            os << ')';
          },
          [&](const IfGotoStmt& x) {
            os << "if " << x.cond.lhs.ToString() << ' ' << OpSymbol(x.cond.op)
               << ' ' << x.cond.rhs.ToString() << " goto " << x.target;
          },
          [&](const GotoStmt& x) { os << "goto " << x.target; },
          [&](const ReturnStmt& x) {
            os << "return";
            if (x.value) os << ' ' << x.value->ToString();
          }},
      s.kind);
  return os.str();
}

std::string FunctionDef::signature() const {
  std::vector<ValueKind> kinds;
  for (const Param& p : params) kinds.push_back(p.kind);
  return name + "(" + KindList(kinds) + "):" + ResultName(result);
}

const Param* FunctionDef::FindParam(std::string_view local) const {
  for (const Param& p : params) {
    if (p.name == local) return &p;
  }
  return nullptr;
}

std::optional<LocalVarEntry> LookupLocalEntry(const FunctionDef& f,
                                              std::string_view name) {
  if (IsTemporary(name)) return std::nullopt;
  for (const LocalVarEntry& e : f.locals) {
    if (e.name == name) return e;
  }
  return std::nullopt;
}

std::string ExternDecl::signature() const {
  return name + "(" + KindList(params) + "):" + ResultName(result);
}

const FunctionDef* Program::FindFunction(std::string_view signature) const {
  auto it = functions.find(std::string(signature));
  return it == functions.end() ? nullptr : &it->second;
}

const FunctionDef* Program::FindFunctionByName(std::string_view name) const {
  for (const auto& [sig, f] : functions) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

const GlobalDecl* Program::FindGlobal(std::string_view name) const {
  for (const GlobalDecl& g : globals) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

std::optional<std::string> Program::ResolveCallee(
    std::string_view callee) const {
  if (const FunctionDef* f = FindFunctionByName(callee)) return f->signature();
  auto it = externs.find(std::string(callee));
  if (it != externs.end()) return it->second.signature();
  return std::nullopt;
}

bool Program::IsExternal(std::string_view callee) const {
  return FindFunctionByName(callee) == nullptr &&
         externs.count(std::string(callee)) > 0;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void Fail(const FunctionDef& f, const std::string& what) {
  throw ValidationError("function " + f.name + ": " + what);
}

void ValidateFunction(const Program& p, const FunctionDef& f) {
  const int n = f.size();
  if (n == 0) Fail(f, "function has no statements");

  std::set<std::string> param_names;
  for (const Param& prm : f.params) {
    if (!param_names.insert(prm.name).second) {
      Fail(f, "duplicate parameter " + prm.name);
    }
  }

  std::set<std::string> table_names;
  for (const LocalVarEntry& e : f.locals) {
    if (IsTemporary(e.name)) {
      Fail(f, "temporary " + e.name + " in local table");
    }
    if (!table_names.insert(e.name).second) {
      Fail(f, "duplicate local table entry " + e.name);
    }
    if (e.start < 0 || e.length < 0 || e.end() > n) {
      Fail(f, "local span out of range for " + e.name);
    }
    if (e.slot < 0) Fail(f, "negative slot for " + e.name);
  }
  for (size_t a = 0; a < f.locals.size(); ++a) {
    for (size_t b = a + 1; b < f.locals.size(); ++b) {
      const LocalVarEntry& x = f.locals[a];
      const LocalVarEntry& y = f.locals[b];
      bool overlap = x.start < y.end() && y.start < x.end();
      if (overlap && x.slot == y.slot) {
        Fail(f, "slot " + std::to_string(x.slot) + " shared by overlapping " +
                    x.name + " and " + y.name);
      }
    }
  }

  auto known_local = [&](const std::string& name) {
    return IsTemporary(name) || param_names.count(name) ||
           table_names.count(name);
  };

  bool in_prefix = true;
  for (int i = 0; i < n; ++i) {
    const Statement& s = f.statements[i];
    if (s.index != i) Fail(f, "statement indices not contiguous at " +
                               std::to_string(s.index));
    if (const auto* id = s.As<IdentityStmt>()) {
      if (!in_prefix) Fail(f, "identity statement outside entry prefix");
      if (id->param < 0 ||
          id->param >= static_cast<int>(f.params.size())) {
        Fail(f, "identity binds nonexistent parameter " +
                    std::to_string(id->param));
      }
    } else {
      in_prefix = false;
    }
    for (int t : BranchTargets(s)) {
      if (t < 0 || t >= n) Fail(f, "branch target out of range");
    }
    if (auto d = DefinedLocal(s); d && !known_local(*d)) {
      Fail(f, "undeclared local " + *d);
    }
    for (const std::string& u : UsedLocals(s)) {
      if (!known_local(u)) Fail(f, "undeclared local " + u);
    }
    if (const auto* c = s.As<CallStmt>()) {
      const FunctionDef* callee = p.FindFunctionByName(c->callee);
      size_t arity = 0;
      if (callee) {
        arity = callee->params.size();
      } else if (auto it = p.externs.find(c->callee); it != p.externs.end()) {
        arity = it->second.params.size();
      } else {
        Fail(f, "unresolved call target " + c->callee);
      }
      if (arity != c->args.size()) Fail(f, "arity mismatch calling " +
                                               c->callee);
    }
    if (const auto* g = s.As<GlobalLoadStmt>(); g && !p.FindGlobal(g->global)) {
      Fail(f, "unknown global " + g->global);
    }
    if (const auto* g = s.As<GlobalStoreStmt>();
        g && !p.FindGlobal(g->global)) {
      Fail(f, "unknown global " + g->global);
    }
    if (const auto* nw = s.As<NewStmt>()) {
      bool is_array = nw->kind == ValueKind::kArrayInt ||
                      nw->kind == ValueKind::kArrayReal;
      if (is_array != nw->size.has_value() ||
          (!is_array && nw->kind != ValueKind::kObject)) {
        Fail(f, "malformed allocation");
      }
    }
  }
  const Statement& last = f.statements.back();
  if (!last.Is<ReturnStmt>() && !last.Is<GotoStmt>()) {
    Fail(f, "control falls off the end");
  }
}

}  // namespace

void ValidateProgram(const Program& p) {
  std::set<std::string> names;
  for (const GlobalDecl& g : p.globals) {
    if (!names.insert(g.name).second) {
      throw ValidationError("duplicate global " + g.name);
    }
    bool is_array =
        g.kind == GlobalKind::kArrayInt || g.kind == GlobalKind::kArrayReal;
    if (g.init_size && (!is_array || *g.init_size < 0)) {
      throw ValidationError("bad initial size for global " + g.name);
    }
  }
  std::set<std::string> fnames;
  for (const auto& [sig, f] : p.functions) {
    if (sig != f.signature()) {
      throw ValidationError("function keyed under wrong signature " + sig);
    }
    if (!fnames.insert(f.name).second) {
      throw ValidationError("duplicate function name " + f.name);
    }
  }
  for (const auto& [name, e] : p.externs) {
    if (name != e.name || fnames.count(name)) {
      throw ValidationError("extern " + name + " clashes with a function");
    }
  }
  if (p.entry && !p.FindFunction(*p.entry)) {
    throw ValidationError("entry " + *p.entry + " does not resolve");
  }
  for (const auto& [sig, f] : p.functions) ValidateFunction(p, f);
}

// ---------------------------------------------------------------------------
// Printing

std::string PrintProgram(const Program& p) {
  std::ostringstream os;
  for (const GlobalDecl& g : p.globals) {
    os << "global " << g.name << ": " << GlobalKindName(g.kind);
    if (g.init_size) os << '[' << *g.init_size << ']';
    os << '\n';
  }
  for (const auto& [name, e] : p.externs) {
    os << "extern func " << e.name << '(';
    for (size_t i = 0; i < e.params.size(); ++i) {
      if (i) os << ", ";
      os << KindName(e.params[i]);
    }
    os << ") : " << ResultName(e.result) << '\n';
  }
  if (p.entry) os << "entry " << p.FindFunction(*p.entry)->name << '\n';
  for (const auto& [sig, f] : p.functions) {
    os << "func " << f.name << '(';
    for (size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << f.params[i].name << ": " << KindName(f.params[i].kind);
    }
    os << ") : " << ResultName(f.result) << " {\n  locals {";
    for (const LocalVarEntry& e : f.locals) {
      os << ' ' << e.name << " : " << KindName(e.kind) << " slot " << e.slot
         << " span [" << e.start << ", " << e.end() << ") ;";
    }
    os << " }\n";
    for (const Statement& s : f.statements) {
      os << "  " << s.index << ": " << StatementText(s) << '\n';
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace tajpar
