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

#include "tajpar/constraints.h"

#include <algorithm>

namespace tajpar {

std::string VarRef::Mangled() const {
  if (tag == kNoTag) return name;
  return name + "_" + std::to_string(tag);
}

bool CNode::is_term() const {
  switch (kind) {
    case CKind::kVar:
    case CKind::kConst:
    case CKind::kAdd:
    case CKind::kSub:
    case CKind::kMul:
      return true;
    default:
      return false;
  }
}

bool CNode::is_atom() const {
  switch (kind) {
    case CKind::kEq:
    case CKind::kNeq:
    case CKind::kLt:
    case CKind::kLe:
    case CKind::kGt:
    case CKind::kGe:
      return true;
    default:
      return false;
  }
}

namespace c {

namespace {
Constraint Make(CKind k, std::vector<Constraint> kids) {
  auto n = std::make_shared<CNode>();
  n->kind = k;
  n->kids = std::move(kids);
  return n;
}
}  // namespace

Constraint Var(std::string name, int tag) {
  auto n = std::make_shared<CNode>();
  n->kind = CKind::kVar;
  n->var = VarRef{std::move(name), tag};
  return n;
}

Constraint Const(int64_t v) {
  auto n = std::make_shared<CNode>();
  n->kind = CKind::kConst;
  n->value = v;
  return n;
}

Constraint Add(Constraint a, Constraint b) {
  return Make(CKind::kAdd, {std::move(a), std::move(b)});
}
Constraint Sub(Constraint a, Constraint b) {
  return Make(CKind::kSub, {std::move(a), std::move(b)});
}
Constraint Mul(Constraint a, Constraint b) {
  return Make(CKind::kMul, {std::move(a), std::move(b)});
}
Constraint Cmp(CKind kind, Constraint a, Constraint b) {
  return Make(kind, {std::move(a), std::move(b)});
}
Constraint Eq(Constraint a, Constraint b) {
  return Cmp(CKind::kEq, std::move(a), std::move(b));
}
Constraint Neq(Constraint a, Constraint b) {
  return Cmp(CKind::kNeq, std::move(a), std::move(b));
}
Constraint Lt(Constraint a, Constraint b) {
  return Cmp(CKind::kLt, std::move(a), std::move(b));
}
Constraint Le(Constraint a, Constraint b) {
  return Cmp(CKind::kLe, std::move(a), std::move(b));
}
Constraint Gt(Constraint a, Constraint b) {
  return Cmp(CKind::kGt, std::move(a), std::move(b));
}
Constraint Ge(Constraint a, Constraint b) {
  return Cmp(CKind::kGe, std::move(a), std::move(b));
}
Constraint And(std::vector<Constraint> kids) {
  return Make(CKind::kAnd, std::move(kids));
}
Constraint Or(std::vector<Constraint> kids) {
  return Make(CKind::kOr, std::move(kids));
}
Constraint True() { return Make(CKind::kTrue, {}); }
Constraint False() { return Make(CKind::kFalse, {}); }

}  // namespace c

namespace {

std::string_view Head(CKind k) {
  switch (k) {
    case CKind::kAdd:
      return "+";
    case CKind::kSub:
      return "-";
    case CKind::kMul:
      return "*";
    case CKind::kEq:
      return "=";
    case CKind::kLt:
      return "<";
    case CKind::kLe:
      return "<=";
    case CKind::kGt:
      return ">";
    case CKind::kGe:
      return ">=";
    case CKind::kAnd:
      return "and";
    case CKind::kOr:
      return "or";
    default:
      return "";
  }
}

void RenderTo(const CNode& n, std::string* out) {
  switch (n.kind) {
    case CKind::kVar:
      *out += n.var.Mangled();
      return;
    case CKind::kConst:
      if (n.value < 0) {
        // Negate through unsigned to keep INT64_MIN well defined.
        *out += "(- ";
        *out += std::to_string(0 - static_cast<uint64_t>(n.value));
        *out += ")";
      } else {
        *out += std::to_string(n.value);
      }
      return;
    case CKind::kTrue:
      *out += "true";
      return;
    case CKind::kFalse:
      *out += "false";
      return;
    case CKind::kNeq:
      *out += "(not (= ";
      RenderTo(*n.kids[0], out);
      *out += ' ';
      RenderTo(*n.kids[1], out);
      *out += "))";
      return;
    case CKind::kAnd:
    case CKind::kOr:
      if (n.kids.empty()) {
        *out += n.kind == CKind::kAnd ? "true" : "false";
        return;
      }
      [[fallthrough]];
    default:
      *out += '(';
      *out += Head(n.kind);
      for (const Constraint& k : n.kids) {
        *out += ' ';
        RenderTo(*k, out);
      }
      *out += ')';
  }
}

using i128 = __int128;

std::optional<i128> EvalTerm(const CNode& n, const Assignment& a) {
  switch (n.kind) {
    case CKind::kVar: {
      auto it = a.find(n.var);
      if (it == a.end()) return std::nullopt;
      return static_cast<i128>(it->second);
    }
    case CKind::kConst:
      return static_cast<i128>(n.value);
    case CKind::kAdd:
    case CKind::kSub:
    case CKind::kMul: {
      auto l = EvalTerm(*n.kids[0], a);
      auto r = EvalTerm(*n.kids[1], a);
      if (!l || !r) return std::nullopt;
      i128 out;
      bool overflow = n.kind == CKind::kAdd   ? __builtin_add_overflow(*l, *r, &out)
                      : n.kind == CKind::kSub ? __builtin_sub_overflow(*l, *r, &out)
                                              : __builtin_mul_overflow(*l, *r, &out);
      if (overflow) return std::nullopt;
      return out;
    }
    default:
      return std::nullopt;
  }
}

void Collect(const CNode& n, std::set<VarRef>* out) {
  if (n.kind == CKind::kVar) out->insert(n.var);
  for (const Constraint& k : n.kids) Collect(*k, out);
}

}  // namespace

std::string Render(const Constraint& c) {
  std::string out;
  RenderTo(*c, &out);
  return out;
}

Constraint Normalize(const Constraint& n) {
  if (n->kind != CKind::kAnd && n->kind != CKind::kOr) return n;
  const bool is_and = n->kind == CKind::kAnd;
  const CKind unit = is_and ? CKind::kTrue : CKind::kFalse;
  const CKind zero = is_and ? CKind::kFalse : CKind::kTrue;
  std::vector<std::pair<std::string, Constraint>> keyed;
  std::vector<Constraint> stack;
  for (const Constraint& k : n->kids) stack.push_back(Normalize(k));
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    Constraint k = stack.back();
    stack.pop_back();
    if (k->kind == n->kind) {
      for (auto it = k->kids.rbegin(); it != k->kids.rend(); ++it) {
        stack.push_back(*it);
      }
      continue;
    }
    if (k->kind == unit) continue;
    if (k->kind == zero) return is_and ? c::False() : c::True();
    keyed.emplace_back(Render(k), k);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  keyed.erase(std::unique(keyed.begin(), keyed.end(),
                          [](const auto& a, const auto& b) {
                            return a.first == b.first;
                          }),
              keyed.end());
  if (keyed.empty()) return is_and ? c::True() : c::False();
  if (keyed.size() == 1) return keyed[0].second;
  std::vector<Constraint> kids;
  kids.reserve(keyed.size());
  for (auto& [key, k] : keyed) kids.push_back(std::move(k));
  return is_and ? c::And(std::move(kids)) : c::Or(std::move(kids));
}

std::set<VarRef> FreeVars(const Constraint& c) {
  std::set<VarRef> out;
  Collect(*c, &out);
  return out;
}

std::optional<bool> Evaluate(const Constraint& c, const Assignment& a) {
  const CNode& n = *c;
  switch (n.kind) {
    case CKind::kTrue:
      return true;
    case CKind::kFalse:
      return false;
    case CKind::kAnd:
    case CKind::kOr: {
      const bool is_and = n.kind == CKind::kAnd;
      bool undecided = false;
      for (const Constraint& k : n.kids) {
        auto v = Evaluate(k, a);
        if (!v) {
          undecided = true;
        } else if (*v != is_and) {
          return !is_and;
        }
      }
      if (undecided) return std::nullopt;
      return is_and;
    }
    default:
      break;
  }
  if (!n.is_atom()) return std::nullopt;
  auto l = EvalTerm(*n.kids[0], a);
  auto r = EvalTerm(*n.kids[1], a);
  if (!l || !r) return std::nullopt;
  switch (n.kind) {
    case CKind::kEq:
      return *l == *r;
    case CKind::kNeq:
      return *l != *r;
    case CKind::kLt:
      return *l < *r;
    case CKind::kLe:
      return *l <= *r;
    case CKind::kGt:
      return *l > *r;
    case CKind::kGe:
      return *l >= *r;
    default:
      return std::nullopt;
  }
}

void CheckWellTyped(const Constraint& c) {
  const CNode& n = *c;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  switch (n.kind) {
    case CKind::kVar:
      require(!n.var.name.empty(), "variable without a name");
      require(n.kids.empty(), "variable with operands");
      return;
    case CKind::kConst:
    case CKind::kTrue:
    case CKind::kFalse:
      require(n.kids.empty(), "literal with operands");
      return;
    case CKind::kAnd:
    case CKind::kOr:
      for (const Constraint& k : n.kids) {
        require(k && !k->is_term(), "connective over a term");
        CheckWellTyped(k);
      }
      return;
    default:
      require(n.kids.size() == 2, "binary node without two operands");
      for (const Constraint& k : n.kids) {
        require(k && k->is_term(), n.is_term() ? "arithmetic over a formula"
                                               : "comparison over a formula");
        CheckWellTyped(k);
      }
  }
}

std::vector<ArrayRef> ArrayRefs::all() const {
  std::vector<ArrayRef> out = writes;
  out.insert(out.end(), reads.begin(), reads.end());
  return out;
}

ArrayRefs CollectArrayRefs(const LoopInfo& info, const FunctionDef& f) {
  ArrayRefs out;
  for (int i : info.loop.body) {
    const Statement& s = f.statements[i];
    if (const auto* x = s.As<ArrayLoadStmt>()) {
      out.reads.push_back(ArrayRef{i, x->base, x->index, ArrayRef::Kind::kRead});
    } else if (const auto* x = s.As<ArrayStoreStmt>()) {
      out.writes.push_back(
          ArrayRef{i, x->base, x->index, ArrayRef::Kind::kWrite});
    }
  }
  return out;
}

Constraint GenContext::N(const std::string& var, int tag) const {
  if (locals->contains(var) || var == loop->iter) return c::Var(var, tag);
  return c::Var(var);
}

Constraint GenContext::N(const Operand& op, int tag) const {
  if (op.is_const()) return c::Const(op.value());
  return N(op.name(), tag);
}

GenContext MakeGenContext(const FunctionDef& f, const LoopInfo& loop,
                          std::vector<LoopInfo> all_loops,
                          const LocalSet& locals, const DefUse& defuse) {
  GenContext ctx;
  ctx.function = &f;
  ctx.loop = &loop;
  ctx.all_loops = std::move(all_loops);
  ctx.locals = &locals;
  ctx.defuse = &defuse;
  return ctx;
}

namespace {

// Disjunction of StmtC over the definitions of `var` reaching `at`; True
// when nothing is known about the value.
Constraint DefsC(const std::string& var, int at, int tag, GenContext& ctx) {
  const std::set<int>& defs = ctx.defuse->Defs(at, var);
  if (defs.empty()) return c::True();
  std::vector<Constraint> alts;
  for (int d : defs) alts.push_back(StmtC(d, tag, ctx));
  return c::Or(std::move(alts));
}

Constraint OperandDefsC(const Operand& op, int at, int tag, GenContext& ctx) {
  if (op.is_const()) return c::True();
  return DefsC(op.name(), at, tag, ctx);
}

CKind BoundKind(CompareOp op) {
  switch (op) {
    case CompareOp::kLt:
      return CKind::kLt;
    case CompareOp::kLe:
      return CKind::kLe;
    case CompareOp::kGt:
      return CKind::kGt;
    case CompareOp::kGe:
      return CKind::kGe;
    default:
      throw std::logic_error("loop condition is not an ordering");
  }
}

}  // namespace

Constraint LoopBounds(const LoopInfo& l, int tag, GenContext& ctx) {
  Constraint it = ctx.N(l.iter, tag);
  std::vector<Constraint> parts{
      c::Ge(it, c::Const(l.lb)),
      c::Cmp(BoundKind(l.cond_op), it, ctx.N(l.ub, tag)),
  };
  if (l.ub.is_local()) parts.push_back(DefsC(l.ub.name(), l.header(), tag, ctx));
  if (l.inc != 1) {
    // iter = lb + inc * n for some trip number n >= 0.
    Constraint n = c::Var(l.iter + kTripSuffix, it->var.tag);
    parts.push_back(c::Ge(n, c::Const(0)));
    parts.push_back(c::Eq(c::Sub(it, c::Const(l.lb)), c::Mul(c::Const(l.inc), n)));
  }
  return c::And(std::move(parts));
}

Constraint StmtC(int stmt, int tag, GenContext& ctx) {
  if (stmt == kEntryDefinition) return c::True();
  auto key = std::make_pair(stmt, tag);
  if (ctx.visited.count(key)) return c::True();
  ctx.visited.insert(key);
  struct Release {
    GenContext& ctx;
    std::pair<int, int> key;
    ~Release() { ctx.visited.erase(key); }
  } release{ctx, key};

  const Statement& s = ctx.function->statements[stmt];
  if (s.Is<IdentityStmt>()) return c::True();
  for (const LoopInfo& l : ctx.all_loops) {
    if (stmt == l.init_idx || stmt == l.upd_idx) return LoopBounds(l, tag, ctx);
  }
  const auto* a = s.As<AssignStmt>();
  if (!a) {
    throw UnsupportedDefinition(
        stmt, "unsupported definition at " + std::to_string(stmt) + ": " +
                  StatementText(s));
  }
  Constraint y = ctx.N(a->target, tag);
  const Expr& e = a->value;
  if (e.is_atom()) {
    if (e.lhs.is_const()) return c::Eq(y, c::Const(e.lhs.value()));
    return c::And({c::Eq(y, ctx.N(e.lhs, tag)),
                   OperandDefsC(e.lhs, stmt, tag, ctx)});
  }
  Constraint l = ctx.N(e.lhs, tag);
  Constraint r = ctx.N(e.rhs, tag);
  Constraint rhs;
  switch (*e.op) {
    case BinaryOp::kAdd:
      rhs = c::Add(l, r);
      break;
    case BinaryOp::kSub:
      rhs = c::Sub(l, r);
      break;
    case BinaryOp::kMul:
      rhs = c::Mul(l, r);
      break;
  }
  return c::And({c::Eq(y, rhs), OperandDefsC(e.lhs, stmt, tag, ctx),
                 OperandDefsC(e.rhs, stmt, tag, ctx)});
}

Constraint DepC(const ArrayRef& w, const ArrayRef& r, GenContext& ctx) {
  ctx.visited.clear();
  const LoopInfo& l = *ctx.loop;
  std::vector<Constraint> parts{
      OperandDefsC(w.index, w.stmt, 0, ctx),
      OperandDefsC(r.index, r.stmt, 1, ctx),
      c::Neq(ctx.N(l.iter, 0), ctx.N(l.iter, 1)),
      c::Eq(ctx.N(w.index, 0), ctx.N(r.index, 1)),
      LoopBounds(l, 0, ctx),
      LoopBounds(l, 1, ctx),
  };
  return c::And(std::move(parts));
}

Constraint LoopC(const ArrayRefs& refs, GenContext& ctx,
                 const AliasFn& may_alias) {
  std::vector<Constraint> alts;
  for (const ArrayRef& w : refs.writes) {
    for (const ArrayRef& r : refs.all()) {
      if (!may_alias(w.base, r.base)) continue;
      alts.push_back(DepC(w, r, ctx));
    }
  }
  if (alts.empty()) return c::False();
  return c::Or(std::move(alts));
}

}  // namespace tajpar
