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

#include "tajpar/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "omega.h"

namespace tajpar {

namespace {

using omega::CheckedAdd;
using omega::CheckedMul;
using omega::Deadline;
using omega::i128;
using omega::Row;
using omega::System;

// Sorted multiset of variable ids; empty for the constant monomial.
using Mono = std::vector<int>;
using Poly = std::map<Mono, i128>;

struct TooLarge {};

void AddTo(Poly* p, const Poly& q, i128 scale = 1) {
  for (const auto& [m, k] : q) {
    i128 v = CheckedAdd((*p)[m], CheckedMul(k, scale));
    if (v == 0) {
      p->erase(m);
    } else {
      (*p)[m] = v;
    }
  }
}

Poly Times(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ka] : a) {
    for (const auto& [mb, kb] : b) {
      Mono m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      std::sort(m.begin(), m.end());
      AddTo(&out, Poly{{m, CheckedMul(ka, kb)}});
    }
  }
  return out;
}

Poly Constant(i128 v) {
  if (v == 0) return {};
  return Poly{{Mono{}, v}};
}

Poly Variable(int id) { return Poly{{Mono{id}, 1}}; }

size_t Degree(const Poly& p) {
  size_t d = 0;
  for (const auto& [m, k] : p) d = std::max(d, m.size());
  return d;
}

bool IsConstant(const Poly& p) { return Degree(p) == 0; }

i128 ConstantPart(const Poly& p) {
  auto it = p.find(Mono{});
  return it == p.end() ? 0 : it->second;
}

Poly Substitute(const Poly& p, int var, const Poly& value) {
  Poly out;
  for (const auto& [m, k] : p) {
    Mono rest;
    int power = 0;
    for (int v : m) {
      if (v == var) {
        ++power;
      } else {
        rest.push_back(v);
      }
    }
    Poly term{{rest, k}};
    for (int i = 0; i < power; ++i) term = Times(term, value);
    AddTo(&out, term);
  }
  return out;
}

bool Contains(const Mono& m, int var) {
  return std::find(m.begin(), m.end(), var) != m.end();
}

// p == 0 when `eq`, otherwise p >= 0.
struct PAtom {
  Poly p;
  bool eq = false;
};
using Conj = std::vector<PAtom>;

class Lowering {
 public:
  Lowering(const std::map<VarRef, int>& ids, int64_t cap)
      : ids_(ids), cap_(cap) {}

  Poly Term(const CNode& n) const {
    switch (n.kind) {
      case CKind::kVar:
        return Variable(ids_.at(n.var));
      case CKind::kConst:
        return Constant(n.value);
      case CKind::kAdd: {
        Poly p = Term(*n.kids[0]);
        AddTo(&p, Term(*n.kids[1]));
        return p;
      }
      case CKind::kSub: {
        Poly p = Term(*n.kids[0]);
        AddTo(&p, Term(*n.kids[1]), -1);
        return p;
      }
      case CKind::kMul:
        return Times(Term(*n.kids[0]), Term(*n.kids[1]));
      default:
        throw ContractViolation("formula used as a term");
    }
  }

  std::vector<Conj> Dnf(const CNode& n) const {
    switch (n.kind) {
      case CKind::kTrue:
        return {Conj{}};
      case CKind::kFalse:
        return {};
      case CKind::kOr: {
        std::vector<Conj> out;
        for (const Constraint& k : n.kids) {
          for (Conj& c : Dnf(*k)) {
            out.push_back(std::move(c));
            if (static_cast<int64_t>(out.size()) > cap_) throw TooLarge{};
          }
        }
        return out;
      }
      case CKind::kAnd: {
        std::vector<Conj> out{Conj{}};
        for (const Constraint& k : n.kids) {
          std::vector<Conj> d = Dnf(*k);
          if (d.empty()) return {};
          if (static_cast<int64_t>(out.size() * d.size()) > cap_) {
            throw TooLarge{};
          }
          std::vector<Conj> next;
          for (const Conj& a : out) {
            for (const Conj& b : d) {
              Conj c = a;
              c.insert(c.end(), b.begin(), b.end());
              next.push_back(std::move(c));
            }
          }
          out = std::move(next);
        }
        return out;
      }
      default:
        break;
    }
    Poly l = Term(*n.kids[0]);
    Poly r = Term(*n.kids[1]);
    Poly diff = l;
    AddTo(&diff, r, -1);   // l - r
    Poly neg;
    AddTo(&neg, diff, -1);  // r - l
    auto atom = [](Poly p, bool eq) -> std::vector<Conj> {
      if (IsConstant(p)) {
        i128 v = ConstantPart(p);
        bool holds = eq ? v == 0 : v >= 0;
        return holds ? std::vector<Conj>{Conj{}} : std::vector<Conj>{};
      }
      return {Conj{PAtom{std::move(p), eq}}};
    };
    auto minus_one = [](Poly p) {
      AddTo(&p, Constant(-1));
      return p;
    };
    switch (n.kind) {
      case CKind::kEq:
        return atom(diff, true);
      case CKind::kLe:
        return atom(neg, false);
      case CKind::kGe:
        return atom(diff, false);
      case CKind::kLt:
        return atom(minus_one(neg), false);
      case CKind::kGt:
        return atom(minus_one(diff), false);
      case CKind::kNeq: {
        std::vector<Conj> out = atom(minus_one(diff), false);
        for (Conj& c : atom(minus_one(neg), false)) out.push_back(std::move(c));
        return out;
      }
      default:
        throw ContractViolation("unexpected node in formula");
    }
  }

 private:
  const std::map<VarRef, int>& ids_;
  int64_t cap_;
};

struct ConjResult {
  SolveStatus status = SolveStatus::kUnknown;
  std::vector<int64_t> values;  // indexed by variable id, when kSat
  std::string detail;
};

Row ToRow(const Poly& p, int vars) {
  Row r{std::vector<i128>(vars, 0), 0};
  for (const auto& [m, k] : p) {
    if (m.empty()) {
      r.c = k;
    } else {
      r.a[m[0]] = k;
    }
  }
  return r;
}

struct Product {
  int w, a, b;  // w == a * b
};

struct Bounds {
  std::optional<int64_t> lo, hi;
  bool finite() const { return lo && hi; }
};

constexpr int64_t kBig = int64_t{1} << 40;

class ConjSolver {
 public:
  ConjSolver(int vars, const SolverConfig& cfg, const Deadline& deadline)
      : vars_(vars), cfg_(cfg), deadline_(deadline) {}

  ConjResult Run(Conj atoms) {
    bool linear = std::all_of(atoms.begin(), atoms.end(),
                              [](const PAtom& a) { return Degree(a.p) <= 1; });
    if (linear) return Linear(atoms);
    std::vector<std::pair<int, Poly>> substs;
    if (!Eliminate(&atoms, &substs)) return {SolveStatus::kUnsat, {}, ""};
    ConjResult r;
    linear = std::all_of(atoms.begin(), atoms.end(),
                         [](const PAtom& a) { return Degree(a.p) <= 1; });
    r = linear ? Linear(atoms) : Nonlinear(atoms);
    if (r.status != SolveStatus::kSat) return r;
    for (auto it = substs.rbegin(); it != substs.rend(); ++it) {
      std::optional<int64_t> v = EvalPoly(it->second, r.values);
      if (!v) return {SolveStatus::kUnknown, {}, "model value out of range"};
      r.values[it->first] = *v;
    }
    return r;
  }

 private:
  static std::optional<int64_t> EvalPoly(const Poly& p,
                                         const std::vector<int64_t>& x) {
    i128 sum = 0;
    try {
      for (const auto& [m, k] : p) {
        i128 t = k;
        for (int v : m) t = CheckedMul(t, x[v]);
        sum = CheckedAdd(sum, t);
      }
    } catch (const omega::Overflow&) {
      return std::nullopt;
    }
    if (sum < std::numeric_limits<int64_t>::min() ||
        sum > std::numeric_limits<int64_t>::max()) {
      return std::nullopt;
    }
    return static_cast<int64_t>(sum);
  }

  ConjResult Linear(const Conj& atoms) {
    System s;
    s.vars = vars_;
    for (const PAtom& a : atoms) {
      (a.eq ? s.eqs : s.geqs).push_back(ToRow(a.p, vars_));
    }
    return Finish(s, vars_);
  }

  ConjResult Finish(const System& s, int keep) {
    if (!omega::Satisfiable(s, deadline_)) {
      return {SolveStatus::kUnsat, {}, ""};
    }
    auto model = omega::FindModel(s, deadline_);
    if (!model) return {SolveStatus::kUnknown, {}, "model out of range"};
    model->resize(keep);
    return {SolveStatus::kSat, std::move(*model), ""};
  }

  // Removes variables defined by unit equalities, substituting their
  // definitions into the remaining atoms. False when a contradiction shows.
  bool Eliminate(Conj* atoms, std::vector<std::pair<int, Poly>>* substs) {
    for (;;) {
      std::map<int, int> occurrences;
      for (const PAtom& a : *atoms) {
        std::set<int> seen;
        for (const auto& [m, k] : a.p) seen.insert(m.begin(), m.end());
        for (int v : seen) ++occurrences[v];
      }
      int best_var = -1, best_atom = -1, best_count = 0;
      for (size_t i = 0; i < atoms->size(); ++i) {
        const PAtom& a = (*atoms)[i];
        if (!a.eq) continue;
        for (const auto& [m, k] : a.p) {
          if (m.size() != 1 || (k != 1 && k != -1)) continue;
          const int v = m[0];
          bool only_linear = true;
          for (const auto& [m2, k2] : a.p) {
            if (m2.size() > 1 && Contains(m2, v)) only_linear = false;
          }
          if (!only_linear) continue;
          if (best_var < 0 || occurrences[v] < best_count ||
              (occurrences[v] == best_count && v < best_var)) {
            best_var = v;
            best_atom = static_cast<int>(i);
            best_count = occurrences[v];
          }
        }
      }
      if (best_var < 0) return true;
      const Poly& p = (*atoms)[best_atom].p;
      const i128 k = p.at(Mono{best_var});
      // k * x + rest == 0  =>  x == -k * rest
      Poly value;
      for (const auto& [m, c] : p) {
        if (m == Mono{best_var}) continue;
        AddTo(&value, Poly{{m, c}}, -k);
      }
      atoms->erase(atoms->begin() + best_atom);
      Conj next;
      for (PAtom& a : *atoms) {
        Poly q = Substitute(a.p, best_var, value);
        if (IsConstant(q)) {
          i128 v = ConstantPart(q);
          if (a.eq ? v != 0 : v < 0) return false;
          continue;
        }
        next.push_back(PAtom{std::move(q), a.eq});
      }
      *atoms = std::move(next);
      for (auto& [v, q] : *substs) q = Substitute(q, best_var, value);
      substs->emplace_back(best_var, std::move(value));
    }
  }

  int NewVar() { return next_var_++; }

  int ProductVar(int a, int b) {
    if (a > b) std::swap(a, b);
    auto key = std::make_pair(a, b);
    auto it = product_memo_.find(key);
    if (it != product_memo_.end()) return it->second;
    int w = NewVar();
    products_.push_back(Product{w, a, b});
    product_memo_[key] = w;
    return w;
  }

  int MonoVar(const Mono& m) {
    int acc = m[0];
    for (size_t i = 1; i < m.size(); ++i) acc = ProductVar(acc, m[i]);
    return acc;
  }

  // Rewrites nonlinear monomials over fresh product variables. A variable
  // shared by several quadratic monomials of one atom is factored out so
  // that v*x - v*y becomes v*t with t == x - y.
  Conj Linearize(const Conj& atoms) {
    Conj out;
    std::map<std::pair<int, Poly>, int> factor_memo;
    for (const PAtom& atom : atoms) {
      Poly p = atom.p;
      std::map<int, int> count;
      for (const auto& [m, k] : p) {
        if (m.size() != 2) continue;
        ++count[m[0]];
        if (m[1] != m[0]) ++count[m[1]];
      }
      int v = -1, best = 1;
      for (const auto& [var, n] : count) {
        if (n > best) {
          v = var;
          best = n;
        }
      }
      if (v >= 0) {
        Poly factor;
        for (auto it = p.begin(); it != p.end();) {
          const Mono& m = it->first;
          if (m.size() == 2 && Contains(m, v)) {
            int other = m[0] == v ? m[1] : m[0];
            AddTo(&factor, Poly{{Mono{other}, it->second}});
            it = p.erase(it);
          } else {
            ++it;
          }
        }
        auto key = std::make_pair(v, factor);
        int t;
        auto it = factor_memo.find(key);
        if (it != factor_memo.end()) {
          t = it->second;
        } else {
          t = NewVar();
          factor_memo[key] = t;
          Poly def = Variable(t);
          AddTo(&def, factor, -1);
          out.push_back(PAtom{std::move(def), true});
        }
        AddTo(&p, Variable(ProductVar(v, t)));
      }
      Poly lin;
      for (const auto& [m, k] : p) {
        if (m.size() <= 1) {
          AddTo(&lin, Poly{{m, k}});
        } else {
          AddTo(&lin, Poly{{Mono{MonoVar(m)}, k}});
        }
      }
      out.push_back(PAtom{std::move(lin), atom.eq});
    }
    return out;
  }

  static System Widen(const System& s, int vars) {
    System out = s;
    out.vars = vars;
    for (Row& r : out.eqs) r.a.resize(vars, 0);
    for (Row& r : out.geqs) r.a.resize(vars, 0);
    return out;
  }

  Bounds BoundsOf(const System& s, int x) {
    Bounds b;
    System probe = s;
    probe.UpperBound(x, -kBig);
    if (!omega::Satisfiable(probe, deadline_)) {
      b.lo = omega::MinFeasible(s, x, -kBig, deadline_);
    }
    probe = s;
    probe.LowerBound(x, kBig);
    if (!omega::Satisfiable(probe, deadline_)) {
      b.hi = omega::MaxFeasible(s, x, kBig, deadline_);
    }
    return b;
  }

  // Valid linear consequences of w == a * b under the given bounds.
  static void AddMcCormick(System* s, const Product& p, const Bounds& ba,
                           const Bounds& bb) {
    auto lemma = [&](i128 ka, i128 kb, i128 kw, i128 c) {
      Row r = s->NewRow();
      r.a[p.a] = CheckedAdd(r.a[p.a], ka);
      r.a[p.b] = CheckedAdd(r.a[p.b], kb);
      r.a[p.w] = CheckedAdd(r.a[p.w], kw);
      r.c = c;
      s->geqs.push_back(std::move(r));
    };
    // (a - aL)(b - bL) >= 0  =>  w - bL*a - aL*b + aL*bL >= 0, and so on.
    if (ba.lo && bb.lo) {
      lemma(-i128{*bb.lo}, -i128{*ba.lo}, 1, CheckedMul(*ba.lo, *bb.lo));
    }
    if (ba.hi && bb.hi) {
      lemma(-i128{*bb.hi}, -i128{*ba.hi}, 1, CheckedMul(*ba.hi, *bb.hi));
    }
    if (ba.lo && bb.hi) {
      lemma(i128{*bb.hi}, i128{*ba.lo}, -1, -CheckedMul(*ba.lo, *bb.hi));
    }
    if (ba.hi && bb.lo) {
      lemma(i128{*bb.lo}, i128{*ba.hi}, -1, -CheckedMul(*ba.hi, *bb.lo));
    }
    if (ba.lo && ba.hi && *ba.lo == *ba.hi) {
      Row r = s->NewRow();
      r.a[p.w] = 1;
      r.a[p.b] = CheckedAdd(r.a[p.b], -i128{*ba.lo});
      s->eqs.push_back(std::move(r));
    }
    if (bb.lo && bb.hi && *bb.lo == *bb.hi) {
      Row r = s->NewRow();
      r.a[p.w] = 1;
      r.a[p.a] = CheckedAdd(r.a[p.a], -i128{*bb.lo});
      s->eqs.push_back(std::move(r));
    }
  }

  std::vector<int> Operands() const {
    std::set<int> out;
    for (const Product& p : products_) {
      out.insert(p.a);
      out.insert(p.b);
    }
    return {out.begin(), out.end()};
  }

  ConjResult Nonlinear(const Conj& atoms) {
    next_var_ = vars_;
    products_.clear();
    product_memo_.clear();
    Conj lin = Linearize(atoms);
    System s;
    s.vars = next_var_;
    for (const PAtom& a : lin) {
      (a.eq ? s.eqs : s.geqs).push_back(ToRow(a.p, next_var_));
    }
    return Branch(s, 0);
  }

  ConjResult Branch(System s, int depth) {
    if (!omega::Satisfiable(s, deadline_)) return {SolveStatus::kUnsat, {}, ""};
    std::map<int, Bounds> bounds;
    for (int round = 0; round < 2; ++round) {
      std::map<int, Bounds> next;
      for (int x : Operands()) next[x] = BoundsOf(s, x);
      if (round == 0 && depth < 2 * static_cast<int>(products_.size())) {
        for (const auto& [x, b] : next) {
          if (b.lo || b.hi) continue;
          return Split(s, x, depth);
        }
      }
      bool changed = false;
      for (const auto& [x, b] : next) {
        auto it = bounds.find(x);
        if (it == bounds.end() || it->second.lo != b.lo ||
            it->second.hi != b.hi) {
          changed = true;
        }
      }
      bounds = std::move(next);
      if (!changed) break;
      for (const Product& p : products_) {
        AddMcCormick(&s, p, bounds[p.a], bounds[p.b]);
      }
      if (!omega::Satisfiable(s, deadline_)) {
        return {SolveStatus::kUnsat, {}, ""};
      }
    }
    return Enumerate(s, bounds);
  }

  ConjResult Split(const System& s, int x, int depth) {
    System neg = s, zero = s, pos = s;
    neg.UpperBound(x, -1);
    zero.FixVar(x, 0);
    pos.LowerBound(x, 1);
    bool unknown = false;
    std::string detail;
    for (System* branch : {&zero, &pos, &neg}) {
      ConjResult r = Branch(*branch, depth + 1);
      if (r.status == SolveStatus::kSat) return r;
      if (r.status == SolveStatus::kUnknown) {
        unknown = true;
        detail = r.detail;
      }
    }
    if (unknown) return {SolveStatus::kUnknown, {}, detail};
    return {SolveStatus::kUnsat, {}, ""};
  }

  std::vector<int> Cover(const std::map<int, Bounds>& bounds) const {
    std::vector<bool> covered(products_.size(), false);
    std::vector<int> out;
    for (;;) {
      std::map<int, int> hits;
      for (size_t i = 0; i < products_.size(); ++i) {
        if (covered[i]) continue;
        ++hits[products_[i].a];
        ++hits[products_[i].b];
      }
      if (hits.empty()) return out;
      auto width = [&](int x) -> long double {
        const Bounds& b = bounds.at(x);
        if (!b.finite()) return std::numeric_limits<long double>::infinity();
        return static_cast<long double>(*b.hi) - *b.lo + 1;
      };
      int pick = -1;
      for (const auto& [x, n] : hits) {
        if (pick < 0 || width(x) < width(pick) ||
            (width(x) == width(pick) && n > hits[pick])) {
          pick = x;
        }
      }
      out.push_back(pick);
      for (size_t i = 0; i < products_.size(); ++i) {
        if (products_[i].a == pick || products_[i].b == pick) covered[i] = true;
      }
    }
  }

  static std::vector<int64_t> Window(const Bounds& b, int64_t count) {
    std::vector<int64_t> out;
    auto inside = [&](int64_t v) {
      return (!b.lo || v >= *b.lo) && (!b.hi || v <= *b.hi);
    };
    if (b.lo && *b.lo >= 0) {
      for (int64_t v = *b.lo; inside(v) && static_cast<int64_t>(out.size()) < count; ++v) {
        out.push_back(v);
      }
    } else if (b.hi && *b.hi <= 0) {
      for (int64_t v = *b.hi; inside(v) && static_cast<int64_t>(out.size()) < count; --v) {
        out.push_back(v);
      }
    } else {
      for (int64_t d = 0; static_cast<int64_t>(out.size()) < count; ++d) {
        bool any = false;
        if (inside(d)) {
          out.push_back(d);
          any = true;
        }
        if (d != 0 && inside(-d) && static_cast<int64_t>(out.size()) < count) {
          out.push_back(-d);
          any = true;
        }
        if (!any && !inside(d + 1) && !inside(-d - 1)) break;
      }
    }
    return out;
  }

  ConjResult Enumerate(const System& s, const std::map<int, Bounds>& bounds) {
    std::vector<int> cover = Cover(bounds);
    long double total = 1;
    bool exhaustive = true;
    for (int x : cover) {
      const Bounds& b = bounds.at(x);
      if (!b.finite()) {
        exhaustive = false;
        break;
      }
      total *= static_cast<long double>(*b.hi) - *b.lo + 1;
    }
    if (exhaustive && total > cfg_.enum_bound) exhaustive = false;
    std::vector<std::vector<int64_t>> values;
    if (exhaustive) {
      for (int x : cover) {
        const Bounds& b = bounds.at(x);
        std::vector<int64_t> all;
        for (int64_t v = *b.lo; v <= *b.hi; ++v) all.push_back(v);
        values.push_back(std::move(all));
      }
    } else {
      const int64_t per = std::max<int64_t>(
          1, static_cast<int64_t>(std::floor(std::pow(
                 static_cast<long double>(cfg_.enum_bound),
                 1.0L / static_cast<long double>(cover.size())))));
      for (int x : cover) values.push_back(Window(bounds.at(x), per));
    }
    std::vector<size_t> pos(cover.size(), 0);
    for (const auto& v : values) {
      if (v.empty()) {
        if (exhaustive) return {SolveStatus::kUnsat, {}, ""};
        return {SolveStatus::kUnknown, {}, "nonlinear search window empty"};
      }
    }
    for (;;) {
      deadline_.Check();
      System t = s;
      std::map<int, int64_t> fixed;
      for (size_t i = 0; i < cover.size(); ++i) {
        fixed[cover[i]] = values[i][pos[i]];
        t.FixVar(cover[i], values[i][pos[i]]);
      }
      for (const Product& p : products_) {
        Row r = t.NewRow();
        r.a[p.w] = 1;
        if (auto it = fixed.find(p.a); it != fixed.end()) {
          r.a[p.b] = CheckedAdd(r.a[p.b], -i128{it->second});
        } else {
          r.a[p.a] = CheckedAdd(r.a[p.a], -i128{fixed.at(p.b)});
        }
        t.eqs.push_back(std::move(r));
      }
      if (omega::Satisfiable(t, deadline_)) {
        ConjResult r = Finish(t, vars_);
        if (r.status == SolveStatus::kSat) return r;
      }
      size_t i = 0;
      while (i < pos.size() && ++pos[i] == values[i].size()) pos[i++] = 0;
      if (i == pos.size()) break;
    }
    if (exhaustive) return {SolveStatus::kUnsat, {}, ""};
    return {SolveStatus::kUnknown, {}, "nonlinear atoms over unbounded domain"};
  }

  int vars_;
  const SolverConfig& cfg_;
  const Deadline& deadline_;
  int next_var_ = 0;
  std::vector<Product> products_;
  std::map<std::pair<int, int>, int> product_memo_;
};

}  // namespace

std::string_view StatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::kSat:
      return "sat";
    case SolveStatus::kUnsat:
      return "unsat";
    case SolveStatus::kUnknown:
      return "unknown";
  }
  return "?";
}

SolveResult Solve(const Constraint& c, const SolverConfig& cfg) {
  if (cfg.enum_bound < 1) throw ContractViolation("enum_bound must be >= 1");
  if (!c) throw ContractViolation("null formula");
  try {
    CheckWellTyped(c);
  } catch (const std::invalid_argument& e) {
    throw ContractViolation(e.what());
  }
  if (cfg.backend == SolverConfig::Backend::kEmitOnly) {
    return {SolveStatus::kUnknown, std::nullopt, "emit-only backend"};
  }
  Constraint n = Normalize(c);
  std::set<VarRef> free = FreeVars(n);
  std::vector<VarRef> names(free.begin(), free.end());
  std::map<VarRef, int> ids;
  for (size_t i = 0; i < names.size(); ++i) ids[names[i]] = static_cast<int>(i);

  Deadline deadline(cfg.timeout_millis);
  std::vector<Conj> dnf;
  try {
    dnf = Lowering(ids, cfg.max_disjuncts).Dnf(*n);
  } catch (const TooLarge&) {
    return {SolveStatus::kUnknown, std::nullopt, "too many disjuncts"};
  } catch (const omega::Overflow&) {
    return {SolveStatus::kUnknown, std::nullopt, "coefficient overflow"};
  }
  std::string detail;
  for (Conj& conj : dnf) {
    ConjResult r;
    try {
      r = ConjSolver(static_cast<int>(names.size()), cfg, deadline)
              .Run(std::move(conj));
    } catch (const omega::Timeout&) {
      return {SolveStatus::kUnknown, std::nullopt, "timeout"};
    } catch (const omega::Overflow&) {
      r = {SolveStatus::kUnknown, {}, "coefficient overflow"};
    }
    if (r.status == SolveStatus::kSat) {
      Assignment model;
      for (size_t i = 0; i < names.size(); ++i) model[names[i]] = r.values[i];
      if (Evaluate(c, model) == std::optional<bool>(true)) {
        return {SolveStatus::kSat, std::move(model), ""};
      }
      r = {SolveStatus::kUnknown, {}, "model failed verification"};
    }
    if (r.status == SolveStatus::kUnknown && detail.empty()) detail = r.detail;
  }
  if (!detail.empty()) return {SolveStatus::kUnknown, std::nullopt, detail};
  return {SolveStatus::kUnsat, std::nullopt, ""};
}

std::string EmitSmtLib(const Constraint& c) {
  if (!c) throw ContractViolation("null formula");
  std::map<std::string, VarRef> symbols;
  for (const VarRef& v : FreeVars(c)) {
    auto [it, inserted] = symbols.emplace(v.Mangled(), v);
    if (!inserted && it->second != v) {
      throw ContractViolation("variable name collision on " + v.Mangled());
    }
  }
  std::string out;
  for (const auto& [name, v] : symbols) {
    out += "(declare-const " + name + " Int)\n";
  }
  out += "(assert " + Render(c) + ")\n";
  out += "(check-sat)\n";
  return out;
}

bool Classify(const SolveResult& r) { return r.status == SolveStatus::kUnsat; }

}  // namespace tajpar
