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

#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "tajpar/annotate.h"
#include "tajpar/solver.h"
#include "test_util.h"

namespace tajpar {
namespace {

using testing::LoadProgram;

Constraint I(int tag) { return c::Var("i", tag); }

TEST(SolveTest, Contradiction) {
  Constraint f = c::And({c::Neq(I(0), I(1)), c::Eq(I(0), I(1))});
  EXPECT_EQ(Solve(f).status, SolveStatus::kUnsat);
}

TEST(SolveTest, SwapWithSmallBounds) {
  // a[i] = a[i - 1]: iteration i^0 writes what iteration i^1 reads.
  std::vector<Constraint> parts;
  for (int t : {0, 1}) {
    parts.push_back(c::Ge(I(t), c::Const(1)));
    parts.push_back(c::Lt(I(t), c::Const(10)));
  }
  parts.push_back(c::Neq(I(0), I(1)));
  parts.push_back(c::Eq(I(0), c::Sub(I(1), c::Const(1))));
  Constraint f = c::And(parts);
  SolveResult r = Solve(f);
  ASSERT_EQ(r.status, SolveStatus::kSat);
  int64_t a = r.model->at(VarRef{"i", 0}), b = r.model->at(VarRef{"i", 1});
  EXPECT_GE(a, 1);
  EXPECT_LT(b, 10);
  EXPECT_EQ(a, b - 1);
  int pairs = 0;
  for (int x = 1; x < 10; ++x) {
    for (int y = 1; y < 10; ++y) pairs += x != y && x == y - 1;
  }
  EXPECT_EQ(pairs, 8);
}

TEST(SolveTest, ParityIsUnsat) {
  Constraint f = c::And({c::Ge(I(0), c::Const(0)), c::Lt(I(0), c::Const(10000)),
                         c::Ge(I(1), c::Const(0)), c::Lt(I(1), c::Const(10000)),
                         c::Eq(c::Mul(c::Const(2), I(0)),
                               c::Add(c::Mul(c::Const(2), I(1)), c::Const(1)))});
  EXPECT_EQ(Solve(f).status, SolveStatus::kUnsat);
  for (int x = 0; x < 64; ++x) {
    for (int y = 0; y < 64; ++y) EXPECT_NE(2 * x, 2 * y + 1);
  }
}

TEST(SolveTest, SymbolicRowsFindDependence) {
  Program p = LoadProgram("corpus/hilbert.taj");
  ProgramResult res = AnalyzeAll(p);
  const LoopReport* outer = nullptr;
  for (const LoopReport& r : res.reports) {
    if (r.header == 4) outer = &r;
  }
  ASSERT_NE(outer, nullptr);
  ASSERT_TRUE(outer->result);
  ASSERT_EQ(outer->result->status, SolveStatus::kSat);
  const Assignment& m = *outer->result->model;
  EXPECT_EQ(Evaluate(*outer->formula, m), true);
  // The witness needs the inner extent to reach past the row stride.
  bool found = false;
  for (const auto& [v, value] : m) {
    if (v.tag == kNoTag) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(SolveTest, TrivialFormulas) {
  EXPECT_EQ(Solve(c::True()).status, SolveStatus::kSat);
  EXPECT_EQ(Solve(c::False()).status, SolveStatus::kUnsat);
  EXPECT_EQ(Solve(c::Or({})).status, SolveStatus::kUnsat);
}

TEST(SolveTest, UnboundedNonlinearIsUnknown) {
  auto x = c::Var("x"), y = c::Var("y");
  Constraint f = c::Eq(c::Mul(x, y), c::Const(7919 * 7907));
  SolveResult r = Solve(f, SolverConfig{});
  EXPECT_NE(r.status, SolveStatus::kUnsat);
  if (r.status == SolveStatus::kSat) {
    EXPECT_EQ(Evaluate(f, *r.model), true);
  }
}

TEST(SolveTest, DisjunctLimit) {
  std::vector<Constraint> parts;
  for (int k = 0; k < 14; ++k) {
    auto v = c::Var("v" + std::to_string(k));
    parts.push_back(c::Or({c::Eq(v, c::Const(0)), c::Eq(v, c::Const(1))}));
  }
  parts.push_back(c::False());
  SolverConfig cfg;
  cfg.max_disjuncts = 10000;
  // 2^14 disjuncts before the False conjunct is noticed, unless normalization
  // removes it first; either way UNSAT must never be claimed wrongly.
  SolveResult r = Solve(c::And(parts), cfg);
  EXPECT_NE(r.status, SolveStatus::kSat);
  parts.pop_back();
  r = Solve(c::And(parts), cfg);
  EXPECT_EQ(r.status, SolveStatus::kUnknown);
  EXPECT_EQ(r.detail, "too many disjuncts");
}

TEST(SolveTest, Timeout) {
  auto x = c::Var("x"), y = c::Var("y");
  std::vector<Constraint> alts;
  for (int k = 0; k < 4000; ++k) {
    alts.push_back(c::And({c::Ge(x, c::Const(0)), c::Le(x, c::Const(59)),
                           c::Ge(y, c::Const(0)), c::Le(y, c::Const(59)),
                           c::Eq(c::Mul(x, y), c::Const(3607 + 2 * k))}));
  }
  SolverConfig cfg;
  cfg.timeout_millis = 1;
  auto t0 = std::chrono::steady_clock::now();
  SolveResult r = Solve(c::Or(alts), cfg);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - t0)
                .count();
  EXPECT_EQ(r.status, SolveStatus::kUnknown);
  EXPECT_EQ(r.detail, "timeout");
  EXPECT_LT(ms, 2000);
}

TEST(SolveTest, ContractViolations) {
  auto bad = std::make_shared<CNode>(CNode{CKind::kLt, {}, 0, {c::True(), c::False()}});
  EXPECT_THROW(Solve(bad), ContractViolation);
  EXPECT_THROW(Solve(nullptr), ContractViolation);
  SolverConfig cfg;
  cfg.enum_bound = 0;
  EXPECT_THROW(Solve(c::True(), cfg), ContractViolation);
}

TEST(SolveTest, EmitOnlyBackendNeverClaimsIndependence) {
  SolverConfig cfg;
  cfg.backend = SolverConfig::Backend::kEmitOnly;
  SolveResult r = Solve(c::False(), cfg);
  EXPECT_EQ(r.status, SolveStatus::kUnknown);
  EXPECT_FALSE(Classify(r));
}

TEST(ClassifyTest, OnlyUnsatIsParallel) {
  EXPECT_TRUE(Classify({SolveStatus::kUnsat, std::nullopt, ""}));
  EXPECT_FALSE(Classify({SolveStatus::kSat, Assignment{}, ""}));
  EXPECT_FALSE(Classify({SolveStatus::kUnknown, std::nullopt, "x"}));
}

TEST(EmitTest, TrueScript) {
  EXPECT_EQ(EmitSmtLib(c::True()), "(assert true)\n(check-sat)\n");
}

TEST(EmitTest, DeclarationsSorted) {
  Constraint f = c::And({c::Lt(c::Var("z"), c::Var("a", 1)), c::Eq(c::Var("a", 0), c::Const(-3))});
  EXPECT_EQ(EmitSmtLib(f),
            "(declare-const a_0 Int)\n(declare-const a_1 Int)\n(declare-const z Int)\n"
            "(assert (and (< z a_1) (= a_0 (- 3))))\n(check-sat)\n");
}

TEST(EmitTest, MangledCollisionRejected) {
  Constraint f = c::Eq(c::Var("x", 0), c::Var("x_0"));
  EXPECT_THROW(EmitSmtLib(f), ContractViolation);
}

// A random formula kept in a plain form so brute force does not go through
// the library's evaluator.
struct Atom {
  std::vector<int64_t> coef;  // per variable
  int64_t k = 0;
  int p = -1, q = -1;  // optional product term coef_pq * x_p * x_q
  int64_t coef_pq = 0;
  CKind op = CKind::kEq;
};

struct RandomCase {
  int vars = 0;
  std::vector<std::pair<int64_t, int64_t>> dom;
  std::vector<std::vector<Atom>> dnf;
  bool linear = true;

  static bool Cmp(CKind op, int64_t l) {
    switch (op) {
      case CKind::kEq: return l == 0;
      case CKind::kNeq: return l != 0;
      case CKind::kLt: return l < 0;
      case CKind::kLe: return l <= 0;
      case CKind::kGt: return l > 0;
      default: return l >= 0;
    }
  }

  bool Holds(const std::vector<int64_t>& x) const {
    for (const auto& conj : dnf) {
      bool all = true;
      for (const Atom& a : conj) {
        int64_t l = a.k;
        for (int v = 0; v < vars; ++v) l += a.coef[v] * x[v];
        if (a.p >= 0) l += a.coef_pq * x[a.p] * x[a.q];
        if (!Cmp(a.op, l)) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  }

  // Returns whether any point of the domain satisfies the formula.
  bool BruteForce() const {
    std::vector<int64_t> x(vars);
    for (int v = 0; v < vars; ++v) x[v] = dom[v].first;
    for (;;) {
      if (Holds(x)) return true;
      int v = 0;
      while (v < vars && x[v] == dom[v].second) {
        x[v] = dom[v].first;
        ++v;
      }
      if (v == vars) return false;
      ++x[v];
    }
  }

  Constraint Build() const {
    std::vector<Constraint> top;
    for (int v = 0; v < vars; ++v) {
      top.push_back(c::Ge(Var(v), c::Const(dom[v].first)));
      top.push_back(c::Le(Var(v), c::Const(dom[v].second)));
    }
    std::vector<Constraint> alts;
    for (const auto& conj : dnf) {
      std::vector<Constraint> atoms;
      for (const Atom& a : conj) {
        Constraint lhs = c::Const(a.k);
        for (int v = 0; v < vars; ++v) {
          if (a.coef[v]) lhs = c::Add(lhs, c::Mul(c::Const(a.coef[v]), Var(v)));
        }
        if (a.p >= 0) {
          lhs = c::Add(lhs, c::Mul(c::Const(a.coef_pq), c::Mul(Var(a.p), Var(a.q))));
        }
        atoms.push_back(c::Cmp(a.op, lhs, c::Const(0)));
      }
      alts.push_back(c::And(atoms));
    }
    top.push_back(c::Or(alts));
    return c::And(top);
  }

  static Constraint Var(int v) { return c::Var("x" + std::to_string(v % 2), v / 2); }
};

RandomCase MakeCase(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const CKind kOps[] = {CKind::kEq, CKind::kNeq, CKind::kLt,
                               CKind::kLe, CKind::kGt, CKind::kGe};
  RandomCase rc;
  rc.vars = pick(1, 4);
  for (int v = 0; v < rc.vars; ++v) {
    int lo = pick(-16, 16);
    int hi = std::min(16, lo + pick(0, 10));
    rc.dom.emplace_back(lo, hi);
  }
  int n = pick(1, 3);
  for (int d = 0; d < n; ++d) {
    std::vector<Atom> conj;
    int m = pick(1, 4);
    for (int a = 0; a < m; ++a) {
      Atom at;
      for (int v = 0; v < rc.vars; ++v) at.coef.push_back(pick(0, 2) ? pick(-8, 8) : 0);
      at.k = pick(-16, 16);
      at.op = kOps[pick(0, 5)];
      if (pick(0, 5) == 0) {
        at.p = pick(0, rc.vars - 1);
        at.q = pick(0, rc.vars - 1);
        at.coef_pq = pick(-8, 8);
        if (at.coef_pq == 0) at.coef_pq = 1;
        rc.linear = false;
      }
      conj.push_back(at);
    }
    rc.dnf.push_back(conj);
  }
  return rc;
}

TEST(SolverFuzzTest, AgreesWithBruteForce) {
  std::mt19937 rng(2026);
  int sat = 0, unsat = 0, unknown = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    RandomCase rc = MakeCase(rng);
    Constraint f = rc.Build();
    SolveResult r = Solve(f);
    bool expected = rc.BruteForce();
    switch (r.status) {
      case SolveStatus::kSat: {
        ++sat;
        ASSERT_TRUE(r.model.has_value());
        EXPECT_EQ(Evaluate(f, *r.model), true);
        std::vector<int64_t> x(rc.vars);
        for (int v = 0; v < rc.vars; ++v) {
          x[v] = r.model->at(VarRef{"x" + std::to_string(v % 2), v / 2});
        }
        EXPECT_TRUE(rc.Holds(x)) << Render(f);
        EXPECT_TRUE(expected);
        break;
      }
      case SolveStatus::kUnsat:
        ++unsat;
        EXPECT_FALSE(expected) << Render(f);
        break;
      case SolveStatus::kUnknown:
        ++unknown;
        EXPECT_FALSE(rc.linear) << "linear formula left undecided: " << Render(f);
        break;
    }
    // Same input, same verdict.
    EXPECT_EQ(Solve(f).status, r.status);
  }
  EXPECT_GT(sat, 100);
  EXPECT_GT(unsat, 100);
  RecordProperty("unknown", unknown);
}

// Unbounded linear systems exercise the exact elimination path alone.
TEST(SolverFuzzTest, UnboundedLinearSystems) {
  std::mt19937 rng(99);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int trial = 0; trial < 400; ++trial) {
    int vars = pick(1, 3);
    std::vector<Constraint> atoms;
    for (int a = 0; a < pick(1, 4); ++a) {
      Constraint lhs = c::Const(pick(-16, 16));
      for (int v = 0; v < vars; ++v) {
        lhs = c::Add(lhs, c::Mul(c::Const(pick(-8, 8)), c::Var("y" + std::to_string(v))));
      }
      atoms.push_back(pick(0, 1) ? c::Eq(lhs, c::Const(0)) : c::Le(lhs, c::Const(0)));
    }
    Constraint f = c::And(atoms);
    SolveResult r = Solve(f);
    ASSERT_NE(r.status, SolveStatus::kUnknown) << Render(f);
    if (r.status == SolveStatus::kSat) {
      EXPECT_EQ(Evaluate(f, *r.model), true);
      continue;
    }
    // No witness in a generous box either.
    std::vector<int64_t> y(vars, -24);
    for (;;) {
      Assignment a;
      for (int v = 0; v < vars; ++v) a[VarRef{"y" + std::to_string(v)}] = y[v];
      ASSERT_NE(Evaluate(f, a), true) << Render(f);
      int v = 0;
      while (v < vars && y[v] == 24) y[v++] = -24;
      if (v == vars) break;
      ++y[v];
    }
  }
}

}  // namespace
}  // namespace tajpar
