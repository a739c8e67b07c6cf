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

#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "tajpar/cfg.h"
#include "test_util.h"

namespace tajpar {
namespace {

using testing::AllProgramFiles;
using testing::LoadProgram;

std::vector<int> Sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST(CfgTest, SaxpyHeaderSuccessors) {
  Program p = LoadProgram("corpus/saxpy.taj");
  Cfg g = BuildCfg(p.functions.begin()->second);
  EXPECT_EQ(Sorted(g.successors(3)), (std::vector<int>{4, 9}));
  EXPECT_EQ(Sorted(g.successors(8)), (std::vector<int>{3}));
  EXPECT_TRUE(g.successors(9).empty());
}

TEST(CfgTest, StraightLineIsAChain) {
  Program p = ParseProgram(R"(func f(n: int) : int {
  0: n := param 0
  1: $a = n + 1
  2: $b = $a * 2
  3: return $b
})");
  const FunctionDef& f = p.functions.begin()->second;
  Cfg g = BuildCfg(f);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(g.successors(i), (std::vector<int>{i + 1}));
  }
  EXPECT_TRUE(FindNaturalLoops(g).empty());
}

TEST(CfgTest, LoneReturn) {
  Program p = ParseProgram("func f() : void {\n  0: return\n}");
  Cfg g = BuildCfg(p.functions.begin()->second);
  EXPECT_EQ(g.size(), 1);
  EXPECT_TRUE(g.successors(0).empty());
  EXPECT_TRUE(g.predecessors(0).empty());
}

TEST(CfgTest, SaxpyLoop) {
  Program p = LoadProgram("corpus/saxpy.taj");
  Cfg g = BuildCfg(p.functions.begin()->second);
  auto loops = FindNaturalLoops(g);
  ASSERT_EQ(loops.size(), 1u);
  EXPECT_EQ(loops[0].header, 3);
  EXPECT_EQ(loops[0].back_jump_source, 8);
  EXPECT_EQ(loops[0].body, (std::vector<int>{3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(loops[0].exits, (std::vector<std::pair<int, int>>{{3, 9}}));
}

TEST(CfgTest, NestedLoopsReportedSeparately) {
  Program p = LoadProgram("corpus/matmul2d.taj");
  Cfg g = BuildCfg(p.functions.begin()->second);
  auto loops = FindNaturalLoops(g);
  ASSERT_EQ(loops.size(), 3u);
  std::set<int> headers;
  for (const NaturalLoop& l : loops) headers.insert(l.header);
  EXPECT_EQ(headers, (std::set<int>{5, 7, 10}));
}

// Random control flow over two locals and one parameter.
FunctionDef RandomFunction(std::mt19937& rng) {
  FunctionDef f;
  f.name = "r";
  f.params = {Param{"p", ValueKind::kInt}};
  const int n = std::uniform_int_distribution<int>(3, 22)(rng);
  f.locals = {LocalVarEntry{"x", ValueKind::kInt, 1, 0, n},
              LocalVarEntry{"y", ValueKind::kInt, 2, 0, n}};
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const char* vars[] = {"x", "y", "p"};
  for (int i = 0; i < n; ++i) {
    Statement s;
    s.index = i;
    int k = i == n - 1 ? 9 : pick(0, 8);
    if (k <= 3) {
      s.kind = AssignStmt{vars[pick(0, 1)],
                          Expr::Binary(BinaryOp::kAdd,
                                       Operand::Local(vars[pick(0, 2)]),
                                       Operand::Const(pick(-2, 2)))};
    } else if (k <= 5) {
      s.kind = IfGotoStmt{CondExpr{CompareOp::kLt, Operand::Local(vars[pick(0, 2)]),
                                   Operand::Local(vars[pick(0, 2)])},
                          pick(0, n - 1)};
    } else if (k <= 6) {
      s.kind = GotoStmt{pick(0, n - 1)};
    } else if (k <= 7) {
      s.kind = AssignStmt{"$t", Expr::Atom(Operand::Local(vars[pick(0, 2)]))};
    } else {
      s.kind = ReturnStmt{};
    }
    f.statements.push_back(std::move(s));
  }
  return f;
}

std::vector<bool> ReachableAvoiding(const Cfg& g, int avoid) {
  std::vector<bool> seen(g.size(), false);
  if (avoid == Cfg::kEntry) return seen;
  std::vector<int> stack{Cfg::kEntry};
  seen[Cfg::kEntry] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : g.successors(u)) {
      if (v != avoid && !seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

void CheckDominators(const Cfg& g) {
  Dominators dom(g);
  for (int d = 0; d < g.size(); ++d) {
    std::vector<bool> without = ReachableAvoiding(g, d);
    for (int n = 0; n < g.size(); ++n) {
      if (!g.reachable(n)) continue;
      bool expected = d == n || !without[n];
      EXPECT_EQ(dom.Dominates(d, n), expected) << d << " dom " << n;
    }
  }
}

// Reaching definitions by exhaustive search over (statement, last def).
std::set<int> ReachingByPaths(const FunctionDef& f, const Cfg& g, int stmt,
                              const std::string& var) {
  const int none = -2;
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> stack;
  int start = f.FindParam(var) ? kEntryDefinition : none;
  stack.emplace_back(Cfg::kEntry, start);
  std::set<int> out;
  while (!stack.empty()) {
    auto [node, last] = stack.back();
    stack.pop_back();
    if (!seen.insert({node, last}).second) continue;
    if (node == stmt && last != none) out.insert(last);
    int next = DefinedLocal(f.statements[node]) == var ? node : last;
    for (int s : g.successors(node)) stack.emplace_back(s, next);
  }
  return out;
}

void CheckReachingDefs(const FunctionDef& f) {
  Cfg g = BuildCfg(f);
  DefUse du = ReachingDefs(f, g);
  std::set<std::string> vars;
  for (const Param& p : f.params) vars.insert(p.name);
  for (const Statement& s : f.statements) {
    if (auto d = DefinedLocal(s)) vars.insert(*d);
  }
  for (int i = 0; i < f.size(); ++i) {
    if (!g.reachable(i)) continue;
    for (const std::string& v : vars) {
      EXPECT_EQ(du.Defs(i, v), ReachingByPaths(f, g, i, v))
          << f.name << " stmt " << i << " var " << v;
    }
  }
}

// Natural loops from the back-edge definition, merged per header.
void CheckNaturalLoops(const Cfg& g) {
  Dominators dom(g);
  std::map<int, std::set<int>> body;
  std::map<int, std::vector<int>> sources;
  for (int u = 0; u < g.size(); ++u) {
    if (!g.reachable(u)) continue;
    for (int h : g.successors(u)) {
      if (!dom.Dominates(h, u)) continue;
      sources[h].push_back(u);
      std::set<int>& b = body[h];
      b.insert(h);
      std::vector<int> stack{u};
      while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        if (!b.insert(x).second) continue;
        for (int y : g.predecessors(x)) {
          if (g.reachable(y)) stack.push_back(y);
        }
      }
    }
  }
  auto loops = FindNaturalLoops(g);
  ASSERT_EQ(loops.size(), body.size());
  for (const NaturalLoop& l : loops) {
    ASSERT_TRUE(body.count(l.header));
    const std::set<int>& b = body[l.header];
    EXPECT_EQ(l.body, std::vector<int>(b.begin(), b.end()));
    EXPECT_EQ(Sorted(l.back_edge_sources), Sorted(sources[l.header]));
    EXPECT_EQ(l.back_jump_source,
              *std::max_element(sources[l.header].begin(), sources[l.header].end()));
    std::vector<std::pair<int, int>> exits;
    for (int x : b) {
      for (int y : g.successors(x)) {
        if (!b.count(y)) exits.emplace_back(x, y);
      }
    }
    std::vector<std::pair<int, int>> got = l.exits;
    std::sort(got.begin(), got.end());
    std::sort(exits.begin(), exits.end());
    EXPECT_EQ(got, exits);
    for (int x : l.body) EXPECT_TRUE(dom.Dominates(l.header, x));
  }
}

void CheckCfgConsistency(const Cfg& g) {
  for (int u = 0; u < g.size(); ++u) {
    for (int v : g.successors(u)) {
      const auto& preds = g.predecessors(v);
      EXPECT_NE(std::find(preds.begin(), preds.end(), u), preds.end());
    }
  }
}

TEST(CfgPropertyTest, RandomFunctions) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    FunctionDef f = RandomFunction(rng);
    Cfg g = BuildCfg(f);
    CheckCfgConsistency(g);
    CheckDominators(g);
    CheckReachingDefs(f);
    CheckNaturalLoops(g);
  }
}

TEST(CfgPropertyTest, ShippedPrograms) {
  for (const std::string& file : AllProgramFiles()) {
    SCOPED_TRACE(file);
    Program p = LoadProgram(file);
    for (const auto& [sig, f] : p.functions) {
      Cfg g = BuildCfg(f);
      CheckCfgConsistency(g);
      CheckDominators(g);
      CheckReachingDefs(f);
      CheckNaturalLoops(g);
    }
  }
}

}  // namespace
}  // namespace tajpar
