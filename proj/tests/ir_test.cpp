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

#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "tajpar/ir.h"
#include "test_util.h"

namespace tajpar {
namespace {

using testing::AllProgramFiles;
using testing::LoadProgram;

TEST(ParseTest, SaxpyShape) {
  Program p = LoadProgram("corpus/saxpy.taj");
  ASSERT_EQ(p.functions.size(), 1u);
  const FunctionDef& f = p.functions.begin()->second;
  EXPECT_EQ(f.size(), 10);
  EXPECT_EQ(f.signature(), "saxpy(array-real,array-real,real,int):void");
  ASSERT_TRUE(p.entry.has_value());
  EXPECT_EQ(*p.entry, f.signature());
  EXPECT_TRUE(f.statements[3].Is<IfGotoStmt>());
  EXPECT_TRUE(f.statements[9].Is<ReturnStmt>());
}

TEST(ParseTest, EmptyInput) {
  Program p = ParseProgram("");
  EXPECT_TRUE(p.functions.empty());
  EXPECT_TRUE(p.globals.empty());
  EXPECT_FALSE(p.entry.has_value());
}

TEST(ParseTest, BranchTargetOutOfRange) {
  const char* src = R"(func f(n: int) : void {
  0: n := param 0
  1: goto 99
  2: return
  3: return
  4: return
})";
  try {
    ParseProgram(src);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("branch target out of range"),
              std::string::npos);
  }
}

TEST(ParseTest, SyntaxErrorCarriesPosition) {
  try {
    ParseProgram("func f() : void {\n  0: x = = 1\n}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GT(e.column(), 1);
  }
}

TEST(ParseTest, OutOfSequenceIndex) {
  EXPECT_THROW(ParseProgram("func f() : void {\n  1: return\n}"), ParseError);
}

TEST(ParseTest, GlobalsAndExterns) {
  Program p = ParseProgram(R"(global A : array-real [1024]
global count : scalar-int
extern func exp(real) : real
func f(x: real) : real {
  0: x := param 0
  1: $y = call exp(x)
  2: return $y
})");
  ASSERT_EQ(p.globals.size(), 2u);
  EXPECT_EQ(p.globals[0].kind, GlobalKind::kArrayReal);
  EXPECT_EQ(p.globals[0].init_size, 1024);
  EXPECT_EQ(p.globals[1].kind, GlobalKind::kScalarInt);
  EXPECT_TRUE(p.IsExternal("exp"));
  EXPECT_FALSE(p.IsExternal("f"));
  EXPECT_EQ(p.ResolveCallee("exp"), "exp(real):real");
}

TEST(LookupLocalEntryTest, Saxpy) {
  Program p = LoadProgram("corpus/saxpy.taj");
  const FunctionDef& f = p.functions.begin()->second;
  auto e = LookupLocalEntry(f, "i");
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->slot, 1);
  EXPECT_EQ(e->start, 2);
  // The listing's `span [2, 7)` gives length 7 - 2.
  EXPECT_EQ(e->length, 5);
  EXPECT_FALSE(LookupLocalEntry(f, "$t0").has_value());
  EXPECT_FALSE(LookupLocalEntry(f, "nosuch").has_value());
}

TEST(OperatorTest, SwapAndNegate) {
  for (CompareOp op : {CompareOp::kLt, CompareOp::kLe, CompareOp::kGt,
                       CompareOp::kGe, CompareOp::kEq, CompareOp::kNe}) {
    for (int a = -2; a <= 2; ++a) {
      for (int b = -2; b <= 2; ++b) {
        auto eval = [](CompareOp o, int x, int y) {
          switch (o) {
            case CompareOp::kLt: return x < y;
            case CompareOp::kLe: return x <= y;
            case CompareOp::kGt: return x > y;
            case CompareOp::kGe: return x >= y;
            case CompareOp::kEq: return x == y;
            case CompareOp::kNe: return x != y;
          }
          return false;
        };
        EXPECT_EQ(eval(op, a, b), eval(Swapped(op), b, a));
        EXPECT_NE(eval(op, a, b), eval(Negated(op), a, b));
      }
    }
  }
}

TEST(RoundTripTest, EveryShippedProgram) {
  for (const std::string& file : AllProgramFiles()) {
    SCOPED_TRACE(file);
    Program p = LoadProgram(file);
    std::string text = PrintProgram(p);
    Program q = ParseProgram(text);
    EXPECT_EQ(p, q);
    EXPECT_EQ(PrintProgram(q), text);
  }
}

// Each mutation breaks exactly one structural invariant of a valid program.
using Mutation = std::function<bool(Program&, std::mt19937&)>;

FunctionDef& PickFunction(Program& p, std::mt19937& rng) {
  auto it = p.functions.begin();
  std::advance(it, std::uniform_int_distribution<size_t>(
                       0, p.functions.size() - 1)(rng));
  return it->second;
}

int PickStatement(const FunctionDef& f, std::mt19937& rng) {
  return std::uniform_int_distribution<int>(0, f.size() - 1)(rng);
}

std::vector<std::pair<std::string, Mutation>> Mutations() {
  return {
      {"branch target", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         for (Statement& s : f.statements) {
           if (auto* g = std::get_if<GotoStmt>(&s.kind)) {
             g->target = f.size() + 3;
             return true;
           }
           if (auto* g = std::get_if<IfGotoStmt>(&s.kind)) {
             g->target = -1;
             return true;
           }
         }
         return false;
       }},
      {"index gap", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.statements[PickStatement(f, rng)].index += 1;
         return true;
       }},
      {"undeclared local", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.statements[PickStatement(f, rng)].kind =
             AssignStmt{"undeclared_x", Expr::Atom(Operand::Const(1))};
         return true;
       }},
      {"undeclared use", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.statements[PickStatement(f, rng)].kind =
             ReturnStmt{Operand::Local("undeclared_y")};
         return true;
       }},
      {"span", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         if (f.locals.empty()) return false;
         LocalVarEntry& e = f.locals[rng() % f.locals.size()];
         e.length = f.size() - e.start + 1;
         return true;
       }},
      {"slot clash", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         if (f.locals.empty()) return false;
         LocalVarEntry e = f.locals[rng() % f.locals.size()];
         if (e.length == 0) return false;
         e.name = "clash_" + e.name;
         f.locals.push_back(e);
         return true;
       }},
      {"duplicate entry", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         if (f.locals.empty()) return false;
         LocalVarEntry e = f.locals[rng() % f.locals.size()];
         e.slot += 1000;
         f.locals.push_back(e);
         return true;
       }},
      {"temporary in table", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.locals.push_back(LocalVarEntry{"$tmp", ValueKind::kInt, 999, 0, 1});
         return true;
       }},
      {"late identity", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         if (f.params.empty() || f.size() < 2) return false;
         int last = f.size() - 1;
         if (f.statements[last - 1].Is<IdentityStmt>()) return false;
         f.statements[last].kind = IdentityStmt{f.params[0].name, 0};
         return true;
       }},
      {"identity position", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.statements[0].kind =
             IdentityStmt{f.params.empty() ? "$p" : f.params[0].name,
                          static_cast<int>(f.params.size())};
         return true;
       }},
      {"unresolved call", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.statements[PickStatement(f, rng)].kind =
             CallStmt{std::nullopt, "no_such_function", {}};
         return true;
       }},
      {"unknown global", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.statements[PickStatement(f, rng)].kind =
             GlobalLoadStmt{"$g", "no_such_global"};
         return true;
       }},
      {"malformed allocation", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         f.statements[PickStatement(f, rng)].kind =
             NewStmt{"$a", ValueKind::kArrayInt, std::nullopt};
         return true;
       }},
      {"duplicate parameter", [](Program& p, std::mt19937& rng) {
         FunctionDef& f = PickFunction(p, rng);
         if (f.params.empty()) return false;
         f.params.push_back(f.params[0]);
         return true;
       }},
  };
}

TEST(ValidationFuzzTest, EverySingleMutationIsRejected) {
  std::mt19937 rng(20260418);
  std::vector<Program> seeds;
  for (const std::string& file : AllProgramFiles()) seeds.push_back(LoadProgram(file));
  for (const Program& p : seeds) EXPECT_NO_THROW(ValidateProgram(p));
  int applied = 0;
  for (const auto& [name, mutate] : Mutations()) {
    for (int trial = 0; trial < 40; ++trial) {
      Program p = seeds[rng() % seeds.size()];
      if (!mutate(p, rng)) continue;
      ++applied;
      EXPECT_THROW(ValidateProgram(p), ValidationError)
          << name << " mutation accepted";
    }
  }
  EXPECT_GT(applied, 300);
}

}  // namespace
}  // namespace tajpar
