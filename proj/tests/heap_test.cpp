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

#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "tajpar/canon.h"
#include "tajpar/cfg.h"
#include "tajpar/exec.h"
#include "tajpar/heap.h"
#include "test_util.h"

namespace tajpar {
namespace {

using testing::CorpusNames;
using testing::LoadProgram;
using testing::ReadText;
using testing::SourcePath;

bool Disjoint(const std::set<int>& a, const std::set<int>& b) {
  for (int x : a) {
    if (b.count(x)) return false;
  }
  return true;
}

constexpr const char* kCopies = R"(entry main
func main(n: int) : void {
  0: n := param 0
  1: $x = new array-int [n]
  2: $y = $x
  3: $z = new array-int [n]
  4: return
}
)";

TEST(PointsToTest, CopyPropagatesSite) {
  Program p = ParseProgram(kCopies);
  PointsTo pt = ComputePointsTo(p);
  const std::string sig = "main(int):void";
  int s1 = pt.AllocSite(sig, 1);
  int s3 = pt.AllocSite(sig, 3);
  ASSERT_GE(s1, 0);
  ASSERT_GE(s3, 0);
  EXPECT_TRUE(pt.Env(sig, "$y").count(s1));
  EXPECT_EQ(pt.Env(sig, "$z"), std::set<int>{s3});
  EXPECT_TRUE(Disjoint(pt.Env(sig, "$x"), pt.Env(sig, "$z")));
  EXPECT_TRUE(MayAlias(pt, sig, "$x", "$y"));
  EXPECT_FALSE(MayAlias(pt, sig, "$x", "$z"));
}

TEST(PointsToTest, ArgumentReturnedThroughCallee) {
  Program p = ParseProgram(R"(entry main
func id(a: array-int) : array-int {
  0: a := param 0
  1: return a
}
func main(b: array-int) : void {
  0: b := param 0
  1: $r = call id(b)
  2: return
})");
  PointsTo pt = ComputePointsTo(p);
  const std::string sig = "main(array-int):void";
  const std::set<int>& eb = pt.Env(sig, "b");
  ASSERT_EQ(eb.size(), 1u);
  const Site& s = pt.sites()[*eb.begin()];
  EXPECT_EQ(s.kind, SiteKind::kParam);
  EXPECT_TRUE(s.entry_input);
  EXPECT_EQ(pt.Env(sig, "$r"), eb);
  EXPECT_TRUE(MayAlias(pt, sig, "b", "$r"));

  // The interpreter returns the very object it was passed.
  ExecConfig cfg;
  std::vector<std::string> bound;
  cfg.on_bind = [&](const std::string& fn, const std::string& local,
                    const ObjectOrigin& o) {
    if (fn == sig && local == "$r") {
      bound.push_back(o.kind == ObjectOrigin::Kind::kInput
                          ? "input" + std::to_string(o.index)
                          : "other");
    }
  };
  Interpret(p, sig, Inputs{std::vector<int64_t>{1, 2}}, cfg);
  EXPECT_EQ(bound, std::vector<std::string>{"input0"});
}

constexpr const char* kTwoParams = R"(entry main
func copy(a: array-int, b: array-int) : void {
  0: a := param 0
  1: b := param 1
  2: $v = b[0]
  3: a[0] = $v
  4: return
}
func main(x: array-int, y: array-int) : void {
  0: x := param 0
  1: y := param 1
  2: return
}
)";

TEST(PointsToTest, ParametersOfOpenFunctionMayAlias) {
  Program p = ParseProgram(kTwoParams);
  PointsTo pt = ComputePointsTo(p);
  EXPECT_TRUE(pt.open_functions().count("copy(array-int,array-int):void"));
  EXPECT_TRUE(MayAlias(pt, "copy(array-int,array-int):void", "a", "b"));
  // Entry inputs are allocated fresh by the harness.
  EXPECT_FALSE(MayAlias(pt, "main(array-int,array-int):void", "x", "y"));
}

TEST(PointsToTest, ClosedCalleeSeesOnlyCallerObjects) {
  Program p = ParseProgram(R"(entry main
func copy(a: array-int, b: array-int) : void {
  0: a := param 0
  1: b := param 1
  2: $v = b[0]
  3: a[0] = $v
  4: return
}
func main(n: int) : void {
  0: n := param 0
  1: $x = new array-int [n]
  2: $y = new array-int [n]
  3: call copy($x, $y)
  4: return
})");
  PointsTo pt = ComputePointsTo(p);
  const std::string callee = "copy(array-int,array-int):void";
  EXPECT_FALSE(pt.open_functions().count(callee));
  EXPECT_FALSE(MayAlias(pt, callee, "a", "b"));
  EXPECT_EQ(pt.Env(callee, "a"), std::set<int>{pt.AllocSite("main(int):void", 1)});
}

TEST(PointsToTest, GlobalsAndContents) {
  Program p = ParseProgram(R"(entry main
global cell : array-int [1]
func main() : void {
  0: $o = new object
  1: $a = new array-int [2]
  2: $o.f = $a
  3: $b = $o.f
  4: $g = @cell
  5: return
})");
  PointsTo pt = ComputePointsTo(p);
  const std::string sig = "main():void";
  int o = pt.AllocSite(sig, 0);
  int a = pt.AllocSite(sig, 1);
  EXPECT_EQ(pt.Contents(o), std::set<int>{a});
  EXPECT_EQ(pt.Env(sig, "$b"), std::set<int>{a});
  EXPECT_EQ(pt.Env(sig, "$g"), pt.GlobalTargets("cell"));
  EXPECT_FALSE(MayAlias(pt, sig, "$g", "$a"));
}

// Site ids an observed object may legitimately carry.
std::set<int> SitesFor(const PointsTo& pt, const Program& p,
                       const ObjectOrigin& o) {
  std::set<int> out;
  switch (o.kind) {
    case ObjectOrigin::Kind::kAlloc:
      out.insert(pt.AllocSite(o.function, o.index));
      break;
    case ObjectOrigin::Kind::kGlobal:
      out = pt.GlobalTargets(o.name);
      break;
    case ObjectOrigin::Kind::kInput:
      for (size_t s = 0; s < pt.sites().size(); ++s) {
        const Site& site = pt.sites()[s];
        if (site.kind == SiteKind::kParam && site.function == *p.entry &&
            site.index == o.index) {
          out.insert(static_cast<int>(s));
        }
      }
      break;
  }
  return out;
}

void CheckBindingsSound(const Program& p, const Inputs& args) {
  PointsTo pt = ComputePointsTo(p);
  ExecConfig cfg;
  int observed = 0;
  cfg.on_bind = [&](const std::string& fn, const std::string& local,
                    const ObjectOrigin& o) {
    ++observed;
    std::set<int> sites = SitesFor(pt, p, o);
    EXPECT_FALSE(sites.empty()) << fn << " " << local;
    EXPECT_FALSE(Disjoint(sites, pt.Env(fn, local)))
        << fn << " " << local << " bound outside its points-to set";
  };
  try {
    Interpret(p, *p.entry, args, cfg);
  } catch (const RuntimeError&) {
    // Bindings made before an external call are still checked.
  }
  EXPECT_GT(observed, 0);
}

TEST(PointsToPropertyTest, CorpusBindingsAreCovered) {
  for (const std::string& name : CorpusNames()) {
    SCOPED_TRACE(name);
    Program p = LoadProgram("corpus/" + name + ".taj");
    const FunctionDef& entry = *p.FindFunction(*p.entry);
    CheckBindingsSound(p, ReadInputs(SourcePath("corpus/" + name + ".args.json"), entry));
  }
}

TEST(PointsToPropertyTest, PuritySuiteBindingsAreCovered) {
  Program p = LoadProgram("tests/data/purity/suite.taj");
  CheckBindingsSound(p, Inputs{std::vector<int64_t>{3, 1, 4, 1}, 2.5});
}

TEST(CallGraphTest, EdgesCoverEveryCall) {
  for (const std::string& file : testing::AllProgramFiles()) {
    SCOPED_TRACE(file);
    Program p = LoadProgram(file);
    CallGraph cg = BuildCallGraph(p);
    for (const auto& [sig, f] : p.functions) {
      for (const Statement& s : f.statements) {
        const auto* call = s.As<CallStmt>();
        if (!call) continue;
        std::string target = *p.ResolveCallee(call->callee);
        bool resolved = cg.edges[sig].count(target) > 0;
        bool external = cg.external[sig].count(target) > 0;
        EXPECT_NE(resolved, external) << call->callee;
      }
    }
  }
}

PurityMap SuitePurity(const Program& p, int* rounds = nullptr) {
  return ComputePurity(p, BuildCallGraph(p), ComputePointsTo(p), rounds);
}

TEST(PurityTest, SuiteLabels) {
  Program p = LoadProgram("tests/data/purity/suite.taj");
  PurityMap m = SuitePurity(p);
  const std::map<std::string, std::string> expected = {
      {"elem_sq(real):real", "pure"},
      {"calls_sq(real):real", "pure"},
      {"fresh():int", "pure"},
      {"set_global(int):void", "write-impure"},
      {"fill(array-int):void", "write-impure"},
      {"<clinit>():void", "write-impure"},
      {"calls_clinit():void", "write-impure"},
      {"calls_exp(real):real", "write-impure"},
      {"calls_set(int):void", "write-impure"},
      {"read_global():int", "read-impure"},
      {"first(array-int):int", "read-impure"},
      {"calls_first(array-int):int", "read-impure"},
      {"main(array-int,real):void", "read-impure"},
  };
  ASSERT_EQ(m.size(), expected.size());
  for (const auto& [sig, label] : expected) {
    ASSERT_TRUE(m.count(sig)) << sig;
    EXPECT_EQ(PurityLabel(m.at(sig)), label) << sig;
  }
  EXPECT_FALSE(m.at("first(array-int):int").write_impure);
}

TEST(PurityTest, FixedPointIsClosedUnderCallEdges) {
  for (const std::string& file : testing::AllProgramFiles()) {
    SCOPED_TRACE(file);
    Program p = LoadProgram(file);
    CallGraph cg = BuildCallGraph(p);
    int rounds = 0;
    PurityMap m = ComputePurity(p, cg, ComputePointsTo(p), &rounds);
    EXPECT_GE(rounds, 1);
    EXPECT_LE(rounds, 2 * static_cast<int>(p.functions.size()) + 1);
    for (const auto& [sig, callees] : cg.edges) {
      for (const std::string& c : callees) {
        EXPECT_TRUE(!m.at(c).read_impure || m.at(sig).read_impure) << sig;
        EXPECT_TRUE(!m.at(c).write_impure || m.at(sig).write_impure) << sig;
      }
      if (cg.external.count(sig) && !cg.external.at(sig).empty()) {
        EXPECT_TRUE(m.at(sig).write_impure) << sig;
      }
    }
  }
}

TEST(PurityTest, LongCallChainConverges) {
  std::ostringstream src;
  const int n = 12;
  src << "global g : scalar-int\n";
  src << "func f0() : void {\n  0: @g = 1\n  1: return\n}\n";
  for (int i = 1; i < n; ++i) {
    src << "func f" << i << "() : void {\n  0: call f" << i - 1
        << "()\n  1: return\n}\n";
  }
  Program p = ParseProgram(src.str());
  int rounds = 0;
  PurityMap m = SuitePurity(p, &rounds);
  for (const auto& [sig, s] : m) EXPECT_TRUE(s.write_impure) << sig;
  EXPECT_LE(rounds, 2 * n);
}

std::string Ident(const std::string& name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
}

// Builds `void wrap_<f>(params) { call f(params) }` (optionally returning
// f's result) so a function can be run in isolation.
std::string Wrapper(const FunctionDef& f, bool keep_result) {
  std::ostringstream s;
  s << "func wrap_" << (keep_result ? "r_" : "w_") << Ident(f.name) << "(";
  for (size_t k = 0; k < f.params.size(); ++k) {
    s << (k ? ", " : "") << f.params[k].name << ": " << KindName(f.params[k].kind);
  }
  s << ") : " << (keep_result ? KindName(*f.result) : "void") << " {\n";
  int i = 0;
  for (size_t k = 0; k < f.params.size(); ++k) {
    s << "  " << i++ << ": " << f.params[k].name << " := param " << k << "\n";
  }
  s << "  " << i++ << ": " << (keep_result ? "$r = " : "") << "call " << f.name << "(";
  for (size_t k = 0; k < f.params.size(); ++k) {
    s << (k ? ", " : "") << f.params[k].name;
  }
  s << ")\n  " << i << ": return" << (keep_result ? " $r" : "") << "\n}\n";
  return s.str();
}

std::string Probe(const FunctionDef& f) {
  std::ostringstream s;
  s << "func probe(";
  for (size_t k = 0; k < f.params.size(); ++k) {
    s << (k ? ", " : "") << f.params[k].name << ": " << KindName(f.params[k].kind);
  }
  s << ") : void {\n";
  for (size_t k = 0; k < f.params.size(); ++k) {
    s << "  " << k << ": " << f.params[k].name << " := param " << k << "\n";
  }
  s << "  " << f.params.size() << ": return\n}\n";
  return s.str();
}

Inputs RandomInputs(const FunctionDef& f, std::mt19937& rng) {
  Inputs in;
  std::uniform_int_distribution<int64_t> d(-9, 9);
  for (const Param& prm : f.params) {
    switch (prm.kind) {
      case ValueKind::kInt:
        in.push_back(d(rng));
        break;
      case ValueKind::kReal:
        in.push_back(static_cast<double>(d(rng)) / 4);
        break;
      case ValueKind::kArrayInt:
        in.push_back(std::vector<int64_t>{d(rng), d(rng), d(rng), d(rng)});
        break;
      case ValueKind::kArrayReal:
        in.push_back(std::vector<double>{1.5, -2.0, 0.25, 4.0});
        break;
      case ValueKind::kObject:
        in.push_back(ObjectInput{});
        break;
    }
  }
  return in;
}

std::string Signature(const std::string& name, const FunctionDef& f, bool keep) {
  std::string s = name + "(";
  for (size_t k = 0; k < f.params.size(); ++k) {
    s += (k ? "," : "") + std::string(KindName(f.params[k].kind));
  }
  return s + "):" + (keep ? std::string(KindName(*f.result)) : "void");
}

// Observed writes to pre-existing state imply write impurity; a result that
// depends on pre-existing heap contents implies some impurity.
TEST(PurityPropertyTest, ObservedEffectsAreReported) {
  const std::string base = ReadText(SourcePath("tests/data/purity/suite.taj"));
  Program suite = ParseProgram(base);
  PurityMap m = SuitePurity(suite);
  std::mt19937 rng(11);
  int writes_seen = 0, reads_seen = 0;
  for (const auto& [sig, f] : suite.functions) {
    if (f.name == "main") continue;
    std::string extra = Probe(f) + Wrapper(f, false);
    if (f.returns_value()) extra += Wrapper(f, true);
    Program p = ParseProgram(base + extra);
    const std::string probe = Signature("probe", f, false);
    const std::string wrap_w = Signature("wrap_w_" + Ident(f.name), f, false);
    const std::string wrap_r = Signature("wrap_r_" + Ident(f.name), f, true);
    for (int trial = 0; trial < 20; ++trial) {
      Inputs in = RandomInputs(f, rng);
      try {
        RunResult before = Interpret(p, probe, in);
        RunResult after = Interpret(p, wrap_w, in);
        if (before.heap_digest != after.heap_digest) {
          ++writes_seen;
          EXPECT_TRUE(m.at(sig).write_impure) << sig;
        }
        if (!f.returns_value()) continue;
        Inputs other = in;
        for (InputValue& v : other) {
          if (auto* a = std::get_if<std::vector<int64_t>>(&v)) {
            for (int64_t& x : *a) x += 17;
          }
        }
        if (Interpret(p, wrap_r, in).return_value !=
            Interpret(p, wrap_r, other).return_value) {
          ++reads_seen;
          EXPECT_FALSE(m.at(sig).pure()) << sig;
        }
      } catch (const RuntimeError&) {
        EXPECT_TRUE(m.at(sig).write_impure) << sig;
      }
    }
  }
  EXPECT_GT(writes_seen, 0);
  EXPECT_GT(reads_seen, 0);
}

LoopInfo OnlyLoop(const FunctionDef& f) {
  Cfg g = BuildCfg(f);
  auto loops = FindNaturalLoops(g);
  if (loops.size() != 1) throw std::runtime_error("expected one loop");
  auto r = IsCanonical(loops[0], f, g);
  if (!r.info) throw std::runtime_error("loop not canonical");
  return *r.info;
}

TEST(LoopCallsOkTest, PureHelperAccepted) {
  Program p = LoadProgram("corpus/fig1.taj");
  PurityMap m = SuitePurity(p);
  const FunctionDef& f = *p.FindFunction(*p.entry);
  EXPECT_TRUE(LoopCallsOk(OnlyLoop(f), m, f, p));
}

TEST(LoopCallsOkTest, NoCallsIsVacuous) {
  Program p = LoadProgram("corpus/saxpy.taj");
  PurityMap m = SuitePurity(p);
  const FunctionDef& f = *p.FindFunction(*p.entry);
  EXPECT_TRUE(LoopCallsOk(OnlyLoop(f), m, f, p));
}

constexpr const char* kLoopCalling = R"(entry main
global g : scalar-int
extern func sqrt(real) : real
func bump(v: int) : void {
  0: v := param 0
  1: @g = v
  2: return
}
func peek() : int {
  0: $v = @g
  1: return $v
}
func main(n: int) : void {
  locals {
    i : int slot 1 span [2, 7) ;
  }
  0: n := param 0
  1: i = 0
  2: if i >= n goto 6
  3: CALL
  4: i = i + 1
  5: goto 2
  6: return
}
)";

bool CallsOk(const std::string& call) {
  std::string src = kLoopCalling;
  src.replace(src.find("CALL"), 4, call);
  Program p = ParseProgram(src);
  PurityMap m = SuitePurity(p);
  const FunctionDef& f = *p.FindFunction(*p.entry);
  return LoopCallsOk(OnlyLoop(f), m, f, p);
}

TEST(LoopCallsOkTest, ImpureCalleesRejected) {
  EXPECT_FALSE(CallsOk("call bump(i)"));
  EXPECT_FALSE(CallsOk("$v = call peek()"));
  EXPECT_FALSE(CallsOk("$r = call sqrt(1)"));
  EXPECT_TRUE(CallsOk("$w = i * 2"));
}

}  // namespace
}  // namespace tajpar
