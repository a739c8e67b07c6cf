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

#include "tajpar/annotate.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tajpar/cfg.h"
#include "tajpar/scalardep.h"
#include "tajpar/scope.h"

namespace tajpar {

std::string_view StageName(Stage s) {
  switch (s) {
    case Stage::kCanon:
      return "canon";
    case Stage::kScope:
      return "scope";
    case Stage::kScalar:
      return "scalar";
    case Stage::kPurity:
      return "purity";
    case Stage::kConstraints:
      return "constraints";
    case Stage::kSolver:
      return "solver";
  }
  return "?";
}

WholeProgram AnalyzeProgram(const Program& p) {
  WholeProgram w;
  w.points_to = ComputePointsTo(p);
  w.calls = BuildCallGraph(p);
  w.purity = ComputePurity(p, w.calls, w.points_to);
  return w;
}

namespace {

std::string ImpureCallDetail(const LoopInfo& info, const FunctionDef& f,
                             const Program& p, const PurityMap& purity) {
  for (int i : info.loop.body) {
    const auto* call = f.statements[i].As<CallStmt>();
    if (!call) continue;
    const FunctionDef* callee = p.FindFunctionByName(call->callee);
    if (!callee) return "call to external " + call->callee;
    auto it = purity.find(callee->signature());
    if (it != purity.end() && !it->second.pure()) {
      return "call to " + std::string(PurityLabel(it->second)) + " " +
             callee->name;
    }
  }
  return "impure call";
}

}  // namespace

FunctionResult AnalyzeFunction(const FunctionDef& f, const Program& p,
                               const WholeProgram& w, const SolverConfig& cfg) {
  FunctionResult out;
  const std::string sig = f.signature();
  Cfg g = BuildCfg(f);
  std::vector<NaturalLoop> loops = FindNaturalLoops(g);
  DefUse du = ReachingDefs(f, g);

  std::vector<CanonVerdict> verdicts;
  std::vector<LoopInfo> canonical;
  for (const NaturalLoop& l : loops) {
    verdicts.push_back(IsCanonical(l, f, g));
    if (verdicts.back().info) canonical.push_back(*verdicts.back().info);
  }

  for (size_t n = 0; n < loops.size(); ++n) {
    LoopReport rep;
    rep.function = sig;
    rep.header = loops[n].header;
    auto reject = [&](Stage s, std::string detail) {
      rep.stage = s;
      rep.detail = std::move(detail);
      out.reports.push_back(rep);
    };
    const CanonVerdict& v = verdicts[n];
    if (!v.info) {
      reject(Stage::kCanon, std::string(RejectCode(*v.reason)));
      continue;
    }
    const LoopInfo& info = *v.info;
    rep.info = info;

    std::optional<LocalVarEntry> entry = LookupLocalEntry(f, info.iter);
    if (!entry) {
      reject(Stage::kScope, "iterator " + info.iter + " has no table entry");
      continue;
    }
    bool shared = false;
    for (const LoopInfo& other : canonical) {
      if (other.header() != info.header() && other.iter == info.iter &&
          LookupLocalEntry(f, other.iter) == entry) {
        shared = true;
      }
    }
    if (shared) {
      reject(Stage::kScope,
             "table entry of " + info.iter + " spans several loops");
      continue;
    }
    LocalSet locals;
    try {
      locals = GetLocalVars(f, info);
    } catch (const AnalysisError& e) {
      reject(Stage::kScope, e.what());
      continue;
    }

    ScalarVerdict sv = CheckScalars(info, locals, f);
    if (!sv.ok) {
      reject(Stage::kScalar, std::string(CauseName(*sv.cause)) + " at " +
                                 std::to_string(*sv.offending_statement));
      continue;
    }

    if (!LoopCallsOk(info, w.purity, f, p)) {
      reject(Stage::kPurity, ImpureCallDetail(info, f, p, w.purity));
      continue;
    }

    Constraint formula;
    try {
      GenContext ctx = MakeGenContext(f, info, canonical, locals, du);
      ArrayRefs refs = CollectArrayRefs(info, f);
      formula = Normalize(LoopC(refs, ctx, [&](const std::string& a,
                                                const std::string& b) {
        return MayAlias(w.points_to, sig, a, b);
      }));
    } catch (const UnsupportedDefinition& e) {
      reject(Stage::kConstraints, e.what());
      continue;
    }
    rep.formula = formula;

    SolveResult r = Solve(formula, cfg);
    rep.result = r;
    rep.stage = Stage::kSolver;
    if (Classify(r)) {
      rep.parallel = true;
      rep.detail = "UNSAT";
      out.annotations.push_back(
          Annotation{entry->start, entry->length, entry->slot});
    } else if (r.status == SolveStatus::kSat) {
      rep.detail = "SAT";
    } else {
      rep.detail = "UNKNOWN: " + r.detail;
    }
    out.reports.push_back(rep);
  }
  std::sort(out.annotations.begin(), out.annotations.end());
  return out;
}

ProgramResult AnalyzeAll(const Program& p, const SolverConfig& cfg) {
  ProgramResult out;
  WholeProgram w = AnalyzeProgram(p);
  for (const auto& [sig, f] : p.functions) {
    FunctionResult r = AnalyzeFunction(f, p, w, cfg);
    if (!r.annotations.empty()) out.map[sig] = r.annotations;
    for (LoopReport& rep : r.reports) out.reports.push_back(std::move(rep));
  }
  return out;
}

void ValidateAnnotationMap(const AnnotationMap& m) {
  for (const auto& [sig, list] : m) {
    std::set<std::pair<int, int>> seen;
    for (size_t i = 0; i < list.size(); ++i) {
      const Annotation& a = list[i];
      if (a.start < 0 || a.length < 0 || a.slot < 0) {
        throw AnnotationMapError("negative field in entry of " + sig);
      }
      if (i > 0 && list[i - 1].start > a.start) {
        throw AnnotationMapError("entries of " + sig + " not sorted by start");
      }
      if (!seen.emplace(a.start, a.slot).second) {
        throw AnnotationMapError("duplicate (start, slot) in " + sig);
      }
    }
  }
}

std::string SerializeAnnotationMap(const AnnotationMap& m) {
  ValidateAnnotationMap(m);
  std::string out = "{";
  bool first = true;
  for (const auto& [sig, list] : m) {
    if (!first) out += ", ";
    first = false;
    out += nlohmann::json(sig).dump();
    out += ": [";
    for (size_t i = 0; i < list.size(); ++i) {
      if (i > 0) out += ", ";
      out += "{\"start\":" + std::to_string(list[i].start) +
             ",\"length\":" + std::to_string(list[i].length) +
             ",\"slot\":" + std::to_string(list[i].slot) + "}";
    }
    out += "]";
  }
  out += "}";
  return out;
}

AnnotationMap ParseAnnotationMap(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw AnnotationMapError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw AnnotationMapError("top level is not an object");
  AnnotationMap out;
  static const char* kFields[] = {"start", "length", "slot"};
  for (const auto& [sig, list] : doc.items()) {
    if (!list.is_array()) {
      throw AnnotationMapError("value of " + sig + " is not an array");
    }
    std::vector<Annotation> entries;
    for (const auto& obj : list) {
      if (!obj.is_object() || obj.size() != 3) {
        throw AnnotationMapError("entry of " + sig +
                                 " must have exactly start, length, slot");
      }
      int values[3];
      int k = 0;
      for (const auto& [key, val] : obj.items()) {
        if (key != kFields[k]) {
          throw AnnotationMapError("entry of " + sig + " has field " + key +
                                   " where " + kFields[k] + " is expected");
        }
        if (!val.is_number_integer()) {
          throw AnnotationMapError("field " + key + " is not an integer");
        }
        int64_t x = val.get<int64_t>();
        if (x < 0 || x > INT32_MAX) {
          throw AnnotationMapError("field " + key + " out of range");
        }
        values[k++] = static_cast<int>(x);
      }
      entries.push_back(Annotation{values[0], values[1], values[2]});
    }
    if (out.count(sig)) throw AnnotationMapError("duplicate key " + sig);
    out[sig] = std::move(entries);
  }
  ValidateAnnotationMap(out);
  return out;
}

void WriteAnnotationMap(const AnnotationMap& m, const std::string& path) {
  std::string text = SerializeAnnotationMap(m);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("cannot write " + path);
}

AnnotationMap ReadAnnotationMap(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ParseAnnotationMap(ss.str());
}

}  // namespace tajpar
