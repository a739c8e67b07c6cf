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

// The per-loop verdict pipeline and the AnnotationMap handed to the runtime.

#ifndef TAJPAR_ANNOTATE_H_
#define TAJPAR_ANNOTATE_H_

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tajpar/canon.h"
#include "tajpar/constraints.h"
#include "tajpar/heap.h"
#include "tajpar/ir.h"
#include "tajpar/solver.h"

namespace tajpar {

enum class Stage { kCanon, kScope, kScalar, kPurity, kConstraints, kSolver };
std::string_view StageName(Stage s);

// Identifies a parallel loop by its iteration variable's table entry.
struct Annotation {
  int start = 0;
  int length = 0;
  int slot = 0;
  friend auto operator<=>(const Annotation&, const Annotation&) = default;
};

using AnnotationMap = std::map<std::string, std::vector<Annotation>>;

struct LoopReport {
  std::string function;
  int header = 0;
  bool parallel = false;
  Stage stage = Stage::kCanon;
  std::string detail;
  std::optional<LoopInfo> info;        // set once the loop is canonical
  std::optional<Constraint> formula;   // set once constraints were built
  std::optional<SolveResult> result;   // set once the solver ran
};

struct WholeProgram {
  PointsTo points_to;
  CallGraph calls;
  PurityMap purity;
};

WholeProgram AnalyzeProgram(const Program& p);

struct FunctionResult {
  std::vector<LoopReport> reports;
  std::vector<Annotation> annotations;  // sorted by start
};

FunctionResult AnalyzeFunction(const FunctionDef& f, const Program& p,
                               const WholeProgram& w,
                               const SolverConfig& cfg = {});

struct ProgramResult {
  AnnotationMap map;  // functions without parallel loops are omitted
  std::vector<LoopReport> reports;
};

ProgramResult AnalyzeAll(const Program& p, const SolverConfig& cfg = {});

class AnnotationMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"sig": [{"start":2,"length":35,"slot":1}, ...], ...} with keys sorted.
std::string SerializeAnnotationMap(const AnnotationMap& m);
// Throws AnnotationMapError on malformed input or broken invariants.
AnnotationMap ParseAnnotationMap(std::string_view text);
void ValidateAnnotationMap(const AnnotationMap& m);

void WriteAnnotationMap(const AnnotationMap& m, const std::string& path);
AnnotationMap ReadAnnotationMap(const std::string& path);

}  // namespace tajpar

#endif  // TAJPAR_ANNOTATE_H_
