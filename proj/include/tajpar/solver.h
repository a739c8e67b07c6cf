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

// Three-valued satisfiability of dependence formulas over the integers, and
// an SMT-LIB2 emitter for cross-checking with an external prover.

#ifndef TAJPAR_SOLVER_H_
#define TAJPAR_SOLVER_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tajpar/constraints.h"

namespace tajpar {

enum class SolveStatus { kSat, kUnsat, kUnknown };
std::string_view StatusName(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::kUnknown;
  std::optional<Assignment> model;  // present iff kSat
  std::string detail;               // why the answer is kUnknown
};

struct SolverConfig {
  enum class Backend { kInternal, kEmitOnly };
  int64_t enum_bound = 4096;
  int64_t timeout_millis = 5000;
  Backend backend = Backend::kInternal;
  // Disjunctive normal forms above this size are not attempted.
  int64_t max_disjuncts = 10000;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Throws ContractViolation for ill-typed formulas or configurations.
SolveResult Solve(const Constraint& c, const SolverConfig& cfg = {});

// Declarations sorted by mangled name, one assert, check-sat. Throws
// ContractViolation when two variables mangle to the same symbol.
std::string EmitSmtLib(const Constraint& c);

// Only an UNSAT verdict proves the absence of dependences.
bool Classify(const SolveResult& r);

}  // namespace tajpar

#endif  // TAJPAR_SOLVER_H_
