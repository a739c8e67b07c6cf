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

// Reference interpreter for TAJ with sequential, shuffled-iteration,
// multi-worker and access-logging execution modes.

#ifndef TAJPAR_EXEC_H_
#define TAJPAR_EXEC_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tajpar/annotate.h"
#include "tajpar/ir.h"

namespace tajpar {

class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fields-only object argument.
struct ObjectInput {
  std::vector<std::pair<std::string, std::variant<int64_t, double>>> fields;
  friend bool operator==(const ObjectInput&, const ObjectInput&) = default;
};

using InputValue = std::variant<int64_t, double, std::vector<int64_t>,
                                std::vector<double>, ObjectInput>;
using Inputs = std::vector<InputValue>;

// Interprets a JSON array of argument values by the entry's parameter
// kinds. Throws std::invalid_argument on a mismatch.
Inputs InputsFromJson(const nlohmann::json& j, const FunctionDef& entry);
Inputs ReadInputs(const std::string& path, const FunctionDef& entry);

// Where a heap object came from.
struct ObjectOrigin {
  enum class Kind { kAlloc, kInput, kGlobal };
  Kind kind = Kind::kAlloc;
  std::string function;  // kAlloc: signature of the allocating function
  int index = 0;         // kAlloc: statement; kInput: argument position
  std::string name;      // kGlobal: global name
};

// Called whenever a local of `function` receives an object reference. Must
// be thread-safe when used with RunParallel.
using BindingObserver = std::function<void(
    const std::string& function, const std::string& local, const ObjectOrigin&)>;

struct ExecConfig {
  int64_t step_limit = 100'000'000;
  BindingObserver on_bind;
};

struct RunResult {
  // Printed form of the returned value; object references are rendered by
  // their canonical number in the digest traversal.
  std::optional<std::string> return_value;
  uint64_t heap_digest = 0;
  int64_t step_count = 0;
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct LoopTarget {
  std::string function;  // signature
  int header = 0;
};

RunResult Interpret(const Program& p, const std::string& entry,
                    const Inputs& args, const ExecConfig& cfg = {});

// Runs every dynamic instance of `loop` with its iterations in a seeded
// random order, each on private copies of the loop's local variables.
RunResult RunShuffled(const Program& p, const std::string& entry,
                      const Inputs& args, const LoopTarget& loop,
                      uint64_t seed, const ExecConfig& cfg = {});

// Block-partitions the iterations of each annotated loop over `workers`
// threads sharing the heap. Annotated loops nested in a parallel region
// run sequentially inside their worker.
RunResult RunParallel(const Program& p, const std::string& entry,
                      const Inputs& args, const AnnotationMap& m, int workers,
                      const ExecConfig& cfg = {});

struct Witness {
  int64_t iter_a = 0;  // iteration variable value of the writer
  int64_t iter_b = 0;
  std::string location;
};

struct OracleResult {
  bool conflict = false;
  std::optional<Witness> witness;  // first conflict found
  int instances = 0;               // dynamic executions of the loop
  RunResult run;
};

// Sequential run that logs heap and global accesses per iteration of
// `loop` and reports a write in one iteration overlapping any access of
// another iteration.
OracleResult ConflictOracle(const Program& p, const std::string& entry,
                            const Inputs& args, const LoopTarget& loop,
                            const ExecConfig& cfg = {});

}  // namespace tajpar

#endif  // TAJPAR_EXEC_H_
