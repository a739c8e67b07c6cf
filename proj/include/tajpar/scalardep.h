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

#ifndef TAJPAR_SCALARDEP_H_
#define TAJPAR_SCALARDEP_H_

#include <optional>
#include <string_view>

#include "tajpar/canon.h"
#include "tajpar/ir.h"
#include "tajpar/scope.h"

namespace tajpar {

enum class ScalarCause { kFieldWrite, kGlobalWrite, kNonlocalScalarWrite };
std::string_view CauseName(ScalarCause c);

struct ScalarVerdict {
  bool ok = true;
  std::optional<int> offending_statement;
  std::optional<ScalarCause> cause;
};

// Rejects loops whose body writes a field, a global, or a scalar that is
// shared across iterations. Array stores are left to the dependence solver;
// reads never reject.
ScalarVerdict CheckScalars(const LoopInfo& info, const LocalSet& locals,
                           const FunctionDef& f);

}  // namespace tajpar

#endif  // TAJPAR_SCALARDEP_H_
