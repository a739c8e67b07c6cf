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

// Loop-private variables, derived from the local-variable table.

#ifndef TAJPAR_SCOPE_H_
#define TAJPAR_SCOPE_H_

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tajpar/canon.h"
#include "tajpar/ir.h"

namespace tajpar {

// Raised when an analysis needs metadata the program does not carry.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// True iff `var` is a temporary, or its whole live range lies in
// [init_idx, upd_idx + 1). Parameters without a table entry are never
// private. Throws AnalysisError("untabled local ...") otherwise.
bool IsLocal(std::string_view var, const LoopInfo& info, const FunctionDef& f);

struct LocalSet {
  std::set<std::string> names;
  bool contains(std::string_view v) const {
    return names.count(std::string(v)) > 0;
  }
};

LocalSet GetLocalVars(const FunctionDef& f, const LoopInfo& info);

}  // namespace tajpar

#endif  // TAJPAR_SCOPE_H_
