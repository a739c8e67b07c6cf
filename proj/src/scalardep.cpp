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

#include "tajpar/scalardep.h"

namespace tajpar {

std::string_view CauseName(ScalarCause c) {
  switch (c) {
    case ScalarCause::kFieldWrite:
      return "field-write";
    case ScalarCause::kGlobalWrite:
      return "global-write";
    case ScalarCause::kNonlocalScalarWrite:
      return "nonlocal-scalar-write";
  }
  return "?";
}

ScalarVerdict CheckScalars(const LoopInfo& info, const LocalSet& locals,
                           const FunctionDef& f) {
  auto reject = [](int idx, ScalarCause c) {
    return ScalarVerdict{false, idx, c};
  };
  for (int i : info.loop.body) {
    if (i == info.upd_idx) continue;
    const Statement& s = f.statements[i];
    if (s.Is<FieldStoreStmt>()) return reject(i, ScalarCause::kFieldWrite);
    if (s.Is<GlobalStoreStmt>()) return reject(i, ScalarCause::kGlobalWrite);
    if (auto d = DefinedLocal(s); d && !locals.contains(*d)) {
      return reject(i, ScalarCause::kNonlocalScalarWrite);
    }
  }
  return ScalarVerdict{};
}

}  // namespace tajpar
