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

#include "tajpar/scope.h"

namespace tajpar {

bool IsLocal(std::string_view var, const LoopInfo& info, const FunctionDef& f) {
  if (IsTemporary(var)) return true;
  std::optional<LocalVarEntry> e = LookupLocalEntry(f, var);
  if (!e) {
    if (f.FindParam(var)) return false;
    throw AnalysisError("untabled local " + std::string(var) + " in " +
                        f.name);
  }
  // Statements are uniformly sized, so the loop's extent ends one past upd.
  const int begin = info.init_idx;
  const int end = info.upd_idx + 1;
  return e->start >= begin && e->end() <= end;
}

LocalSet GetLocalVars(const FunctionDef& f, const LoopInfo& info) {
  LocalSet out;
  for (const LocalVarEntry& e : f.locals) {
    if (IsLocal(e.name, info, f)) out.names.insert(e.name);
  }
  for (int i : info.loop.body) {
    const Statement& s = f.statements[i];
    std::vector<std::string> names = UsedLocals(s);
    if (auto d = DefinedLocal(s)) names.push_back(*d);
    for (const std::string& v : names) {
      if (IsLocal(v, info, f)) out.names.insert(v);
    }
  }
  return out;
}

}  // namespace tajpar
