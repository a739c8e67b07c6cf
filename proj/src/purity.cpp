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

#include <deque>

#include "tajpar/heap.h"

namespace tajpar {

namespace {

constexpr std::string_view kClassInit = "<clinit>";

bool Intersects(const std::set<int>& a, const std::set<int>& b) {
  for (int s : a) {
    if (b.count(s)) return true;
  }
  return false;
}

// Sites visible to a caller: whatever the parameters point to, closed
// under element and field contents.
std::set<int> ExternallyVisible(const FunctionDef& f, const std::string& sig,
                                const PointsTo& pt) {
  std::set<int> out;
  std::deque<int> work;
  for (const Param& prm : f.params) {
    for (int s : pt.Env(sig, prm.name)) {
      if (out.insert(s).second) work.push_back(s);
    }
  }
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    for (int t : pt.Contents(s)) {
      if (out.insert(t).second) work.push_back(t);
    }
  }
  return out;
}

PuritySummary LocalSummary(const FunctionDef& f, const std::string& sig,
                           const Program& p, const PointsTo& pt) {
  PuritySummary out;
  if (f.name == kClassInit) out.write_impure = true;
  std::set<int> visible = ExternallyVisible(f, sig, pt);
  auto touches = [&](const std::string& base) {
    return Intersects(pt.Env(sig, base), visible);
  };
  for (const Statement& st : f.statements) {
    if (st.Is<GlobalLoadStmt>()) {
      out.read_impure = true;
    } else if (st.Is<GlobalStoreStmt>()) {
      out.write_impure = true;
    } else if (const auto* x = st.As<ArrayLoadStmt>()) {
      if (touches(x->base)) out.read_impure = true;
    } else if (const auto* x = st.As<FieldLoadStmt>()) {
      if (touches(x->object)) out.read_impure = true;
    } else if (const auto* x = st.As<ArrayStoreStmt>()) {
      if (touches(x->base)) out.write_impure = true;
    } else if (const auto* x = st.As<FieldStoreStmt>()) {
      if (touches(x->object)) out.write_impure = true;
    } else if (const auto* x = st.As<CallStmt>()) {
      if (x->callee == kClassInit || !p.FindFunctionByName(x->callee)) {
        out.write_impure = true;
      }
    }
  }
  return out;
}

}  // namespace

std::string_view PurityLabel(const PuritySummary& s) {
  if (s.write_impure) return "write-impure";
  if (s.read_impure) return "read-impure";
  return "pure";
}

PurityMap ComputePurity(const Program& p, const CallGraph& cg,
                        const PointsTo& pt, int* rounds) {
  PurityMap out;
  for (const auto& [sig, f] : p.functions) {
    out[sig] = LocalSummary(f, sig, p, pt);
  }
  int n = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++n;
    for (auto& [sig, summary] : out) {
      auto it = cg.edges.find(sig);
      if (it == cg.edges.end()) continue;
      for (const std::string& callee : it->second) {
        const PuritySummary& c = out.at(callee);
        if (c.read_impure && !summary.read_impure) {
          summary.read_impure = true;
          changed = true;
        }
        if (c.write_impure && !summary.write_impure) {
          summary.write_impure = true;
          changed = true;
        }
      }
    }
  }
  if (rounds) *rounds = n;
  return out;
}

bool LoopCallsOk(const LoopInfo& info, const PurityMap& purity,
                 const FunctionDef& f, const Program& p) {
  for (int i : info.loop.body) {
    const auto* call = f.statements[i].As<CallStmt>();
    if (!call) continue;
    const FunctionDef* callee = p.FindFunctionByName(call->callee);
    if (!callee) return false;
    auto it = purity.find(callee->signature());
    if (it == purity.end() || !it->second.pure()) return false;
  }
  return true;
}

}  // namespace tajpar
