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

#include "tajpar/cfg.h"

#include <algorithm>
#include <deque>

namespace tajpar {

Cfg BuildCfg(const FunctionDef& f) {
  const int n = f.size();
  Cfg cfg(n);
  auto edge = [&](int from, int to) {
    auto& s = cfg.succ_[from];
    if (std::find(s.begin(), s.end(), to) != s.end()) return;
    s.push_back(to);
    cfg.pred_[to].push_back(from);
  };
  for (int i = 0; i < n; ++i) {
    const Statement& s = f.statements[i];
    if (s.Is<ReturnStmt>()) continue;
    if (const auto* g = s.As<GotoStmt>()) {
      edge(i, g->target);
      continue;
    }
    if (i + 1 < n) edge(i, i + 1);
    if (const auto* b = s.As<IfGotoStmt>()) edge(i, b->target);
  }
  if (n > 0) {
    std::deque<int> work{Cfg::kEntry};
    cfg.reachable_[Cfg::kEntry] = true;
    while (!work.empty()) {
      int x = work.front();
      work.pop_front();
      for (int y : cfg.succ_[x]) {
        if (!cfg.reachable_[y]) {
          cfg.reachable_[y] = true;
          work.push_back(y);
        }
      }
    }
  }
  return cfg;
}

Dominators::Dominators(const Cfg& cfg) {
  const int n = cfg.size();
  dom_.assign(n, std::vector<bool>(n, true));
  for (int i = 0; i < n; ++i) {
    if (i == Cfg::kEntry || !cfg.reachable(i)) {
      dom_[i].assign(n, false);
      dom_[i][i] = true;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (i == Cfg::kEntry || !cfg.reachable(i)) continue;
      std::vector<bool> meet(n, true);
      for (int p : cfg.predecessors(i)) {
        if (!cfg.reachable(p)) continue;
        for (int k = 0; k < n; ++k) meet[k] = meet[k] && dom_[p][k];
      }
      meet[i] = true;
      if (meet != dom_[i]) {
        dom_[i] = std::move(meet);
        changed = true;
      }
    }
  }
}

bool NaturalLoop::Contains(int n) const {
  return std::binary_search(body.begin(), body.end(), n);
}

std::vector<NaturalLoop> FindNaturalLoops(const Cfg& cfg) {
  Dominators dom(cfg);
  std::map<int, NaturalLoop> by_header;
  for (int u = 0; u < cfg.size(); ++u) {
    if (!cfg.reachable(u)) continue;
    for (int h : cfg.successors(u)) {
      if (!dom.Dominates(h, u)) continue;
      NaturalLoop& loop = by_header[h];
      loop.header = h;
      loop.back_edge_sources.push_back(u);
      // Standard closure: everything that reaches u without passing h.
      std::set<int> body(loop.body.begin(), loop.body.end());
      body.insert(h);
      std::deque<int> work;
      if (body.insert(u).second) work.push_back(u);
      while (!work.empty()) {
        int x = work.front();
        work.pop_front();
        for (int p : cfg.predecessors(x)) {
          if (cfg.reachable(p) && body.insert(p).second) work.push_back(p);
        }
      }
      loop.body.assign(body.begin(), body.end());
    }
  }
  std::vector<NaturalLoop> loops;
  for (auto& [h, loop] : by_header) {
    std::sort(loop.back_edge_sources.begin(), loop.back_edge_sources.end());
    loop.back_jump_source = loop.back_edge_sources.back();
    for (int x : loop.body) {
      for (int y : cfg.successors(x)) {
        if (!loop.Contains(y)) loop.exits.emplace_back(x, y);
      }
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

const std::set<int>& DefUse::Defs(int stmt, const std::string& local) const {
  static const std::set<int> kEmpty;
  if (stmt < 0 || stmt >= static_cast<int>(in_.size())) return kEmpty;
  auto it = in_[stmt].find(local);
  return it == in_[stmt].end() ? kEmpty : it->second;
}

DefUse ReachingDefs(const FunctionDef& f, const Cfg& cfg) {
  using Facts = std::map<std::string, std::set<int>>;
  const int n = f.size();
  std::vector<std::optional<std::string>> defines(n);
  for (int i = 0; i < n; ++i) defines[i] = DefinedLocal(f.statements[i]);

  Facts entry;
  for (const Param& p : f.params) entry[p.name].insert(kEntryDefinition);

  auto transfer = [&](int i, Facts facts) {
    if (defines[i]) facts[*defines[i]] = {i};
    return facts;
  };

  DefUse du;
  du.in_.assign(n, Facts{});
  std::vector<Facts> out(n);
  std::vector<bool> seen(n, false);
  std::deque<int> work;
  for (int i = 0; i < n; ++i) {
    if (cfg.reachable(i)) work.push_back(i);
  }
  while (!work.empty()) {
    int i = work.front();
    work.pop_front();
    Facts in = i == Cfg::kEntry ? entry : Facts{};
    for (int p : cfg.predecessors(i)) {
      for (const auto& [name, defs] : out[p]) {
        in[name].insert(defs.begin(), defs.end());
      }
    }
    Facts o = transfer(i, in);
    du.in_[i] = std::move(in);
    if (!seen[i] || o != out[i]) {
      seen[i] = true;
      out[i] = std::move(o);
      for (int s : cfg.successors(i)) work.push_back(s);
    }
  }
  return du;
}

}  // namespace tajpar
