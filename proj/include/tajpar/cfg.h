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

// Statement-level control-flow graph, dominators, natural loops and
// reaching definitions.

#ifndef TAJPAR_CFG_H_
#define TAJPAR_CFG_H_

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tajpar/ir.h"

namespace tajpar {

// Nodes are statement indices; node 0 is the entry.
class Cfg {
 public:
  static constexpr int kEntry = 0;

  Cfg() = default;
  explicit Cfg(int size) : succ_(size), pred_(size), reachable_(size) {}

  int size() const { return static_cast<int>(succ_.size()); }
  const std::vector<int>& successors(int n) const { return succ_[n]; }
  const std::vector<int>& predecessors(int n) const { return pred_[n]; }
  bool reachable(int n) const { return reachable_[n]; }

 private:
  friend Cfg BuildCfg(const FunctionDef& f);
  std::vector<std::vector<int>> succ_;
  std::vector<std::vector<int>> pred_;
  std::vector<bool> reachable_;
};

// IfGoto yields (fallthrough, target); Goto yields target; Return yields
// nothing; everything else falls through.
Cfg BuildCfg(const FunctionDef& f);

// dom[n] is the set of nodes dominating n. Unreachable nodes are dominated
// only by themselves.
class Dominators {
 public:
  explicit Dominators(const Cfg& cfg);
  bool Dominates(int d, int n) const { return dom_[n][d]; }

 private:
  std::vector<std::vector<bool>> dom_;
};

struct NaturalLoop {
  int header = 0;
  // The highest-index source of a back edge into `header`.
  int back_jump_source = 0;
  // Every back-edge source; more than one means loops were merged.
  std::vector<int> back_edge_sources;
  std::vector<int> body;  // sorted statement indices
  std::vector<std::pair<int, int>> exits;

  bool Contains(int n) const;
  int last() const { return body.back(); }
};

// One loop per header (back edges sharing a header are merged), ordered by
// header index.
std::vector<NaturalLoop> FindNaturalLoops(const Cfg& cfg);

// Pseudo definition index for a parameter bound at function entry without
// an Identity statement.
inline constexpr int kEntryDefinition = -1;

class DefUse {
 public:
  // Definitions of `local` reaching the entry of statement `stmt`.
  const std::set<int>& Defs(int stmt, const std::string& local) const;

 private:
  friend DefUse ReachingDefs(const FunctionDef& f, const Cfg& cfg);
  std::vector<std::map<std::string, std::set<int>>> in_;
};

DefUse ReachingDefs(const FunctionDef& f, const Cfg& cfg);

}  // namespace tajpar

#endif  // TAJPAR_CFG_H_
