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

// Whole-program heap analyses: a flow-, field- and context-insensitive
// allocation-site points-to analysis, the direct call graph, and the
// interprocedural read/write purity analysis built on top of them.

#ifndef TAJPAR_HEAP_H_
#define TAJPAR_HEAP_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tajpar/canon.h"
#include "tajpar/ir.h"

namespace tajpar {

enum class SiteKind {
  kAlloc,     // a New statement
  kParam,     // an object passed into a function with unknown callers
  kGlobal,    // the initial object of an array global
  kExternal,  // a value returned by an extern
};

struct Site {
  SiteKind kind;
  std::string function;  // signature (kAlloc, kParam)
  int index = 0;         // statement (kAlloc) or parameter position (kParam)
  std::string name;      // global or extern name
  // kParam only: the object is an argument of the program entry point,
  // which the harness always allocates fresh and distinct.
  bool entry_input = false;

  // Sites whose provenance is unknown may denote any pre-existing object.
  bool unknown() const {
    return kind == SiteKind::kExternal ||
           (kind == SiteKind::kParam && !entry_input);
  }
  bool preexisting() const { return kind != SiteKind::kAlloc; }
  std::string ToString() const;
};

class PointsTo {
 public:
  const std::vector<Site>& sites() const { return sites_; }
  const std::set<int>& Env(std::string_view function,
                           std::string_view local) const;
  // Objects stored in any element or field of `site`.
  const std::set<int>& Contents(int site) const;
  const std::set<int>& GlobalTargets(std::string_view global) const;
  // Site id of the New at statement `index` of `function`, or -1.
  int AllocSite(std::string_view function, int index) const;
  // Functions whose reference parameters got pseudo-sites.
  const std::set<std::string>& open_functions() const { return open_; }

 private:
  friend PointsTo ComputePointsTo(const Program& p);
  std::vector<Site> sites_;
  std::map<std::string, std::set<int>> env_;
  std::map<int, std::set<int>> contents_;
  std::map<std::string, std::set<int>> globals_;
  std::set<std::string> open_;
};

struct CallGraph {
  std::map<std::string, std::set<std::string>> edges;     // resolved callees
  std::map<std::string, std::set<std::string>> external;  // extern callees
  std::set<std::string> ReachableFrom(const std::string& root) const;
};

CallGraph BuildCallGraph(const Program& p);

PointsTo ComputePointsTo(const Program& p);

// env(a) and env(b) intersect, or one side may be any pre-existing object
// and the other is pre-existing. Two distinct reference parameters of a
// function with unknown callers therefore may alias.
bool MayAlias(const PointsTo& pt, std::string_view function,
              std::string_view a, std::string_view b);

struct PuritySummary {
  bool read_impure = false;
  bool write_impure = false;
  bool pure() const { return !read_impure && !write_impure; }
  friend bool operator==(const PuritySummary&, const PuritySummary&) = default;
};

// "pure", "read-impure" or "write-impure" (write wins when both hold).
std::string_view PurityLabel(const PuritySummary& s);

using PurityMap = std::map<std::string, PuritySummary>;

// `rounds`, when non-null, receives the number of propagation rounds.
PurityMap ComputePurity(const Program& p, const CallGraph& cg,
                        const PointsTo& pt, int* rounds = nullptr);

// True iff every call in the loop body targets a defined function whose
// summary is fully pure.
bool LoopCallsOk(const LoopInfo& info, const PurityMap& purity,
                 const FunctionDef& f, const Program& p);

}  // namespace tajpar

#endif  // TAJPAR_HEAP_H_
