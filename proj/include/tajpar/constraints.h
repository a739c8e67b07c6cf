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

// Dependence formulas over iteration-tagged integer variables, and the
// generator that builds them from a canonical loop's array references.

#ifndef TAJPAR_CONSTRAINTS_H_
#define TAJPAR_CONSTRAINTS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tajpar/canon.h"
#include "tajpar/cfg.h"
#include "tajpar/ir.h"
#include "tajpar/scope.h"

namespace tajpar {

inline constexpr int kNoTag = -1;
// Appended to an iterator's name for its trip-number variable; '.' cannot
// occur in program identifiers.
inline constexpr const char* kTripSuffix = ".n";

// A logical variable: a program variable in iteration 0 or 1, or untagged
// for values shared by all iterations.
struct VarRef {
  std::string name;
  int tag = kNoTag;
  std::string Mangled() const;
  friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

enum class CKind {
  kVar,
  kConst,
  kAdd,
  kSub,
  kMul,
  kEq,
  kNeq,
  kLt,
  kLe,
  kGt,
  kGe,
  kAnd,
  kOr,
  kTrue,
  kFalse,
};

struct CNode;
using Constraint = std::shared_ptr<const CNode>;

struct CNode {
  CKind kind;
  VarRef var;         // kVar
  int64_t value = 0;  // kConst
  std::vector<Constraint> kids;

  bool is_term() const;
  bool is_atom() const;  // a comparison
};

namespace c {
Constraint Var(std::string name, int tag = kNoTag);
Constraint Const(int64_t v);
Constraint Add(Constraint a, Constraint b);
Constraint Sub(Constraint a, Constraint b);
Constraint Mul(Constraint a, Constraint b);
Constraint Cmp(CKind kind, Constraint a, Constraint b);
Constraint Eq(Constraint a, Constraint b);
Constraint Neq(Constraint a, Constraint b);
Constraint Lt(Constraint a, Constraint b);
Constraint Le(Constraint a, Constraint b);
Constraint Gt(Constraint a, Constraint b);
Constraint Ge(Constraint a, Constraint b);
Constraint And(std::vector<Constraint> kids);
Constraint Or(std::vector<Constraint> kids);
Constraint True();
Constraint False();
}  // namespace c

// SMT-LIB2 s-expression text, also the canonical ordering key.
std::string Render(const Constraint& c);

// Flattens nested And/Or, drops neutral elements, removes duplicates and
// sorts operands by rendered text.
Constraint Normalize(const Constraint& c);

std::set<VarRef> FreeVars(const Constraint& c);

using Assignment = std::map<VarRef, int64_t>;

// Exact evaluation in 128-bit arithmetic. Empty when a variable is missing
// or an intermediate value leaves the 128-bit range.
std::optional<bool> Evaluate(const Constraint& c, const Assignment& a);

// Throws std::invalid_argument on comparisons of formulas or connectives
// over terms.
void CheckWellTyped(const Constraint& c);

struct ArrayRef {
  enum class Kind { kRead, kWrite };
  int stmt = 0;
  std::string base;
  Operand index;
  Kind kind = Kind::kRead;
  friend bool operator==(const ArrayRef&, const ArrayRef&) = default;
};

struct ArrayRefs {
  std::vector<ArrayRef> writes;
  std::vector<ArrayRef> reads;
  std::vector<ArrayRef> all() const;  // writes followed by reads
};

ArrayRefs CollectArrayRefs(const LoopInfo& info, const FunctionDef& f);

// Raised when an index depends on a value the generator cannot model.
class UnsupportedDefinition : public std::runtime_error {
 public:
  UnsupportedDefinition(int stmt, const std::string& what)
      : std::runtime_error(what), stmt_(stmt) {}
  int stmt() const { return stmt_; }

 private:
  int stmt_;
};

struct GenContext {
  const FunctionDef* function = nullptr;
  const LoopInfo* loop = nullptr;
  // Every canonical loop of the function, the analyzed one included.
  std::vector<LoopInfo> all_loops;
  const LocalSet* locals = nullptr;
  const DefUse* defuse = nullptr;
  // (statement, tag) pairs on the current expansion path.
  std::set<std::pair<int, int>> visited;

  Constraint N(const std::string& var, int tag) const;
  Constraint N(const Operand& op, int tag) const;
};

GenContext MakeGenContext(const FunctionDef& f, const LoopInfo& loop,
                          std::vector<LoopInfo> all_loops,
                          const LocalSet& locals, const DefUse& defuse);

// Constraints a loop's own range places on its iterator in iteration `tag`.
Constraint LoopBounds(const LoopInfo& l, int tag, GenContext& ctx);

Constraint StmtC(int stmt, int tag, GenContext& ctx);
Constraint DepC(const ArrayRef& w, const ArrayRef& r, GenContext& ctx);

using AliasFn = std::function<bool(const std::string&, const std::string&)>;

// Disjunction of DepC over every aliasing (write, reference) pair; False
// when there is no such pair.
Constraint LoopC(const ArrayRefs& refs, GenContext& ctx,
                 const AliasFn& may_alias);

}  // namespace tajpar

#endif  // TAJPAR_CONSTRAINTS_H_
