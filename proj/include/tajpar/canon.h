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

// Canonical (counted) loop recognition.
//
// A canonical loop has the layout
//
//   init:   iter = <int const>
//   header: if <exit condition on iter> goto <exit>
//           ...body...
//   upd:    iter = iter + <positive int const>
//   back:   goto header
//
// with a single exit (the header's), and iter written only by init and upd.

#ifndef TAJPAR_CANON_H_
#define TAJPAR_CANON_H_

#include <optional>
#include <string>
#include <string_view>

#include "tajpar/cfg.h"
#include "tajpar/ir.h"

namespace tajpar {

enum class CanonReject {
  kBackjumpNotLast,
  kUpdNotAssignment,
  kIterNotLocal,
  kInitMismatch,
  kCondUnsupported,
  kCompopUnsupported,
  kIncNotLinear,
  kNonconstRequired,
  kIterModified,
  kHasBreak,
};

std::string_view RejectCode(CanonReject r);

struct LoopInfo {
  NaturalLoop loop;
  std::string iter;
  int64_t lb = 0;
  Operand ub;  // integer constant or local
  int64_t inc = 1;
  int init_idx = 0;
  int upd_idx = 0;
  // Continuation condition `iter cond_op ub`; one of <, <=, >, >=.
  CompareOp cond_op = CompareOp::kLt;
  // Where control goes when the loop finishes.
  int exit_target = 0;

  int header() const { return loop.header; }
  bool Continues(int64_t iter_value, int64_t bound) const;
};

struct CanonVerdict {
  std::optional<LoopInfo> info;
  std::optional<CanonReject> reason;

  bool canonical() const { return info.has_value(); }
};

CanonVerdict IsCanonical(const NaturalLoop& loop, const FunctionDef& f,
                         const Cfg& cfg);

}  // namespace tajpar

#endif  // TAJPAR_CANON_H_
