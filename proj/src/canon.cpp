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

#include "tajpar/canon.h"

#include <algorithm>

namespace tajpar {

std::string_view RejectCode(CanonReject r) {
  switch (r) {
    case CanonReject::kBackjumpNotLast:
      return "backjump-not-last";
    case CanonReject::kUpdNotAssignment:
      return "upd-not-assignment";
    case CanonReject::kIterNotLocal:
      return "iter-not-local";
    case CanonReject::kInitMismatch:
      return "init-mismatch";
    case CanonReject::kCondUnsupported:
      return "cond-unsupported";
    case CanonReject::kCompopUnsupported:
      return "compop-unsupported";
    case CanonReject::kIncNotLinear:
      return "inc-not-linear";
    case CanonReject::kNonconstRequired:
      return "nonconst-required";
    case CanonReject::kIterModified:
      return "iter-modified";
    case CanonReject::kHasBreak:
      return "has-break";
  }
  return "?";
}

bool LoopInfo::Continues(int64_t v, int64_t bound) const {
  switch (cond_op) {
    case CompareOp::kLt:
      return v < bound;
    case CompareOp::kLe:
      return v <= bound;
    case CompareOp::kGt:
      return v > bound;
    case CompareOp::kGe:
      return v >= bound;
    default:
      return false;
  }
}

namespace {

CanonVerdict Reject(CanonReject r) { return CanonVerdict{std::nullopt, r}; }

bool IsStore(const Statement& s) {
  return s.Is<ArrayStoreStmt>() || s.Is<FieldStoreStmt>() ||
         s.Is<GlobalStoreStmt>();
}

}  // namespace

CanonVerdict IsCanonical(const NaturalLoop& loop, const FunctionDef& f,
                         const Cfg& cfg) {
  const int header = loop.header;
  const int back = loop.back_jump_source;
  if (loop.back_edge_sources.size() != 1 || back != loop.last()) {
    return Reject(CanonReject::kBackjumpNotLast);
  }

  const int upd_idx = back - 1;
  if (upd_idx < 0 || !loop.Contains(upd_idx)) {
    return Reject(CanonReject::kUpdNotAssignment);
  }
  const Statement& upd = f.statements[upd_idx];
  if (IsStore(upd)) return Reject(CanonReject::kIterNotLocal);
  std::optional<std::string> iter = DefinedLocal(upd);
  if (!iter || upd.Is<IdentityStmt>()) {
    return Reject(CanonReject::kUpdNotAssignment);
  }

  const int init_idx = header - 1;
  if (init_idx < 0 || loop.Contains(init_idx)) {
    return Reject(CanonReject::kInitMismatch);
  }
  const auto& preds = cfg.predecessors(header);
  const Statement& init = f.statements[init_idx];
  if (std::find(preds.begin(), preds.end(), init_idx) == preds.end() ||
      DefinedLocal(init) != iter) {
    return Reject(CanonReject::kInitMismatch);
  }

  const auto* cond = f.statements[header].As<IfGotoStmt>();
  if (!cond) return Reject(CanonReject::kCondUnsupported);
  auto is_iter = [&](const Operand& o) {
    return o.is_local() && o.name() == *iter;
  };
  bool lhs_iter = is_iter(cond->cond.lhs);
  bool rhs_iter = is_iter(cond->cond.rhs);
  if (lhs_iter == rhs_iter) return Reject(CanonReject::kCondUnsupported);
  bool target_exits = !loop.Contains(cond->target);
  bool fall_exits = !loop.Contains(header + 1);
  if (target_exits == fall_exits) {
    return Reject(CanonReject::kCondUnsupported);
  }
  CompareOp op = target_exits ? Negated(cond->cond.op) : cond->cond.op;
  if (op == CompareOp::kEq || op == CompareOp::kNe) {
    return Reject(CanonReject::kCompopUnsupported);
  }
  if (!lhs_iter) op = Swapped(op);
  Operand ub = lhs_iter ? cond->cond.rhs : cond->cond.lhs;

  const auto* upd_assign = upd.As<AssignStmt>();
  if (!upd_assign || upd_assign->value.op != BinaryOp::kAdd) {
    return Reject(CanonReject::kIncNotLinear);
  }
  Operand inc;
  if (is_iter(upd_assign->value.lhs)) {
    inc = upd_assign->value.rhs;
  } else if (is_iter(upd_assign->value.rhs)) {
    inc = upd_assign->value.lhs;
  } else {
    return Reject(CanonReject::kIncNotLinear);
  }

  const auto* init_assign = init.As<AssignStmt>();
  bool lb_const = init_assign && init_assign->value.is_atom() &&
                  init_assign->value.lhs.is_const();
  if (!lb_const || !inc.is_const()) {
    return Reject(CanonReject::kNonconstRequired);
  }
  if (inc.value() < 1) return Reject(CanonReject::kIncNotLinear);
  if (ub.is_local()) {
    for (int s : loop.body) {
      if (DefinedLocal(f.statements[s]) == ub.name()) {
        return Reject(CanonReject::kNonconstRequired);
      }
    }
  }

  for (int s : loop.body) {
    if (s != upd_idx && DefinedLocal(f.statements[s]) == iter) {
      return Reject(CanonReject::kIterModified);
    }
  }

  for (const auto& [from, to] : loop.exits) {
    if (from != header) return Reject(CanonReject::kHasBreak);
  }

  LoopInfo info;
  info.loop = loop;
  info.iter = *iter;
  info.lb = init_assign->value.lhs.value();
  info.ub = ub;
  info.inc = inc.value();
  info.init_idx = init_idx;
  info.upd_idx = upd_idx;
  info.cond_op = op;
  info.exit_target = target_exits ? cond->target : header + 1;
  return CanonVerdict{std::move(info), std::nullopt};
}

}  // namespace tajpar
