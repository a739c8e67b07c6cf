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

#include "tajpar/exec.h"

#include <cstring>
#include <deque>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "tajpar/canon.h"
#include "tajpar/cfg.h"
#include "tajpar/scope.h"

namespace tajpar {

namespace {

struct Object;

struct Value {
  enum class Tag : uint8_t { kUndef, kInt, kReal, kRef };
  Tag tag = Tag::kUndef;
  union {
    int64_t i;
    double d;
    Object* o;
  };
  Value() : i(0) {}
  static Value Int(int64_t v) {
    Value x;
    x.tag = Tag::kInt;
    x.i = v;
    return x;
  }
  static Value Real(double v) {
    Value x;
    x.tag = Tag::kReal;
    x.d = v;
    return x;
  }
  static Value Ref(Object* v) {
    Value x;
    x.tag = Tag::kRef;
    x.o = v;
    return x;
  }
};

struct Object {
  ValueKind kind = ValueKind::kObject;
  std::vector<int64_t> ints;
  std::vector<double> reals;
  std::map<std::string, Value> fields;
  int64_t id = 0;
  ObjectOrigin origin;
};

class Heap {
 public:
  Object* Allocate(ValueKind kind, int64_t size, ObjectOrigin origin) {
    auto obj = std::make_unique<Object>();
    obj->kind = kind;
    obj->origin = std::move(origin);
    if (kind == ValueKind::kArrayInt) obj->ints.assign(size, 0);
    if (kind == ValueKind::kArrayReal) obj->reals.assign(size, 0.0);
    std::lock_guard<std::mutex> lock(mu_);
    obj->id = static_cast<int64_t>(objects_.size());
    objects_.push_back(std::move(obj));
    return objects_.back().get();
  }

 private:
  std::mutex mu_;
  std::deque<std::unique_ptr<Object>> objects_;
};

struct Loc {
  int kind = 0;  // 0 element, 1 field, 2 global
  int64_t object = 0;
  int64_t index = 0;
  std::string name;
  friend auto operator<=>(const Loc&, const Loc&) = default;
  std::string ToString() const {
    switch (kind) {
      case 0:
        return "object#" + std::to_string(object) + "[" +
               std::to_string(index) + "]";
      case 1:
        return "object#" + std::to_string(object) + "." + name;
      default:
        return "@" + name;
    }
  }
};

struct AccessLog {
  std::map<Loc, std::pair<std::set<int64_t>, std::set<int64_t>>> entries;
  void Read(const Loc& l, int64_t it) { entries[l].first.insert(it); }
  void Write(const Loc& l, int64_t it) { entries[l].second.insert(it); }
};

struct ThreadCtx {
  int64_t steps = 0;
  int64_t limit = 0;
  bool in_parallel = false;
  AccessLog* log = nullptr;
  int64_t iter = 0;
};

enum class Op : uint8_t {
  kIdentity,
  kMove,
  kBinary,
  kArrayLoad,
  kArrayStore,
  kFieldLoad,
  kFieldStore,
  kGlobalLoad,
  kGlobalStore,
  kNew,
  kCall,
  kIf,
  kGoto,
  kReturn,
};

struct Src {
  bool is_const = true;
  int slot = -1;
  int64_t k = 0;
};

struct Instr {
  Op op = Op::kGoto;
  int dst = -1;
  Src a, b;
  BinaryOp bop = BinaryOp::kAdd;
  CompareOp cop = CompareOp::kLt;
  int target = 0;
  int global = -1;
  std::string field;
  ValueKind kind = ValueKind::kObject;
  bool has_value = false;
  int callee = -1;
  std::string callee_name;
  std::vector<Src> args;
};

struct LoopPlan {
  LoopInfo info;
  int iter_slot = -1;
  Src ub;
  std::vector<bool> is_private;
};

struct Compiled {
  const FunctionDef* def = nullptr;
  std::string sig;
  int slots = 0;
  std::vector<Instr> code;
  std::vector<int> param_slots;
  std::vector<std::string> slot_names;
  std::vector<LoopPlan> plans;
  std::vector<int> plan_at;  // statement -> special plan index, or -1
};

enum class Mode { kSequential, kShuffled, kParallel, kOracle };

uint64_t Fnv(uint64_t h, const void* data, size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

int64_t WrapAdd(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) +
                              static_cast<uint64_t>(b));
}
int64_t WrapSub(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) -
                              static_cast<uint64_t>(b));
}
int64_t WrapMul(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) *
                              static_cast<uint64_t>(b));
}

class Machine {
 public:
  Machine(const Program& p, const ExecConfig& cfg) : p_(p), cfg_(cfg) {
    for (size_t g = 0; g < p.globals.size(); ++g) {
      global_index_[p.globals[g].name] = static_cast<int>(g);
    }
    for (const auto& [sig, f] : p.functions) {
      fn_index_[f.name] = static_cast<int>(fns_.size());
      sig_index_[sig] = static_cast<int>(fns_.size());
      fns_.emplace_back();
    }
    for (const auto& [sig, f] : p.functions) Compile(f, &fns_[sig_index_[sig]]);
  }

  void SelectShuffled(const LoopTarget& t, uint64_t seed) {
    mode_ = Mode::kShuffled;
    rng_.seed(seed);
    Select(t);
  }

  void SelectOracle(const LoopTarget& t) {
    mode_ = Mode::kOracle;
    Select(t);
  }

  void SelectParallel(const AnnotationMap& m, int workers) {
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    mode_ = Mode::kParallel;
    workers_ = workers;
    for (Compiled& fn : fns_) {
      auto it = m.find(fn.sig);
      if (it == m.end()) continue;
      for (size_t k = 0; k < fn.plans.size(); ++k) {
        auto entry = LookupLocalEntry(*fn.def, fn.plans[k].info.iter);
        if (!entry) continue;
        Annotation a{entry->start, entry->length, entry->slot};
        for (const Annotation& b : it->second) {
          if (a == b) fn.plan_at[fn.plans[k].info.init_idx] = static_cast<int>(k);
        }
      }
    }
  }

  RunResult Run(const std::string& entry, const Inputs& inputs) {
    auto it = sig_index_.find(entry);
    if (it == sig_index_.end()) {
      throw std::invalid_argument("unknown entry function " + entry);
    }
    const Compiled& fn = fns_[it->second];
    if (inputs.size() != fn.def->params.size()) {
      throw std::invalid_argument("argument count mismatch for " + entry);
    }
    globals_.clear();
    for (const GlobalDecl& g : p_.globals) {
      switch (g.kind) {
        case GlobalKind::kScalarInt:
          globals_.push_back(Value::Int(0));
          break;
        case GlobalKind::kScalarReal:
          globals_.push_back(Value::Real(0.0));
          break;
        case GlobalKind::kArrayInt:
          globals_.push_back(
              Value::Ref(heap_.Allocate(ValueKind::kArrayInt, g.init_size.value_or(0),
                             GlobalOrigin(g.name))));
          break;
        case GlobalKind::kArrayReal:
          globals_.push_back(
              Value::Ref(heap_.Allocate(ValueKind::kArrayReal, g.init_size.value_or(0),
                             GlobalOrigin(g.name))));
          break;
      }
    }
    std::vector<Value> args;
    for (size_t k = 0; k < inputs.size(); ++k) {
      args.push_back(Materialize(inputs[k], static_cast<int>(k)));
    }
    ThreadCtx ctx;
    ctx.limit = cfg_.step_limit;
    Value ret;
    bool has_ret = Invoke(it->second, args, ctx, &ret);
    return Finish(args, has_ret ? &ret : nullptr, ctx.steps);
  }

  std::vector<Witness> witnesses;
  int instances = 0;

 private:
  void Select(const LoopTarget& t) {
    auto it = sig_index_.find(t.function);
    if (it == sig_index_.end()) {
      throw std::invalid_argument("unknown function " + t.function);
    }
    Compiled& fn = fns_[it->second];
    for (size_t k = 0; k < fn.plans.size(); ++k) {
      if (fn.plans[k].info.header() == t.header) {
        fn.plan_at[fn.plans[k].info.init_idx] = static_cast<int>(k);
        return;
      }
    }
    throw std::invalid_argument("no canonical loop with header " +
                                std::to_string(t.header) + " in " + t.function);
  }

  static ObjectOrigin GlobalOrigin(const std::string& name) {
    return ObjectOrigin{ObjectOrigin::Kind::kGlobal, "", 0, name};
  }

  Value Materialize(const InputValue& in, int position) {
    ObjectOrigin origin{ObjectOrigin::Kind::kInput, "", position, ""};
    if (const auto* x = std::get_if<int64_t>(&in)) return Value::Int(*x);
    if (const auto* x = std::get_if<double>(&in)) return Value::Real(*x);
    if (const auto* x = std::get_if<std::vector<int64_t>>(&in)) {
      Object* o = heap_.Allocate(ValueKind::kArrayInt, 0, origin);
      o->ints = *x;
      return Value::Ref(o);
    }
    if (const auto* x = std::get_if<std::vector<double>>(&in)) {
      Object* o = heap_.Allocate(ValueKind::kArrayReal, 0, origin);
      o->reals = *x;
      return Value::Ref(o);
    }
    const auto& obj = std::get<ObjectInput>(in);
    Object* o = heap_.Allocate(ValueKind::kObject, 0, origin);
    for (const auto& [name, v] : obj.fields) {
      if (const auto* i = std::get_if<int64_t>(&v)) {
        o->fields[name] = Value::Int(*i);
      } else {
        o->fields[name] = Value::Real(std::get<double>(v));
      }
    }
    return Value::Ref(o);
  }

  void Compile(const FunctionDef& f, Compiled* out) {
    out->def = &f;
    out->sig = f.signature();
    std::map<std::string, int> slot;
    auto slot_of = [&](const std::string& name) {
      auto it = slot.find(name);
      if (it != slot.end()) return it->second;
      int s = static_cast<int>(slot.size());
      slot[name] = s;
      return s;
    };
    for (const Param& prm : f.params) out->param_slots.push_back(slot_of(prm.name));
    auto src = [&](const Operand& o) {
      Src s;
      if (o.is_const()) {
        s.k = o.value();
      } else {
        s.is_const = false;
        s.slot = slot_of(o.name());
      }
      return s;
    };
    for (const Statement& st : f.statements) {
      Instr in;
      if (const auto* x = st.As<IdentityStmt>()) {
        in.op = Op::kIdentity;
        in.dst = slot_of(x->target);
        in.a = Src{false, out->param_slots[x->param], 0};
      } else if (const auto* x = st.As<AssignStmt>()) {
        in.dst = slot_of(x->target);
        in.a = src(x->value.lhs);
        if (x->value.is_atom()) {
          in.op = Op::kMove;
        } else {
          in.op = Op::kBinary;
          in.bop = *x->value.op;
          in.b = src(x->value.rhs);
        }
      } else if (const auto* x = st.As<ArrayLoadStmt>()) {
        in.op = Op::kArrayLoad;
        in.dst = slot_of(x->target);
        in.a = Src{false, slot_of(x->base), 0};
        in.b = src(x->index);
      } else if (const auto* x = st.As<ArrayStoreStmt>()) {
        in.op = Op::kArrayStore;
        in.dst = slot_of(x->base);
        in.a = src(x->index);
        in.b = src(x->value);
      } else if (const auto* x = st.As<FieldLoadStmt>()) {
        in.op = Op::kFieldLoad;
        in.dst = slot_of(x->target);
        in.a = Src{false, slot_of(x->object), 0};
        in.field = x->field;
      } else if (const auto* x = st.As<FieldStoreStmt>()) {
        in.op = Op::kFieldStore;
        in.dst = slot_of(x->object);
        in.field = x->field;
        in.b = src(x->value);
      } else if (const auto* x = st.As<GlobalLoadStmt>()) {
        in.op = Op::kGlobalLoad;
        in.dst = slot_of(x->target);
        in.global = global_index_.at(x->global);
      } else if (const auto* x = st.As<GlobalStoreStmt>()) {
        in.op = Op::kGlobalStore;
        in.global = global_index_.at(x->global);
        in.b = src(x->value);
      } else if (const auto* x = st.As<NewStmt>()) {
        in.op = Op::kNew;
        in.dst = slot_of(x->target);
        in.kind = x->kind;
        in.has_value = x->size.has_value();
        if (x->size) in.a = src(*x->size);
      } else if (const auto* x = st.As<CallStmt>()) {
        in.op = Op::kCall;
        if (x->target) in.dst = slot_of(*x->target);
        auto it = fn_index_.find(x->callee);
        in.callee = it == fn_index_.end() ? -1 : it->second;
        in.callee_name = x->callee;
        for (const Operand& a : x->args) in.args.push_back(src(a));
      } else if (const auto* x = st.As<IfGotoStmt>()) {
        in.op = Op::kIf;
        in.cop = x->cond.op;
        in.a = src(x->cond.lhs);
        in.b = src(x->cond.rhs);
        in.target = x->target;
      } else if (const auto* x = st.As<GotoStmt>()) {
        in.op = Op::kGoto;
        in.target = x->target;
      } else if (const auto* x = st.As<ReturnStmt>()) {
        in.op = Op::kReturn;
        in.has_value = x->value.has_value();
        if (x->value) in.a = src(*x->value);
      }
      out->code.push_back(std::move(in));
    }

    Cfg g = BuildCfg(f);
    for (const NaturalLoop& l : FindNaturalLoops(g)) {
      CanonVerdict v = IsCanonical(l, f, g);
      if (!v.info) continue;
      LoopPlan plan;
      plan.info = *v.info;
      plan.iter_slot = slot_of(v.info->iter);
      plan.ub = src(v.info->ub);
      std::vector<std::string> priv{v.info->iter};
      try {
        for (const std::string& n : GetLocalVars(f, *v.info).names) {
          priv.push_back(n);
        }
      } catch (const AnalysisError&) {
        // Only the iterator and temporaries are private then.
      }
      for (const std::string& n : priv) slot_of(n);
      for (int i : v.info->loop.body) {
        const Statement& st = f.statements[i];
        if (auto d = DefinedLocal(st); d && IsTemporary(*d)) priv.push_back(*d);
      }
      plan.is_private.assign(0, false);
      std::set<int> ps;
      for (const std::string& n : priv) ps.insert(slot_of(n));
      out->plans.push_back(std::move(plan));
      out->plans.back().is_private.resize(0);
      // Slots may still grow; fill the flags after compilation.
      pending_private_.push_back({out, out->plans.size() - 1, ps});
    }
    out->slots = static_cast<int>(slot.size());
    out->slot_names.resize(slot.size());
    for (const auto& [name, k] : slot) out->slot_names[k] = name;
    out->plan_at.assign(f.statements.size(), -1);
    for (auto& [fn, k, ps] : pending_private_) {
      if (fn != out) continue;
      fn->plans[k].is_private.assign(out->slots, false);
      for (int s : ps) fn->plans[k].is_private[s] = true;
    }
  }

  static const Value& Load(const std::vector<Value>& frame, const Src& s,
                           Value* scratch) {
    if (s.is_const) {
      *scratch = Value::Int(s.k);
      return *scratch;
    }
    return frame[s.slot];
  }

  static int64_t AsInt(const Value& v, const char* what) {
    if (v.tag != Value::Tag::kInt) {
      throw RuntimeError(std::string(what) + " is not an integer");
    }
    return v.i;
  }

  static double AsReal(const Value& v) {
    if (v.tag == Value::Tag::kInt) return static_cast<double>(v.i);
    if (v.tag == Value::Tag::kReal) return v.d;
    throw RuntimeError(v.tag == Value::Tag::kUndef ? "use of undefined value"
                                                   : "reference in arithmetic");
  }

  static Object* AsRef(const Value& v) {
    if (v.tag != Value::Tag::kRef) {
      throw RuntimeError(v.tag == Value::Tag::kUndef ? "use of undefined reference"
                                                     : "not a reference");
    }
    return v.o;
  }

  static bool Compare(CompareOp op, const Value& a, const Value& b) {
    if (a.tag == Value::Tag::kRef || b.tag == Value::Tag::kRef) {
      if (a.tag != b.tag) throw RuntimeError("comparison of reference and number");
      if (op == CompareOp::kEq) return a.o == b.o;
      if (op == CompareOp::kNe) return a.o != b.o;
      throw RuntimeError("ordering comparison of references");
    }
    if (a.tag == Value::Tag::kInt && b.tag == Value::Tag::kInt) {
      switch (op) {
        case CompareOp::kLt: return a.i < b.i;
        case CompareOp::kLe: return a.i <= b.i;
        case CompareOp::kGt: return a.i > b.i;
        case CompareOp::kGe: return a.i >= b.i;
        case CompareOp::kEq: return a.i == b.i;
        case CompareOp::kNe: return a.i != b.i;
      }
    }
    double x = AsReal(a), y = AsReal(b);
    switch (op) {
      case CompareOp::kLt: return x < y;
      case CompareOp::kLe: return x <= y;
      case CompareOp::kGt: return x > y;
      case CompareOp::kGe: return x >= y;
      case CompareOp::kEq: return x == y;
      case CompareOp::kNe: return x != y;
    }
    return false;
  }

  static Value Arith(BinaryOp op, const Value& a, const Value& b) {
    if (a.tag == Value::Tag::kInt && b.tag == Value::Tag::kInt) {
      switch (op) {
        case BinaryOp::kAdd: return Value::Int(WrapAdd(a.i, b.i));
        case BinaryOp::kSub: return Value::Int(WrapSub(a.i, b.i));
        case BinaryOp::kMul: return Value::Int(WrapMul(a.i, b.i));
      }
    }
    double x = AsReal(a), y = AsReal(b);
    switch (op) {
      case BinaryOp::kAdd: return Value::Real(x + y);
      case BinaryOp::kSub: return Value::Real(x - y);
      case BinaryOp::kMul: return Value::Real(x * y);
    }
    return Value();
  }

  static int64_t CheckIndex(const Object* o, const Value& idx) {
    int64_t i = AsInt(idx, "array index");
    size_t n = o->kind == ValueKind::kArrayInt ? o->ints.size() : o->reals.size();
    if (o->kind == ValueKind::kObject) throw RuntimeError("indexing a non-array");
    if (i < 0 || static_cast<uint64_t>(i) >= n) {
      throw RuntimeError("array index " + std::to_string(i) +
                         " out of bounds for length " + std::to_string(n));
    }
    return i;
  }

  bool Invoke(int fn_index, const std::vector<Value>& args, ThreadCtx& ctx,
              Value* ret) {
    const Compiled& fn = fns_[fn_index];
    std::vector<Value> frame(fn.slots);
    for (size_t k = 0; k < args.size(); ++k) {
      frame[fn.param_slots[k]] = args[k];
      Notify(fn, fn.param_slots[k], frame);
    }
    int pc = 0;
    return Execute(fn, frame, &pc, -1, ctx, ret);
  }

  void Notify(const Compiled& fn, int slot, const std::vector<Value>& frame) {
    if (!cfg_.on_bind || slot < 0 || frame[slot].tag != Value::Tag::kRef) return;
    cfg_.on_bind(fn.sig, fn.slot_names[slot], frame[slot].o->origin);
  }

  // Runs from *pc until a return (true) or until control reaches `stop`.
  bool Execute(const Compiled& fn, std::vector<Value>& frame, int* pcp,
               int stop, ThreadCtx& ctx, Value* ret) {
    int pc = *pcp;
    Value s1, s2;
    for (;;) {
      if (pc == stop) {
        *pcp = pc;
        return false;
      }
      if (++ctx.steps > ctx.limit) throw RuntimeError("step limit exceeded");
      if (int k = fn.plan_at[pc]; k >= 0 && !ctx.in_parallel &&
                                  !(mode_ == Mode::kOracle && ctx.log)) {
        pc = RunLoop(fn, fn.plans[k], frame, ctx);
        continue;
      }
      const Instr& in = fn.code[pc];
      switch (in.op) {
        case Op::kIdentity:
        case Op::kMove:
          frame[in.dst] = Load(frame, in.a, &s1);
          Notify(fn, in.dst, frame);
          ++pc;
          break;
        case Op::kBinary:
          frame[in.dst] = Arith(in.bop, Load(frame, in.a, &s1), Load(frame, in.b, &s2));
          ++pc;
          break;
        case Op::kArrayLoad: {
          Object* o = AsRef(frame[in.a.slot]);
          int64_t i = CheckIndex(o, Load(frame, in.b, &s2));
          if (ctx.log) ctx.log->Read(Loc{0, o->id, i, {}}, ctx.iter);
          frame[in.dst] = o->kind == ValueKind::kArrayInt ? Value::Int(o->ints[i])
                                                          : Value::Real(o->reals[i]);
          ++pc;
          break;
        }
        case Op::kArrayStore: {
          Object* o = AsRef(frame[in.dst]);
          int64_t i = CheckIndex(o, Load(frame, in.a, &s1));
          const Value& v = Load(frame, in.b, &s2);
          if (ctx.log) ctx.log->Write(Loc{0, o->id, i, {}}, ctx.iter);
          if (o->kind == ValueKind::kArrayInt) {
            o->ints[i] = AsInt(v, "value stored into array-int");
          } else {
            o->reals[i] = AsReal(v);
          }
          ++pc;
          break;
        }
        case Op::kFieldLoad: {
          Object* o = AsRef(frame[in.a.slot]);
          if (ctx.log) ctx.log->Read(Loc{1, o->id, 0, in.field}, ctx.iter);
          auto it = o->fields.find(in.field);
          if (it == o->fields.end()) throw RuntimeError("read of unset field " + in.field);
          frame[in.dst] = it->second;
          Notify(fn, in.dst, frame);
          ++pc;
          break;
        }
        case Op::kFieldStore: {
          Object* o = AsRef(frame[in.dst]);
          if (o->kind != ValueKind::kObject) throw RuntimeError("field store on an array");
          if (ctx.log) ctx.log->Write(Loc{1, o->id, 0, in.field}, ctx.iter);
          o->fields[in.field] = Load(frame, in.b, &s2);
          ++pc;
          break;
        }
        case Op::kGlobalLoad:
          if (ctx.log) {
            ctx.log->Read(Loc{2, 0, 0, p_.globals[in.global].name}, ctx.iter);
          }
          frame[in.dst] = globals_[in.global];
          Notify(fn, in.dst, frame);
          ++pc;
          break;
        case Op::kGlobalStore:
          if (ctx.log) {
            ctx.log->Write(Loc{2, 0, 0, p_.globals[in.global].name}, ctx.iter);
          }
          globals_[in.global] = Load(frame, in.b, &s2);
          ++pc;
          break;
        case Op::kNew: {
          int64_t n = 0;
          if (in.has_value) n = AsInt(Load(frame, in.a, &s1), "array size");
          if (n < 0) throw RuntimeError("negative array size");
          frame[in.dst] = Value::Ref(heap_.Allocate(
              in.kind, n, ObjectOrigin{ObjectOrigin::Kind::kAlloc, fn.sig, pc, ""}));
          Notify(fn, in.dst, frame);
          ++pc;
          break;
        }
        case Op::kCall: {
          if (in.callee < 0) {
            throw RuntimeError("call to external function " + in.callee_name);
          }
          std::vector<Value> args;
          args.reserve(in.args.size());
          for (const Src& a : in.args) args.push_back(Load(frame, a, &s1));
          Value r;
          bool has = Invoke(in.callee, args, ctx, &r);
          if (in.dst >= 0) {
            if (!has) throw RuntimeError("call to " + in.callee_name + " returned no value");
            frame[in.dst] = r;
            Notify(fn, in.dst, frame);
          }
          ++pc;
          break;
        }
        case Op::kIf:
          pc = Compare(in.cop, Load(frame, in.a, &s1), Load(frame, in.b, &s2))
                   ? in.target
                   : pc + 1;
          break;
        case Op::kGoto:
          pc = in.target;
          break;
        case Op::kReturn:
          if (in.has_value) {
            *ret = Load(frame, in.a, &s1);
            return true;
          }
          return false;
      }
    }
  }

  void RunBody(const Compiled& fn, const LoopPlan& plan,
               std::vector<Value>& frame, ThreadCtx& ctx) {
    ++ctx.steps;  // the header test that admits this iteration
    int pc = plan.info.header() + 1;
    Value ret;
    if (Execute(fn, frame, &pc, plan.info.header(), ctx, &ret) || pc != plan.info.header()) {
      throw RuntimeError("control left the loop at " +
                         std::to_string(plan.info.header()) + " early");
    }
  }

  // Executes a loop starting at its init statement, already counted, and
  // returns the statement after the loop.
  int RunLoop(const Compiled& fn, const LoopPlan& plan,
              std::vector<Value>& frame, ThreadCtx& ctx) {
    const LoopInfo& info = plan.info;
    frame[plan.iter_slot] = Value::Int(info.lb);
    Value scratch;
    const int64_t ub = AsInt(Load(frame, plan.ub, &scratch), "loop bound");
    std::vector<int64_t> iters;
    int64_t v = info.lb;
    while (info.Continues(v, ub)) {
      iters.push_back(v);
      if (static_cast<int64_t>(iters.size()) > ctx.limit) {
        throw RuntimeError("step limit exceeded");
      }
      v = WrapAdd(v, info.inc);
    }
    const int64_t exit_value = v;

    if (mode_ == Mode::kOracle) {
      AccessLog log;
      ctx.log = &log;
      for (int64_t it : iters) {
        ctx.iter = it;
        RunBody(fn, plan, frame, ctx);
      }
      ctx.log = nullptr;
      ++instances;
      Analyze(log);
    } else if (mode_ == Mode::kShuffled) {
      std::vector<size_t> order(iters.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (size_t i = order.size(); i > 1; --i) {
        std::uniform_int_distribution<size_t> pick(0, i - 1);
        std::swap(order[i - 1], order[pick(rng_)]);
      }
      const std::vector<Value> entry = frame;
      std::vector<Value> last;
      for (size_t n : order) {
        std::vector<Value> local = frame;
        for (int s = 0; s < fn.slots; ++s) {
          if (plan.is_private[s]) local[s] = entry[s];
        }
        local[plan.iter_slot] = Value::Int(iters[n]);
        RunBody(fn, plan, local, ctx);
        for (int s = 0; s < fn.slots; ++s) {
          if (!plan.is_private[s]) frame[s] = local[s];
        }
        if (n + 1 == iters.size()) last = std::move(local);
      }
      if (!last.empty()) {
        for (int s = 0; s < fn.slots; ++s) {
          if (plan.is_private[s]) frame[s] = last[s];
        }
      }
    } else {
      RunWorkers(fn, plan, frame, ctx, iters);
    }
    frame[plan.iter_slot] = Value::Int(exit_value);
    ++ctx.steps;  // the final header test
    return info.exit_target;
  }

  void RunWorkers(const Compiled& fn, const LoopPlan& plan,
                  std::vector<Value>& frame, ThreadCtx& ctx,
                  const std::vector<int64_t>& iters) {
    const size_t n = iters.size();
    const size_t w = std::min<size_t>(static_cast<size_t>(workers_), std::max<size_t>(n, 1));
    std::vector<ThreadCtx> ctxs(w);
    std::vector<std::exception_ptr> errors(w);
    std::vector<Value> last;
    const std::vector<Value> entry = frame;
    auto work = [&](size_t id, size_t begin, size_t end) {
      ThreadCtx& tc = ctxs[id];
      tc.limit = ctx.limit - ctx.steps;
      tc.in_parallel = true;
      try {
        for (size_t k = begin; k < end; ++k) {
          std::vector<Value> local = entry;
          local[plan.iter_slot] = Value::Int(iters[k]);
          RunBody(fn, plan, local, tc);
          if (k + 1 == n) last = std::move(local);
        }
      } catch (...) {
        errors[id] = std::current_exception();
      }
    };
    std::vector<std::thread> threads;
    size_t begin = 0;
    for (size_t id = 0; id < w; ++id) {
      size_t len = n / w + (id < n % w ? 1 : 0);
      threads.emplace_back(work, id, begin, begin + len);
      begin += len;
    }
    for (std::thread& t : threads) t.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (const ThreadCtx& tc : ctxs) ctx.steps += tc.steps;
    if (ctx.steps > ctx.limit) throw RuntimeError("step limit exceeded");
    if (!last.empty()) {
      for (int s = 0; s < fn.slots; ++s) {
        if (plan.is_private[s]) frame[s] = last[s];
      }
    }
  }

  void Analyze(const AccessLog& log) {
    for (const auto& [loc, rw] : log.entries) {
      const auto& [reads, writes] = rw;
      if (writes.empty()) continue;
      const int64_t a = *writes.begin();
      std::optional<int64_t> b;
      for (int64_t x : writes) {
        if (x != a) {
          b = x;
          break;
        }
      }
      if (!b) {
        for (int64_t x : reads) {
          if (x != a) {
            b = x;
            break;
          }
        }
      }
      if (b) witnesses.push_back(Witness{a, *b, loc.ToString()});
    }
  }

  RunResult Finish(const std::vector<Value>& args, const Value* ret,
                   int64_t steps) {
    uint64_t h = 14695981039346656037ull;
    std::map<const Object*, int64_t> number;
    std::deque<const Object*> pending;
    auto value = [&](const Value& v) {
      uint8_t tag = static_cast<uint8_t>(v.tag);
      h = Fnv(h, &tag, 1);
      switch (v.tag) {
        case Value::Tag::kUndef:
          break;
        case Value::Tag::kInt:
          h = Fnv(h, &v.i, sizeof v.i);
          break;
        case Value::Tag::kReal: {
          uint64_t bits;
          std::memcpy(&bits, &v.d, sizeof bits);
          h = Fnv(h, &bits, sizeof bits);
          break;
        }
        case Value::Tag::kRef: {
          auto [it, fresh] = number.emplace(v.o, static_cast<int64_t>(number.size()));
          if (fresh) pending.push_back(v.o);
          h = Fnv(h, &it->second, sizeof it->second);
          break;
        }
      }
    };
    auto drain = [&] {
      while (!pending.empty()) {
        const Object* o = pending.front();
        pending.pop_front();
        uint8_t kind = static_cast<uint8_t>(o->kind);
        h = Fnv(h, &kind, 1);
        if (o->kind == ValueKind::kArrayInt) {
          uint64_t n = o->ints.size();
          h = Fnv(h, &n, sizeof n);
          h = Fnv(h, o->ints.data(), n * sizeof(int64_t));
        } else if (o->kind == ValueKind::kArrayReal) {
          uint64_t n = o->reals.size();
          h = Fnv(h, &n, sizeof n);
          h = Fnv(h, o->reals.data(), n * sizeof(double));
        } else {
          uint64_t n = o->fields.size();
          h = Fnv(h, &n, sizeof n);
          for (const auto& [name, v] : o->fields) {
            h = Fnv(h, name.data(), name.size() + 1);
            value(v);
          }
        }
      }
    };
    for (const Value& a : args) value(a);
    drain();
    for (const Value& g : globals_) value(g);
    drain();
    RunResult out;
    if (ret) {
      value(*ret);
      drain();
      std::ostringstream os;
      switch (ret->tag) {
        case Value::Tag::kInt:
          os << ret->i;
          break;
        case Value::Tag::kReal:
          os.precision(17);
          os << ret->d;
          break;
        case Value::Tag::kRef:
          os << "ref#" << number.at(ret->o);
          break;
        case Value::Tag::kUndef:
          os << "undefined";
          break;
      }
      out.return_value = os.str();
    }
    out.heap_digest = h;
    out.step_count = steps;
    return out;
  }

  struct PendingPrivate {
    Compiled* fn;
    size_t plan;
    std::set<int> slots;
  };

  const Program& p_;
  ExecConfig cfg_;
  Mode mode_ = Mode::kSequential;
  int workers_ = 1;
  std::mt19937_64 rng_;
  Heap heap_;
  std::vector<Value> globals_;
  std::map<std::string, int> global_index_;
  std::map<std::string, int> fn_index_;
  std::map<std::string, int> sig_index_;
  std::deque<Compiled> fns_;
  std::vector<PendingPrivate> pending_private_;
};

}  // namespace

Inputs InputsFromJson(const nlohmann::json& j, const FunctionDef& entry) {
  if (!j.is_array()) throw std::invalid_argument("arguments must be a JSON array");
  if (j.size() != entry.params.size()) {
    throw std::invalid_argument("expected " + std::to_string(entry.params.size()) +
                                " arguments, got " + std::to_string(j.size()));
  }
  Inputs out;
  for (size_t k = 0; k < j.size(); ++k) {
    const nlohmann::json& v = j[k];
    const std::string where = "argument " + std::to_string(k);
    switch (entry.params[k].kind) {
      case ValueKind::kInt:
        if (!v.is_number_integer()) throw std::invalid_argument(where + " is not an integer");
        out.emplace_back(v.get<int64_t>());
        break;
      case ValueKind::kReal:
        if (!v.is_number()) throw std::invalid_argument(where + " is not a number");
        out.emplace_back(v.get<double>());
        break;
      case ValueKind::kArrayInt: {
        if (!v.is_array()) throw std::invalid_argument(where + " is not an array");
        std::vector<int64_t> xs;
        for (const auto& e : v) {
          if (!e.is_number_integer()) throw std::invalid_argument(where + " has a non-integer element");
          xs.push_back(e.get<int64_t>());
        }
        out.emplace_back(std::move(xs));
        break;
      }
      case ValueKind::kArrayReal: {
        if (!v.is_array()) throw std::invalid_argument(where + " is not an array");
        std::vector<double> xs;
        for (const auto& e : v) {
          if (!e.is_number()) throw std::invalid_argument(where + " has a non-numeric element");
          xs.push_back(e.get<double>());
        }
        out.emplace_back(std::move(xs));
        break;
      }
      case ValueKind::kObject: {
        if (!v.is_object()) throw std::invalid_argument(where + " is not an object");
        ObjectInput obj;
        for (const auto& [name, e] : v.items()) {
          if (e.is_number_integer()) {
            obj.fields.emplace_back(name, e.get<int64_t>());
          } else if (e.is_number()) {
            obj.fields.emplace_back(name, e.get<double>());
          } else {
            throw std::invalid_argument(where + " field " + name + " is not a number");
          }
        }
        out.emplace_back(std::move(obj));
        break;
      }
    }
  }
  return out;
}

Inputs ReadInputs(const std::string& path, const FunctionDef& entry) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed arguments: ") + e.what());
  }
  return InputsFromJson(j, entry);
}

RunResult Interpret(const Program& p, const std::string& entry,
                    const Inputs& args, const ExecConfig& cfg) {
  Machine m(p, cfg);
  return m.Run(entry, args);
}

RunResult RunShuffled(const Program& p, const std::string& entry,
                      const Inputs& args, const LoopTarget& loop,
                      uint64_t seed, const ExecConfig& cfg) {
  Machine m(p, cfg);
  m.SelectShuffled(loop, seed);
  return m.Run(entry, args);
}

RunResult RunParallel(const Program& p, const std::string& entry,
                      const Inputs& args, const AnnotationMap& map,
                      int workers, const ExecConfig& cfg) {
  Machine m(p, cfg);
  m.SelectParallel(map, workers);
  return m.Run(entry, args);
}

OracleResult ConflictOracle(const Program& p, const std::string& entry,
                            const Inputs& args, const LoopTarget& loop,
                            const ExecConfig& cfg) {
  Machine m(p, cfg);
  m.SelectOracle(loop);
  OracleResult out;
  out.run = m.Run(entry, args);
  out.instances = m.instances;
  out.conflict = !m.witnesses.empty();
  if (out.conflict) out.witness = m.witnesses.front();
  return out;
}

}  // namespace tajpar
