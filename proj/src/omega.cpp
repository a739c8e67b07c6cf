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

#include "omega.h"

#include <algorithm>
#include <limits>
#include <map>

namespace tajpar::omega {

i128 CheckedAdd(i128 a, i128 b) {
  i128 out;
  if (__builtin_add_overflow(a, b, &out)) throw Overflow();
  return out;
}

i128 CheckedMul(i128 a, i128 b) {
  i128 out;
  if (__builtin_mul_overflow(a, b, &out)) throw Overflow();
  return out;
}

Deadline::Deadline(int64_t millis)
    : end_(std::chrono::steady_clock::now() +
           std::chrono::milliseconds(millis)) {}

void Deadline::Check() const {
  if (std::chrono::steady_clock::now() > end_) throw Timeout();
}

void System::FixVar(int var, i128 value) {
  Row r = NewRow();
  r.a[var] = 1;
  r.c = -value;
  eqs.push_back(std::move(r));
}

void System::UpperBound(int var, i128 value) {
  Row r = NewRow();
  r.a[var] = -1;
  r.c = value;
  geqs.push_back(std::move(r));
}

void System::LowerBound(int var, i128 value) {
  Row r = NewRow();
  r.a[var] = 1;
  r.c = -value;
  geqs.push_back(std::move(r));
}

namespace {

i128 Abs(i128 x) { return x < 0 ? -x : x; }

i128 Gcd(i128 a, i128 b) {
  a = Abs(a);
  b = Abs(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

i128 FloorDiv(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// a - m * floor(a / m + 1/2), the symmetric residue.
i128 ModHat(i128 a, i128 m) { return a - m * FloorDiv(2 * a + m, 2 * m); }

i128 CoeffGcd(const Row& r) {
  i128 g = 0;
  for (i128 x : r.a) {
    if (x != 0) g = Gcd(g, x);
  }
  return g;
}

// Replaces x_k everywhere using unit row `e` (e.a[k] == +-1).
void SubstituteUnit(System* s, const Row& e, int k) {
  const i128 sign = e.a[k];
  auto apply = [&](Row& r) {
    const i128 f = r.a[k];
    if (f == 0) return;
    const i128 scale = CheckedMul(-sign, f);
    for (int i = 0; i < s->vars; ++i) {
      if (i == k || e.a[i] == 0) continue;
      r.a[i] = CheckedAdd(r.a[i], CheckedMul(scale, e.a[i]));
    }
    r.c = CheckedAdd(r.c, CheckedMul(scale, e.c));
    r.a[k] = 0;
  };
  for (Row& r : s->eqs) apply(r);
  for (Row& r : s->geqs) apply(r);
}

void AddColumn(System* s) {
  ++s->vars;
  for (Row& r : s->eqs) r.a.push_back(0);
  for (Row& r : s->geqs) r.a.push_back(0);
}

// One step of equality elimination. The row is consumed when it has a unit
// coefficient; otherwise its coefficients shrink.
void EliminateEquality(System* s) {
  size_t pick = 0;
  i128 best = -1;
  int best_k = -1;
  for (size_t e = 0; e < s->eqs.size(); ++e) {
    for (int i = 0; i < s->vars; ++i) {
      i128 a = Abs(s->eqs[e].a[i]);
      if (a != 0 && (best < 0 || a < best)) {
        best = a;
        best_k = i;
        pick = e;
      }
    }
  }
  Row row = s->eqs[pick];
  if (best == 1) {
    s->eqs.erase(s->eqs.begin() + pick);
    SubstituteUnit(s, row, best_k);
    return;
  }
  const i128 m = CheckedAdd(best, 1);
  AddColumn(s);
  row.a.push_back(0);
  Row e = s->NewRow();
  for (int i = 0; i + 1 < s->vars; ++i) e.a[i] = ModHat(row.a[i], m);
  e.c = ModHat(row.c, m);
  e.a[s->vars - 1] = -m;
  SubstituteUnit(s, e, best_k);
}

enum class Step { kUnsat, kAgain, kDone };

Step NormalizeRows(System* s) {
  for (size_t i = 0; i < s->eqs.size();) {
    Row& r = s->eqs[i];
    i128 g = CoeffGcd(r);
    if (g == 0) {
      if (r.c != 0) return Step::kUnsat;
      s->eqs.erase(s->eqs.begin() + i);
      continue;
    }
    if (r.c % g != 0) return Step::kUnsat;
    if (g != 1) {
      for (i128& x : r.a) x /= g;
      r.c /= g;
    }
    ++i;
  }
  std::map<std::vector<i128>, size_t> seen;
  std::vector<Row> kept;
  for (Row& r : s->geqs) {
    i128 g = CoeffGcd(r);
    if (g == 0) {
      if (r.c < 0) return Step::kUnsat;
      continue;
    }
    if (g != 1) {
      for (i128& x : r.a) x /= g;
      r.c = FloorDiv(r.c, g);
    }
    auto it = seen.find(r.a);
    if (it != seen.end()) {
      kept[it->second].c = std::min(kept[it->second].c, r.c);
      continue;
    }
    seen.emplace(r.a, kept.size());
    kept.push_back(std::move(r));
  }
  s->geqs = std::move(kept);
  if (!s->eqs.empty()) return Step::kAgain;

  // Opposing pairs: a.x + c1 >= 0 and -a.x + c2 >= 0.
  std::vector<bool> drop(s->geqs.size(), false);
  bool found = false;
  for (size_t i = 0; i < s->geqs.size(); ++i) {
    if (drop[i]) continue;
    std::vector<i128> neg = s->geqs[i].a;
    for (i128& x : neg) x = -x;
    auto it = seen.find(neg);
    if (it == seen.end() || drop[it->second] || it->second == i) continue;
    const Row& other = s->geqs[it->second];
    i128 sum = CheckedAdd(s->geqs[i].c, other.c);
    if (sum < 0) return Step::kUnsat;
    if (sum == 0) {
      s->eqs.push_back(s->geqs[i]);
      drop[i] = drop[it->second] = true;
      found = true;
    }
  }
  if (!found) return Step::kDone;
  std::vector<Row> rest;
  for (size_t i = 0; i < s->geqs.size(); ++i) {
    if (!drop[i]) rest.push_back(std::move(s->geqs[i]));
  }
  s->geqs = std::move(rest);
  return Step::kAgain;
}

System Shadow(const System& s, int k, bool dark) {
  System out;
  out.vars = s.vars;
  std::vector<const Row*> lower, upper;
  for (const Row& r : s.geqs) {
    if (r.a[k] > 0) {
      lower.push_back(&r);
    } else if (r.a[k] < 0) {
      upper.push_back(&r);
    } else {
      out.geqs.push_back(r);
    }
  }
  for (const Row* l : lower) {
    for (const Row* u : upper) {
      const i128 b = l->a[k];
      const i128 a = -u->a[k];
      Row r = out.NewRow();
      for (int i = 0; i < s.vars; ++i) {
        r.a[i] = CheckedAdd(CheckedMul(a, l->a[i]), CheckedMul(b, u->a[i]));
      }
      r.c = CheckedAdd(CheckedMul(a, l->c), CheckedMul(b, u->c));
      if (dark) r.c = CheckedAdd(r.c, -CheckedMul(a - 1, b - 1));
      out.geqs.push_back(std::move(r));
    }
  }
  return out;
}

bool Solve(System s, const Deadline& deadline) {
  for (;;) {
    deadline.Check();
    Step step = NormalizeRows(&s);
    if (step == Step::kUnsat) return false;
    if (step == Step::kAgain) {
      if (!s.eqs.empty()) EliminateEquality(&s);
      continue;
    }
    if (s.geqs.empty()) return true;

    std::vector<int> lowers(s.vars, 0), uppers(s.vars, 0);
    std::vector<bool> unit_lower(s.vars, true), unit_upper(s.vars, true);
    for (const Row& r : s.geqs) {
      for (int i = 0; i < s.vars; ++i) {
        if (r.a[i] > 0) {
          ++lowers[i];
          if (r.a[i] != 1) unit_lower[i] = false;
        } else if (r.a[i] < 0) {
          ++uppers[i];
          if (r.a[i] != -1) unit_upper[i] = false;
        }
      }
    }
    int one_sided = -1;
    for (int i = 0; i < s.vars && one_sided < 0; ++i) {
      if ((lowers[i] > 0) != (uppers[i] > 0)) one_sided = i;
    }
    if (one_sided >= 0) {
      std::vector<Row> rest;
      for (Row& r : s.geqs) {
        if (r.a[one_sided] == 0) rest.push_back(std::move(r));
      }
      s.geqs = std::move(rest);
      continue;
    }
    int exact = -1, any = -1;
    int64_t exact_cost = 0, any_cost = 0;
    for (int i = 0; i < s.vars; ++i) {
      if (lowers[i] == 0) continue;
      int64_t cost = int64_t{lowers[i]} * uppers[i];
      if (any < 0 || cost < any_cost) {
        any = i;
        any_cost = cost;
      }
      if ((unit_lower[i] || unit_upper[i]) && (exact < 0 || cost < exact_cost)) {
        exact = i;
        exact_cost = cost;
      }
    }
    if (exact >= 0) {
      s = Shadow(s, exact, false);
      continue;
    }
    const int k = any;
    if (!Solve(Shadow(s, k, false), deadline)) return false;
    if (Solve(Shadow(s, k, true), deadline)) return true;
    i128 a_max = 0;
    for (const Row& r : s.geqs) a_max = std::max(a_max, -r.a[k]);
    for (const Row& l : s.geqs) {
      const i128 b = l.a[k];
      if (b <= 0) continue;
      const i128 limit = FloorDiv(
          CheckedAdd(CheckedMul(a_max, b), -CheckedAdd(a_max, b)), a_max);
      for (i128 i = 0; i <= limit; ++i) {
        System t = s;
        Row e = l;
        e.c -= i;
        t.eqs.push_back(std::move(e));
        if (Solve(std::move(t), deadline)) return true;
      }
    }
    return false;
  }
}

constexpr int64_t kMax = std::numeric_limits<int64_t>::max();
constexpr int64_t kMin = std::numeric_limits<int64_t>::min();

}  // namespace

bool Satisfiable(const System& s, const Deadline& deadline) {
  return Solve(s, deadline);
}

std::optional<int64_t> MinFeasible(const System& s, int var, int64_t from,
                                   const Deadline& deadline) {
  System t = s;
  t.LowerBound(var, from);
  System capped = t;
  capped.UpperBound(var, kMax);
  if (!Solve(capped, deadline)) return std::nullopt;
  int64_t lo = from, hi = kMax;
  while (lo < hi) {
    int64_t mid = lo + static_cast<int64_t>(
                           (static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo)) / 2);
    System probe = t;
    probe.UpperBound(var, mid);
    if (Solve(std::move(probe), deadline)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

std::optional<int64_t> MaxFeasible(const System& s, int var, int64_t to,
                                   const Deadline& deadline) {
  System t = s;
  t.UpperBound(var, to);
  System capped = t;
  capped.LowerBound(var, kMin);
  if (!Solve(capped, deadline)) return std::nullopt;
  int64_t lo = kMin, hi = to;
  while (lo < hi) {
    int64_t mid = hi - static_cast<int64_t>(
                           (static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo)) / 2);
    System probe = t;
    probe.LowerBound(var, mid);
    if (Solve(std::move(probe), deadline)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

std::optional<std::vector<int64_t>> FindModel(const System& s,
                                              const Deadline& deadline) {
  if (!Solve(s, deadline)) return std::nullopt;
  System cur = s;
  std::vector<int64_t> out(s.vars, 0);
  for (int v = 0; v < s.vars; ++v) {
    std::optional<int64_t> x = MinFeasible(cur, v, 0, deadline);
    if (!x) x = MaxFeasible(cur, v, -1, deadline);
    if (!x) return std::nullopt;
    out[v] = *x;
    cur.FixVar(v, *x);
  }
  return out;
}

}  // namespace tajpar::omega
