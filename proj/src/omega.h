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

// Exact satisfiability of conjunctions of linear integer constraints
// (Pugh's Omega test). Internal to the solver.

#ifndef TAJPAR_SRC_OMEGA_H_
#define TAJPAR_SRC_OMEGA_H_

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tajpar::omega {

using i128 = __int128;

// Raised when an intermediate coefficient leaves the 128-bit range.
struct Overflow : std::runtime_error {
  Overflow() : std::runtime_error("coefficient overflow") {}
};

struct Timeout : std::runtime_error {
  Timeout() : std::runtime_error("solver timeout") {}
};

i128 CheckedAdd(i128 a, i128 b);
i128 CheckedMul(i128 a, i128 b);

class Deadline {
 public:
  explicit Deadline(int64_t millis);
  void Check() const;

 private:
  std::chrono::steady_clock::time_point end_;
};

// sum(a[i] * x_i) + c, compared against zero.
struct Row {
  std::vector<i128> a;
  i128 c = 0;
};

struct System {
  int vars = 0;
  std::vector<Row> eqs;   // row == 0
  std::vector<Row> geqs;  // row >= 0

  Row NewRow() const { return Row{std::vector<i128>(vars, 0), 0}; }
  // x_var == value, x_var <= value, x_var >= value.
  void FixVar(int var, i128 value);
  void UpperBound(int var, i128 value);
  void LowerBound(int var, i128 value);
};

bool Satisfiable(const System& s, const Deadline& deadline);

// Smallest value of x_var >= `from` in some solution, if any within the
// 64-bit range.
std::optional<int64_t> MinFeasible(const System& s, int var, int64_t from,
                                   const Deadline& deadline);
// Largest value of x_var <= `to` in some solution, if any.
std::optional<int64_t> MaxFeasible(const System& s, int var, int64_t to,
                                   const Deadline& deadline);

// An integer solution with every variable inside the 64-bit range, found
// by fixing variables one at a time to the feasible value closest to zero
// from above, or from below when no nonnegative value exists. Empty when
// the system is unsatisfiable or no such solution exists.
std::optional<std::vector<int64_t>> FindModel(const System& s,
                                              const Deadline& deadline);

}  // namespace tajpar::omega

#endif  // TAJPAR_SRC_OMEGA_H_
