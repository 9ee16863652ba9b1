// Copyright 2026 The infauct Authors.
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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace infauct {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultLpTol = 1e-9;

enum class Relation { kLessEq, kGreaterEq, kEqual };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::kLessEq;
  double rhs = 0.0;
};

struct VariableBounds {
  double lower = 0.0;
  double upper = kLpInfinity;
};

// maximize c.x subject to rows and per-variable bounds. Variables default to
// [0, inf).
class LinearProgram {
 public:
  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return objective_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }

  void set_objective(std::size_t var, double coeff) { objective_.at(var) = coeff; }
  void set_objective(std::vector<double> coeffs);
  void set_bounds(std::size_t var, double lower, double upper);
  std::size_t add_constraint(std::vector<double> coeffs, Relation relation, double rhs);

  const std::vector<double>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Constraint& constraint(std::size_t r) const { return constraints_[r]; }
  const std::vector<VariableBounds>& bounds() const { return bounds_; }

  // Amount by which row r is violated at x (0 when satisfied).
  double row_violation(std::size_t r, std::span<const double> x) const;
  // Largest violation over rows and bounds.
  double max_violation(std::span<const double> x) const;
  double evaluate(std::span<const double> x) const;

 private:
  std::vector<double> objective_;
  std::vector<Constraint> constraints_;
  std::vector<VariableBounds> bounds_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kSolverFailure };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kSolverFailure;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::string message;
};

enum class PivotRule {
  // Smallest-index entering and leaving variable; never cycles.
  kBland,
  // Largest reduced cost, switching to Bland's rule while the objective
  // stalls on degenerate pivots.
  kDantzigBlandFallback,
};

struct SolverOptions {
  double tol = kDefaultLpTol;
  PivotRule rule = PivotRule::kBland;
  std::size_t max_iterations = 1'000'000;
  // When set, the final tableau of each phase is written here.
  std::ostream* trace = nullptr;
};

// Two-phase primal simplex on a dense tableau.
LpSolution solve(const LinearProgram& lp, const SolverOptions& options);
LpSolution solve(const LinearProgram& lp, double tol = kDefaultLpTol);

// Solves the LP restricted to `initial_rows`, then repeatedly adds the most
// violated remaining rows until the relaxed optimum satisfies every row. The
// result is an optimum of the full LP. Unbounded relaxations fall back to a
// full solve.
LpSolution solve_with_row_generation(const LinearProgram& lp,
                                     std::span<const std::size_t> initial_rows,
                                     const SolverOptions& options);

}  // namespace infauct
