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

#include "infauct/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>

#include "infauct/error.hpp"

namespace infauct {

LinearProgram::LinearProgram(std::size_t num_vars)
    : objective_(num_vars, 0.0), bounds_(num_vars) {}

void LinearProgram::set_objective(std::vector<double> coeffs) {
  require(coeffs.size() == num_vars(), "objective length must equal the number of variables");
  objective_ = std::move(coeffs);
}

void LinearProgram::set_bounds(std::size_t var, double lower, double upper) {
  require(var < num_vars(), "bound on an unknown variable");
  require(!std::isnan(lower) && !std::isnan(upper) && lower <= upper,
          "variable bounds need lower <= upper");
  require(lower < kLpInfinity && upper > -kLpInfinity, "variable bounds must admit a value");
  bounds_[var] = {lower, upper};
}

std::size_t LinearProgram::add_constraint(std::vector<double> coeffs, Relation relation,
                                          double rhs) {
  require(coeffs.size() == num_vars(), "constraint row length must equal the number of variables");
  require(std::isfinite(rhs), "constraint right-hand side must be finite");
  constraints_.push_back({std::move(coeffs), relation, rhs});
  return constraints_.size() - 1;
}

double LinearProgram::row_violation(std::size_t r, std::span<const double> x) const {
  const Constraint& c = constraints_[r];
  double lhs = 0.0;
  for (std::size_t j = 0; j < c.coeffs.size(); ++j) lhs += c.coeffs[j] * x[j];
  switch (c.relation) {
    case Relation::kLessEq:
      return std::max(0.0, lhs - c.rhs);
    case Relation::kGreaterEq:
      return std::max(0.0, c.rhs - lhs);
    case Relation::kEqual:
      return std::abs(lhs - c.rhs);
  }
  return 0.0;
}

double LinearProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < constraints_.size(); ++r) worst = std::max(worst, row_violation(r, x));
  for (std::size_t j = 0; j < bounds_.size(); ++j) {
    worst = std::max(worst, bounds_[j].lower - x[j]);
    worst = std::max(worst, x[j] - bounds_[j].upper);
  }
  return worst;
}

double LinearProgram::evaluate(std::span<const double> x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < objective_.size(); ++j) v += objective_[j] * x[j];
  return v;
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kSolverFailure:
      return "solver_failure";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
// Degenerate pivots tolerated before the fallback rule switches to Bland.
constexpr std::size_t kStallLimit = 50;

enum class ColumnKind { kShifted, kMirrored, kFree };

// Original variable x expressed through non-negative standard-form columns:
// shifted x = offset + y, mirrored x = offset - y, free x = y - y'.
struct VarMap {
  ColumnKind kind = ColumnKind::kShifted;
  std::size_t col = 0;
  std::size_t neg_col = 0;
  double offset = 0.0;
};

// Rows over non-negative columns with rhs >= 0.
struct StandardForm {
  std::size_t num_cols = 0;
  std::vector<std::vector<double>> rows;
  std::vector<Relation> relations;
  std::vector<double> rhs;
  std::vector<double> cost;
  std::vector<VarMap> vars;
};

// Maps a row onto the standard-form columns; returns the shifted rhs.
double map_row(const StandardForm& sf, const std::vector<double>& coeffs, double rhs,
               std::vector<double>& out) {
  out.assign(sf.num_cols, 0.0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double a = coeffs[j];
    if (a == 0.0) continue;
    const VarMap& vm = sf.vars[j];
    switch (vm.kind) {
      case ColumnKind::kShifted:
        out[vm.col] += a;
        rhs -= a * vm.offset;
        break;
      case ColumnKind::kMirrored:
        out[vm.col] -= a;
        rhs -= a * vm.offset;
        break;
      case ColumnKind::kFree:
        out[vm.col] += a;
        out[vm.neg_col] -= a;
        break;
    }
  }
  return rhs;
}

// Standard form of the bounds plus the constraints listed in `rows`.
StandardForm standardize(const LinearProgram& lp, std::span<const std::size_t> rows) {
  StandardForm sf;
  const std::size_t n = lp.num_vars();
  sf.vars.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const VariableBounds& b = lp.bounds()[j];
    VarMap& vm = sf.vars[j];
    if (std::isfinite(b.lower)) {
      vm = {ColumnKind::kShifted, sf.num_cols++, 0, b.lower};
    } else if (std::isfinite(b.upper)) {
      vm = {ColumnKind::kMirrored, sf.num_cols++, 0, b.upper};
    } else {
      vm.kind = ColumnKind::kFree;
      vm.col = sf.num_cols++;
      vm.neg_col = sf.num_cols++;
    }
  }

  auto push_row = [&](std::vector<double> row, Relation rel, double rhs) {
    // A zero-rhs >= row becomes <= so its slack can start in the basis.
    if (rhs < 0.0 || (rhs == 0.0 && rel == Relation::kGreaterEq)) {
      for (double& a : row) a = -a;
      rhs = -rhs;
      if (rel == Relation::kLessEq) {
        rel = Relation::kGreaterEq;
      } else if (rel == Relation::kGreaterEq) {
        rel = Relation::kLessEq;
      }
    }
    sf.rows.push_back(std::move(row));
    sf.relations.push_back(rel);
    sf.rhs.push_back(rhs);
  };

  for (std::size_t r : rows) {
    const Constraint& c = lp.constraint(r);
    std::vector<double> row;
    const double rhs = map_row(sf, c.coeffs, c.rhs, row);
    push_row(std::move(row), c.relation, rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const VariableBounds& b = lp.bounds()[j];
    if (sf.vars[j].kind == ColumnKind::kShifted && std::isfinite(b.upper)) {
      std::vector<double> row(sf.num_cols, 0.0);
      row[sf.vars[j].col] = 1.0;
      push_row(std::move(row), Relation::kLessEq, b.upper - b.lower);
    }
  }

  sf.cost.assign(sf.num_cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = lp.objective()[j];
    const VarMap& vm = sf.vars[j];
    switch (vm.kind) {
      case ColumnKind::kShifted:
        sf.cost[vm.col] += c;
        break;
      case ColumnKind::kMirrored:
        sf.cost[vm.col] -= c;
        break;
      case ColumnKind::kFree:
        sf.cost[vm.col] += c;
        sf.cost[vm.neg_col] -= c;
        break;
    }
  }
  return sf;
}

enum class PhaseResult { kOptimal, kUnbounded, kInfeasible, kIterationLimit, kNumerical };

// Dense tableau [structural | slack | artificial] with separate rhs and
// reduced-cost row. The reduced-cost row holds c_j - c_B B^-1 A_j and
// rhs_cost_ holds -c_B B^-1 b, i.e. minus the current objective.
class Tableau {
 public:
  Tableau(const StandardForm& sf, const SolverOptions& options)
      : options_(options), num_struct_(sf.num_cols) {
    rows_ = sf.rows.size();
    std::size_t slacks = 0;
    std::size_t artificials = 0;
    for (Relation rel : sf.relations) {
      if (rel != Relation::kEqual) ++slacks;
      if (rel != Relation::kLessEq) ++artificials;
    }
    first_art_ = num_struct_ + slacks;
    cols_ = first_art_ + artificials;
    active_cols_ = cols_;
    a_.assign(rows_ * cols_, 0.0);
    b_ = sf.rhs;
    basis_.assign(rows_, kNone);

    std::size_t next_slack = num_struct_;
    std::size_t next_art = first_art_;
    for (std::size_t r = 0; r < rows_; ++r) {
      double* row = at(r);
      std::copy(sf.rows[r].begin(), sf.rows[r].end(), row);
      switch (sf.relations[r]) {
        case Relation::kLessEq:
          row[next_slack] = 1.0;
          basis_[r] = next_slack++;
          break;
        case Relation::kGreaterEq:
          row[next_slack++] = -1.0;
          row[next_art] = 1.0;
          basis_[r] = next_art++;
          break;
        case Relation::kEqual:
          row[next_art] = 1.0;
          basis_[r] = next_art++;
          break;
      }
    }
    cost_.assign(cols_, 0.0);
    std::copy(sf.cost.begin(), sf.cost.end(), cost_.begin());
    z_.assign(cols_, 0.0);
    scratch_.reserve(cols_);
  }

  bool has_artificials() const { return first_art_ < cols_; }

  // Phase 1: maximize -sum(artificials). Returns the optimal value.
  PhaseResult phase1(double& value) {
    std::vector<double> phase_cost(cols_, 0.0);
    for (std::size_t j = first_art_; j < cols_; ++j) phase_cost[j] = -1.0;
    price_out(phase_cost);
    const PhaseResult res = run(0.0);
    value = -rhs_cost_;
    return res;
  }

  // Pivots basic artificials out (or drops their redundant rows) and
  // disables artificial columns.
  void drop_artificials() {
    for (std::size_t r = 0; r < rows_;) {
      if (basis_[r] < first_art_) {
        ++r;
        continue;
      }
      const double* row = at(r);
      std::size_t q = kNone;
      double best = options_.tol;
      for (std::size_t j = 0; j < first_art_; ++j) {
        if (std::abs(row[j]) > best) {
          best = std::abs(row[j]);
          q = j;
        }
      }
      if (q != kNone) {
        pivot(r, q);
        ++r;
      } else {
        remove_row(r);
      }
    }
    active_cols_ = first_art_;
  }

  PhaseResult phase2() {
    price_out(cost_);
    return run();
  }

  // Re-optimizes after append_rows, which leaves the basis dual feasible.
  PhaseResult reoptimize() {
    const PhaseResult dual = dual_simplex();
    if (dual != PhaseResult::kOptimal) return dual;
    return run();
  }

  // Appends rows `row . y <= rhs` over the structural columns with a fresh
  // basic slack each; rhs may be negative. Artificial columns are discarded,
  // so this is only valid once they have left the basis.
  void append_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs) {
    const std::size_t keep = first_art_;
    const std::size_t new_cols = keep + rows.size();
    std::vector<double> a((rows_ + rows.size()) * new_cols, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::copy(at(r), at(r) + keep, a.data() + r * new_cols);
    }
    a_ = std::move(a);
    cols_ = new_cols;
    first_art_ = new_cols;
    active_cols_ = new_cols;
    z_.resize(new_cols, 0.0);
    cost_.resize(new_cols, 0.0);

    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::size_t r = rows_;
      double* row = at(r);
      std::copy(rows[k].begin(), rows[k].end(), row);
      row[keep + k] = 1.0;
      double b = rhs[k];
      // Express the row in the current basis.
      for (std::size_t i = 0; i < r; ++i) {
        const double f = row[basis_[i]];
        if (f == 0.0) continue;
        const double* src = at(i);
        for (std::size_t j = 0; j < cols_; ++j) {
          if (src[j] != 0.0) row[j] -= f * src[j];
        }
        row[basis_[i]] = 0.0;
        b -= f * b_[i];
      }
      for (std::size_t j = 0; j < cols_; ++j) {
        if (std::abs(row[j]) < 1e-15) row[j] = 0.0;
      }
      b_.push_back(b);
      basis_.push_back(keep + k);
      ++rows_;
    }
  }

  std::vector<double> primal() const {
    std::vector<double> y(num_struct_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < num_struct_) y[basis_[r]] = std::max(0.0, b_[r]);
    }
    return y;
  }

  std::size_t iterations() const { return iterations_; }

  void dump(std::ostream& os, const char* label) const {
    os << "-- tableau " << label << " (" << rows_ << " x " << active_cols_ << ")\n";
    os << std::setprecision(6);
    os << "z:";
    for (std::size_t j = 0; j < active_cols_; ++j) os << ' ' << z_[j];
    os << " | " << -rhs_cost_ << '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
      os << 'x' << basis_[r] << ':';
      for (std::size_t j = 0; j < active_cols_; ++j) os << ' ' << at(r)[j];
      os << " | " << b_[r] << '\n';
    }
  }

 private:
  double* at(std::size_t r) { return a_.data() + r * cols_; }
  const double* at(std::size_t r) const { return a_.data() + r * cols_; }

  void price_out(const std::vector<double>& cost) {
    std::copy(cost.begin(), cost.end(), z_.begin());
    rhs_cost_ = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = at(r);
      for (std::size_t j = 0; j < active_cols_; ++j) z_[j] -= cb * row[j];
      rhs_cost_ -= cb * b_[r];
    }
    for (std::size_t r = 0; r < rows_; ++r) z_[basis_[r]] = 0.0;
  }

  void remove_row(std::size_t r) {
    const std::size_t last = rows_ - 1;
    if (r != last) {
      std::copy(at(last), at(last) + cols_, at(r));
      b_[r] = b_[last];
      basis_[r] = basis_[last];
    }
    --rows_;
    a_.resize(rows_ * cols_);
    b_.pop_back();
    basis_.pop_back();
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = at(r);
    const double inv = 1.0 / prow[q];
    scratch_.clear();
    for (std::size_t j = 0; j < active_cols_; ++j) {
      if (prow[j] == 0.0) continue;
      prow[j] *= inv;
      scratch_.push_back(j);
    }
    prow[q] = 1.0;
    b_[r] *= inv;

    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      double* row = at(i);
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j : scratch_) {
        double v = row[j] - f * prow[j];
        if (std::abs(v) < 1e-15) v = 0.0;
        row[j] = v;
      }
      row[q] = 0.0;
      b_[i] -= f * b_[r];
      if (b_[i] < 0.0 && b_[i] > -options_.tol) b_[i] = 0.0;
    }
    const double f = z_[q];
    if (f != 0.0) {
      for (std::size_t j : scratch_) z_[j] -= f * prow[j];
      rhs_cost_ -= f * b_[r];
    }
    z_[q] = 0.0;
    basis_[r] = q;
    ++iterations_;
  }

  std::size_t entering(bool bland) const {
    const double tol = options_.tol;
    if (bland) {
      for (std::size_t j = 0; j < active_cols_; ++j) {
        if (z_[j] > tol) return j;
      }
      return kNone;
    }
    std::size_t q = kNone;
    double best = tol;
    for (std::size_t j = 0; j < active_cols_; ++j) {
      if (z_[j] > best) {
        best = z_[j];
        q = j;
      }
    }
    return q;
  }

  // Two-pass ratio test: bound the step with feasibility relaxed by tol,
  // then take the largest pivot element within that step.
  std::size_t leaving_harris(std::size_t q) const {
    const double tol = options_.tol;
    double theta = kLpInfinity;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double a = at(r)[q];
      if (a > tol) theta = std::min(theta, (std::max(b_[r], 0.0) + tol) / a);
    }
    std::size_t r_best = kNone;
    double best_a = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double a = at(r)[q];
      if (a <= tol || std::max(b_[r], 0.0) / a > theta) continue;
      if (a > best_a) {
        best_a = a;
        r_best = r;
      }
    }
    return r_best;
  }

  PhaseResult dual_simplex() {
    const double tol = options_.tol;
    std::size_t stall = 0;
    for (;;) {
      if (iterations_ >= options_.max_iterations) return PhaseResult::kIterationLimit;
      const bool bland = options_.rule == PivotRule::kBland || stall >= kStallLimit;
      std::size_t r = kNone;
      double worst = -tol;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (b_[i] >= -tol) continue;
        if (bland) {
          if (r == kNone || basis_[i] < basis_[r]) r = i;
        } else if (b_[i] < worst) {
          worst = b_[i];
          r = i;
        }
      }
      if (r == kNone) return PhaseResult::kOptimal;

      const double* row = at(r);
      std::size_t q = kNone;
      double best_ratio = kLpInfinity;
      double best_a = 0.0;
      for (std::size_t j = 0; j < active_cols_; ++j) {
        const double a = row[j];
        if (a >= -tol) continue;
        const double ratio = std::max(0.0, -z_[j]) / -a;
        const double slack = 1e-12 * std::max(1.0, best_ratio == kLpInfinity ? 0.0 : best_ratio);
        if (q == kNone || ratio < best_ratio - slack ||
            (ratio <= best_ratio + slack && !bland && -a > best_a)) {
          q = j;
          best_ratio = std::min(best_ratio, ratio);
          best_a = -a;
        }
      }
      if (q == kNone) return PhaseResult::kInfeasible;
      const double before = -rhs_cost_;
      pivot(r, q);
      const double after = -rhs_cost_;
      if (!std::isfinite(after)) return PhaseResult::kNumerical;
      if (after < before - tol * std::max(1.0, std::abs(before))) {
        stall = 0;
      } else {
        ++stall;
      }
    }
  }

  std::size_t leaving(std::size_t q) const {
    std::size_t r_best = kNone;
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double a = at(r)[q];
      if (a <= options_.tol) continue;
      const double ratio = b_[r] / a;
      if (r_best == kNone) {
        r_best = r;
        best = ratio;
        continue;
      }
      const double slack = 1e-12 * std::max(1.0, std::abs(best));
      if (ratio < best - slack || (ratio <= best + slack && basis_[r] < basis_[r_best])) {
        r_best = r;
        best = std::min(best, ratio);
      }
    }
    return r_best;
  }

  // `ceiling` is a known upper bound on the objective; reaching it ends the phase.
  PhaseResult run(double ceiling = kLpInfinity) {
    std::size_t stall = 0;
    for (;;) {
      if (-rhs_cost_ >= ceiling - options_.tol) return PhaseResult::kOptimal;
      if (iterations_ >= options_.max_iterations) return PhaseResult::kIterationLimit;
      const bool bland = options_.rule == PivotRule::kBland || stall >= kStallLimit;
      const std::size_t q = entering(bland);
      if (q == kNone) return PhaseResult::kOptimal;
      const std::size_t r = bland ? leaving(q) : leaving_harris(q);
      if (r == kNone) return PhaseResult::kUnbounded;
      const double before = -rhs_cost_;
      pivot(r, q);
      const double after = -rhs_cost_;
      if (!std::isfinite(after)) return PhaseResult::kNumerical;
      if (after > before + options_.tol * std::max(1.0, std::abs(before))) {
        stall = 0;
      } else {
        ++stall;
      }
    }
  }

  const SolverOptions& options_;
  std::size_t num_struct_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t first_art_ = 0;
  std::size_t active_cols_ = 0;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  std::vector<double> z_;
  double rhs_cost_ = 0.0;
  std::vector<std::size_t> scratch_;
  std::size_t iterations_ = 0;
};

LpSolution failure(std::string message, std::size_t iterations) {
  LpSolution s;
  s.status = LpStatus::kSolverFailure;
  s.message = std::move(message);
  s.iterations = iterations;
  return s;
}

// Scale used for relative feasibility checks.
double problem_scale(const LinearProgram& lp, std::span<const double> x) {
  double scale = 1.0;
  for (const Constraint& c : lp.constraints()) scale = std::max(scale, std::abs(c.rhs));
  for (double v : x) scale = std::max(scale, std::abs(v));
  return scale;
}

LpSolution with_status(LpStatus status, std::size_t iterations) {
  LpSolution s;
  s.status = status;
  s.iterations = iterations;
  return s;
}

// Runs both phases. Returns nothing when the tableau ends optimal.
std::optional<LpSolution> two_phase(Tableau& tableau, const StandardForm& sf,
                                    const SolverOptions& options) {
  if (tableau.has_artificials()) {
    double value = 0.0;
    const PhaseResult p1 = tableau.phase1(value);
    if (options.trace) tableau.dump(*options.trace, "phase 1");
    if (p1 == PhaseResult::kIterationLimit) {
      return failure("iteration limit in phase 1", tableau.iterations());
    }
    if (p1 != PhaseResult::kOptimal) {
      return failure("numerical breakdown in phase 1", tableau.iterations());
    }
    double rhs_scale = 1.0;
    for (double b : sf.rhs) rhs_scale = std::max(rhs_scale, b);
    if (value < -options.tol * rhs_scale) {
      return with_status(LpStatus::kInfeasible, tableau.iterations());
    }
    tableau.drop_artificials();
  }

  const PhaseResult p2 = tableau.phase2();
  if (options.trace) tableau.dump(*options.trace, "phase 2");
  if (p2 == PhaseResult::kUnbounded) return with_status(LpStatus::kUnbounded, tableau.iterations());
  if (p2 == PhaseResult::kIterationLimit) {
    return failure("iteration limit in phase 2", tableau.iterations());
  }
  if (p2 != PhaseResult::kOptimal) {
    return failure("numerical breakdown in phase 2", tableau.iterations());
  }
  return std::nullopt;
}

std::vector<double> recover(const StandardForm& sf, const std::vector<double>& y) {
  std::vector<double> x(sf.vars.size());
  for (std::size_t j = 0; j < sf.vars.size(); ++j) {
    const VarMap& vm = sf.vars[j];
    switch (vm.kind) {
      case ColumnKind::kShifted:
        x[j] = vm.offset + y[vm.col];
        break;
      case ColumnKind::kMirrored:
        x[j] = vm.offset - y[vm.col];
        break;
      case ColumnKind::kFree:
        x[j] = y[vm.col] - y[vm.neg_col];
        break;
    }
  }
  return x;
}

// Checks x against the whole LP and fills in the objective.
LpSolution finish(const LinearProgram& lp, std::vector<double> x, std::size_t iterations,
                  const SolverOptions& options) {
  const double violation = lp.max_violation(x);
  if (!(violation <= options.tol * problem_scale(lp, x))) {
    return failure("solution violates constraints by " + std::to_string(violation), iterations);
  }
  LpSolution s;
  s.objective = lp.evaluate(x);
  s.x = std::move(x);
  s.iterations = iterations;
  s.status = LpStatus::kOptimal;
  return s;
}

void check_inputs(const LinearProgram& lp, const SolverOptions& options) {
  require(options.tol > 0.0, "solver tolerance must be positive");
  for (const Constraint& c : lp.constraints()) {
    require(c.coeffs.size() == lp.num_vars(), "constraint row length mismatch");
  }
}

std::vector<std::size_t> all_rows(const LinearProgram& lp) {
  std::vector<std::size_t> rows(lp.num_constraints());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  return rows;
}

LpSolution solve_rows(const LinearProgram& lp, std::span<const std::size_t> rows,
                      const SolverOptions& options) {
  const StandardForm sf = standardize(lp, rows);
  Tableau tableau(sf, options);
  if (auto early = two_phase(tableau, sf, options)) return *early;
  LpSolution s;
  s.status = LpStatus::kOptimal;
  s.x = recover(sf, tableau.primal());
  s.objective = lp.evaluate(s.x);
  s.iterations = tableau.iterations();
  return s;
}

// Inactive rows violated at x, most violated first, at most `limit`.
std::vector<std::size_t> most_violated(const LinearProgram& lp, const std::vector<bool>& active,
                                       std::span<const double> x, std::size_t limit,
                                       const SolverOptions& options) {
  const double scale = problem_scale(lp, x);
  std::vector<std::pair<double, std::size_t>> violated;
  for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
    if (active[r]) continue;
    const double v = lp.row_violation(r, x);
    if (v > options.tol * scale) violated.emplace_back(v, r);
  }
  const std::size_t take = std::min(limit, violated.size());
  std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take),
                    violated.end(), [](const auto& a, const auto& b) {
                      return a.first > b.first || (a.first == b.first && a.second < b.second);
                    });
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < take; ++k) out.push_back(violated[k].second);
  return out;
}

// Row generation that re-solves every relaxation from scratch.
LpSolution row_generation_cold(const LinearProgram& lp, std::vector<bool> active,
                               std::size_t batch, std::size_t iterations,
                               const SolverOptions& options) {
  for (;;) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < active.size(); ++r) {
      if (active[r]) rows.push_back(r);
    }
    LpSolution sol = solve_rows(lp, rows, options);
    iterations += sol.iterations;
    sol.iterations = iterations;
    if (sol.status == LpStatus::kUnbounded) {
      LpSolution full = solve(lp, options);
      full.iterations += iterations;
      return full;
    }
    if (sol.status != LpStatus::kOptimal) return sol;
    const auto add = most_violated(lp, active, sol.x, batch, options);
    if (add.empty()) return finish(lp, std::move(sol.x), iterations, options);
    for (std::size_t r : add) active[r] = true;
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverOptions& options) {
  check_inputs(lp, options);
  const auto rows = all_rows(lp);
  LpSolution sol = solve_rows(lp, rows, options);
  if (sol.status != LpStatus::kOptimal) return sol;
  return finish(lp, std::move(sol.x), sol.iterations, options);
}

LpSolution solve(const LinearProgram& lp, double tol) {
  SolverOptions options;
  options.tol = tol;
  return solve(lp, options);
}

LpSolution solve_with_row_generation(const LinearProgram& lp,
                                     std::span<const std::size_t> initial_rows,
                                     const SolverOptions& options) {
  check_inputs(lp, options);
  std::vector<bool> active(lp.num_constraints(), false);
  std::vector<std::size_t> rows;
  for (std::size_t r : initial_rows) {
    require(r < lp.num_constraints(), "row generation: initial row out of range");
    if (!active[r]) {
      active[r] = true;
      rows.push_back(r);
    }
  }
  // Equality rows cannot be appended with a single slack.
  for (std::size_t r = 0; r < lp.num_constraints(); ++r) {
    if (!active[r] && lp.constraint(r).relation == Relation::kEqual) {
      active[r] = true;
      rows.push_back(r);
    }
  }
  std::sort(rows.begin(), rows.end());
  const std::size_t batch = std::max<std::size_t>(32, rows.size());

  const StandardForm sf = standardize(lp, rows);
  Tableau tableau(sf, options);
  if (auto early = two_phase(tableau, sf, options)) {
    if (early->status == LpStatus::kUnbounded) {
      LpSolution full = solve(lp, options);
      full.iterations += early->iterations;
      return full;
    }
    return *early;
  }

  // Warm start: append violated rows to the optimal tableau and restore
  // primal feasibility with dual simplex pivots.
  for (;;) {
    std::vector<double> x = recover(sf, tableau.primal());
    const auto add = most_violated(lp, active, x, batch, options);
    if (add.empty()) {
      LpSolution done = finish(lp, std::move(x), tableau.iterations(), options);
      if (done.status == LpStatus::kOptimal) return done;
      break;
    }
    std::vector<std::vector<double>> new_rows;
    std::vector<double> new_rhs;
    for (std::size_t r : add) {
      active[r] = true;
      const Constraint& c = lp.constraint(r);
      std::vector<double> row;
      double rhs = map_row(sf, c.coeffs, c.rhs, row);
      if (c.relation == Relation::kGreaterEq) {
        for (double& a : row) a = -a;
        rhs = -rhs;
      }
      new_rows.push_back(std::move(row));
      new_rhs.push_back(rhs);
    }
    tableau.append_rows(new_rows, new_rhs);
    // Anything but optimal, including a dual infeasibility verdict, is
    // settled by the cold path's phase 1.
    if (tableau.reoptimize() != PhaseResult::kOptimal) break;
  }
  // The warm path lost accuracy or stalled; finish from scratch on the rows
  // gathered so far.
  return row_generation_cold(lp, std::move(active), batch, tableau.iterations(), options);
}

}  // namespace infauct
