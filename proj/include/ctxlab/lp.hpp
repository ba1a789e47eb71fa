#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ctxlab/rational.hpp"

namespace ctxlab {

enum class Sense { Minimize, Maximize };

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus status);

/// Sparse constraint row: sum_n vals[n] * x[cols[n]]  (= or <=)  rhs.
template <class T>
struct LinearRow {
  std::vector<std::size_t> cols;
  std::vector<T> vals;
  T rhs{};

  void add(std::size_t col, const T& val) {
    cols.push_back(col);
    vals.push_back(val);
  }
};

/// minimize/maximize c.x  s.t.  A x = b,  G x <= h,  x_j >= 0 unless free.
template <class T>
struct BasicLinearProgram {
  std::size_t n_vars = 0;
  Sense sense = Sense::Minimize;
  std::vector<T> objective;  // empty means the zero objective
  std::vector<LinearRow<T>> equalities;
  std::vector<LinearRow<T>> inequalities;
  std::vector<bool> free_var;  // true: no lower bound; default nonnegative

  std::size_t add_variable(bool free = false) {
    free_var.push_back(free);
    if (!objective.empty()) objective.emplace_back();
    return n_vars++;
  }
  std::size_t add_variables(std::size_t count) {
    const std::size_t first = n_vars;
    for (std::size_t n = 0; n < count; ++n) add_variable();
    return first;
  }
  void set_objective(std::size_t var, const T& coeff) {
    if (objective.empty()) objective.assign(n_vars, T{});
    objective[var] = coeff;
  }
  std::size_t rows() const { return equalities.size() + inequalities.size(); }
};

using LinearProgram = BasicLinearProgram<Rational>;
using FloatLinearProgram = BasicLinearProgram<double>;

/// Solver result.
///
/// The certificate is expressed for the minimization form of the problem
/// (c_min = c, or -c when maximizing), over the rows in the order equalities
/// then inequalities:
///  - Optimal: dual multipliers (y, z) with z <= 0, c_min - A^T y - G^T z >= 0
///    on nonnegative variables and = 0 on free ones, and b.y + h.z equal to the
///    minimization-form optimum.
///  - Infeasible: Farkas multipliers (y, z) with z <= 0, A^T y + G^T z <= 0 on
///    nonnegative variables and = 0 on free ones, and b.y + h.z > 0.
///  - Unbounded: a ray d with A d = 0, G d <= 0, d_j >= 0 on nonnegative
///    variables and c_min.d < 0; `primal` then holds a feasible point.
template <class T>
struct BasicLpOutcome {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<T> primal;
  T objective_value{};  // in the problem's own sense
  std::vector<T> certificate;
  std::size_t pivots = 0;
};

using LpOutcome = BasicLpOutcome<Rational>;
using FloatLpOutcome = BasicLpOutcome<double>;

enum class PivotRule {
  Bland,          // smallest-index entering and leaving variables
  DantzigBland,   // most negative reduced cost, Bland after a degenerate streak
};

struct ExactOptions {
  PivotRule rule = PivotRule::Bland;
  /// For programs with at least warm_start_min_rows rows, first try the basis
  /// a double-precision solve ends on: it is accepted only when exactly primal
  /// and dual feasible with a verified certificate, otherwise the two-phase
  /// exact solve runs from scratch.
  bool float_warm_start = true;
  std::size_t warm_start_min_rows = 64;
};

/// Two-phase primal simplex over exact rationals. Throws StructuralError on
/// malformed programs.
LpOutcome solve_exact(const LinearProgram& lp, const ExactOptions& options = {});

struct FloatOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 100000;
  std::size_t refactor_every = 64;
};

/// Dense tableau simplex in double precision, rebuilt from a fresh LU inverse
/// every max(refactor_every, rows) pivots. Returns NumericalFailure when the
/// final primal or dual residuals exceed the tolerance.
FloatLpOutcome solve_float(const FloatLinearProgram& lp, const FloatOptions& options = {});
FloatLpOutcome solve_float(const LinearProgram& lp, const FloatOptions& options = {});

FloatLinearProgram to_float(const LinearProgram& lp);

/// Throws StructuralError describing the first malformed part of the program.
template <class T>
void check_structure(const BasicLinearProgram<T>& lp);

/// Exact check of primal feasibility of x.
bool is_feasible(const LinearProgram& lp, const std::vector<Rational>& x);

/// Exact check of whatever the outcome claims (optimality with equal dual
/// value, Farkas infeasibility, or an improving ray).
bool verify_outcome(const LinearProgram& lp, const LpOutcome& outcome);

/// Checks a Farkas certificate against the program's constraints alone.
bool verify_farkas(const LinearProgram& lp, const std::vector<Rational>& certificate);

/// Largest constraint violation of x (absolute), including bound violations.
double max_violation(const FloatLinearProgram& lp, const std::vector<double>& x);

}  // namespace ctxlab
