#include "ctxlab/lp.hpp"

#include <cmath>

#include "ctxlab/errors.hpp"

namespace ctxlab {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

template <class T>
void check_structure(const BasicLinearProgram<T>& lp) {
  if (lp.free_var.size() != lp.n_vars) {
    throw StructuralError("linear program: bound vector has " + std::to_string(lp.free_var.size()) +
                          " entries for " + std::to_string(lp.n_vars) + " variables");
  }
  if (!lp.objective.empty() && lp.objective.size() != lp.n_vars) {
    throw StructuralError("linear program: objective has " + std::to_string(lp.objective.size()) +
                          " entries for " + std::to_string(lp.n_vars) + " variables");
  }
  auto check_rows = [&](const std::vector<LinearRow<T>>& rows, const char* what) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].cols.size() != rows[r].vals.size()) {
        throw StructuralError(std::string("linear program: ") + what + " row " + std::to_string(r) +
                              " has mismatched index/value lengths");
      }
      for (std::size_t c : rows[r].cols) {
        if (c >= lp.n_vars) {
          throw StructuralError(std::string("linear program: ") + what + " row " + std::to_string(r) +
                                " references variable " + std::to_string(c));
        }
      }
    }
  };
  check_rows(lp.equalities, "equality");
  check_rows(lp.inequalities, "inequality");
}

template void check_structure(const BasicLinearProgram<Rational>&);
template void check_structure(const BasicLinearProgram<double>&);

FloatLinearProgram to_float(const LinearProgram& lp) {
  FloatLinearProgram out;
  out.n_vars = lp.n_vars;
  out.sense = lp.sense;
  out.free_var = lp.free_var;
  out.objective = to_doubles(lp.objective);
  auto convert = [](const LinearRow<Rational>& row) {
    LinearRow<double> r;
    r.cols = row.cols;
    r.vals = to_doubles(row.vals);
    r.rhs = row.rhs.get_d();
    return r;
  };
  for (const auto& row : lp.equalities) out.equalities.push_back(convert(row));
  for (const auto& row : lp.inequalities) out.inequalities.push_back(convert(row));
  return out;
}

FloatLpOutcome solve_float(const LinearProgram& lp, const FloatOptions& options) {
  check_structure(lp);
  return solve_float(to_float(lp), options);
}

namespace {

Rational row_value(const LinearRow<Rational>& row, const std::vector<Rational>& x) {
  Rational v = 0;
  for (std::size_t n = 0; n < row.cols.size(); ++n) v += row.vals[n] * x[row.cols[n]];
  return v;
}

// A^T y + G^T z, per variable.
std::vector<Rational> transposed_product(const LinearProgram& lp, const std::vector<Rational>& multipliers) {
  std::vector<Rational> out(lp.n_vars);
  const std::size_t m_eq = lp.equalities.size();
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    const auto& row = r < m_eq ? lp.equalities[r] : lp.inequalities[r - m_eq];
    if (sgn(multipliers[r]) == 0) continue;
    for (std::size_t n = 0; n < row.cols.size(); ++n) out[row.cols[n]] += row.vals[n] * multipliers[r];
  }
  return out;
}

Rational rhs_product(const LinearProgram& lp, const std::vector<Rational>& multipliers) {
  Rational v = 0;
  const std::size_t m_eq = lp.equalities.size();
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    const auto& row = r < m_eq ? lp.equalities[r] : lp.inequalities[r - m_eq];
    v += row.rhs * multipliers[r];
  }
  return v;
}

Rational min_form_cost(const LinearProgram& lp, std::size_t j) {
  if (lp.objective.empty()) return 0;
  return lp.sense == Sense::Maximize ? Rational(-lp.objective[j]) : lp.objective[j];
}

bool inequality_multipliers_nonpositive(const LinearProgram& lp, const std::vector<Rational>& multipliers) {
  for (std::size_t r = lp.equalities.size(); r < lp.rows(); ++r) {
    if (sgn(multipliers[r]) > 0) return false;
  }
  return true;
}

}  // namespace

bool is_feasible(const LinearProgram& lp, const std::vector<Rational>& x) {
  if (x.size() != lp.n_vars) return false;
  for (std::size_t j = 0; j < lp.n_vars; ++j) {
    if (!lp.free_var[j] && sgn(x[j]) < 0) return false;
  }
  for (const auto& row : lp.equalities) {
    if (row_value(row, x) != row.rhs) return false;
  }
  for (const auto& row : lp.inequalities) {
    if (row_value(row, x) > row.rhs) return false;
  }
  return true;
}

bool verify_farkas(const LinearProgram& lp, const std::vector<Rational>& certificate) {
  if (certificate.size() != lp.rows()) return false;
  if (!inequality_multipliers_nonpositive(lp, certificate)) return false;
  const auto combo = transposed_product(lp, certificate);
  for (std::size_t j = 0; j < lp.n_vars; ++j) {
    if (lp.free_var[j] ? sgn(combo[j]) != 0 : sgn(combo[j]) > 0) return false;
  }
  return sgn(rhs_product(lp, certificate)) > 0;
}

bool verify_outcome(const LinearProgram& lp, const LpOutcome& outcome) {
  switch (outcome.status) {
    case LpStatus::Optimal: {
      if (!is_feasible(lp, outcome.primal)) return false;
      if (outcome.certificate.size() != lp.rows()) return false;
      if (!inequality_multipliers_nonpositive(lp, outcome.certificate)) return false;
      const auto combo = transposed_product(lp, outcome.certificate);
      Rational primal_min = 0;
      for (std::size_t j = 0; j < lp.n_vars; ++j) {
        const Rational reduced = min_form_cost(lp, j) - combo[j];
        if (lp.free_var[j] ? sgn(reduced) != 0 : sgn(reduced) < 0) return false;
        primal_min += min_form_cost(lp, j) * outcome.primal[j];
      }
      const Rational claimed = lp.sense == Sense::Maximize ? Rational(-outcome.objective_value)
                                                           : outcome.objective_value;
      return primal_min == claimed && rhs_product(lp, outcome.certificate) == primal_min;
    }
    case LpStatus::Infeasible:
      return verify_farkas(lp, outcome.certificate);
    case LpStatus::Unbounded: {
      const auto& d = outcome.certificate;
      if (d.size() != lp.n_vars || !is_feasible(lp, outcome.primal)) return false;
      for (std::size_t j = 0; j < lp.n_vars; ++j) {
        if (!lp.free_var[j] && sgn(d[j]) < 0) return false;
      }
      for (const auto& row : lp.equalities) {
        if (sgn(row_value(row, d)) != 0) return false;
      }
      for (const auto& row : lp.inequalities) {
        if (sgn(row_value(row, d)) > 0) return false;
      }
      Rational slope = 0;
      for (std::size_t j = 0; j < lp.n_vars; ++j) slope += min_form_cost(lp, j) * d[j];
      return sgn(slope) < 0;
    }
    case LpStatus::NumericalFailure:
      return false;
  }
  return false;
}

double max_violation(const FloatLinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.n_vars; ++j) {
    if (!lp.free_var[j]) worst = std::max(worst, -x[j]);
  }
  auto value = [&](const LinearRow<double>& row) {
    double v = 0.0;
    for (std::size_t n = 0; n < row.cols.size(); ++n) v += row.vals[n] * x[row.cols[n]];
    return v;
  };
  for (const auto& row : lp.equalities) worst = std::max(worst, std::fabs(value(row) - row.rhs));
  for (const auto& row : lp.inequalities) worst = std::max(worst, value(row) - row.rhs);
  return worst;
}

}  // namespace ctxlab
