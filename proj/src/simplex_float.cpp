// Two-phase primal simplex in double precision. The tableau is updated row by
// row with the SIMD axpy kernel and periodically rebuilt from the original
// columns through an LU factorization of the basis; the final basis is always
// re-solved from scratch before primal and dual values are reported.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ctxlab/errors.hpp"
#include "ctxlab/lp.hpp"
#include "ctxlab/simd.hpp"
#include "standard_form.hpp"

namespace ctxlab {

namespace {

using detail::ColumnKind;
using detail::StandardForm;

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
// Last resort against stalling in floating point; the lexicographic ratio test
// normally prevents it.
constexpr std::size_t kDegenerateStreakForBland = 200;
constexpr double kPivotTolerance = 1e-9;
constexpr double kHarrisSlack = 1e-9;

// Dense LU with partial pivoting of a square matrix stored row-major.
class DenseLu {
 public:
  explicit DenseLu(std::size_t n) : n_(n), lu_(n * n), perm_(n) {}

  double* data() { return lu_.data(); }

  bool factor() {
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t p = k;
      double best = std::fabs(lu_[k * n_ + k]);
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double v = std::fabs(lu_[i * n_ + k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best < 1e-13) return false;
      if (p != k) {
        std::swap_ranges(lu_.begin() + k * n_, lu_.begin() + (k + 1) * n_, lu_.begin() + p * n_);
        std::swap(perm_[k], perm_[p]);
      }
      const double pivot = lu_[k * n_ + k];
      for (std::size_t i = k + 1; i < n_; ++i) {
        double& l = lu_[i * n_ + k];
        if (l == 0.0) continue;
        l /= pivot;
        const std::size_t len = n_ - k - 1;
        simd::axpy(-l, {&lu_[k * n_ + k + 1], len}, {&lu_[i * n_ + k + 1], len});
      }
    }
    return true;
  }

  // Solves B x = b in place.
  void solve(std::vector<double>& b) const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < i; ++k) x[i] -= lu_[i * n_ + k] * x[k];
    }
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t k = i + 1; k < n_; ++k) x[i] -= lu_[i * n_ + k] * x[k];
      x[i] /= lu_[i * n_ + i];
    }
    b = std::move(x);
  }

  // Solves B^T y = c in place.
  void solve_transposed(std::vector<double>& c) const {
    std::vector<double> z(c);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < i; ++k) z[i] -= lu_[k * n_ + i] * z[k];
      z[i] /= lu_[i * n_ + i];
    }
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t k = i + 1; k < n_; ++k) z[i] -= lu_[k * n_ + i] * z[k];
    }
    for (std::size_t i = 0; i < n_; ++i) c[perm_[i]] = z[i];
  }

 private:
  std::size_t n_;
  std::vector<double> lu_;
  std::vector<std::size_t> perm_;
};

class FloatTableau {
 public:
  FloatTableau(const StandardForm<double>& sf, const FloatOptions& options)
      : sf_(sf), opt_(options), m_(sf.rows), n_(sf.cols()), width_(n_ + 1), cells_(m_ * width_),
        reduced_(width_), basis_(sf.identity_column), allowed_(n_, true) {
    for (std::size_t c = 0; c < n_; ++c) {
      for (const auto& [r, v] : sf.columns[c]) cells_[r * width_ + c] = v;
    }
    for (std::size_t r = 0; r < m_; ++r) cells_[r * width_ + n_] = sf.rhs[r];
  }

  void load_costs(const std::vector<double>& cost) {
    cost_ = &cost;
    recompute_reduced();
  }

  // Returns the unbounded entering column, kNone at optimality, or nullopt
  // when the iteration budget is exhausted.
  std::optional<std::size_t> optimize() {
    std::size_t streak = 0;
    for (;;) {
      if (pivots_ >= opt_.max_iterations) return std::nullopt;
      const std::size_t q = choose_entering(streak >= std::max(kDegenerateStreakForBland, 4 * m_));
      if (q == kNone) return kNone;
      const std::size_t r = choose_leaving(q);
      if (r == kNone) return q;
      // Steps that barely move the objective count as degenerate too; rounding
      // can otherwise keep a cycle alive on tiny positive steps.
      const double progress = std::max(0.0, cells_[r * width_ + n_]) / cells_[r * width_ + q] * -reduced_[q];
      streak = progress <= opt_.tolerance * (1.0 + std::abs(objective())) ? streak + 1 : 0;
      pivot(r, q);
      if (opt_.refactor_every > 0 && ++since_rebuild_ >= std::max(opt_.refactor_every, m_)) rebuild();
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    ++pivots_;
    double* prow = &cells_[r * width_];
    simd::scale(1.0 / prow[q], {prow, width_});
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &cells_[i * width_];
      const double f = row[q];
      if (f == 0.0) continue;
      simd::axpy(-f, {prow, width_}, {row, width_});
      row[q] = 0.0;
    }
    const double f = reduced_[q];
    if (f != 0.0) {
      simd::axpy(-f, {prow, width_}, {reduced_.data(), width_});
      reduced_[q] = 0.0;
    }
    basis_[r] = q;
  }

  // Recomputes the tableau as B^{-1} [A | b] from the original columns, via an
  // explicit inverse so the sparse columns cost O(m) per nonzero.
  bool rebuild() {
    DenseLu lu(m_);
    if (!factor_basis(lu)) return false;
    std::vector<double> inv(m_ * m_);  // column-major: column r is B^{-1} e_r
    std::vector<double> col(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      std::fill(col.begin(), col.end(), 0.0);
      col[r] = 1.0;
      lu.solve(col);
      std::copy(col.begin(), col.end(), inv.begin() + r * m_);
    }
    std::fill(cells_.begin(), cells_.end(), 0.0);
    for (std::size_t c = 0; c < width_; ++c) {
      std::fill(col.begin(), col.end(), 0.0);
      if (c < n_) {
        for (const auto& [r, v] : sf_.columns[c]) simd::axpy(v, {&inv[r * m_], m_}, col);
      } else {
        for (std::size_t r = 0; r < m_; ++r) {
          if (sf_.rhs[r] != 0.0) simd::axpy(sf_.rhs[r], {&inv[r * m_], m_}, col);
        }
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (std::fabs(col[r]) >= 1e-15) cells_[r * width_ + c] = col[r];
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t k = 0; k < m_; ++k) cells_[r * width_ + basis_[k]] = 0.0;
      cells_[r * width_ + basis_[r]] = 1.0;
    }
    recompute_reduced();
    since_rebuild_ = 0;
    return true;
  }

  // Simplex multipliers y solving B^T y = c_B for the loaded costs.
  std::optional<std::vector<double>> duals() const {
    DenseLu lu(m_);
    if (!factor_basis(lu)) return std::nullopt;
    std::vector<double> y(m_);
    for (std::size_t r = 0; r < m_; ++r) y[r] = (*cost_)[basis_[r]];
    lu.solve_transposed(y);
    return y;
  }

  void forbid(std::size_t c) { allowed_[c] = false; }
  std::size_t basic(std::size_t r) const { return basis_[r]; }
  double at(std::size_t r, std::size_t c) const { return cells_[r * width_ + c]; }
  double objective() const { return -reduced_[n_]; }
  std::size_t pivots() const { return pivots_; }

  std::vector<double> column_values() const {
    std::vector<double> v(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) v[basis_[r]] = cells_[r * width_ + n_];
    return v;
  }

 private:
  bool factor_basis(DenseLu& lu) const {
    double* b = lu.data();
    std::fill(b, b + m_ * m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      for (const auto& [r, v] : sf_.columns[basis_[k]]) b[r * m_ + k] = v;
    }
    return lu.factor();
  }

  void recompute_reduced() {
    const auto& cost = *cost_;
    for (std::size_t c = 0; c < n_; ++c) reduced_[c] = cost[c];
    reduced_[n_] = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      simd::axpy(-cb, {&cells_[r * width_], width_}, {reduced_.data(), width_});
    }
    for (std::size_t r = 0; r < m_; ++r) reduced_[basis_[r]] = 0.0;
  }

  std::size_t choose_entering(bool bland) const {
    std::size_t best = kNone;
    for (std::size_t c = 0; c < n_; ++c) {
      if (!allowed_[c] || reduced_[c] >= -opt_.tolerance) continue;
      if (bland) return c;
      if (best == kNone || reduced_[c] < reduced_[best]) best = c;
    }
    return best;
  }

  // Harris two-pass ratio test: bound the step with slightly relaxed
  // feasibility, then take the largest pivot element among rows inside the
  // bound. Exact ties go lexicographically on the rows of B^{-1} (the initial
  // identity columns), which rules out cycling.
  std::size_t choose_leaving(std::size_t q) {
    double max_a = 0.0;
    for (std::size_t i = 0; i < m_; ++i) max_a = std::max(max_a, cells_[i * width_ + q]);
    const double pivot_tol = std::max(kPivotTolerance, 1e-7 * max_a);
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = cells_[i * width_ + q];
      if (a <= pivot_tol) continue;
      bound = std::min(bound, (std::max(0.0, cells_[i * width_ + n_]) + kHarrisSlack) / a);
    }
    if (!std::isfinite(bound)) return kNone;
    double best_ratio = std::numeric_limits<double>::infinity();
    ties_.clear();
    for (std::size_t i = 0; i < m_; ++i) {
      const double a = cells_[i * width_ + q];
      if (a <= pivot_tol) continue;
      const double ratio = std::max(0.0, cells_[i * width_ + n_]) / a;
      if (ratio > bound) continue;
      best_ratio = std::min(best_ratio, ratio);
      ties_.push_back(i);
    }
    // Prefer large pivots among the candidates; fall back to the true minimum
    // ratio rows only when every candidate pivot is small.
    double big = 0.0;
    for (const std::size_t i : ties_) big = std::max(big, cells_[i * width_ + q]);
    std::erase_if(ties_, [&](std::size_t i) { return cells_[i * width_ + q] < 0.1 * big; });
    if (ties_.size() > 1) {
      double low = std::numeric_limits<double>::infinity();
      for (const std::size_t i : ties_) low = std::min(low, std::max(0.0, cells_[i * width_ + n_]) / cells_[i * width_ + q]);
      std::erase_if(ties_, [&](std::size_t i) {
        return std::max(0.0, cells_[i * width_ + n_]) / cells_[i * width_ + q] > low + 1e-12;
      });
    }
    for (std::size_t k = 0; k < m_ && ties_.size() > 1; ++k) {
      const std::size_t col = sf_.identity_column[k];
      double low = std::numeric_limits<double>::infinity();
      for (const std::size_t i : ties_) low = std::min(low, cells_[i * width_ + col] / cells_[i * width_ + q]);
      std::erase_if(ties_, [&](std::size_t i) { return cells_[i * width_ + col] / cells_[i * width_ + q] > low + 1e-12; });
    }
    std::size_t best = ties_.front();
    for (const std::size_t i : ties_) {
      if (cells_[i * width_ + q] > cells_[best * width_ + q]) best = i;
    }
    return best;
  }

  const StandardForm<double>& sf_;
  FloatOptions opt_;
  std::size_t m_, n_, width_;
  std::vector<double> cells_;
  std::vector<double> reduced_;
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
  std::vector<std::size_t> ties_;
  const std::vector<double>* cost_ = nullptr;
  std::size_t pivots_ = 0;
  std::size_t since_rebuild_ = 0;
};

double max_abs_of(const std::vector<double>& v) { return simd::max_abs(v); }

FloatLpOutcome failure(std::size_t pivots) {
  FloatLpOutcome out;
  out.status = LpStatus::NumericalFailure;
  out.pivots = pivots;
  return out;
}

}  // namespace

namespace {

FloatLpOutcome solve_float_impl(const FloatLinearProgram& lp, const FloatOptions& options,
                                std::vector<std::size_t>* basis_out) {
  check_structure(lp);
  for (const auto* rows : {&lp.equalities, &lp.inequalities}) {
    for (const auto& row : *rows) {
      if (!std::isfinite(row.rhs)) throw InvalidInput("linear program: non-finite right-hand side");
      for (double v : row.vals) {
        if (!std::isfinite(v)) throw InvalidInput("linear program: non-finite coefficient");
      }
    }
  }
  const StandardForm<double> sf = detail::make_standard_form(lp);
  const std::size_t m = sf.rows;
  const std::size_t n = sf.cols();
  const double tol = options.tolerance;
  const double rhs_scale = 1.0 + max_abs_of(sf.rhs);
  FloatTableau tab(sf, options);

  std::vector<double> phase1_cost(n, 0.0);
  bool has_artificial = false;
  for (std::size_t c = 0; c < n; ++c) {
    if (sf.kind[c] == ColumnKind::Artificial) {
      phase1_cost[c] = 1.0;
      has_artificial = true;
    }
  }
  if (has_artificial) {
    tab.load_costs(phase1_cost);
    for (std::size_t c = 0; c < n; ++c) {
      if (sf.kind[c] == ColumnKind::Artificial) tab.forbid(c);
    }
    if (!tab.optimize()) return failure(tab.pivots());
    if (!tab.rebuild()) return failure(tab.pivots());
    if (tab.objective() > tol * rhs_scale) {
      const auto y = tab.duals();
      if (!y) return failure(tab.pivots());
      FloatLpOutcome out;
      out.status = LpStatus::Infeasible;
      out.pivots = tab.pivots();
      out.certificate.resize(m);
      for (std::size_t r = 0; r < m; ++r) out.certificate[r] = sf.row_sign[r] * (*y)[r];
      return out;
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (sf.kind[tab.basic(r)] != ColumnKind::Artificial) continue;
      std::size_t best = kNone;
      double best_abs = 1e-7;
      for (std::size_t c = 0; c < n; ++c) {
        if (sf.kind[c] == ColumnKind::Artificial) continue;
        const double a = std::fabs(tab.at(r, c));
        if (a > best_abs) {
          best_abs = a;
          best = c;
        }
      }
      if (best != kNone) tab.pivot(r, best);
    }
  }

  tab.load_costs(sf.cost);
  const auto entering = tab.optimize();
  if (!entering) return failure(tab.pivots());
  if (!tab.rebuild()) return failure(tab.pivots());

  FloatLpOutcome out;
  out.pivots = tab.pivots();
  auto values = tab.column_values();
  for (double& v : values) v = std::max(v, 0.0);
  out.primal = detail::original_point(sf, lp.n_vars, values);

  if (*entering != kNone) {
    // Re-check the ray on the rebuilt tableau.
    const std::size_t q = *entering;
    std::vector<double> direction(n, 0.0);
    direction[q] = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (tab.at(r, q) > kPivotTolerance) return failure(out.pivots);
      direction[tab.basic(r)] = -tab.at(r, q);
    }
    out.status = LpStatus::Unbounded;
    out.certificate = detail::original_point(sf, lp.n_vars, direction);
    return out;
  }

  // The rebuild may expose small negative reduced costs; iterate once more.
  const auto again = tab.optimize();
  if (!again || *again != kNone) return failure(tab.pivots());

  const auto y = tab.duals();
  if (!y) return failure(tab.pivots());
  out.pivots = tab.pivots();
  values = tab.column_values();
  for (double& v : values) v = std::max(v, 0.0);
  out.primal = detail::original_point(sf, lp.n_vars, values);

  if (max_violation(lp, out.primal) > tol * rhs_scale) return failure(out.pivots);
  // Dual feasibility check on the original columns.
  const double cost_scale = 1.0 + max_abs_of(sf.cost);
  for (std::size_t c = 0; c < n; ++c) {
    if (sf.kind[c] == ColumnKind::Artificial) continue;
    double d = sf.cost[c];
    for (const auto& [r, v] : sf.columns[c]) d -= v * (*y)[r];
    if (d < -1e3 * tol * cost_scale) return failure(out.pivots);
  }

  out.status = LpStatus::Optimal;
  double value = 0.0;
  if (!lp.objective.empty()) {
    for (std::size_t j = 0; j < lp.n_vars; ++j) value += lp.objective[j] * out.primal[j];
  }
  out.objective_value = value;
  out.certificate.resize(m);
  for (std::size_t r = 0; r < m; ++r) out.certificate[r] = sf.row_sign[r] * (*y)[r];
  if (basis_out != nullptr) {
    basis_out->resize(m);
    for (std::size_t r = 0; r < m; ++r) (*basis_out)[r] = tab.basic(r);
  }
  return out;
}

}  // namespace

FloatLpOutcome solve_float(const FloatLinearProgram& lp, const FloatOptions& options) {
  return solve_float_impl(lp, options, nullptr);
}

namespace detail {

std::optional<std::vector<std::size_t>> float_optimal_basis(const LinearProgram& lp) {
  std::vector<std::size_t> basis;
  const FloatLpOutcome r = solve_float_impl(to_float(lp), {}, &basis);
  if (r.status != LpStatus::Optimal) return std::nullopt;
  return basis;
}

}  // namespace detail

}  // namespace ctxlab
