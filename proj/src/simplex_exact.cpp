// Two-phase dense-tableau primal simplex over GMP rationals, with an optional
// start from the basis a double-precision solve ends on.

#include <limits>
#include <optional>

#include "ctxlab/errors.hpp"
#include "ctxlab/lp.hpp"
#include "standard_form.hpp"

namespace ctxlab {

namespace {

using detail::ColumnKind;
using detail::StandardForm;

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kDegenerateStreakForBland = 32;

class Tableau {
 public:
  Tableau(const StandardForm<Rational>& sf, PivotRule rule)
      : sf_(sf), m_(sf.rows), n_(sf.cols()), width_(n_ + 1), rule_(rule), cells_(m_ * width_), reduced_(width_),
        basis_(sf.identity_column), allowed_(n_, true) {
    for (std::size_t c = 0; c < n_; ++c) {
      for (const auto& [r, v] : sf.columns[c]) cells_[r * width_ + c] = v;
    }
    for (std::size_t r = 0; r < m_; ++r) cells_[r * width_ + n_] = sf.rhs[r];
  }

  // Loads reduced costs d_j = c_j - c_B^T T_j and d_rhs = -c_B^T x_B.
  void load_costs(const std::vector<Rational>& cost) {
    for (std::size_t c = 0; c < n_; ++c) reduced_[c] = cost[c];
    reduced_[n_] = 0;
    for (std::size_t r = 0; r < m_; ++r) {
      const Rational& cb = cost[basis_[r]];
      if (sgn(cb) == 0) continue;
      const Rational* row = &cells_[r * width_];
      for (std::size_t c = 0; c < width_; ++c) {
        if (sgn(row[c]) != 0) reduced_[c] -= cb * row[c];
      }
    }
  }

  // Runs simplex iterations on the loaded costs. Returns the unbounded entering
  // column, or kNone at optimality.
  std::size_t optimize() {
    std::size_t degenerate_streak = 0;
    for (;;) {
      const bool use_bland = rule_ == PivotRule::Bland || degenerate_streak >= kDegenerateStreakForBland;
      const std::size_t q = choose_entering(use_bland);
      if (q == kNone) return kNone;
      const std::size_t r = choose_leaving(q);
      if (r == kNone) return q;
      degenerate_streak = sgn(cells_[r * width_ + n_]) == 0 ? degenerate_streak + 1 : 0;
      pivot(r, q);
    }
  }

  void pivot(std::size_t r, std::size_t q) {
    ++pivots_;
    Rational* prow = &cells_[r * width_];
    // Normalize the pivot row and record its nonzero pattern.
    pivot_value_ = prow[q];
    nonzero_.clear();
    for (std::size_t c = 0; c < width_; ++c) {
      if (sgn(prow[c]) != 0) {
        mpq_div(prow[c].get_mpq_t(), prow[c].get_mpq_t(), pivot_value_.get_mpq_t());
        nonzero_.push_back(c);
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      eliminate(&cells_[i * width_], prow, q);
    }
    eliminate(reduced_.data(), prow, q);
    basis_[r] = q;
  }

  void forbid(std::size_t c) { allowed_[c] = false; }

  std::size_t rows() const { return m_; }
  std::size_t basic(std::size_t r) const { return basis_[r]; }
  const Rational& at(std::size_t r, std::size_t c) const { return cells_[r * width_ + c]; }
  const Rational& rhs(std::size_t r) const { return cells_[r * width_ + n_]; }
  const Rational& reduced(std::size_t c) const { return reduced_[c]; }
  Rational objective() const { return -reduced_[n_]; }
  std::size_t pivots() const { return pivots_; }

  std::vector<Rational> column_values() const {
    std::vector<Rational> v(n_);
    for (std::size_t r = 0; r < m_; ++r) v[basis_[r]] = rhs(r);
    return v;
  }

 private:
  void eliminate(Rational* row, const Rational* prow, std::size_t q) {
    if (sgn(row[q]) == 0) return;
    factor_ = row[q];
    for (std::size_t c : nonzero_) {
      mpq_mul(scratch_.get_mpq_t(), factor_.get_mpq_t(), prow[c].get_mpq_t());
      mpq_sub(row[c].get_mpq_t(), row[c].get_mpq_t(), scratch_.get_mpq_t());
    }
  }

  std::size_t choose_entering(bool bland) const {
    std::size_t best = kNone;
    for (std::size_t c = 0; c < n_; ++c) {
      if (!allowed_[c] || sgn(reduced_[c]) >= 0) continue;
      if (bland) return c;
      if (best == kNone || reduced_[c] < reduced_[best]) best = c;
    }
    return best;
  }

  std::size_t choose_leaving(std::size_t q) {
    std::size_t best = kNone;
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& a = cells_[i * width_ + q];
      if (sgn(a) <= 0) continue;
      mpq_div(ratio_.get_mpq_t(), cells_[i * width_ + n_].get_mpq_t(), a.get_mpq_t());
      if (best == kNone) {
        best = i;
        best_ratio_ = ratio_;
        continue;
      }
      const int c = cmp(ratio_, best_ratio_);
      if (c < 0 || (c == 0 && basis_[i] < basis_[best])) {
        best = i;
        best_ratio_ = ratio_;
      }
    }
    return best;
  }

  const StandardForm<Rational>& sf_;
  std::size_t m_, n_, width_;
  PivotRule rule_;
  std::vector<Rational> cells_;
  std::vector<Rational> reduced_;
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
  std::vector<std::size_t> nonzero_;
  Rational pivot_value_, factor_, scratch_, ratio_, best_ratio_;
  std::size_t pivots_ = 0;
};

// Solves a z = rhs for a dense row-major n x n matrix. Nullopt when singular.
std::optional<std::vector<Rational>> solve_square(std::vector<Rational> a, std::vector<Rational> rhs,
                                                  std::size_t n) {
  std::vector<std::size_t> nz;
  Rational f, t;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && sgn(a[p * n + k]) == 0) ++p;
    if (p == n) return std::nullopt;
    if (p != k) {
      for (std::size_t c = k; c < n; ++c) std::swap(a[p * n + c], a[k * n + c]);
      std::swap(rhs[p], rhs[k]);
    }
    nz.clear();
    for (std::size_t c = k + 1; c < n; ++c) {
      if (sgn(a[k * n + c]) != 0) nz.push_back(c);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      Rational& lead = a[i * n + k];
      if (sgn(lead) == 0) continue;
      mpq_div(f.get_mpq_t(), lead.get_mpq_t(), a[k * n + k].get_mpq_t());
      for (const std::size_t c : nz) {
        mpq_mul(t.get_mpq_t(), f.get_mpq_t(), a[k * n + c].get_mpq_t());
        mpq_sub(a[i * n + c].get_mpq_t(), a[i * n + c].get_mpq_t(), t.get_mpq_t());
      }
      if (sgn(rhs[k]) != 0) {
        mpq_mul(t.get_mpq_t(), f.get_mpq_t(), rhs[k].get_mpq_t());
        mpq_sub(rhs[i].get_mpq_t(), rhs[i].get_mpq_t(), t.get_mpq_t());
      }
      lead = 0;
    }
  }
  std::vector<Rational> z(n);
  for (std::size_t k = n; k-- > 0;) {
    Rational acc = rhs[k];
    for (std::size_t c = k + 1; c < n; ++c) {
      if (sgn(a[k * n + c]) != 0 && sgn(z[c]) != 0) acc -= a[k * n + c] * z[c];
    }
    z[k] = acc / a[k * n + k];
  }
  return z;
}

// Accepts a candidate basis only when it is exactly primal and dual feasible
// and the resulting certificate verifies.
std::optional<LpOutcome> solve_from_basis(const LinearProgram& lp, const StandardForm<Rational>& sf,
                                          const std::vector<std::size_t>& basis) {
  const std::size_t m = sf.rows, n = sf.cols();
  if (basis.size() != m) return std::nullopt;
  std::vector<Rational> b(m * m), bt(m * m), cb(m);
  for (std::size_t t = 0; t < m; ++t) {
    if (basis[t] >= n) return std::nullopt;
    for (const auto& [r, v] : sf.columns[basis[t]]) {
      b[r * m + t] = v;
      bt[t * m + r] = v;
    }
    cb[t] = sf.cost[basis[t]];
  }
  const auto xb = solve_square(std::move(b), sf.rhs, m);
  if (!xb) return std::nullopt;
  std::vector<Rational> values(n);
  for (std::size_t t = 0; t < m; ++t) {
    const int sign = sgn((*xb)[t]);
    if (sign < 0 || (sign > 0 && sf.kind[basis[t]] == ColumnKind::Artificial)) return std::nullopt;
    values[basis[t]] = (*xb)[t];
  }
  const auto y = solve_square(std::move(bt), std::move(cb), m);
  if (!y) return std::nullopt;
  for (std::size_t c = 0; c < n; ++c) {
    if (sf.kind[c] == ColumnKind::Artificial) continue;
    Rational d = sf.cost[c];
    for (const auto& [r, v] : sf.columns[c]) d -= v * (*y)[r];
    if (sgn(d) < 0) return std::nullopt;
  }
  LpOutcome out;
  out.status = LpStatus::Optimal;
  out.primal = detail::original_point(sf, lp.n_vars, values);
  Rational min_value = 0;
  for (std::size_t t = 0; t < m; ++t) min_value += sf.cost[basis[t]] * (*xb)[t];
  out.objective_value = lp.sense == Sense::Maximize ? Rational(-min_value) : min_value;
  out.certificate.resize(m);
  for (std::size_t r = 0; r < m; ++r) out.certificate[r] = sf.row_sign[r] < 0 ? Rational(-(*y)[r]) : (*y)[r];
  if (!verify_outcome(lp, out)) return std::nullopt;
  return out;
}

}  // namespace

LpOutcome solve_exact(const LinearProgram& lp, const ExactOptions& options) {
  check_structure(lp);
  const StandardForm<Rational> sf = detail::make_standard_form(lp);
  const std::size_t m = sf.rows;
  const std::size_t n = sf.cols();

  if (options.float_warm_start && m >= options.warm_start_min_rows) {
    if (const auto basis = detail::float_optimal_basis(lp)) {
      if (auto out = solve_from_basis(lp, sf, *basis)) return std::move(*out);
    }
  }

  Tableau tab(sf, options.rule);

  LpOutcome out;

  // Phase 1: minimize the sum of artificials.
  std::vector<Rational> phase1_cost(n);
  bool has_artificial = false;
  for (std::size_t c = 0; c < n; ++c) {
    if (sf.kind[c] == ColumnKind::Artificial) {
      phase1_cost[c] = 1;
      has_artificial = true;
    }
  }
  if (has_artificial) {
    tab.load_costs(phase1_cost);
    for (std::size_t c = 0; c < n; ++c) {
      if (sf.kind[c] == ColumnKind::Artificial) tab.forbid(c);
    }
    tab.optimize();  // bounded below by zero, never unbounded
    if (sgn(tab.objective()) > 0) {
      out.status = LpStatus::Infeasible;
      out.certificate.resize(m);
      for (std::size_t r = 0; r < m; ++r) {
        const std::size_t id = sf.identity_column[r];
        Rational y = phase1_cost[id] - tab.reduced(id);
        out.certificate[r] = sf.row_sign[r] < 0 ? Rational(-y) : y;
      }
      out.pivots = tab.pivots();
      return out;
    }
    // Drive zero-level artificials out of the basis where possible; rows where
    // that fails are redundant and keep their artificial at zero.
    for (std::size_t r = 0; r < m; ++r) {
      if (sf.kind[tab.basic(r)] != ColumnKind::Artificial) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (sf.kind[c] != ColumnKind::Artificial && sgn(tab.at(r, c)) != 0) {
          tab.pivot(r, c);
          break;
        }
      }
    }
  }

  // Phase 2.
  tab.load_costs(sf.cost);
  const std::size_t unbounded_column = tab.optimize();
  out.pivots = tab.pivots();
  const auto values = tab.column_values();
  out.primal = detail::original_point(sf, lp.n_vars, values);

  if (unbounded_column != kNone) {
    out.status = LpStatus::Unbounded;
    std::vector<Rational> direction(n);
    direction[unbounded_column] = 1;
    for (std::size_t r = 0; r < m; ++r) direction[tab.basic(r)] = -tab.at(r, unbounded_column);
    out.certificate = detail::original_point(sf, lp.n_vars, direction);
    return out;
  }

  out.status = LpStatus::Optimal;
  const Rational min_value = tab.objective();
  out.objective_value = lp.sense == Sense::Maximize ? Rational(-min_value) : min_value;
  out.certificate.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t id = sf.identity_column[r];
    Rational y = sf.cost[id] - tab.reduced(id);
    out.certificate[r] = sf.row_sign[r] < 0 ? Rational(-y) : y;
  }
  return out;
}

}  // namespace ctxlab
