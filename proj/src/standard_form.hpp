#pragma once

// Conversion of a BasicLinearProgram into the equality form used by both
// simplex implementations:
//
//   minimize c'.x'  s.t.  A' x' = b',  x' >= 0,  b' >= 0
//
// Free variables are split into a plus and a minus column, inequality rows get
// a slack, rows with negative right-hand side are negated, and an artificial
// column is added to every row whose slack cannot start in the basis.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ctxlab/lp.hpp"

namespace ctxlab::detail {

enum class ColumnKind { Plus, Minus, Slack, Artificial };

/// Final basis (standard-form column per row) of a double-precision solve of
/// `lp`, when that solve ends optimal.
std::optional<std::vector<std::size_t>> float_optimal_basis(const LinearProgram& lp);

template <class T>
struct StandardForm {
  std::size_t rows = 0;
  std::vector<std::vector<std::pair<std::size_t, T>>> columns;  // sparse, by column
  std::vector<ColumnKind> kind;
  std::vector<std::size_t> origin;  // variable index (Plus/Minus) or row index
  std::vector<T> cost;              // minimization-form objective
  std::vector<T> rhs;               // nonnegative
  std::vector<int> row_sign;        // +1 or -1 applied to the original row
  std::vector<std::size_t> identity_column;  // initial basis column of each row

  std::size_t cols() const { return columns.size(); }
};

template <class T>
bool is_negative(const T& v) {
  return v < T(0);
}

template <class T>
StandardForm<T> make_standard_form(const BasicLinearProgram<T>& lp) {
  StandardForm<T> sf;
  const std::size_t m_eq = lp.equalities.size();
  const std::size_t m = m_eq + lp.inequalities.size();
  sf.rows = m;
  sf.rhs.resize(m);
  sf.row_sign.resize(m, 1);
  sf.identity_column.resize(m);

  auto row_at = [&](std::size_t r) -> const LinearRow<T>& {
    return r < m_eq ? lp.equalities[r] : lp.inequalities[r - m_eq];
  };
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = row_at(r);
    if (is_negative(row.rhs)) {
      sf.row_sign[r] = -1;
      sf.rhs[r] = -row.rhs;
    } else {
      sf.rhs[r] = row.rhs;
    }
  }

  // Transpose rows into per-variable columns, summing repeated entries.
  std::vector<std::vector<std::pair<std::size_t, T>>> var_cols(lp.n_vars);
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = row_at(r);
    for (std::size_t n = 0; n < row.cols.size(); ++n) {
      auto& col = var_cols[row.cols[n]];
      T v = sf.row_sign[r] < 0 ? T(-row.vals[n]) : T(row.vals[n]);
      if (!col.empty() && col.back().first == r) {
        col.back().second += v;
      } else {
        col.emplace_back(r, std::move(v));
      }
    }
  }
  for (auto& col : var_cols) {
    std::erase_if(col, [](const auto& e) { return e.second == T(0); });
  }

  const bool maximize = lp.sense == Sense::Maximize;
  for (std::size_t j = 0; j < lp.n_vars; ++j) {
    T c = lp.objective.empty() ? T(0) : lp.objective[j];
    if (maximize) c = -c;
    sf.columns.push_back(var_cols[j]);
    sf.kind.push_back(ColumnKind::Plus);
    sf.origin.push_back(j);
    sf.cost.push_back(c);
    if (lp.free_var[j]) {
      auto neg = var_cols[j];
      for (auto& e : neg) e.second = -e.second;
      sf.columns.push_back(std::move(neg));
      sf.kind.push_back(ColumnKind::Minus);
      sf.origin.push_back(j);
      sf.cost.push_back(-c);
    }
  }
  for (std::size_t r = m_eq; r < m; ++r) {
    sf.columns.push_back({{r, T(sf.row_sign[r])}});
    sf.kind.push_back(ColumnKind::Slack);
    sf.origin.push_back(r);
    sf.cost.push_back(T(0));
    if (sf.row_sign[r] > 0) sf.identity_column[r] = sf.columns.size() - 1;
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (r >= m_eq && sf.row_sign[r] > 0) continue;
    sf.columns.push_back({{r, T(1)}});
    sf.kind.push_back(ColumnKind::Artificial);
    sf.origin.push_back(r);
    sf.cost.push_back(T(0));
    sf.identity_column[r] = sf.columns.size() - 1;
  }
  return sf;
}

/// Maps standard-form column values back to the original variables.
template <class T>
std::vector<T> original_point(const StandardForm<T>& sf, std::size_t n_vars, const std::vector<T>& column_values) {
  std::vector<T> x(n_vars, T(0));
  for (std::size_t c = 0; c < sf.cols(); ++c) {
    if (column_values[c] == T(0)) continue;
    if (sf.kind[c] == ColumnKind::Plus) x[sf.origin[c]] += column_values[c];
    if (sf.kind[c] == ColumnKind::Minus) x[sf.origin[c]] -= column_values[c];
  }
  return x;
}

}  // namespace ctxlab::detail
