#include "ctxlab/polytope.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

// Row-reduces [A | b] in place and returns the number of nonzero rows, which
// are moved to the top. Returns npos when the system is inconsistent.
constexpr std::size_t kInconsistent = std::numeric_limits<std::size_t>::max();

std::size_t row_reduce(std::vector<std::vector<Rational>>& rows, std::size_t n) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t p = rank;
    while (p < rows.size() && sgn(rows[p][col]) == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[rank], rows[p]);
    const Rational pivot = rows[rank][col];
    for (auto& v : rows[rank]) v /= pivot;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || sgn(rows[r][col]) == 0) continue;
      const Rational f = rows[r][col];
      for (std::size_t c = col; c < rows[r].size(); ++c) {
        if (sgn(rows[rank][c]) != 0) rows[r][c] -= f * rows[rank][c];
      }
    }
    ++rank;
  }
  // Rows below the rank are zero on the first n columns.
  for (std::size_t r = rank; r < rows.size(); ++r) {
    if (rows[r].size() > n && sgn(rows[r][n]) != 0) return kInconsistent;
  }
  return rank;
}

// Solves the square system M x = rhs; false when singular.
bool solve_square(std::vector<Rational>& m, std::vector<Rational>& rhs, std::size_t r) {
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t p = col;
    while (p < r && sgn(m[p * r + col]) == 0) ++p;
    if (p == r) return false;
    if (p != col) {
      std::swap_ranges(m.begin() + col * r, m.begin() + (col + 1) * r, m.begin() + p * r);
      std::swap(rhs[col], rhs[p]);
    }
    for (std::size_t i = col + 1; i < r; ++i) {
      if (sgn(m[i * r + col]) == 0) continue;
      const Rational f = m[i * r + col] / m[col * r + col];
      for (std::size_t c = col; c < r; ++c) m[i * r + c] -= f * m[col * r + c];
      rhs[i] -= f * rhs[col];
    }
  }
  for (std::size_t i = r; i-- > 0;) {
    for (std::size_t c = i + 1; c < r; ++c) rhs[i] -= m[i * r + c] * rhs[c];
    rhs[i] /= m[i * r + i];
  }
  return true;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (idx[i] != i + n - k) {
      ++idx[i];
      for (std::size_t t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
      return true;
    }
  }
  return false;
}

void sort_unique(std::vector<std::vector<Rational>>& points) {
  std::sort(points.begin(), points.end(),
            [](const auto& x, const auto& y) { return compare_lex(x, y) < 0; });
  points.erase(std::unique(points.begin(), points.end()), points.end());
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t t = 1; t <= k; ++t) {
    r = r * (n - k + t) / t;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

std::size_t matrix_rank(const RationalMatrix& a) {
  std::vector<std::vector<Rational>> rows(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) rows[r].assign(a.row(r).begin(), a.row(r).end());
  return row_reduce(rows, a.cols());
}

std::vector<std::vector<Rational>> enumerate_polytope_vertices(const RationalMatrix& a, const std::vector<Rational>& b,
                                                               const EnumerationOptions& options) {
  if (b.size() != a.rows()) throw StructuralError("vertex enumeration: right-hand side length differs from row count");
  const std::size_t n = a.cols();
  std::vector<std::vector<Rational>> rows(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    rows[r].assign(a.row(r).begin(), a.row(r).end());
    rows[r].push_back(b[r]);
  }
  const std::size_t rank = row_reduce(rows, n);
  if (rank == kInconsistent) return {};
  rows.resize(rank);

  const std::uint64_t bases = binomial(n, rank);
  if (bases > options.basis_budget) {
    throw ResourceError("vertex enumeration needs " + std::to_string(bases) + " bases, budget is " +
                        std::to_string(options.basis_budget));
  }

  const unsigned workers = std::max(1u, options.workers);
  std::vector<std::vector<std::vector<Rational>>> found(workers);
  auto work = [&](unsigned w) {
    std::vector<std::size_t> idx(rank);
    for (std::size_t t = 0; t < rank; ++t) idx[t] = t;
    std::vector<Rational> m(rank * rank), rhs(rank);
    std::uint64_t counter = 0;
    do {
      if (counter++ % workers != w) continue;
      for (std::size_t i = 0; i < rank; ++i) {
        for (std::size_t t = 0; t < rank; ++t) m[i * rank + t] = rows[i][idx[t]];
        rhs[i] = rows[i][n];
      }
      if (!solve_square(m, rhs, rank)) continue;
      if (std::any_of(rhs.begin(), rhs.end(), [](const Rational& v) { return sgn(v) < 0; })) continue;
      std::vector<Rational> x(n);
      for (std::size_t t = 0; t < rank; ++t) x[idx[t]] = rhs[t];
      found[w].push_back(std::move(x));
    } while (next_combination(idx, n));
    sort_unique(found[w]);
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::vector<std::vector<Rational>> out;
  for (auto& part : found) {
    for (auto& x : part) out.push_back(std::move(x));
  }
  sort_unique(out);
  return out;
}

bool is_polytope_vertex(const RationalMatrix& a, const std::vector<Rational>& b, std::span<const Rational> x) {
  const std::size_t n = a.cols();
  if (x.size() != n || b.size() != a.rows()) return false;
  for (const auto& v : x) {
    if (sgn(v) < 0) return false;
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    Rational s = 0;
    for (std::size_t c = 0; c < n; ++c) s += a(r, c) * x[c];
    if (s != b[r]) return false;
  }
  std::vector<std::vector<Rational>> active;
  for (std::size_t r = 0; r < a.rows(); ++r) active.emplace_back(a.row(r).begin(), a.row(r).end());
  for (std::size_t c = 0; c < n; ++c) {
    if (sgn(x[c]) != 0) continue;
    std::vector<Rational> e(n);
    e[c] = 1;
    active.push_back(std::move(e));
  }
  return row_reduce(active, n) == n;
}

void assignment_constraints(const Scenario& s, RationalMatrix& a, std::vector<Rational>& b) {
  const std::size_t n = s.events();
  a = RationalMatrix(s.measurements + s.meas_equivalences.size(), n);
  b.assign(a.rows(), Rational(0));
  for (std::size_t j = 0; j < s.measurements; ++j) {
    for (std::size_t k = 0; k < s.outcomes; ++k) a(j, s.event(k, j)) = 1;
    b[j] = 1;
  }
  for (std::size_t r = 0; r < s.meas_equivalences.size(); ++r) {
    const auto& eq = s.meas_equivalences[r];
    for (std::size_t e = 0; e < n; ++e) a(s.measurements + r, e) = eq.alpha[e] - eq.beta[e];
  }
}

VertexSet enumerate_vertices(const Scenario& s, const EnumerationOptions& options) {
  const Scenario c = canonicalize(s);
  RationalMatrix a;
  std::vector<Rational> b;
  assignment_constraints(c, a, b);
  VertexSet out;
  out.vertices = enumerate_polytope_vertices(a, b, options);
  out.scenario_fingerprint = fingerprint(c);
  out.events = c.events();
  return out;
}

std::uint64_t vertex_count_bound(const Scenario& s) {
  RationalMatrix a;
  std::vector<Rational> b;
  assignment_constraints(canonicalize(s), a, b);
  return binomial(a.cols(), matrix_rank(a));
}

void require_matching(const Scenario& s, const VertexSet& v) {
  if (v.events != s.events() || v.scenario_fingerprint != fingerprint(s)) {
    throw StructuralError("vertex set was enumerated for a different scenario");
  }
}

}  // namespace ctxlab
