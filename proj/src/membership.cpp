#include "ctxlab/membership.hpp"

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace detail {

std::size_t add_model_block(LinearProgram& lp, const Scenario& s, const VertexSet& v) {
  const std::size_t V = v.size();
  const std::size_t offset = lp.add_variables(s.preparations * V);
  for (const auto& eq : s.prep_equivalences) {
    for (std::size_t kappa = 0; kappa < V; ++kappa) {
      LinearRow<Rational> row;
      for (std::size_t i = 0; i < s.preparations; ++i) {
        const Rational d = eq.alpha[i] - eq.beta[i];
        if (sgn(d) != 0) row.add(offset + i * V + kappa, d);
      }
      row.rhs = 0;
      lp.equalities.push_back(std::move(row));
    }
  }
  return offset;
}

void add_reproduction_terms(LinearRow<Rational>& row, const VertexSet& v, std::size_t offset, std::size_t i,
                            std::size_t event, const Rational& scale) {
  const std::size_t V = v.size();
  for (std::size_t kappa = 0; kappa < V; ++kappa) {
    const Rational& xi = v[kappa][event];
    if (sgn(xi) == 0) continue;
    row.add(offset + i * V + kappa, xi * scale);
  }
}

NCModel extract_model(const std::vector<Rational>& x, std::size_t offset, std::size_t preparations,
                      std::size_t vertices) {
  NCModel m(preparations, vertices);
  for (std::size_t n = 0; n < m.mu.size(); ++n) m.mu[n] = x[offset + n];
  return m;
}

}  // namespace detail

namespace {

void check_shapes(const Scenario& s, const Behavior& b, const VertexSet& v) {
  if (!b.fits(s)) throw StructuralError("behavior dimensions do not match the scenario");
  require_matching(s, v);
}

}  // namespace

LinearProgram membership_program(const Scenario& s, const Behavior& b, const VertexSet& v) {
  check_shapes(s, b, v);
  const std::size_t V = v.size();
  LinearProgram lp;
  lp.add_variables(s.preparations * V);
  for (std::size_t i = 0; i < s.preparations; ++i) {
    LinearRow<Rational> row;
    for (std::size_t kappa = 0; kappa < V; ++kappa) row.add(i * V + kappa, 1);
    row.rhs = 1;
    lp.equalities.push_back(std::move(row));
  }
  for (const auto& eq : s.prep_equivalences) {
    for (std::size_t kappa = 0; kappa < V; ++kappa) {
      LinearRow<Rational> row;
      for (std::size_t i = 0; i < s.preparations; ++i) {
        const Rational d = eq.alpha[i] - eq.beta[i];
        if (sgn(d) != 0) row.add(i * V + kappa, d);
      }
      lp.equalities.push_back(std::move(row));
    }
  }
  const Rational one = 1;
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t j = 0; j < s.measurements; ++j) {
      for (std::size_t k = 0; k < s.outcomes; ++k) {
        LinearRow<Rational> row;
        detail::add_reproduction_terms(row, v, 0, i, s.event(k, j), one);
        row.rhs = b(i, j, k);
        lp.equalities.push_back(std::move(row));
      }
    }
  }
  return lp;
}

MembershipResult check_membership(const Scenario& s, const Behavior& b, const VertexSet& v) {
  const LinearProgram lp = membership_program(s, b, v);
  const LpOutcome out = solve_exact(lp);
  MembershipResult r;
  r.pivots = out.pivots;
  if (out.status == LpStatus::Optimal) {
    r.noncontextual = true;
    r.model = detail::extract_model(out.primal, 0, s.preparations, v.size());
  } else {
    r.noncontextual = false;
    r.witness = out.certificate;
  }
  return r;
}

Behavior model_behavior(const Scenario& s, const VertexSet& v, const NCModel& m) {
  if (m.preparations != s.preparations || m.vertices != v.size()) {
    throw StructuralError("model dimensions do not match the scenario and vertex set");
  }
  Behavior b(s.preparations, s.measurements, s.outcomes);
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t kappa = 0; kappa < v.size(); ++kappa) {
      const Rational& w = m(i, kappa);
      if (sgn(w) == 0) continue;
      for (std::size_t j = 0; j < s.measurements; ++j) {
        for (std::size_t k = 0; k < s.outcomes; ++k) {
          const Rational& xi = v[kappa][s.event(k, j)];
          if (sgn(xi) != 0) b(i, j, k) += w * xi;
        }
      }
    }
  }
  return b;
}

bool verify_model(const Scenario& s, const Behavior& b, const VertexSet& v, const NCModel& m) {
  if (!b.fits(s) || m.preparations != s.preparations || m.vertices != v.size() ||
      m.mu.size() != s.preparations * v.size()) {
    return false;
  }
  if (!all_nonnegative(m.mu)) return false;
  for (std::size_t i = 0; i < s.preparations; ++i) {
    Rational total = 0;
    for (std::size_t kappa = 0; kappa < v.size(); ++kappa) total += m(i, kappa);
    if (total != 1) return false;
  }
  for (const auto& eq : s.prep_equivalences) {
    for (std::size_t kappa = 0; kappa < v.size(); ++kappa) {
      Rational d = 0;
      for (std::size_t i = 0; i < s.preparations; ++i) d += (eq.alpha[i] - eq.beta[i]) * m(i, kappa);
      if (sgn(d) != 0) return false;
    }
  }
  return model_behavior(s, v, m) == b;
}

bool verify_witness(const Scenario& s, const Behavior& b, const VertexSet& v, const std::vector<Rational>& witness) {
  return verify_farkas(membership_program(s, b, v), witness);
}

}  // namespace ctxlab
