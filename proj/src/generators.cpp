#include "ctxlab/generators.hpp"

#include "ctxlab/errors.hpp"
#include "ctxlab/freeops.hpp"

namespace ctxlab {

Scenario pom_scenario() {
  Scenario s;
  s.preparations = 4;
  s.measurements = 2;
  s.outcomes = 2;
  const Rational h(1, 2);
  s.prep_equivalences.push_back({{h, 0, 0, h}, {0, h, h, 0}});
  return s;
}

Behavior pom_behavior(unsigned digits) {
  const Rational c = Rational(1, 2) + sqrt_truncated(2, digits) / 4;
  Behavior b(4, 2, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t bits[2] = {i >> 1, i & 1};
    for (std::size_t j = 0; j < 2; ++j) {
      b(i, j, bits[j]) = c;
      b(i, j, 1 - bits[j]) = 1 - c;
    }
  }
  return b;
}

namespace {

// Extreme rays of {x >= 0 : (alpha - beta).x = 0 for every preparation
// equivalence}, normalized to unit sum.
std::vector<std::vector<Rational>> preparation_rays(const Scenario& s) {
  RationalMatrix a(s.prep_equivalences.size() + 1, s.preparations);
  std::vector<Rational> b(a.rows(), Rational(0));
  for (std::size_t r = 0; r < s.prep_equivalences.size(); ++r) {
    for (std::size_t i = 0; i < s.preparations; ++i) {
      a(r, i) = s.prep_equivalences[r].alpha[i] - s.prep_equivalences[r].beta[i];
    }
  }
  for (std::size_t i = 0; i < s.preparations; ++i) a(a.rows() - 1, i) = 1;
  b.back() = 1;
  return enumerate_polytope_vertices(a, b);
}

}  // namespace

std::pair<Behavior, NCModel> random_nc_behavior_with_model(const Scenario& s, const VertexSet& v,
                                                           std::mt19937_64& rng) {
  require_matching(s, v);
  const auto rays = preparation_rays(s);
  if (rays.empty()) throw Error("scenario admits no preparation assignment");
  // Coefficients c >= 0 with sum_t c_t r_t = 1 (all ones), from an LP with a
  // random objective.
  LinearProgram lp;
  lp.add_variables(rays.size());
  for (std::size_t i = 0; i < s.preparations; ++i) {
    LinearRow<Rational> row;
    for (std::size_t t = 0; t < rays.size(); ++t) {
      if (sgn(rays[t][i]) != 0) row.add(t, rays[t][i]);
    }
    row.rhs = 1;
    lp.equalities.push_back(std::move(row));
  }
  std::vector<Rational> c(rays.size());
  const std::size_t draws = 1 + rng() % 2;
  for (std::size_t d = 0; d < draws; ++d) {
    for (std::size_t t = 0; t < rays.size(); ++t) lp.set_objective(t, Rational(static_cast<long>(rng() % 7)));
    const auto out = solve_exact(lp);
    if (out.status != LpStatus::Optimal) throw Error("no decomposition of the unit vector into preparation rays");
    for (std::size_t t = 0; t < rays.size(); ++t) c[t] += out.primal[t] / static_cast<long>(draws);
  }
  NCModel m(s.preparations, v.size());
  for (std::size_t t = 0; t < rays.size(); ++t) {
    if (sgn(c[t]) == 0) continue;
    const auto pi = detail::random_distribution(rng, v.size(), rng() % 2 == 0);
    for (std::size_t kappa = 0; kappa < v.size(); ++kappa) {
      if (sgn(pi[kappa]) == 0) continue;
      const Rational w = c[t] * pi[kappa];
      for (std::size_t i = 0; i < s.preparations; ++i) {
        if (sgn(rays[t][i]) != 0) m(i, kappa) += w * rays[t][i];
      }
    }
  }
  return {model_behavior(s, v, m), m};
}

Behavior random_nc_behavior(const Scenario& s, const VertexSet& v, std::mt19937_64& rng) {
  return random_nc_behavior_with_model(s, v, rng).first;
}

Behavior random_behavior_vertex(const Scenario& s, std::mt19937_64& rng) {
  LinearProgram lp;
  lp.add_variables(s.table_size());
  Behavior shape(s.preparations, s.measurements, s.outcomes);
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t j = 0; j < s.measurements; ++j) {
      LinearRow<Rational> row;
      for (std::size_t k = 0; k < s.outcomes; ++k) row.add(shape.index(i, j, k), 1);
      row.rhs = 1;
      lp.equalities.push_back(std::move(row));
    }
  }
  for (const auto& eq : s.prep_equivalences) {
    for (std::size_t j = 0; j < s.measurements; ++j) {
      for (std::size_t k = 0; k < s.outcomes; ++k) {
        LinearRow<Rational> row;
        for (std::size_t i = 0; i < s.preparations; ++i) {
          const Rational d = eq.alpha[i] - eq.beta[i];
          if (sgn(d) != 0) row.add(shape.index(i, j, k), d);
        }
        lp.equalities.push_back(std::move(row));
      }
    }
  }
  for (const auto& eq : s.meas_equivalences) {
    for (std::size_t i = 0; i < s.preparations; ++i) {
      LinearRow<Rational> row;
      for (std::size_t j = 0; j < s.measurements; ++j) {
        for (std::size_t k = 0; k < s.outcomes; ++k) {
          const Rational d = eq.alpha[s.event(k, j)] - eq.beta[s.event(k, j)];
          if (sgn(d) != 0) row.add(shape.index(i, j, k), d);
        }
      }
      lp.equalities.push_back(std::move(row));
    }
  }
  lp.sense = Sense::Maximize;
  for (std::size_t n = 0; n < s.table_size(); ++n) {
    lp.set_objective(n, Rational(static_cast<long>(rng() % 21) - 10));
  }
  const auto out = solve_exact(lp);
  if (out.status != LpStatus::Optimal) throw Error("behavior polytope LP failed");
  return Behavior(s.preparations, s.measurements, s.outcomes, out.primal);
}

Behavior random_valid_behavior(const Scenario& s, const VertexSet& v, std::mt19937_64& rng) {
  const Behavior vertex = random_behavior_vertex(s, rng);
  if (rng() % 4 == 0) return vertex;
  const Behavior nc = random_nc_behavior(s, v, rng);
  Rational pi(1 + static_cast<long>(rng() % 9), 10);
  pi.canonicalize();
  return mix(pi, vertex, nc);
}

}  // namespace ctxlab
