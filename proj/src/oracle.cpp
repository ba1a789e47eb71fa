#include "ctxlab/oracle.hpp"

#include <algorithm>

#include "ctxlab/errors.hpp"

namespace ctxlab {

NCBehaviorHull enumerate_nc_hull(const Scenario& s, const VertexSet& v, const EnumerationOptions& options) {
  require_matching(s, v);
  const std::size_t V = v.size();
  const std::size_t n = s.preparations * V;
  RationalMatrix a(s.preparations + s.prep_equivalences.size() * V, n);
  std::vector<Rational> rhs(a.rows(), Rational(0));
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t kappa = 0; kappa < V; ++kappa) a(i, i * V + kappa) = 1;
    rhs[i] = 1;
  }
  for (std::size_t e = 0; e < s.prep_equivalences.size(); ++e) {
    const auto& eq = s.prep_equivalences[e];
    for (std::size_t kappa = 0; kappa < V; ++kappa) {
      for (std::size_t i = 0; i < s.preparations; ++i) {
        a(s.preparations + e * V + kappa, i * V + kappa) = eq.alpha[i] - eq.beta[i];
      }
    }
  }
  const auto points = enumerate_polytope_vertices(a, rhs, options);
  NCBehaviorHull h;
  h.scenario_fingerprint = v.scenario_fingerprint;
  for (const auto& mu : points) {
    NCModel m(s.preparations, V);
    m.mu = mu;
    h.extreme_behaviors.push_back(model_behavior(s, v, m));
  }
  std::sort(h.extreme_behaviors.begin(), h.extreme_behaviors.end(),
            [](const Behavior& x, const Behavior& y) { return compare_lex(x.values(), y.values()) < 0; });
  h.extreme_behaviors.erase(std::unique(h.extreme_behaviors.begin(), h.extreme_behaviors.end()),
                            h.extreme_behaviors.end());
  return h;
}

namespace {

void check_shape(const NCBehaviorHull& h, const Behavior& b) {
  if (h.extreme_behaviors.empty()) throw StructuralError("empty hull");
  if (!h.extreme_behaviors.front().same_shape(b)) throw StructuralError("behavior shape differs from the hull's");
}

// Feasibility of  sum_h c_h B_h - sum_h s_h B_h = (1 - lambda) b,
// sum c = 1, sum s = lambda.
bool mixture_feasible(const NCBehaviorHull& h, const Behavior& b, const Rational& lambda) {
  const std::size_t H = h.extreme_behaviors.size();
  LinearProgram lp;
  lp.add_variables(2 * H);
  for (std::size_t e = 0; e < b.size(); ++e) {
    LinearRow<Rational> row;
    for (std::size_t t = 0; t < H; ++t) {
      const Rational& x = h.extreme_behaviors[t].values()[e];
      if (sgn(x) == 0) continue;
      row.add(t, x);
      if (sgn(lambda) != 0) row.add(H + t, -x);
    }
    row.rhs = (1 - lambda) * b.values()[e];
    lp.equalities.push_back(std::move(row));
  }
  LinearRow<Rational> c_sum, s_sum;
  for (std::size_t t = 0; t < H; ++t) {
    c_sum.add(t, 1);
    s_sum.add(H + t, 1);
  }
  c_sum.rhs = 1;
  s_sum.rhs = lambda;
  lp.equalities.push_back(std::move(c_sum));
  lp.equalities.push_back(std::move(s_sum));
  return solve_exact(lp).status == LpStatus::Optimal;
}

}  // namespace

bool oracle_membership(const NCBehaviorHull& h, const Behavior& b) {
  check_shape(h, b);
  const std::size_t H = h.extreme_behaviors.size();
  LinearProgram lp;
  lp.add_variables(H);
  for (std::size_t e = 0; e < b.size(); ++e) {
    LinearRow<Rational> row;
    for (std::size_t t = 0; t < H; ++t) {
      const Rational& x = h.extreme_behaviors[t].values()[e];
      if (sgn(x) != 0) row.add(t, x);
    }
    row.rhs = b.values()[e];
    lp.equalities.push_back(std::move(row));
  }
  LinearRow<Rational> total;
  for (std::size_t t = 0; t < H; ++t) total.add(t, 1);
  total.rhs = 1;
  lp.equalities.push_back(std::move(total));
  return solve_exact(lp).status == LpStatus::Optimal;
}

Rational oracle_robustness(const NCBehaviorHull& h, const Behavior& b, const Rational& eps) {
  check_shape(h, b);
  if (sgn(eps) <= 0) throw InvalidInput("bisection tolerance must be positive");
  if (mixture_feasible(h, b, 0)) return 0;
  Rational lo = 0, hi = 1;
  if (!mixture_feasible(h, b, hi)) throw Error("no mixing weight makes the behavior noncontextual");
  while (hi - lo > eps) {
    const Rational mid = (lo + hi) / 2;
    (mixture_feasible(h, b, mid) ? hi : lo) = mid;
  }
  return hi;
}

Rational oracle_contextual_fraction(const NCBehaviorHull& h, const Behavior& b) {
  check_shape(h, b);
  const std::size_t H = h.extreme_behaviors.size();
  // max sum w  s.t.  sum_h w_h B_h <= b, w >= 0
  LinearProgram lp;
  lp.add_variables(H);
  lp.sense = Sense::Maximize;
  for (std::size_t t = 0; t < H; ++t) lp.set_objective(t, 1);
  for (std::size_t e = 0; e < b.size(); ++e) {
    LinearRow<Rational> row;
    for (std::size_t t = 0; t < H; ++t) {
      const Rational& x = h.extreme_behaviors[t].values()[e];
      if (sgn(x) != 0) row.add(t, x);
    }
    row.rhs = b.values()[e];
    lp.inequalities.push_back(std::move(row));
  }
  const auto out = solve_exact(lp);
  if (out.status != LpStatus::Optimal) throw Error("hull contextual-fraction LP failed");
  return 1 - out.objective_value;
}

}  // namespace ctxlab
