#include "ctxlab/quantifiers.hpp"

#include <cmath>
#include <limits>

#include "ctxlab/errors.hpp"

namespace ctxlab {

std::string to_string(Measure m) {
  switch (m) {
    case Measure::ContextualFraction: return "cf";
    case Measure::Robustness: return "rob";
    case Measure::RobustnessRef: return "rob-ref";
    case Measure::L1Distance: return "l1";
    case Measure::UniformL1: return "uniform-l1";
    case Measure::RelativeEntropy: return "kl";
  }
  return "unknown";
}

Measure parse_measure(const std::string& name) {
  for (Measure m : {Measure::ContextualFraction, Measure::Robustness, Measure::RobustnessRef, Measure::L1Distance,
                    Measure::UniformL1, Measure::RelativeEntropy}) {
    if (to_string(m) == name) return m;
  }
  throw InvalidInput("unknown measure '" + name + "' (expected cf, rob, rob-ref, l1, uniform-l1 or kl)");
}

namespace {

void require_valid(const Scenario& s, const Behavior& b, const VertexSet& v) {
  if (!b.fits(s)) throw StructuralError("behavior dimensions do not match the scenario");
  require_matching(s, v);
  const auto report = validate_behavior(s, b);
  if (!report.ok()) throw InvalidInput("invalid behavior: " + report.summary());
}

// sum_kappa sigma[i][kappa] (+ coupling * var) = rhs, for every i.
void add_normalization(LinearProgram& lp, const Scenario& s, const VertexSet& v, std::size_t offset,
                       std::optional<std::size_t> coupled, const Rational& rhs) {
  for (std::size_t i = 0; i < s.preparations; ++i) {
    LinearRow<Rational> row;
    for (std::size_t kappa = 0; kappa < v.size(); ++kappa) row.add(offset + i * v.size() + kappa, 1);
    if (coupled) row.add(*coupled, -1);
    row.rhs = rhs;
    lp.equalities.push_back(std::move(row));
  }
}

struct Solved {
  bool optimal = false;
  bool infeasible = false;
  std::vector<Rational> x;   // exact
  std::vector<double> xf;    // float
  Rational value;
  double value_float = 0;
};

Solved solve(const LinearProgram& lp, Arithmetic mode) {
  Solved out;
  if (mode == Arithmetic::Exact) {
    const auto r = solve_exact(lp);
    out.optimal = r.status == LpStatus::Optimal;
    out.infeasible = r.status == LpStatus::Infeasible;
    if (out.optimal) {
      out.x = r.primal;
      out.value = r.objective_value;
      out.value_float = r.objective_value.get_d();
    }
  } else {
    const auto r = solve_float(lp);
    if (r.status == LpStatus::NumericalFailure) throw ResourceError("floating-point LP did not reach the residual tolerance");
    out.optimal = r.status == LpStatus::Optimal;
    out.infeasible = r.status == LpStatus::Infeasible;
    if (out.optimal) {
      out.xf = r.primal;
      out.value_float = r.objective_value;
    }
  }
  return out;
}

NCModel scaled_model(const std::vector<Rational>& x, std::size_t offset, const Scenario& s, const VertexSet& v,
                     const Rational& divisor) {
  NCModel m = detail::extract_model(x, offset, s.preparations, v.size());
  for (auto& w : m.mu) w /= divisor;
  return m;
}

Behavior affine(const Rational& a, const Behavior& x, const Rational& c, const Behavior& y) {
  Behavior out = x;
  auto o = out.values();
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = a * xv[n] + c * yv[n];
  return out;
}

Rational sum_l1(const Behavior& a, const Behavior& b) {
  Rational total = 0;
  for (std::size_t n = 0; n < a.size(); ++n) total += abs(a.values()[n] - b.values()[n]);
  return total;
}

}  // namespace

QuantifierReport contextual_fraction(const Scenario& s, const Behavior& b, const VertexSet& v,
                                     const QuantifierOptions& options) {
  require_valid(s, b, v);
  LinearProgram lp;
  const std::size_t sigma = detail::add_model_block(lp, s, v);
  const std::size_t lambda = lp.add_variable();
  add_normalization(lp, s, v, sigma, lambda, 0);
  const Rational one = 1;
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t j = 0; j < s.measurements; ++j) {
      for (std::size_t k = 0; k < s.outcomes; ++k) {
        LinearRow<Rational> row;
        detail::add_reproduction_terms(row, v, sigma, i, s.event(k, j), one);
        row.rhs = b(i, j, k);
        lp.inequalities.push_back(std::move(row));
      }
    }
  }
  lp.sense = Sense::Maximize;
  lp.set_objective(lambda, 1);

  const Solved r = solve(lp, options.arithmetic);
  if (!r.optimal) throw Error("contextual fraction LP did not reach an optimum");
  QuantifierReport rep;
  rep.measure = Measure::ContextualFraction;
  if (options.arithmetic == Arithmetic::Float) {
    rep.exact = false;
    rep.value_float = 1.0 - r.value_float;
    return rep;
  }
  const Rational lam = r.value;
  rep.weight = lam;
  rep.value = 1 - lam;
  rep.value_float = rep.value.get_d();
  if (sgn(lam) > 0) {
    rep.nc_model = scaled_model(r.x, sigma, s, v, lam);
    rep.nc_part = model_behavior(s, v, *rep.nc_model);
  } else {
    const Behavior u = uniform_behavior(s);
    rep.nc_model = check_membership(s, u, v).model;
    rep.nc_part = u;
  }
  if (lam < 1) {
    rep.residual = affine(Rational(1) / (1 - lam), b, -lam / (1 - lam), *rep.nc_part);
  } else {
    rep.residual = b;
  }
  return rep;
}

QuantifierReport robustness(const Scenario& s, const Behavior& b, const VertexSet& v,
                            const QuantifierOptions& options) {
  require_valid(s, b, v);
  LinearProgram lp;
  const std::size_t sigma = detail::add_model_block(lp, s, v);
  const std::size_t nu = detail::add_model_block(lp, s, v);
  const std::size_t lambda = lp.add_variable();
  add_normalization(lp, s, v, sigma, lambda, 0);
  add_normalization(lp, s, v, nu, std::nullopt, 1);
  const Rational one = 1, minus_one = -1;
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t j = 0; j < s.measurements; ++j) {
      for (std::size_t k = 0; k < s.outcomes; ++k) {
        LinearRow<Rational> row;
        detail::add_reproduction_terms(row, v, nu, i, s.event(k, j), one);
        detail::add_reproduction_terms(row, v, sigma, i, s.event(k, j), minus_one);
        if (sgn(b(i, j, k)) != 0) row.add(lambda, b(i, j, k));
        row.rhs = b(i, j, k);
        lp.equalities.push_back(std::move(row));
      }
    }
  }
  lp.set_objective(lambda, 1);

  const Solved r = solve(lp, options.arithmetic);
  // lambda = 1 with a shared model of the uniform behavior is always feasible.
  if (!r.optimal) throw Error("robustness LP has no optimum; the uniform behavior should make it feasible");
  QuantifierReport rep;
  rep.measure = Measure::Robustness;
  if (options.arithmetic == Arithmetic::Float) {
    rep.exact = false;
    rep.value_float = r.value_float;
    return rep;
  }
  const Rational lam = r.value;
  rep.weight = lam;
  rep.value = lam;
  rep.value_float = lam.get_d();
  rep.mixture_model = detail::extract_model(r.x, nu, s.preparations, v.size());
  rep.mixture = model_behavior(s, v, *rep.mixture_model);
  if (sgn(lam) > 0) {
    rep.nc_model = scaled_model(r.x, sigma, s, v, lam);
    rep.nc_part = model_behavior(s, v, *rep.nc_model);
  } else {
    rep.nc_model = rep.mixture_model;
    rep.nc_part = b;
  }
  return rep;
}

QuantifierReport robustness_ref(const Scenario& s, const Behavior& b, const Behavior& b_ref, const VertexSet& v,
                                const QuantifierOptions& options) {
  require_valid(s, b, v);
  require_valid(s, b_ref, v);
  const MembershipResult ref = check_membership(s, b_ref, v);
  if (!ref.noncontextual) throw PreconditionError("reference behavior is contextual");

  LinearProgram lp;
  const std::size_t nu = detail::add_model_block(lp, s, v);
  const std::size_t lambda = lp.add_variable();
  add_normalization(lp, s, v, nu, std::nullopt, 1);
  const Rational one = 1;
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t j = 0; j < s.measurements; ++j) {
      for (std::size_t k = 0; k < s.outcomes; ++k) {
        LinearRow<Rational> row;
        detail::add_reproduction_terms(row, v, nu, i, s.event(k, j), one);
        const Rational d = b_ref(i, j, k) - b(i, j, k);
        if (sgn(d) != 0) row.add(lambda, -d);
        row.rhs = b(i, j, k);
        lp.equalities.push_back(std::move(row));
      }
    }
  }
  LinearRow<Rational> cap;
  cap.add(lambda, 1);
  cap.rhs = 1;
  lp.inequalities.push_back(cap);
  lp.set_objective(lambda, 1);

  const Solved r = solve(lp, options.arithmetic);
  QuantifierReport rep;
  rep.measure = Measure::RobustnessRef;
  rep.exact = options.arithmetic == Arithmetic::Exact;
  if (r.infeasible) {
    rep.defined = false;
    rep.value_float = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (!r.optimal) throw Error("reference robustness LP did not reach an optimum");
  if (!rep.exact) {
    rep.value_float = r.value_float;
    return rep;
  }
  rep.weight = r.value;
  rep.value = r.value;
  rep.value_float = r.value.get_d();
  rep.nc_part = b_ref;
  rep.nc_model = ref.model;
  rep.mixture_model = detail::extract_model(r.x, nu, s.preparations, v.size());
  rep.mixture = model_behavior(s, v, *rep.mixture_model);
  return rep;
}

Rational l1_behavior_distance(const Behavior& b, const Behavior& other) {
  if (!b.same_shape(other)) throw StructuralError("l1 distance: behaviors have different shapes");
  Rational best = 0;
  for (std::size_t i = 0; i < b.preparations(); ++i) {
    for (std::size_t j = 0; j < b.measurements(); ++j) {
      Rational d = 0;
      for (std::size_t k = 0; k < b.outcomes(); ++k) d += abs(b(i, j, k) - other(i, j, k));
      if (d > best) best = d;
    }
  }
  return best;
}

namespace {

// Distance LP: model block mu, deviation variables e >= |p - p'| and, for the
// max form, a bound t >= sum_k e per (i, j).
QuantifierReport distance_lp(const Scenario& s, const Behavior& b, const VertexSet& v,
                             const QuantifierOptions& options, bool max_form) {
  require_valid(s, b, v);
  LinearProgram lp;
  const std::size_t mu = detail::add_model_block(lp, s, v);
  add_normalization(lp, s, v, mu, std::nullopt, 1);
  const std::size_t e0 = lp.add_variables(s.table_size());
  const std::size_t t = max_form ? lp.add_variable() : 0;
  const Rational one = 1, minus_one = -1;
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t j = 0; j < s.measurements; ++j) {
      LinearRow<Rational> bound;
      for (std::size_t k = 0; k < s.outcomes; ++k) {
        const std::size_t e = e0 + b.index(i, j, k);
        LinearRow<Rational> above;  // p' - e <= p
        detail::add_reproduction_terms(above, v, mu, i, s.event(k, j), one);
        above.add(e, -1);
        above.rhs = b(i, j, k);
        lp.inequalities.push_back(std::move(above));
        LinearRow<Rational> below;  // -p' - e <= -p
        detail::add_reproduction_terms(below, v, mu, i, s.event(k, j), minus_one);
        below.add(e, -1);
        below.rhs = -b(i, j, k);
        lp.inequalities.push_back(std::move(below));
        bound.add(e, 1);
      }
      if (max_form) {
        bound.add(t, -1);
        bound.rhs = 0;
        lp.inequalities.push_back(std::move(bound));
      }
    }
  }
  if (max_form) {
    lp.set_objective(t, 1);
  } else {
    for (std::size_t n = 0; n < s.table_size(); ++n) lp.set_objective(e0 + n, 1);
  }

  const Solved r = solve(lp, options.arithmetic);
  if (!r.optimal) throw Error("distance LP did not reach an optimum");
  QuantifierReport rep;
  rep.measure = max_form ? Measure::L1Distance : Measure::UniformL1;
  const Rational scale = max_form ? Rational(1) : Rational(1, 2 * s.preparations * s.measurements);
  if (options.arithmetic == Arithmetic::Float) {
    rep.exact = false;
    rep.value_float = r.value_float * scale.get_d();
    return rep;
  }
  rep.closest_model = detail::extract_model(r.x, mu, s.preparations, v.size());
  rep.closest = model_behavior(s, v, *rep.closest_model);
  rep.value = r.value * scale;
  rep.value_float = rep.value.get_d();
  return rep;
}

}  // namespace

QuantifierReport l1_contextuality_distance(const Scenario& s, const Behavior& b, const VertexSet& v,
                                           const QuantifierOptions& options) {
  return distance_lp(s, b, v, options, true);
}

QuantifierReport uniform_l1_distance(const Scenario& s, const Behavior& b, const VertexSet& v,
                                     const QuantifierOptions& options) {
  return distance_lp(s, b, v, options, false);
}

QuantifierReport quantify(Measure m, const Scenario& s, const Behavior& b, const VertexSet& v,
                          const QuantifierOptions& options, const Behavior* b_ref, const KlOptions& kl) {
  switch (m) {
    case Measure::ContextualFraction: return contextual_fraction(s, b, v, options);
    case Measure::Robustness: return robustness(s, b, v, options);
    case Measure::RobustnessRef:
      if (b_ref == nullptr) throw InvalidInput("reference robustness needs a reference behavior");
      return robustness_ref(s, b, *b_ref, v, options);
    case Measure::L1Distance: return l1_contextuality_distance(s, b, v, options);
    case Measure::UniformL1: return uniform_l1_distance(s, b, v, options);
    case Measure::RelativeEntropy: return kl_contextuality(s, b, v, kl);
  }
  throw InvalidInput("unknown measure");
}

bool verify_report(const Scenario& s, const Behavior& b, const VertexSet& v, const QuantifierReport& r,
                   const Behavior* b_ref) {
  auto valid_in_s = [&](const Behavior& x) { return x.fits(s) && validate_behavior(s, x).ok(); };
  switch (r.measure) {
    case Measure::ContextualFraction:
      if (!r.exact || !r.nc_part || !r.nc_model || !r.residual) return false;
      if (r.value != 1 - r.weight || sgn(r.weight) < 0 || r.weight > 1) return false;
      return verify_model(s, *r.nc_part, v, *r.nc_model) && valid_in_s(*r.residual) &&
             affine(r.weight, *r.nc_part, 1 - r.weight, *r.residual) == b;
    case Measure::Robustness:
      if (!r.exact || !r.nc_part || !r.nc_model || !r.mixture || !r.mixture_model) return false;
      if (r.value != r.weight || sgn(r.weight) < 0 || r.weight > 1) return false;
      return verify_model(s, *r.nc_part, v, *r.nc_model) && verify_model(s, *r.mixture, v, *r.mixture_model) &&
             affine(r.weight, *r.nc_part, 1 - r.weight, b) == *r.mixture;
    case Measure::RobustnessRef:
      if (!r.defined) return b_ref != nullptr;
      if (!r.exact || b_ref == nullptr || !r.mixture || !r.mixture_model) return false;
      return verify_model(s, *r.mixture, v, *r.mixture_model) &&
             affine(r.weight, *b_ref, 1 - r.weight, b) == *r.mixture;
    case Measure::L1Distance:
      if (!r.exact || !r.closest || !r.closest_model) return false;
      return verify_model(s, *r.closest, v, *r.closest_model) && l1_behavior_distance(b, *r.closest) == r.value;
    case Measure::UniformL1:
      if (!r.exact || !r.closest || !r.closest_model) return false;
      return verify_model(s, *r.closest, v, *r.closest_model) &&
             sum_l1(b, *r.closest) / (2 * s.preparations * s.measurements) == r.value;
    case Measure::RelativeEntropy: {
      if (!r.closest_float || r.closest_mu.size() != s.preparations * v.size()) return false;
      const std::size_t V = v.size();
      for (std::size_t i = 0; i < s.preparations; ++i) {
        double total = 0;
        for (std::size_t kappa = 0; kappa < V; ++kappa) {
          const double w = r.closest_mu[i * V + kappa];
          if (w < -1e-9) return false;
          total += w;
        }
        if (std::fabs(total - 1.0) > 1e-9) return false;
      }
      for (const auto& eq : s.prep_equivalences) {
        for (std::size_t kappa = 0; kappa < V; ++kappa) {
          double d = 0;
          for (std::size_t i = 0; i < s.preparations; ++i) {
            d += Rational(eq.alpha[i] - eq.beta[i]).get_d() * r.closest_mu[i * V + kappa];
          }
          if (std::fabs(d) > 1e-9) return false;
        }
      }
      for (std::size_t i = 0; i < s.preparations; ++i) {
        for (std::size_t e = 0; e < s.events(); ++e) {
          double q = 0;
          for (std::size_t kappa = 0; kappa < V; ++kappa) q += v[kappa][e].get_d() * r.closest_mu[i * V + kappa];
          if (std::fabs(q - r.closest_float->p[i * s.events() + e]) > 1e-9) return false;
        }
      }
      return std::fabs(max_relative_entropy(b, *r.closest_float) - r.value_float) <= 1e-9;
    }
  }
  return false;
}

}  // namespace ctxlab
