// Relative entropy of contextuality by a log-barrier interior-point method on
// the epigraph form
//
//   min t  s.t.  D_ij(q(mu)) <= t,  mu >= 0,  E mu = e,
//
// where E holds the per-preparation normalizations and the preparation
// equivalences. Newton steps run in an orthonormal basis Z of the null space of
// E, starting from the uniform model (1/V everywhere, always feasible since
// equivalent mixtures carry equal mass). D_ij depends on mu_i only through K
// outcome probabilities, so the reduced Hessian is assembled from the images
// Zq = A Z of the null-space basis.
//
// Upper bound: best true max seen. Lower bound: the LP  min_mu max_ij L_ij(mu)
// with L_ij the tangent of D_ij at the best point, valid by convexity and tight
// at the optimum.

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctxlab/errors.hpp"
#include "ctxlab/quantifiers.hpp"
#include "ctxlab/simd.hpp"

namespace ctxlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// In-place Cholesky of a dense symmetric matrix (lower triangle used).
bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double* rj = &a[j * n];
    double diag = rj[j] - simd::dot({rj, j}, {rj, j});
    if (!(diag > 0.0)) return false;
    diag = std::sqrt(diag);
    rj[j] = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* ri = &a[i * n];
      ri[j] = (ri[j] - simd::dot({ri, j}, {rj, j})) / diag;
    }
  }
  return true;
}

void cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double>& x) {
  for (std::size_t i = 0; i < n; ++i) x[i] = (x[i] - simd::dot({&l[i * n], i}, {x.data(), i})) / l[i * n + i];
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * x[k];
    x[i] = s / l[i * n + i];
  }
}

// Leading len x len block of a (row stride n) += w * z z^T, lower triangle.
void rank_one(std::vector<double>& a, std::size_t n, std::size_t len, double w, const double* z) {
  for (std::size_t r = 0; r < len; ++r) {
    if (z[r] != 0.0) simd::axpy(w * z[r], {z, r + 1}, {&a[r * n], r + 1});
  }
}

class KlProblem {
 public:
  KlProblem(const Scenario& s, const Behavior& b, const VertexSet& v)
      : I_(s.preparations), J_(s.measurements), K_(s.outcomes), E_(s.events()), V_(v.size()), xi_(V_ * E_),
        p_(to_doubles(b.values())) {
    for (std::size_t kappa = 0; kappa < V_; ++kappa) {
      for (std::size_t e = 0; e < E_; ++e) xi_[kappa * E_ + e] = v[kappa][e].get_d();
    }
    base_.add_variables(I_ * V_);
    for (std::size_t i = 0; i < I_; ++i) {
      LinearRow<double> row;
      for (std::size_t kappa = 0; kappa < V_; ++kappa) row.add(i * V_ + kappa, 1.0);
      row.rhs = 1.0;
      base_.equalities.push_back(std::move(row));
    }
    for (const auto& eq : s.prep_equivalences) {
      for (std::size_t kappa = 0; kappa < V_; ++kappa) {
        LinearRow<double> row;
        for (std::size_t i = 0; i < I_; ++i) {
          const double d = Rational(eq.alpha[i] - eq.beta[i]).get_d();
          if (d != 0.0) row.add(i * V_ + kappa, d);
        }
        base_.equalities.push_back(std::move(row));
      }
    }
  }

  std::size_t pairs() const { return I_ * J_; }
  std::size_t dim() const { return I_ * V_; }
  std::size_t events() const { return I_ * E_; }
  double p(std::size_t n) const { return p_[n]; }
  std::size_t outcomes() const { return K_; }

  std::vector<double> image(const std::vector<double>& mu) const {
    std::vector<double> q(I_ * E_, 0.0);
    for (std::size_t i = 0; i < I_; ++i) {
      std::span<double> qi(&q[i * E_], E_);
      for (std::size_t kappa = 0; kappa < V_; ++kappa) {
        const double w = mu[i * V_ + kappa];
        if (w != 0.0) simd::axpy(w, {&xi_[kappa * E_], E_}, qi);
      }
    }
    return q;
  }

  // D_ij for all pairs; +inf where p > 0 meets q <= 0.
  std::vector<double> divergences(const std::vector<double>& q) const {
    std::vector<double> d(pairs(), 0.0);
    for (std::size_t r = 0; r < pairs(); ++r) {
      double total = 0;
      for (std::size_t k = 0; k < K_; ++k) {
        const std::size_t n = r * K_ + k;
        if (p_[n] <= 0.0) continue;
        if (q[n] <= 0.0) {
          total = kInf;
          break;
        }
        total += p_[n] * std::log(p_[n] / q[n]);
      }
      d[r] = total;
    }
    return d;
  }

  // Orthonormal basis of {x : E x = 0}, row-major dim() x d, by Gram-Schmidt:
  // first the row space of E, then the unit vectors against it.
  std::vector<double> null_space(std::size_t& d) const {
    const std::size_t n = dim();
    std::vector<std::vector<double>> basis;
    auto reduce = [&](std::vector<double>& x) {
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) simd::axpy(-simd::dot(b, x), b, x);
      }
      return std::sqrt(simd::dot(x, x));
    };
    for (const auto& row : base_.equalities) {
      std::vector<double> x(n, 0.0);
      for (std::size_t k = 0; k < row.cols.size(); ++k) x[row.cols[k]] += row.vals[k];
      const double before = std::sqrt(simd::dot(x, x));
      const double after = reduce(x);
      if (after > 1e-9 * before) {
        simd::scale(1.0 / after, x);
        basis.push_back(std::move(x));
      }
    }
    const std::size_t rank = basis.size();
    for (std::size_t k = 0; k < n && basis.size() < n; ++k) {
      std::vector<double> x(n, 0.0);
      x[k] = 1.0;
      const double after = reduce(x);
      if (after > 1e-6) {
        simd::scale(1.0 / after, x);
        basis.push_back(std::move(x));
      }
    }
    d = basis.size() - rank;
    std::vector<double> z(n * d);
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t k = 0; k < n; ++k) z[k * d + c] = basis[rank + c][k];
    }
    return z;
  }

  // Rows of A Z: the change in q(mu) along each null-space direction.
  std::vector<double> image_of_basis(const std::vector<double>& z, std::size_t d) const {
    std::vector<double> zq(events() * d, 0.0);
    for (std::size_t i = 0; i < I_; ++i) {
      for (std::size_t e = 0; e < E_; ++e) {
        std::span<double> out(&zq[(i * E_ + e) * d], d);
        for (std::size_t kappa = 0; kappa < V_; ++kappa) {
          const double x = xi_[kappa * E_ + e];
          if (x != 0.0) simd::axpy(x, {&z[(i * V_ + kappa) * d], d}, out);
        }
      }
    }
    return zq;
  }

  // Lower bound min_mu max_ij [D_ij(q) + <grad D_ij(q), q(mu) - q>] via a float LP.
  std::optional<double> tangent_bound(const std::vector<double>& q, const std::vector<double>& d) const {
    FloatLinearProgram lp = base_;
    const std::size_t t = lp.add_variable(true);
    for (std::size_t i = 0; i < I_; ++i) {
      for (std::size_t j = 0; j < J_; ++j) {
        // L_ij(mu) = d_ij + sum_k p - sum_k (p / q) q_k(mu)  <=  t
        LinearRow<double> row;
        double constant = d[i * J_ + j];
        std::vector<double> coeff(V_, 0.0);
        for (std::size_t k = 0; k < K_; ++k) {
          const std::size_t n = i * E_ + j * K_ + k;
          if (p_[n] <= 0.0) continue;
          const double r = p_[n] / q[n];
          constant += p_[n];
          for (std::size_t kappa = 0; kappa < V_; ++kappa) coeff[kappa] -= r * xi_[kappa * E_ + j * K_ + k];
        }
        for (std::size_t kappa = 0; kappa < V_; ++kappa) {
          if (coeff[kappa] != 0.0) row.add(i * V_ + kappa, coeff[kappa]);
        }
        row.add(t, -1.0);
        row.rhs = -constant;
        lp.inequalities.push_back(std::move(row));
      }
    }
    lp.set_objective(t, 1.0);
    // A solve that runs long is abandoned and the bound skipped.
    FloatOptions budget;
    budget.max_iterations = 10 * (lp.equalities.size() + lp.inequalities.size() + lp.n_vars);
    const auto out = solve_float(lp, budget);
    if (out.status != LpStatus::Optimal) return std::nullopt;
    return out.objective_value;
  }

 private:
  std::size_t I_, J_, K_, E_, V_;
  std::vector<double> xi_;
  std::vector<double> p_;
  FloatLinearProgram base_;
};

// Epigraph variables: w_e >= p_e log(p_e / q_e) for each event with p_e > 0,
// sum_{e in (i,j)} w_e <= t. Each piece has the exponential-cone barrier
// -log(w_e + p_e log q_e - p_e log p_e) - log q_e, which keeps Newton's method
// well behaved; a single -log(t - D_ij) does not.
struct Barrier {
  const KlProblem& prob;
  const std::vector<std::size_t>& support;  // events with p > 0
  double tau = 1.0;

  std::size_t terms() const { return prob.dim() + 2 * support.size() + prob.pairs(); }

  // +inf outside the domain.
  double operator()(const std::vector<double>& mu, const std::vector<double>& w, double t) const {
    double value = tau * t;
    for (double x : mu) {
      if (!(x > 0.0)) return kInf;
      value -= std::log(x);
    }
    const auto q = prob.image(mu);
    std::vector<double> used(prob.pairs(), 0.0);
    for (std::size_t a = 0; a < support.size(); ++a) {
      const std::size_t e = support[a];
      const double pe = prob.p(e);
      if (!(q[e] > 0.0)) return kInf;
      const double h = w[a] + pe * std::log(q[e] / pe);
      if (!(h > 0.0)) return kInf;
      value -= std::log(h) + std::log(q[e]);
      used[e / prob.outcomes()] += w[a];
    }
    for (double x : used) {
      if (!(t - x > 0.0)) return kInf;
      value -= std::log(t - x);
    }
    return value;
  }
};

}  // namespace

double max_relative_entropy(const Behavior& b, const FloatBehavior& q) {
  if (q.preparations != b.preparations() || q.measurements != b.measurements() || q.outcomes != b.outcomes() ||
      q.p.size() != b.size()) {
    throw StructuralError("relative entropy: behaviors have different shapes");
  }
  double best = 0;
  for (std::size_t i = 0; i < b.preparations(); ++i) {
    for (std::size_t j = 0; j < b.measurements(); ++j) {
      double total = 0;
      for (std::size_t k = 0; k < b.outcomes(); ++k) {
        const double p = b(i, j, k).get_d();
        const double r = q.p[b.index(i, j, k)];
        if (p <= 0.0) continue;
        if (r <= 0.0) return kInf;
        total += p * std::log(p / r);
      }
      best = std::max(best, total);
    }
  }
  return best;
}

QuantifierReport kl_contextuality(const Scenario& s, const Behavior& b, const VertexSet& v, const KlOptions& opt) {
  if (!(opt.tolerance > 0)) throw InvalidInput("relative entropy tolerance must be positive");
  if (!(opt.barrier_growth > 1)) throw InvalidInput("relative entropy barrier growth must exceed 1");
  if (!b.fits(s)) throw StructuralError("behavior dimensions do not match the scenario");
  require_matching(s, v);
  if (const auto report = validate_behavior(s, b); !report.ok()) {
    throw InvalidInput("invalid behavior: " + report.summary());
  }

  const KlProblem prob(s, b, v);
  const std::size_t n = prob.dim(), n_pairs = prob.pairs(), K = prob.outcomes();

  QuantifierReport rep;
  rep.measure = Measure::RelativeEntropy;
  rep.exact = false;

  std::vector<double> mu(n, 1.0 / static_cast<double>(v.size()));
  auto q = prob.image(mu);
  auto d = prob.divergences(q);
  double upper = *std::max_element(d.begin(), d.end());
  std::vector<double> best_mu = mu;
  double lower = 0.0;
  auto finish = [&](std::size_t iterations) {
    rep.iterations = iterations;
    rep.value_float = upper;
    rep.gap = std::max(0.0, upper - lower);
    rep.converged = rep.gap <= opt.tolerance;
    rep.closest_mu = best_mu;
    rep.closest_float = FloatBehavior{s.preparations, s.measurements, s.outcomes, prob.image(best_mu)};
    return rep;
  };
  if (!std::isfinite(upper)) {
    // Some p > 0 sits on an event no vertex produces: every model gives it
    // probability 0.
    lower = upper;
    rep.upper_trace.push_back(upper);
    return finish(0);
  }

  std::vector<std::size_t> support;
  for (std::size_t e = 0; e < prob.events(); ++e) {
    if (prob.p(e) > 0.0) support.push_back(e);
  }
  const std::size_t S = support.size();
  std::size_t dn = 0;
  const std::vector<double> z = prob.null_space(dn);
  const std::vector<double> zq = prob.image_of_basis(z, dn);
  // Reduced variables: y (null-space coordinates of mu), w, t.
  const std::size_t m = dn + S + 1, wt = dn, tt = dn + S;

  std::vector<double> w(S);
  for (std::size_t a = 0; a < S; ++a) {
    const std::size_t e = support[a];
    w[a] = prob.p(e) * std::log(prob.p(e) / q[e]) + 1.0;
  }
  double t = 0.0;
  {
    std::vector<double> used(n_pairs, 0.0);
    for (std::size_t a = 0; a < S; ++a) used[support[a] / K] += w[a];
    t = *std::max_element(used.begin(), used.end()) + 1.0;
  }
  Barrier phi{prob, support, 1.0};
  // On the central path the duality gap is terms / tau.
  const double terms = static_cast<double>(phi.terms());
  phi.tau = terms / std::max(1.0, upper);

  std::vector<double> h(m * m), g(m), row(m), dmu(n), used(n_pairs);
  std::size_t it = 0;
  bool stalled = false;
  double tau_before = phi.tau;
  while (it < opt.max_iterations && !stalled) {
    // Centering. A centering that drags on is in Newton's damped phase; pulling
    // tau back toward the last centered value shortens it.
    for (std::size_t inner = 0; inner < 200 && it < opt.max_iterations; ++inner) {
      if (inner > 0 && inner % 30 == 0 && phi.tau > tau_before) phi.tau = std::sqrt(phi.tau * tau_before);
      std::fill(h.begin(), h.end(), 0.0);
      std::fill(g.begin(), g.end(), 0.0);
      g[tt] = phi.tau;
      std::fill(used.begin(), used.end(), 0.0);
      for (std::size_t a = 0; a < S; ++a) {
        const std::size_t e = support[a];
        const double pe = prob.p(e), qe = q[e];
        const double* ze = &zq[e * dn];
        used[e / K] += w[a];
        // -log h_e, h_e = w_e + p_e log(q_e / p_e)
        const double he = w[a] + pe * std::log(qe / pe);
        std::fill(row.begin(), row.end(), 0.0);
        simd::axpy(pe / qe, {ze, dn}, {row.data(), dn});
        row[wt + a] = 1.0;
        simd::axpy(-1.0 / he, row, g);
        rank_one(h, m, m, 1.0 / (he * he), row.data());
        // curvature of log q_e inside h_e, and -log q_e
        simd::axpy(-1.0 / qe, {ze, dn}, {g.data(), dn});
        rank_one(h, m, dn, (pe / he + 1.0) / (qe * qe), ze);
      }
      for (std::size_t r = 0; r < n_pairs; ++r) {
        // -log(t - sum w over the pair)
        const double slack = t - used[r];
        const double c = 1.0 / (slack * slack);
        g[tt] -= 1.0 / slack;
        h[tt * m + tt] += c;
        for (std::size_t a = 0; a < S; ++a) {
          if (support[a] / K != r) continue;
          g[wt + a] += 1.0 / slack;
          h[tt * m + wt + a] -= c;
          for (std::size_t b2 = 0; b2 <= a; ++b2) {
            if (support[b2] / K == r) h[(wt + a) * m + wt + b2] += c;
          }
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        simd::axpy(-1.0 / mu[k], {&z[k * dn], dn}, {g.data(), dn});
        rank_one(h, m, dn, 1.0 / (mu[k] * mu[k]), &z[k * dn]);
      }

      std::vector<double> step(g);
      simd::scale(-1.0, step);
      std::vector<double> l = h;
      double shift = 0.0;
      while (!cholesky(l, m)) {
        double top = 0.0;
        for (std::size_t c = 0; c < m; ++c) top = std::max(top, h[c * m + c]);
        shift = shift == 0.0 ? 1e-14 * top : shift * 100;
        l = h;
        for (std::size_t c = 0; c < m; ++c) l[c * m + c] += shift;
      }
      cholesky_solve(l, m, step);
      const double decrement = -simd::dot(g, step);
      if (!(decrement > 0.0)) {
        stalled = decrement != 0.0;
        break;
      }
      if (decrement < 1e-9) break;

      for (std::size_t k = 0; k < n; ++k) dmu[k] = simd::dot({&z[k * dn], dn}, {step.data(), dn});
      double alpha = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (dmu[k] < 0.0) alpha = std::min(alpha, -0.99 * mu[k] / dmu[k]);
      }
      const double now = phi(mu, w, t);
      std::vector<double> trial_mu(n), trial_w(S);
      bool moved = false;
      for (int back = 0; back < 60; ++back, alpha *= 0.5) {
        for (std::size_t k = 0; k < n; ++k) trial_mu[k] = mu[k] + alpha * dmu[k];
        for (std::size_t a = 0; a < S; ++a) trial_w[a] = w[a] + alpha * step[wt + a];
        const double trial_t = t + alpha * step[tt];
        if (phi(trial_mu, trial_w, trial_t) <= now - 0.01 * alpha * decrement) {
          mu.swap(trial_mu);
          w.swap(trial_w);
          t = trial_t;
          moved = true;
          break;
        }
      }
      ++it;
      if (!moved) {
        stalled = true;
        break;
      }
      q = prob.image(mu);
      d = prob.divergences(q);
      const double value = *std::max_element(d.begin(), d.end());
      if (value < upper) {
        upper = value;
        best_mu = mu;
      }
      rep.upper_trace.push_back(upper);
      if (decrement < 1e-6) break;
    }
    if (terms / phi.tau <= opt.tolerance / 2 || stalled || it >= opt.max_iterations) {
      const auto qb = prob.image(best_mu);
      if (const auto bound = prob.tangent_bound(qb, prob.divergences(qb))) lower = std::max(lower, *bound);
      if (upper - lower <= opt.tolerance) break;
    }
    tau_before = phi.tau;
    phi.tau *= opt.barrier_growth;
  }
  return finish(it);
}

}  // namespace ctxlab
