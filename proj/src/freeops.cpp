#include "ctxlab/freeops.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ctxlab/errors.hpp"

namespace ctxlab {

bool FreeOperation::outcome_maps_measurement_independent() const {
  for (const auto& per_target : q_out) {
    for (const auto& m : per_target) {
      if (!(m == per_target.front())) return false;
    }
  }
  return true;
}

FreeOperation identity_operation(const Scenario& s) {
  FreeOperation t;
  t.source = s;
  t.target = s;
  t.q_prep = RationalMatrix::identity(s.preparations);
  t.q_meas = RationalMatrix::identity(s.measurements);
  t.q_out.assign(s.measurements,
                 std::vector<RationalMatrix>(s.measurements, RationalMatrix::identity(s.outcomes)));
  return t;
}

namespace {

struct RawLift {
  std::vector<Rational> alpha, beta;
};

std::vector<Rational> lift_prep_vector(const RationalMatrix& q_prep, const std::vector<Rational>& target) {
  std::vector<Rational> out(q_prep.rows());
  for (std::size_t i = 0; i < q_prep.rows(); ++i) {
    for (std::size_t it = 0; it < q_prep.cols(); ++it) {
      if (sgn(target[it]) != 0) out[i] += target[it] * q_prep(i, it);
    }
  }
  return out;
}

// alpha_{k|j} = sum_{k~, j~} alpha~_{k~|j~} q_O^{j~,j}(k~|k) q_M(j|j~), unnormalized.
std::vector<Rational> lift_meas_vector(const RationalMatrix& q_meas, const std::vector<std::vector<RationalMatrix>>& q_out,
                                       std::size_t source_outcomes, const std::vector<Rational>& target) {
  const std::size_t J = q_meas.rows();
  const std::size_t Jt = q_meas.cols();
  const std::size_t K = source_outcomes;
  const std::size_t Kt = Jt == 0 ? 0 : target.size() / Jt;
  std::vector<Rational> out(J * K);
  for (std::size_t jt = 0; jt < Jt; ++jt) {
    for (std::size_t kt = 0; kt < Kt; ++kt) {
      const Rational& a = target[jt * Kt + kt];
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < J; ++j) {
        const Rational& route = q_meas(j, jt);
        if (sgn(route) == 0) continue;
        const RationalMatrix& m = q_out[jt][j];
        for (std::size_t k = 0; k < K; ++k) {
          if (sgn(m(kt, k)) != 0) out[j * K + k] += a * m(kt, k) * route;
        }
      }
    }
  }
  return out;
}

template <class Eq>
bool same_equivalence(const Eq& x, const Eq& y) {
  return (x.alpha == y.alpha && x.beta == y.beta) || (x.alpha == y.beta && x.beta == y.alpha);
}

void normalize(std::vector<Rational>& v) {
  const Rational m = sum(v);
  for (auto& x : v) x /= m;
}

}  // namespace

LiftedEquivalences lift_equivalences(const RationalMatrix& q_prep, const RationalMatrix& q_meas,
                                     const std::vector<std::vector<RationalMatrix>>& q_out,
                                     std::size_t source_outcomes, const std::vector<PrepEquivalence>& target_prep,
                                     const std::vector<MeasEquivalence>& target_meas) {
  LiftedEquivalences out;
  for (const auto& eq : target_prep) {
    if (eq.alpha.size() != q_prep.cols() || eq.beta.size() != q_prep.cols()) {
      throw StructuralError("preparation equivalence length differs from the target preparation count");
    }
    PrepEquivalence lifted{lift_prep_vector(q_prep, eq.alpha), lift_prep_vector(q_prep, eq.beta)};
    if (sgn(sum(lifted.alpha)) == 0 || sgn(sum(lifted.beta)) == 0) {
      throw InvalidInput("induced preparation equivalence has zero mass");
    }
    normalize(lifted.alpha);
    normalize(lifted.beta);
    out.prep.push_back(std::move(lifted));
  }
  for (const auto& eq : target_meas) {
    MeasEquivalence lifted{lift_meas_vector(q_meas, q_out, source_outcomes, eq.alpha),
                           lift_meas_vector(q_meas, q_out, source_outcomes, eq.beta)};
    const Rational ma = sum(lifted.alpha), mb = sum(lifted.beta);
    if (sgn(ma) == 0 || sgn(mb) == 0) throw InvalidInput("induced measurement equivalence has zero mass");
    if (ma != mb) throw InvalidInput("induced measurement equivalence has unequal masses " + to_string(ma) + " and " + to_string(mb));
    normalize(lifted.alpha);
    normalize(lifted.beta);
    out.meas.push_back(std::move(lifted));
  }
  return out;
}

ValidationReport validate_freeop(const FreeOperation& t) {
  ValidationReport report;
  const Scenario& s = t.source;
  const Scenario& st = t.target;
  if (t.q_prep.rows() != s.preparations || t.q_prep.cols() != st.preparations) {
    report.add("bad-dimension", "q_P must be " + std::to_string(s.preparations) + "x" + std::to_string(st.preparations));
  }
  if (t.q_meas.rows() != s.measurements || t.q_meas.cols() != st.measurements) {
    report.add("bad-dimension", "q_M must be " + std::to_string(s.measurements) + "x" + std::to_string(st.measurements));
  }
  bool outcome_shape = t.q_out.size() == st.measurements;
  for (const auto& per_target : t.q_out) {
    if (per_target.size() != s.measurements) outcome_shape = false;
    for (const auto& m : per_target) {
      if (m.rows() != st.outcomes || m.cols() != s.outcomes) outcome_shape = false;
    }
  }
  if (!outcome_shape) {
    report.add("bad-dimension", "q_O must hold " + std::to_string(st.measurements) + "x" +
                                    std::to_string(s.measurements) + " maps of shape " + std::to_string(st.outcomes) +
                                    "x" + std::to_string(s.outcomes));
  }
  if (!report.ok()) return report;

  if (!t.q_prep.is_column_stochastic()) report.add("not-stochastic", "q_P is not column stochastic");
  if (!t.q_meas.is_column_stochastic()) report.add("not-stochastic", "q_M is not column stochastic");
  for (std::size_t jt = 0; jt < t.q_out.size(); ++jt) {
    for (std::size_t j = 0; j < t.q_out[jt].size(); ++j) {
      if (!t.q_out[jt][j].is_column_stochastic()) {
        report.add("not-stochastic", "q_O for target measurement " + std::to_string(jt) + ", source measurement " +
                                         std::to_string(j) + " is not column stochastic");
      }
    }
  }
  const auto vs = validate_scenario(s);
  for (const auto& v : vs.violations) report.add("source-invalid", "source scenario: " + v.message);
  const auto vt = validate_scenario(st);
  for (const auto& v : vt.violations) report.add("target-invalid", "target scenario: " + v.message);
  if (!report.ok()) return report;

  if (s.prep_equivalences.size() != st.prep_equivalences.size() ||
      s.meas_equivalences.size() != st.meas_equivalences.size()) {
    report.add("equivalence-count", "source and target must list the same number of equivalences of each kind");
    return report;
  }
  const Scenario sc = canonicalize(s);
  const Scenario tc = canonicalize(st);
  for (std::size_t n = 0; n < tc.prep_equivalences.size(); ++n) {
    const auto& eq = tc.prep_equivalences[n];
    PrepEquivalence lifted{lift_prep_vector(t.q_prep, eq.alpha), lift_prep_vector(t.q_prep, eq.beta)};
    if (lifted.alpha == lifted.beta) {
      report.add("lift-trivial", "preparation equivalence " + std::to_string(n) + " lifts to a trivial equivalence");
    } else if (!same_equivalence(lifted, sc.prep_equivalences[n])) {
      report.add("lift-mismatch", "preparation equivalence " + std::to_string(n) + ": equivalence lift mismatch");
    }
  }
  for (std::size_t n = 0; n < tc.meas_equivalences.size(); ++n) {
    const auto& eq = tc.meas_equivalences[n];
    MeasEquivalence lifted{lift_meas_vector(t.q_meas, t.q_out, s.outcomes, eq.alpha),
                           lift_meas_vector(t.q_meas, t.q_out, s.outcomes, eq.beta)};
    const Rational ma = sum(lifted.alpha), mb = sum(lifted.beta);
    if (sgn(ma) == 0 || ma != mb) {
      report.add("lift-unbalanced", "measurement equivalence " + std::to_string(n) +
                                        " lifts to sides of unequal or zero mass");
      continue;
    }
    normalize(lifted.alpha);
    normalize(lifted.beta);
    if (lifted.alpha == lifted.beta) {
      report.add("lift-trivial", "measurement equivalence " + std::to_string(n) + " lifts to a trivial equivalence");
    } else if (!same_equivalence(lifted, sc.meas_equivalences[n])) {
      report.add("lift-mismatch", "measurement equivalence " + std::to_string(n) + ": equivalence lift mismatch");
    }
  }
  return report;
}

Behavior apply_freeop_unchecked(const FreeOperation& t, const Behavior& b) {
  const Scenario& s = t.source;
  const Scenario& st = t.target;
  if (!b.fits(s)) throw StructuralError("behavior dimensions do not match the operation's source scenario");
  // First route measurements and outcomes: r[i][j~][k~].
  Behavior routed(s.preparations, st.measurements, st.outcomes);
  for (std::size_t i = 0; i < s.preparations; ++i) {
    for (std::size_t jt = 0; jt < st.measurements; ++jt) {
      for (std::size_t j = 0; j < s.measurements; ++j) {
        const Rational& route = t.q_meas(j, jt);
        if (sgn(route) == 0) continue;
        const RationalMatrix& m = t.q_out[jt][j];
        for (std::size_t k = 0; k < s.outcomes; ++k) {
          const Rational& p = b(i, j, k);
          if (sgn(p) == 0) continue;
          const Rational w = p * route;
          for (std::size_t kt = 0; kt < st.outcomes; ++kt) {
            if (sgn(m(kt, k)) != 0) routed(i, jt, kt) += w * m(kt, k);
          }
        }
      }
    }
  }
  Behavior out(st.preparations, st.measurements, st.outcomes);
  for (std::size_t it = 0; it < st.preparations; ++it) {
    for (std::size_t i = 0; i < s.preparations; ++i) {
      const Rational& w = t.q_prep(i, it);
      if (sgn(w) == 0) continue;
      for (std::size_t jt = 0; jt < st.measurements; ++jt) {
        for (std::size_t kt = 0; kt < st.outcomes; ++kt) {
          if (sgn(routed(i, jt, kt)) != 0) out(it, jt, kt) += w * routed(i, jt, kt);
        }
      }
    }
  }
  return out;
}

Behavior apply_freeop(const FreeOperation& t, const Behavior& b) {
  const auto rt = validate_freeop(t);
  if (!rt.ok()) throw InvalidInput("invalid free operation: " + rt.summary());
  if (!b.fits(t.source)) throw StructuralError("behavior dimensions do not match the operation's source scenario");
  const auto rb = validate_behavior(t.source, b);
  if (!rb.ok()) throw InvalidInput("invalid behavior: " + rb.summary());
  return apply_freeop_unchecked(t, b);
}

FreeOperation compose_freeops(const FreeOperation& t2, const FreeOperation& t1) {
  if (!(t1.target == t2.source)) {
    throw StructuralError("composition: target scenario of the first operation differs from the source of the second");
  }
  FreeOperation t;
  t.source = t1.source;
  t.target = t2.target;
  t.q_prep = t1.q_prep * t2.q_prep;
  t.q_meas = t1.q_meas * t2.q_meas;
  const std::size_t J0 = t1.source.measurements, J1 = t1.target.measurements, J2 = t2.target.measurements;
  const std::size_t K0 = t1.source.outcomes, K2 = t2.target.outcomes;
  t.q_out.assign(J2, std::vector<RationalMatrix>(J0));
  for (std::size_t j2 = 0; j2 < J2; ++j2) {
    for (std::size_t j0 = 0; j0 < J0; ++j0) {
      const Rational& total = t.q_meas(j0, j2);
      RationalMatrix m(K2, K0);
      if (sgn(total) == 0) {
        // Never reached by any routing; any stochastic map will do.
        for (std::size_t k2 = 0; k2 < K2; ++k2) {
          for (std::size_t k0 = 0; k0 < K0; ++k0) m(k2, k0) = Rational(1, K2);
        }
      } else {
        for (std::size_t j1 = 0; j1 < J1; ++j1) {
          const Rational w = t2.q_meas(j1, j2) * t1.q_meas(j0, j1);
          if (sgn(w) == 0) continue;
          const RationalMatrix chained = t2.q_out[j2][j1] * t1.q_out[j1][j0];
          for (std::size_t k2 = 0; k2 < K2; ++k2) {
            for (std::size_t k0 = 0; k0 < K0; ++k0) m(k2, k0) += w * chained(k2, k0);
          }
        }
        for (std::size_t k2 = 0; k2 < K2; ++k2) {
          for (std::size_t k0 = 0; k0 < K0; ++k0) m(k2, k0) /= total;
        }
      }
      t.q_out[j2][j0] = std::move(m);
    }
  }
  return t;
}

bool fixes(const FreeOperation& t, const Behavior& b_ref) {
  if (!b_ref.fits(t.source) || !b_ref.fits(t.target)) return false;
  return apply_freeop_unchecked(t, b_ref) == b_ref;
}

std::uint64_t digest(const FreeOperation& t) {
  std::ostringstream text;
  auto dump = [&](const RationalMatrix& m) {
    text << m.rows() << 'x' << m.cols() << ':';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (const auto& v : m.row(r)) text << v << ',';
    }
    text << ';';
  };
  text << fingerprint(t.source) << '>' << fingerprint(t.target) << '|';
  dump(t.q_prep);
  dump(t.q_meas);
  for (const auto& per_target : t.q_out) {
    for (const auto& m : per_target) dump(m);
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {

std::vector<Rational> random_distribution(std::mt19937_64& rng, std::size_t n, bool sparse) {
  std::vector<Rational> p(n);
  if (sparse && rng() % 2 == 0) {
    p[rng() % n] = 1;
    return p;
  }
  std::vector<long> w(n, 0);
  long total = 0;
  if (sparse) {
    const std::size_t support = std::min<std::size_t>(n, 2);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t t = 0; t < support; ++t) {
      std::swap(idx[t], idx[t + rng() % (n - t)]);
      w[idx[t]] = 1 + static_cast<long>(rng() % 4);
    }
  } else {
    for (auto& x : w) x = static_cast<long>(rng() % 5);
  }
  for (long x : w) total += x;
  if (total == 0) {
    w[rng() % n] = 1;
    total = 1;
  }
  for (std::size_t t = 0; t < n; ++t) {
    p[t] = Rational(w[t], total);
    p[t].canonicalize();
  }
  return p;
}

RationalMatrix random_balanced_map(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  // Mixture of north-west-corner vertices of the transportation polytope with
  // column sums 1 and row sums cols/rows, under random row/column orders.
  RationalMatrix out(rows, cols);
  const std::size_t pieces = 1 + rng() % 3;
  std::vector<long> weights(pieces);
  long total = 0;
  for (auto& w : weights) total += (w = 1 + static_cast<long>(rng() % 3));
  const Rational demand(static_cast<long>(cols), static_cast<long>(rows));
  for (std::size_t piece = 0; piece < pieces; ++piece) {
    std::vector<std::size_t> ro(rows), co(cols);
    std::iota(ro.begin(), ro.end(), 0);
    std::iota(co.begin(), co.end(), 0);
    for (std::size_t t = rows; t > 1; --t) std::swap(ro[t - 1], ro[rng() % t]);
    for (std::size_t t = cols; t > 1; --t) std::swap(co[t - 1], co[rng() % t]);
    Rational dem = demand;
    dem.canonicalize();
    std::vector<Rational> row_left(rows, dem), col_left(cols, Rational(1));
    std::size_t r = 0, c = 0;
    Rational share(weights[piece], total);
    share.canonicalize();
    while (r < rows && c < cols) {
      const Rational amount = std::min(row_left[r], col_left[c]);
      out(ro[r], co[c]) += share * amount;
      row_left[r] -= amount;
      col_left[c] -= amount;
      if (sgn(row_left[r]) == 0) ++r;
      if (sgn(col_left[c]) == 0) ++c;
    }
  }
  return out;
}

}  // namespace detail

namespace {

std::vector<Rational> random_equivalence_side(std::mt19937_64& rng, std::size_t n) {
  return detail::random_distribution(rng, n, rng() % 3 != 0);
}

RationalMatrix random_stochastic(std::mt19937_64& rng, std::size_t rows, std::size_t cols, bool sparse) {
  RationalMatrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto p = detail::random_distribution(rng, rows, sparse);
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = p[r];
  }
  return m;
}

RationalMatrix random_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t t = n; t > 1; --t) std::swap(idx[t - 1], idx[rng() % t]);
  RationalMatrix m(n, n);
  for (std::size_t c = 0; c < n; ++c) m(idx[c], c) = 1;
  return m;
}

// Two disjoint halves, as in the parity-oblivious equivalence, when possible.
PrepEquivalence random_prep_equivalence(std::mt19937_64& rng, std::size_t n, bool halves) {
  PrepEquivalence eq;
  if (n >= 4 && (halves || rng() % 2 == 0)) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t t = n; t > 1; --t) std::swap(idx[t - 1], idx[rng() % t]);
    eq.alpha.assign(n, Rational(0));
    eq.beta.assign(n, Rational(0));
    eq.alpha[idx[0]] = eq.alpha[idx[1]] = Rational(1, 2);
    eq.beta[idx[2]] = eq.beta[idx[3]] = Rational(1, 2);
    return eq;
  }
  eq.alpha = random_equivalence_side(rng, n);
  eq.beta = random_equivalence_side(rng, n);
  return eq;
}

}  // namespace

FreeOperation sample_random_freeop(const FreeOpRequest& q) {
  if (q.source_preparations == 0 || q.source_measurements == 0 || q.source_outcomes == 0 ||
      q.target_preparations == 0 || q.target_measurements == 0 || q.target_outcomes == 0) {
    throw InvalidInput("random free operation: dimensions must be positive");
  }
  const bool fixed_target = q.target.has_value();
  if (fixed_target) {
    const auto report = validate_scenario(*q.target);
    if (!report.ok()) throw InvalidInput("random free operation: target scenario: " + report.summary());
    if (q.target->preparations != q.target_preparations || q.target->measurements != q.target_measurements ||
        q.target->outcomes != q.target_outcomes) {
      throw InvalidInput("random free operation: target scenario does not match the target dimensions");
    }
  }
  std::mt19937_64 rng(q.seed);
  for (std::size_t attempt = 0; attempt < q.max_attempts; ++attempt) {
    FreeOperation t;
    if (fixed_target) {
      t.target = *q.target;
    } else {
      t.target.preparations = q.target_preparations;
      t.target.measurements = q.target_measurements;
      t.target.outcomes = q.target_outcomes;
      for (std::size_t n = 0; n < q.prep_equivalences; ++n) {
        t.target.prep_equivalences.push_back(random_prep_equivalence(rng, q.target_preparations, q.halves_equivalences));
      }
      for (std::size_t n = 0; n < q.meas_equivalences; ++n) {
        const std::size_t events = q.target_measurements * q.target_outcomes;
        t.target.meas_equivalences.push_back({random_equivalence_side(rng, events), random_equivalence_side(rng, events)});
      }
      if (!validate_scenario(t.target).ok()) continue;
    }

    if (q.permutation_preprocessing && q.source_preparations == q.target_preparations) {
      t.q_prep = random_permutation(rng, q.source_preparations);
    } else {
      t.q_prep = random_stochastic(rng, q.source_preparations, q.target_preparations, q.sparse_preprocessing);
    }
    t.q_meas = random_stochastic(rng, q.source_measurements, q.target_measurements, q.sparse_preprocessing);
    const bool balanced = !t.target.meas_equivalences.empty() || rng() % 2 == 0;
    t.q_out.assign(q.target_measurements, std::vector<RationalMatrix>(q.source_measurements));
    const bool per_target_only = rng() % 2 == 0;
    for (std::size_t jt = 0; jt < q.target_measurements; ++jt) {
      for (std::size_t j = 0; j < q.source_measurements; ++j) {
        if (per_target_only && j > 0) {
          t.q_out[jt][j] = t.q_out[jt][0];
          continue;
        }
        t.q_out[jt][j] = balanced ? detail::random_balanced_map(rng, q.target_outcomes, q.source_outcomes)
                                  : random_stochastic(rng, q.target_outcomes, q.source_outcomes, false);
      }
    }

    LiftedEquivalences lifted;
    try {
      lifted = lift_equivalences(t.q_prep, t.q_meas, t.q_out, q.source_outcomes, t.target.prep_equivalences,
                                 t.target.meas_equivalences);
    } catch (const InvalidInput&) {
      continue;
    }
    t.source.preparations = q.source_preparations;
    t.source.measurements = q.source_measurements;
    t.source.outcomes = q.source_outcomes;
    t.source.prep_equivalences = std::move(lifted.prep);
    t.source.meas_equivalences = std::move(lifted.meas);
    if (!validate_scenario(t.source).ok()) continue;
    t.target = canonicalize(t.target);
    if (validate_freeop(t).ok()) return t;
  }
  throw ResourceError("random free operation: no valid draw within " + std::to_string(q.max_attempts) + " attempts");
}

FreeOperation sample_random_freeop(std::size_t target_preparations, std::size_t target_measurements,
                                   std::size_t target_outcomes, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  FreeOpRequest q;
  q.target_preparations = target_preparations;
  q.target_measurements = target_measurements;
  q.target_outcomes = target_outcomes;
  q.source_preparations = 2 + rng() % 3;
  q.source_measurements = 1 + rng() % 3;
  q.source_outcomes = 2 + rng() % 2;
  q.prep_equivalences = target_preparations >= 2 ? rng() % 3 : 0;
  q.meas_equivalences = target_measurements * target_outcomes >= 2 ? rng() % 2 : 0;
  q.seed = seed;
  return sample_random_freeop(q);
}

}  // namespace ctxlab
