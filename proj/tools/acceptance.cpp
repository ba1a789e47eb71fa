// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria (capped at 125).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxlab/errors.hpp"
#include "ctxlab/freeops.hpp"
#include "ctxlab/generators.hpp"
#include "ctxlab/lp.hpp"
#include "ctxlab/oracle.hpp"
#include "ctxlab/quantifiers.hpp"

using namespace ctxlab;

namespace {

bool verbose = false;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

Rational frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational random_weight(std::mt19937_64& rng) { return frac(static_cast<long>(rng() % 16) + 1, 17); }

// Runs of the relative-entropy solver are collected here so criterion 10 can
// look at every trace produced during the session.
struct KlLog {
  std::size_t runs = 0, non_monotone = 0;
  void note(const QuantifierReport& r) {
    ++runs;
    for (std::size_t n = 1; n < r.upper_trace.size(); ++n) {
      if (r.upper_trace[n] > r.upper_trace[n - 1]) {
        ++non_monotone;
        return;
      }
    }
  }
} kl_log;

QuantifierReport kl(const Scenario& s, const Behavior& b, const VertexSet& v, const KlOptions& o = {}) {
  auto r = kl_contextuality(s, b, v, o);
  kl_log.note(r);
  return r;
}

// ½P_a + ½P_b ~ ½P_c + ½P_d over four preparations, pairing drawn from rng.
Scenario four_prep_scenario(std::size_t measurements, std::mt19937_64& rng) {
  Scenario s;
  s.preparations = 4;
  s.measurements = measurements;
  s.outcomes = 2;
  std::vector<std::size_t> p{0, 1, 2, 3};
  std::shuffle(p.begin(), p.end(), rng);
  std::vector<Rational> a(4), b(4);
  a[p[0]] = a[p[1]] = b[p[2]] = b[p[3]] = frac(1, 2);
  s.prep_equivalences.push_back({a, b});
  return s;
}

// A preferably contextual valid behavior: the first contextual behavior-polytope
// vertex among a few draws, mixed with a noncontextual point.
Behavior contextual_leaning(const Scenario& s, const VertexSet& v, std::mt19937_64& rng) {
  Behavior pick = random_behavior_vertex(s, rng);
  for (int t = 1; t < 8 && check_membership(s, pick, v).noncontextual; ++t) pick = random_behavior_vertex(s, rng);
  const Behavior nc = random_nc_behavior(s, v, rng);
  return mix(frac(static_cast<long>(rng() % 4), 4), nc, pick);
}

FreeOperation closure_op(std::uint64_t n, std::mt19937_64& rng) {
  FreeOpRequest r;
  r.seed = n + 1;
  r.source_preparations = 2 + rng() % 3;
  r.source_measurements = 1 + rng() % 3;
  r.source_outcomes = 2 + rng() % 2;
  r.target_preparations = 2 + rng() % 3;
  r.target_measurements = 1 + rng() % 3;
  r.target_outcomes = 2 + rng() % 2;
  r.prep_equivalences = rng() % 3;
  r.meas_equivalences = rng() % 2;
  return sample_random_freeop(r);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  std::size_t nc = 0, total = 0;
  for (std::uint64_t n = 0; n < 200; ++n) {
    std::mt19937_64 rng(1000 + n);
    const FreeOperation t = closure_op(n, rng);
    const VertexSet vs = enumerate_vertices(t.source);
    const Behavior b = random_nc_behavior(t.source, vs, rng);
    const Behavior tb = apply_freeop(t, b);
    nc += check_membership(t.target, tb, enumerate_vertices(t.target)).noncontextual;
    ++total;
  }
  return {nc == total, std::to_string(nc) + "/" + std::to_string(total) + " images noncontextual"};
}

Outcome criterion2() {
  std::size_t violations[4] = {0, 0, 0, 0}, contextual = 0;
  double kl_worst = -1;
  for (std::uint64_t n = 0; n < 100; ++n) {
    std::mt19937_64 rng(5000 + n);
    FreeOpRequest r;
    r.seed = 7000 + n;
    const bool perm = n % 2 == 0;
    r.source_preparations = 4;
    r.source_measurements = 2 + rng() % 2;
    r.source_outcomes = 2;
    r.target_preparations = perm ? 4 : 2 + rng() % 3;
    r.target_measurements = 1 + rng() % 3;
    r.target_outcomes = 2 + rng() % 2;
    r.prep_equivalences = r.target_preparations < 4 ? 1 : 1 + rng() % 2;
    r.meas_equivalences = 0;
    r.permutation_preprocessing = perm;
    r.halves_equivalences = perm;
    const FreeOperation t = sample_random_freeop(r);
    const VertexSet vs = enumerate_vertices(t.source), vt = enumerate_vertices(t.target);
    const Behavior b = contextual_leaning(t.source, vs, rng);
    const Behavior tb = apply_freeop(t, b);
    int m = 0;
    for (const Measure q : {Measure::ContextualFraction, Measure::Robustness, Measure::L1Distance}) {
      const Rational before = quantify(q, t.source, b, vs).value;
      violations[m++] += quantify(q, t.target, tb, vt).value > before;
      if (q == Measure::ContextualFraction) contextual += sgn(before) > 0;
    }
    if (n < 50) {
      const double d = kl(t.target, tb, vt).value_float - kl(t.source, b, vs).value_float;
      kl_worst = std::max(kl_worst, d);
      violations[3] += d > 1e-4;
    }
  }
  std::ostringstream o;
  o << "violations cf/rob/l1 " << violations[0] << "/" << violations[1] << "/" << violations[2] << " of 100, kl "
    << violations[3] << " of 50 (worst increase " << kl_worst << "), " << contextual << " contextual sources";
  return {violations[0] + violations[1] + violations[2] + violations[3] == 0, o.str()};
}

Outcome criterion3() {
  std::size_t violations = 0, contextual = 0, unconverged = 0;
  double kl_worst = -1;
  std::vector<std::string> failures;
  for (std::uint64_t n = 0; n < 50; ++n) {
    std::mt19937_64 rng(9000 + n);
    Scenario s1, s2;
    Behavior b1, b2;
    if (n % 5 == 4) {
      // Two small factors; both noncontextual whatever the behavior.
      for (Scenario* s : {&s1, &s2}) {
        s->preparations = 2 + rng() % 2;
        s->measurements = 1 + rng() % 2;
        s->outcomes = 2;
        if (s->preparations == 3) s->prep_equivalences.push_back({{frac(1, 2), frac(1, 2), 0}, {0, 0, 1}});
      }
      b1 = random_valid_behavior(s1, enumerate_vertices(s1), rng);
      b2 = random_valid_behavior(s2, enumerate_vertices(s2), rng);
    } else {
      // Contextual-capable factor against a single-measurement factor.
      s1 = four_prep_scenario(2, rng);
      b1 = n % 10 == 0 ? pom_behavior(20) : contextual_leaning(s1, enumerate_vertices(s1), rng);
      if (n % 10 == 0) s1 = pom_scenario();
      s2.preparations = 2 + rng() % 2;
      s2.measurements = 1;
      s2.outcomes = 2 + rng() % 2;
      if (s2.preparations == 3) {
        s2.prep_equivalences.push_back({{frac(1, 2), frac(1, 2), 0}, {0, 0, 1}});
      } else {
        s2.prep_equivalences.push_back({{1, 0}, {0, 1}});
      }
      b2 = random_valid_behavior(s2, enumerate_vertices(s2), rng);
      if (n % 2 == 1) {
        std::swap(s1, s2);
        std::swap(b1, b2);
      }
    }
    const VertexSet v1 = enumerate_vertices(s1), v2 = enumerate_vertices(s2);
    const auto [ps, pb] = juxtapose(s1, b1, s2, b2);
    const VertexSet vp = enumerate_vertices(ps);
    for (const Measure q :
         {Measure::ContextualFraction, Measure::Robustness, Measure::L1Distance, Measure::UniformL1}) {
      const auto t0 = std::chrono::steady_clock::now();
      const Rational x = quantify(q, s1, b1, v1).value, y = quantify(q, s2, b2, v2).value;
      const Rational z = quantify(q, ps, pb, vp).value;
      if (verbose) {
        std::fprintf(stderr, "  pair %2llu %zux%zux%zu %s %.2fs\n", static_cast<unsigned long long>(n),
                     ps.preparations, ps.measurements, ps.outcomes, to_string(q).c_str(), seconds_since(t0));
      }
      const bool multiplicative = q == Measure::ContextualFraction || q == Measure::Robustness;
      const Rational bound = multiplicative ? Rational(x + y - x * y) : Rational(x + y);
      if (z > bound) {
        ++violations;
        failures.push_back(to_string(q) + "@" + std::to_string(n));
      }
      if (q == Measure::ContextualFraction) contextual += sgn(z) > 0;
    }
    // An unconverged run still returns an upper bound, which only makes the
    // comparison stricter.
    const auto kp = kl(ps, pb, vp);
    unconverged += !kp.converged;
    const double d = kp.value_float - kl(s1, b1, v1).value_float - kl(s2, b2, v2).value_float;
    kl_worst = std::max(kl_worst, d);
    if (d > 1e-4) {
      ++violations;
      failures.push_back("kl@" + std::to_string(n));
    }
  }
  // Both factors contextual: POM with itself, contextual fraction only (the
  // other programs on this product take tens of minutes).
  const Scenario pom = pom_scenario();
  const Behavior bpom = pom_behavior(20);
  const auto [pp, bpp] = juxtapose(pom, bpom, pom, bpom);
  const Rational c = contextual_fraction(pom, bpom, enumerate_vertices(pom)).value;
  const Rational cc = contextual_fraction(pp, bpp, enumerate_vertices(pp)).value;
  if (cc > c + c - c * c) {
    ++violations;
    failures.push_back("cf@pom-pom");
  }

  std::ostringstream o;
  o << "POM x POM cf " << cc.get_d() << " vs bound " << Rational(c + c - c * c).get_d() << "; ";
  o << violations << " violations over 50 pairs (" << contextual << " contextual products, worst kl excess "
    << kl_worst << ", " << unconverged << " product kl runs unconverged)";
  for (const auto& f : failures) o << " " << f;
  return {violations == 0, o.str()};
}

Outcome criterion4() {
  std::size_t disagreements = 0, contextual = 0;
  for (std::uint64_t n = 0; n < 100; ++n) {
    std::mt19937_64 rng(11000 + n);
    // The hull is only enumerable for two measurements.
    const std::size_t measurements = n < 50 ? 2 : 2 + n % 2;
    const Scenario s = n % 3 == 0 ? pom_scenario() : four_prep_scenario(measurements, rng);
    const VertexSet v = enumerate_vertices(s);
    Behavior b;
    if (n < 50) {
      const NCBehaviorHull h = enumerate_nc_hull(s, v);
      b = h.extreme_behaviors[rng() % h.extreme_behaviors.size()];
      for (int t = 0; t < 3; ++t) {
        b = mix(random_weight(rng), b, h.extreme_behaviors[rng() % h.extreme_behaviors.size()]);
      }
    } else {
      b = n % 2 == 0 ? contextual_leaning(s, v, rng) : random_valid_behavior(s, v, rng);
    }
    const bool member = check_membership(s, b, v).noncontextual;
    const bool cf_zero = sgn(contextual_fraction(s, b, v).value) == 0;
    const bool l1_zero = sgn(l1_contextuality_distance(s, b, v).value) == 0;
    // Hull mixtures must land inside, whatever the other checks say.
    disagreements += member != cf_zero || member != l1_zero || (n < 50 && !member);
    contextual += !member;
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements over 100 behaviors (" +
                                  std::to_string(contextual) + " contextual among the arbitrary 50)"};
}

std::vector<Scenario> small_family() {
  std::vector<Scenario> out;
  for (std::size_t i = 1; i <= 3; ++i) {
    for (std::size_t j = 1; j <= 2; ++j) {
      std::vector<std::vector<PrepEquivalence>> preps{{}};
      if (i == 2) preps.push_back({{{1, 0}, {0, 1}}});
      if (i == 3) {
        preps.push_back({{{1, 0, 0}, {0, 1, 0}}});
        preps.push_back({{{frac(1, 2), frac(1, 2), 0}, {0, 0, 1}}});
      }
      // Measurement events indexed j*2 + k.
      std::vector<std::vector<MeasEquivalence>> meas{{}};
      const auto event = [&](std::size_t k, std::size_t jj) {
        std::vector<Rational> e(j * 2);
        e[jj * 2 + k] = 1;
        return e;
      };
      meas.push_back({{event(0, 0), event(1, 0)}});
      if (j == 2) {
        meas.push_back({{event(0, 0), event(0, 1)}});
        meas.push_back({{event(0, 0), event(1, 1)}});
      }
      for (const auto& p : preps) {
        for (const auto& m : meas) {
          Scenario s;
          s.preparations = i;
          s.measurements = j;
          s.outcomes = 2;
          s.prep_equivalences = p;
          s.meas_equivalences = m;
          out.push_back(s);
        }
      }
    }
  }
  return out;
}

Outcome criterion5() {
  const auto family = small_family();
  std::size_t membership_mismatch = 0, robustness_mismatch = 0, behaviors = 0, nonmembers = 0;
  const Rational eps = frac(1, 1000000000);
  const Rational tol = frac(1, 1000000000);
  for (std::size_t f = 0; f < family.size(); ++f) {
    const Scenario& s = family[f];
    const VertexSet v = enumerate_vertices(s);
    const NCBehaviorHull h = enumerate_nc_hull(s, v);
    std::mt19937_64 rng(13000 + f);
    for (int n = 0; n < 100; ++n, ++behaviors) {
      Behavior b;
      const bool valid = n % 2 == 0;
      if (valid) {
        b = n % 4 == 0 ? random_behavior_vertex(s, rng) : random_valid_behavior(s, v, rng);
      } else {
        // Arbitrary row-stochastic table, usually outside the scenario.
        b = Behavior(s.preparations, s.measurements, s.outcomes);
        for (std::size_t i = 0; i < s.preparations; ++i)
          for (std::size_t jj = 0; jj < s.measurements; ++jj) {
            const Rational p0 = frac(static_cast<long>(rng() % 9), 8);
            b(i, jj, 0) = p0;
            b(i, jj, 1) = 1 - p0;
          }
      }
      const bool member = check_membership(s, b, v).noncontextual;
      membership_mismatch += member != oracle_membership(h, b);
      nonmembers += !member;
      if (validate_behavior(s, b).ok()) {
        const Rational lp = robustness(s, b, v).value;
        const Rational oracle = oracle_robustness(h, b, eps);
        Rational diff = oracle - lp;
        if (sgn(diff) < 0) diff = -diff;
        robustness_mismatch += diff > tol;
      }
    }
  }
  std::ostringstream o;
  o << family.size() << " scenarios, " << behaviors << " behaviors (" << nonmembers
    << " outside NC): membership mismatches " << membership_mismatch << ", robustness mismatches "
    << robustness_mismatch;
  return {membership_mismatch == 0 && robustness_mismatch == 0, o.str()};
}

Outcome criterion6() {
  const Scenario s = pom_scenario();
  const Behavior b = pom_behavior(200);
  const VertexSet v = enumerate_vertices(s);
  const bool contextual = !check_membership(s, b, v).noncontextual;
  const auto cf = contextual_fraction(s, b, v);
  const NCBehaviorHull h = enumerate_nc_hull(s, v);
  const Rational oracle = oracle_contextual_fraction(h, b);
  Rational diff = oracle - cf.value;
  if (sgn(diff) < 0) diff = -diff;
  // Regression fixture, recorded at first computation.
  const double fixture = 0.41421356237309503;
  const bool pinned = std::fabs(cf.value_float - fixture) <= 1e-12;
  std::ostringstream o;
  o.precision(17);
  o << "contextual=" << contextual << " cf=" << cf.value_float << " oracle diff=" << diff.get_d()
    << " hull=" << h.extreme_behaviors.size() << " fixture " << (pinned ? "ok" : "MISMATCH");
  return {contextual && diff <= frac(1, 1000000000) && pinned, o.str()};
}

Outcome criterion7() {
  std::size_t linear_bad = 0, compose_bad = 0;
  for (std::uint64_t n = 0; n < 50; ++n) {
    std::mt19937_64 rng(15000 + n);
    const FreeOperation t = closure_op(15000 + n, rng);
    const VertexSet v = enumerate_vertices(t.source);
    const Behavior b = random_valid_behavior(t.source, v, rng);
    const Behavior b2 = random_valid_behavior(t.source, v, rng);
    const Rational pi = random_weight(rng);
    linear_bad += apply_freeop(t, mix(pi, b, b2)) != mix(pi, apply_freeop(t, b), apply_freeop(t, b2));
  }
  for (std::uint64_t n = 0; n < 20; ++n) {
    std::mt19937_64 rng(17000 + n);
    const FreeOperation t2 = closure_op(17000 + n, rng);
    FreeOpRequest r1;
    r1.seed = 18000 + n;
    r1.source_preparations = 2 + rng() % 3;
    r1.source_measurements = 1 + rng() % 3;
    r1.source_outcomes = 2 + rng() % 2;
    r1.target_preparations = t2.source.preparations;
    r1.target_measurements = t2.source.measurements;
    r1.target_outcomes = t2.source.outcomes;
    r1.target = t2.source;
    const FreeOperation t1 = sample_random_freeop(r1);
    const Behavior b = random_valid_behavior(t1.source, enumerate_vertices(t1.source), rng);
    compose_bad += apply_freeop(compose_freeops(t2, t1), b) != apply_freeop(t2, apply_freeop(t1, b));
  }
  return {linear_bad + compose_bad == 0, "linearity failures " + std::to_string(linear_bad) +
                                             "/50, composition failures " + std::to_string(compose_bad) + "/20"};
}

Outcome criterion8() {
  std::size_t mismatches = 0, cases = 0;
  for (std::size_t j = 1; j <= 12; ++j) {
    for (std::size_t k = 1; j * k <= 12; ++k) {
      Scenario s;
      s.measurements = j;
      s.outcomes = k;
      std::uint64_t expected = 1;
      for (std::size_t t = 0; t < j; ++t) expected *= k;
      const VertexSet first = enumerate_vertices(s);
      bool ok = first.size() == expected;
      for (const unsigned workers : {1u, 2u, 4u}) {
        EnumerationOptions opt;
        opt.workers = workers;
        const VertexSet again = enumerate_vertices(s, opt);
        ok = ok && again.vertices == first.vertices;
      }
      mismatches += !ok;
      ++cases;
    }
  }
  return {mismatches == 0, std::to_string(cases - mismatches) + "/" + std::to_string(cases) +
                               " (J,K) pairs with K^J vertices and identical output across runs"};
}

// ---------------------------------------------------------------------------
// Hand-checkable programs.

struct HandLp {
  const char* name;
  LinearProgram lp;
  LpStatus status;
  Rational value;  // optimal programs only
};

LinearRow<Rational> row(std::initializer_list<std::pair<std::size_t, Rational>> entries, Rational rhs) {
  LinearRow<Rational> r;
  for (const auto& [c, v] : entries) r.add(c, v);
  r.rhs = std::move(rhs);
  return r;
}

LinearProgram program(std::size_t n, Sense sense, std::vector<Rational> c, std::vector<LinearRow<Rational>> eq,
                      std::vector<LinearRow<Rational>> le, std::vector<std::size_t> free = {}) {
  LinearProgram lp;
  lp.add_variables(n);
  lp.sense = sense;
  if (!c.empty()) lp.objective = std::move(c);
  lp.equalities = std::move(eq);
  lp.inequalities = std::move(le);
  for (const std::size_t f : free) lp.free_var[f] = true;
  return lp;
}

std::vector<HandLp> battery() {
  const auto Max = Sense::Maximize, Min = Sense::Minimize;
  const auto Opt = LpStatus::Optimal, Inf = LpStatus::Infeasible, Unb = LpStatus::Unbounded;
  std::vector<HandLp> b;
  b.push_back({"max x, x <= 3", program(1, Max, {1}, {}, {row({{0, 1}}, 3)}), Opt, 3});
  b.push_back({"min x+y, x+y >= 2", program(2, Min, {1, 1}, {}, {row({{0, -1}, {1, -1}}, -2)}), Opt, 2});
  b.push_back({"textbook 2d",
               program(2, Max, {3, 2}, {},
                       {row({{0, 1}, {1, 1}}, 4), row({{0, 1}, {1, 3}}, 6), row({{0, 1}}, 3)}),
               Opt, 11});
  b.push_back({"x <= -1 with x >= 0", program(1, Min, {}, {}, {row({{0, 1}}, -1)}), Inf, 0});
  b.push_back({"x+y = 1 and x+y = 2", program(2, Min, {}, {row({{0, 1}, {1, 1}}, 1), row({{0, 1}, {1, 1}}, 2)}, {}),
               Inf, 0});
  b.push_back({"max x, x - y <= 1", program(2, Max, {1, 0}, {}, {row({{0, 1}, {1, -1}}, 1)}), Unb, 0});
  b.push_back({"min -x, y <= 1", program(2, Min, {-1, 0}, {}, {row({{1, 1}}, 1)}), Unb, 0});
  b.push_back({"degenerate square",
               program(2, Max, {1, 1}, {},
                       {row({{0, 1}}, 1), row({{1, 1}}, 1), row({{0, 1}, {1, 1}}, 2)}),
               Opt, 2});
  b.push_back({"Beale cycling example",
               program(4, Min, {frac(-3, 4), 150, frac(-1, 50), 6}, {},
                       {row({{0, frac(1, 4)}, {1, -60}, {2, frac(-1, 25)}, {3, 9}}, 0),
                        row({{0, frac(1, 2)}, {1, -90}, {2, frac(-1, 50)}, {3, 3}}, 0), row({{2, 1}}, 1)}),
               Opt, frac(-1, 20)});
  b.push_back({"free x >= -5", program(1, Min, {1}, {}, {row({{0, -1}}, 5)}, {0}), Opt, -5});
  b.push_back({"simplex face", program(3, Min, {1, 2, 3}, {row({{0, 1}, {1, 1}, {2, 1}}, 1)}, {}), Opt, 1});
  b.push_back({"transportation 2x2",
               program(4, Min, {2, 3, 1, 4},
                       {row({{0, 1}, {1, 1}}, 5), row({{2, 1}, {3, 1}}, 5), row({{0, 1}, {2, 1}}, 6),
                        row({{1, 1}, {3, 1}}, 4)},
                       {}),
               Opt, 19});
  b.push_back({"free x, x >= 1 and x <= 0",
               program(1, Min, {}, {}, {row({{0, -1}}, -1), row({{0, 1}}, 0)}, {0}), Inf, 0});
  b.push_back({"redundant equalities",
               program(2, Max, {1, 0}, {row({{0, 1}, {1, 1}}, 2), row({{0, 2}, {1, 2}}, 4)}, {}), Opt, 2});
  b.push_back({"rational vertex",
               program(2, Max, {1, 1}, {}, {row({{0, 3}, {1, 1}}, 2), row({{0, 1}, {1, 3}}, 2)}), Opt, 1});
  b.push_back({"zero objective", program(2, Min, {}, {row({{0, 1}, {1, 1}}, 1)}, {}), Opt, 0});
  b.push_back({"free x below 3", program(1, Min, {1}, {}, {row({{0, 1}}, 3)}, {0}), Unb, 0});
  b.push_back({"Klee-Minty cube",
               program(3, Max, {4, 2, 1}, {},
                       {row({{0, 1}}, 5), row({{0, 4}, {1, 1}}, 25), row({{0, 8}, {1, 4}, {2, 1}}, 125)}),
               Opt, 125});
  b.push_back({"x+y <= 1 and x+y >= 3",
               program(2, Min, {}, {}, {row({{0, 1}, {1, 1}}, 1), row({{0, -1}, {1, -1}}, -3)}), Inf, 0});
  b.push_back({"negative equality rhs", program(2, Min, {1, 1}, {row({{0, 1}, {1, -1}}, -2)}, {}), Opt, 2});
  return b;
}

Outcome criterion9() {
  const auto lps = battery();
  std::vector<std::string> bad;
  for (const auto& h : lps) {
    const LpOutcome exact = solve_exact(h.lp);
    bool ok = exact.status == h.status && verify_outcome(h.lp, exact);
    if (ok && h.status == LpStatus::Optimal) ok = exact.objective_value == h.value;
    const FloatLpOutcome approx = solve_float(h.lp);
    ok = ok && approx.status == h.status;
    if (ok && h.status == LpStatus::Optimal) ok = std::fabs(approx.objective_value - h.value.get_d()) <= 1e-9;
    if (!ok) bad.push_back(h.name);
  }
  std::string detail = std::to_string(lps.size() - bad.size()) + "/" + std::to_string(lps.size()) +
                       " programs solved with verified certificates and float agreement";
  for (const auto& n : bad) detail += "; failed: " + n;
  return {bad.empty() && lps.size() == 20, detail};
}

Outcome criterion10() {
  double worst = 0;
  std::size_t over = 0;
  for (std::uint64_t n = 0; n < 20; ++n) {
    std::mt19937_64 rng(19000 + n);
    const Scenario s = n % 4 == 0 ? pom_scenario() : four_prep_scenario(2 + n % 2, rng);
    const VertexSet v = enumerate_vertices(s);
    const double value = kl(s, random_nc_behavior(s, v, rng), v).value_float;
    worst = std::max(worst, value);
    over += value > 1e-5;
  }
  // A few contextual runs too, so the trace check is not only over flat runs.
  for (std::uint64_t n = 0; n < 5; ++n) {
    std::mt19937_64 rng(19500 + n);
    const Scenario s = four_prep_scenario(2, rng);
    const VertexSet v = enumerate_vertices(s);
    kl(s, contextual_leaning(s, v, rng), v);
  }
  std::ostringstream o;
  o << over << "/20 above 1e-5 (largest " << worst << "); " << kl_log.non_monotone << " of " << kl_log.runs
    << " logged runs with an increasing upper bound";
  return {over == 0 && kl_log.non_monotone == 0, o.str()};
}

// Not a criterion: both factors contextual, float arithmetic only.
void full_product_check() {
  const Scenario s = pom_scenario();
  const Behavior b = pom_behavior(20);
  const VertexSet vs = enumerate_vertices(s);
  const auto [ps, pb] = juxtapose(s, b, s, b);
  const VertexSet v = enumerate_vertices(ps);
  for (const Measure q : {Measure::Robustness, Measure::L1Distance, Measure::UniformL1}) {
    const auto t0 = std::chrono::steady_clock::now();
    const double x = quantify(q, s, b, vs).value_float;
    const double z = quantify(q, ps, pb, v, {Arithmetic::Float}).value_float;
    const double bound = q == Measure::Robustness ? 2 * x - x * x : 2 * x;
    std::printf("info: POM x POM %s %.9f, bound %.9f [%.1fs]\n", to_string(q).c_str(), z, bound, seconds_since(t0));
    std::fflush(stdout);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  bool full = false;
  app.add_option("--only", only, "Run just these criteria")->check(CLI::Range(1, 10));
  app.add_flag("--full", full, "Also run the slow float-mode measures on the product of two POM behaviors");
  app.add_flag("--verbose,-v", verbose, "Per-item timings on stderr");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10};
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(c + 1)) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (c == 0 && secs >= 300) {
      o.pass = false;
      o.detail += " (over the 5 minute limit)";
    }
    std::printf("criterion %2zu: %s  %s [%.1fs]\n", c + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  if (full) full_product_check();
  return std::min(failed, 125);
}
