#include <random>

#include "ctxlab/errors.hpp"
#include "ctxlab/lp.hpp"
#include "doctest.h"

using namespace ctxlab;

namespace {

LinearRow<Rational> row(std::initializer_list<std::pair<std::size_t, Rational>> entries, Rational rhs) {
  LinearRow<Rational> r;
  for (const auto& [c, v] : entries) r.add(c, v);
  r.rhs = rhs;
  return r;
}

LinearProgram max_x_bounded() {
  LinearProgram lp;
  lp.add_variable();
  lp.sense = Sense::Maximize;
  lp.set_objective(0, 1);
  lp.inequalities.push_back(row({{0, 1}}, 1));
  return lp;
}

LinearProgram contradictory() {
  LinearProgram lp;
  lp.add_variable();
  lp.inequalities.push_back(row({{0, -1}}, -1));  // x >= 1
  lp.inequalities.push_back(row({{0, 1}}, 0));    // x <= 0
  return lp;
}

LinearProgram max_x_unbounded() {
  LinearProgram lp;
  lp.add_variable();
  lp.sense = Sense::Maximize;
  lp.set_objective(0, 1);
  return lp;
}

Rational frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Random LP with a known feasible point, bounded by a box.
LinearProgram random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m_eq, std::size_t m_ineq, bool free_vars) {
  LinearProgram lp;
  for (std::size_t j = 0; j < n; ++j) lp.add_variable(free_vars && rng() % 4 == 0);
  std::vector<Rational> x0(n);
  for (auto& v : x0) v = frac(static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 3));
  auto coeff = [&] { return frac(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 2)); };
  for (std::size_t r = 0; r < m_eq; ++r) {
    LinearRow<Rational> e;
    Rational rhs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      Rational a = coeff();
      if (sgn(a) == 0) continue;
      e.add(j, a);
      rhs += a * x0[j];
    }
    e.rhs = rhs;
    lp.equalities.push_back(e);
  }
  for (std::size_t r = 0; r < m_ineq; ++r) {
    LinearRow<Rational> g;
    Rational lhs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      Rational a = coeff();
      if (sgn(a) == 0) continue;
      g.add(j, a);
      lhs += a * x0[j];
    }
    g.rhs = lhs + Rational(static_cast<long>(rng() % 3));
    lp.inequalities.push_back(g);
  }
  for (std::size_t j = 0; j < n; ++j) {
    lp.inequalities.push_back(row({{j, 1}}, 10));
    lp.inequalities.push_back(row({{j, -1}}, 10));
  }
  lp.sense = rng() % 2 ? Sense::Maximize : Sense::Minimize;
  for (std::size_t j = 0; j < n; ++j) lp.set_objective(j, coeff());
  return lp;
}

}  // namespace

TEST_CASE("bounded maximization") {
  const auto lp = max_x_bounded();
  const auto out = solve_exact(lp);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(out.primal[0] == 1);
  CHECK(out.objective_value == 1);
  CHECK(verify_outcome(lp, out));

  const auto f = solve_float(lp);
  REQUIRE(f.status == LpStatus::Optimal);
  CHECK(f.objective_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible system yields a Farkas certificate") {
  const auto lp = contradictory();
  const auto out = solve_exact(lp);
  REQUIRE(out.status == LpStatus::Infeasible);
  CHECK(verify_farkas(lp, out.certificate));
  CHECK(solve_float(lp).status == LpStatus::Infeasible);

  // An equality-row variant.
  LinearProgram eq;
  eq.add_variables(2);
  eq.equalities.push_back(row({{0, 1}, {1, 1}}, 1));
  eq.equalities.push_back(row({{0, 1}, {1, 1}}, 2));
  const auto o2 = solve_exact(eq);
  REQUIRE(o2.status == LpStatus::Infeasible);
  CHECK(verify_outcome(eq, o2));
}

TEST_CASE("unbounded maximization returns the ray") {
  const auto lp = max_x_unbounded();
  const auto out = solve_exact(lp);
  REQUIRE(out.status == LpStatus::Unbounded);
  REQUIRE(out.certificate.size() == 1);
  CHECK(out.certificate[0] == 1);
  CHECK(verify_outcome(lp, out));
  const auto f = solve_float(lp);
  REQUIRE(f.status == LpStatus::Unbounded);
  CHECK(f.certificate[0] == doctest::Approx(1.0));
}

TEST_CASE("free variables and negative right-hand sides") {
  LinearProgram lp;
  lp.add_variable(true);
  lp.add_variable();
  lp.set_objective(0, 1);
  lp.set_objective(1, 2);
  lp.equalities.push_back(row({{0, 1}, {1, -1}}, -3));
  lp.inequalities.push_back(row({{1, 1}}, 5));
  const auto out = solve_exact(lp);
  REQUIRE(out.status == LpStatus::Optimal);
  CHECK(out.primal[0] == -3);
  CHECK(out.primal[1] == 0);
  CHECK(out.objective_value == -3);
  CHECK(verify_outcome(lp, out));
}

TEST_CASE("redundant equalities do not cycle") {
  LinearProgram lp;
  lp.add_variables(3);
  lp.sense = Sense::Maximize;
  lp.set_objective(0, 1);
  lp.set_objective(2, 1);
  lp.equalities.push_back(row({{0, 1}, {1, 1}, {2, 1}}, 1));
  lp.equalities.push_back(row({{0, 2}, {1, 2}, {2, 2}}, 2));
  lp.equalities.push_back(row({{0, 1}, {1, 1}, {2, 1}}, 1));
  for (auto rule : {PivotRule::Bland, PivotRule::DantzigBland}) {
    const auto out = solve_exact(lp, {rule});
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.objective_value == 1);
    CHECK(verify_outcome(lp, out));
  }
  const auto f = solve_float(lp);
  REQUIRE(f.status == LpStatus::Optimal);
  CHECK(f.objective_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("structural errors") {
  LinearProgram lp;
  lp.add_variable();
  lp.inequalities.push_back(row({{3, 1}}, 1));
  CHECK_THROWS_AS(solve_exact(lp), StructuralError);
  LinearProgram bad_obj;
  bad_obj.add_variables(2);
  bad_obj.objective = {1};
  CHECK_THROWS_AS(solve_exact(bad_obj), StructuralError);
}

TEST_CASE("random programs: exact certificates and float agreement") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng() % 6;
    const auto lp = random_lp(rng, n, rng() % 3, rng() % 4, t % 2 == 0);
    const auto bland = solve_exact(lp);
    const auto dantzig = solve_exact(lp, {PivotRule::DantzigBland});
    REQUIRE(bland.status == LpStatus::Optimal);
    REQUIRE(dantzig.status == LpStatus::Optimal);
    CHECK(verify_outcome(lp, bland));
    CHECK(verify_outcome(lp, dantzig));
    CHECK(bland.objective_value == dantzig.objective_value);
    const auto f = solve_float(lp);
    REQUIRE(f.status == LpStatus::Optimal);
    CHECK(std::fabs(f.objective_value - bland.objective_value.get_d()) <= 1e-9);
    CHECK(max_violation(to_float(lp), f.primal) <= 1e-9);
  }
}

TEST_CASE("random infeasible programs") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 30; ++t) {
    auto lp = random_lp(rng, 3 + rng() % 3, 1, 2, false);
    // Contradict the first inequality row: a.x <= h and -a.x <= -h - 1.
    auto neg = lp.inequalities.front();
    for (auto& v : neg.vals) v = -v;
    neg.rhs = -neg.rhs - 1;
    lp.inequalities.push_back(neg);
    const auto out = solve_exact(lp);
    REQUIRE(out.status == LpStatus::Infeasible);
    CHECK(verify_farkas(lp, out.certificate));
    CHECK(solve_float(lp).status == LpStatus::Infeasible);
  }
}

TEST_CASE("float-guided start matches the cold exact solve") {
  std::mt19937_64 rng(23);
  ExactOptions cold;
  cold.float_warm_start = false;
  for (int t = 0; t < 8; ++t) {
    // The box rows alone put these over the warm-start threshold.
    const auto lp = random_lp(rng, 32 + rng() % 8, 2 + rng() % 3, 4 + rng() % 4, t % 2 == 0);
    REQUIRE(lp.rows() >= ExactOptions{}.warm_start_min_rows);
    const auto warm = solve_exact(lp);
    const auto slow = solve_exact(lp, cold);
    REQUIRE(warm.status == LpStatus::Optimal);
    REQUIRE(slow.status == LpStatus::Optimal);
    CHECK(verify_outcome(lp, warm));
    CHECK(warm.objective_value == slow.objective_value);
  }
}

TEST_CASE("degenerate assignment programs") {
  // n x n assignment polytope: every vertex is heavily degenerate.
  std::mt19937_64 rng(29);
  for (const std::size_t n : {4, 6, 8}) {
    LinearProgram lp;
    lp.add_variables(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      LinearRow<Rational> r, c;
      for (std::size_t b = 0; b < n; ++b) {
        r.add(a * n + b, 1);
        c.add(b * n + a, 1);
      }
      r.rhs = c.rhs = 1;
      lp.equalities.push_back(r);
      lp.equalities.push_back(c);
    }
    for (std::size_t v = 0; v < n * n; ++v) lp.set_objective(v, static_cast<long>(rng() % 5));
    ExactOptions forced;
    forced.warm_start_min_rows = 0;
    ExactOptions cold;
    cold.float_warm_start = false;
    const auto a = solve_exact(lp, forced);
    const auto b = solve_exact(lp, cold);
    REQUIRE(a.status == LpStatus::Optimal);
    CHECK(verify_outcome(lp, a));
    CHECK(a.objective_value == b.objective_value);
    const auto f = solve_float(lp);
    REQUIRE(f.status == LpStatus::Optimal);
    CHECK(std::fabs(f.objective_value - b.objective_value.get_d()) <= 1e-9);
  }
}
