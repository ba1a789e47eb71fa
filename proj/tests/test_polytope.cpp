#include <algorithm>
#include <random>

#include "ctxlab/errors.hpp"
#include "ctxlab/polytope.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ctxlab;
using test::plain;
using test::q;

namespace {

std::vector<Rational> ints(std::initializer_list<int> v) {
  std::vector<Rational> out;
  for (int x : v) out.emplace_back(x);
  return out;
}

// Independent count of deterministic assignments: every K^J outcome choice.
std::vector<AssignmentVertex> deterministic_assignments(std::size_t j, std::size_t k) {
  std::vector<AssignmentVertex> out;
  std::size_t total = 1;
  for (std::size_t n = 0; n < j; ++n) total *= k;
  for (std::size_t code = 0; code < total; ++code) {
    AssignmentVertex x(j * k);
    std::size_t c = code;
    for (std::size_t m = j; m-- > 0;) {
      x[m * k + c % k] = 1;
      c /= k;
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return compare_lex(a, b) < 0; });
  return out;
}

}  // namespace

TEST_CASE("single measurement gives the simplex vertices") {
  const VertexSet v = enumerate_vertices(plain(1, 1, 2));
  REQUIRE(v.size() == 2);
  CHECK(v[0] == ints({0, 1}));
  CHECK(v[1] == ints({1, 0}));
}

TEST_CASE("two binary measurements give four deterministic assignments") {
  const VertexSet v = enumerate_vertices(plain(1, 2, 2));
  CHECK(v.size() == 4);
  CHECK(v.vertices == deterministic_assignments(2, 2));
}

TEST_CASE("an event equivalence synchronizes the assignments") {
  Scenario s = plain(1, 2, 2);
  s.meas_equivalences.push_back(test::event_equivalence(s, 0, 0, 0, 1));
  const VertexSet v = enumerate_vertices(s);
  REQUIRE(v.size() == 2);
  CHECK(v[0] == ints({0, 1, 0, 1}));
  CHECK(v[1] == ints({1, 0, 1, 0}));
}

TEST_CASE("basis count bound") {
  CHECK(vertex_count_bound(plain(1, 2, 2)) == 6);
  CHECK(vertex_count_bound(plain(1, 1, 3)) == 3);
  Scenario s = plain(1, 3, 2);
  s.meas_equivalences.push_back(test::event_equivalence(s, 0, 0, 1, 2));
  CHECK(vertex_count_bound(s) == 15);
  CHECK(binomial(60, 30) == 118264581564861424ull);
  CHECK(binomial(70, 35) == UINT64_MAX);
  CHECK(binomial(200, 100) == UINT64_MAX);
  CHECK(binomial(5, 7) == 0);
}

TEST_CASE("vertex count is K^J without measurement equivalences") {
  for (std::size_t j = 1; j <= 6; ++j) {
    for (std::size_t k = 1; j * k <= 12; ++k) {
      const VertexSet v = enumerate_vertices(plain(1, j, k));
      CHECK_MESSAGE(v.vertices == deterministic_assignments(j, k), "J=" << j << " K=" << k);
    }
  }
}

TEST_CASE("enumeration does not depend on worker count or equivalence order") {
  Scenario s = plain(1, 3, 2);
  s.meas_equivalences.push_back(test::event_equivalence(s, 0, 0, 0, 1));
  MeasEquivalence mixed{std::vector<Rational>(6), std::vector<Rational>(6)};
  mixed.alpha[s.event(1, 1)] = 1;
  mixed.beta[s.event(0, 2)] = q("1/2");
  mixed.beta[s.event(1, 2)] = q("1/2");
  s.meas_equivalences.push_back(mixed);
  const VertexSet one = enumerate_vertices(s);
  for (unsigned w : {2u, 3u, 5u}) {
    EnumerationOptions opt;
    opt.workers = w;
    CHECK(enumerate_vertices(s, opt).vertices == one.vertices);
  }
  Scenario swapped = s;
  std::swap(swapped.meas_equivalences[0], swapped.meas_equivalences[1]);
  CHECK(enumerate_vertices(swapped).vertices == one.vertices);

  RationalMatrix a;
  std::vector<Rational> b;
  assignment_constraints(s, a, b);
  for (const auto& x : one.vertices) CHECK(is_polytope_vertex(a, b, x));
}

TEST_CASE("fractional vertices appear with mixing equivalences") {
  // [0|0] ~ 1/2 [0|1] + 1/2 [1|1] forces xi_{0|0} = 1/2.
  Scenario s = plain(1, 2, 2);
  MeasEquivalence e{std::vector<Rational>(4), std::vector<Rational>(4)};
  e.alpha[s.event(0, 0)] = 1;
  e.beta[s.event(0, 1)] = q("1/2");
  e.beta[s.event(1, 1)] = q("1/2");
  s.meas_equivalences.push_back(e);
  const VertexSet v = enumerate_vertices(s);
  REQUIRE(v.size() == 2);
  for (const auto& x : v.vertices) {
    CHECK(x[0] == q("1/2"));
    CHECK(x[1] == q("1/2"));
  }
}

TEST_CASE("budget and staleness errors") {
  EnumerationOptions tight;
  tight.basis_budget = 5;
  CHECK_THROWS_AS(enumerate_vertices(plain(1, 2, 2), tight), ResourceError);
  const VertexSet v = enumerate_vertices(plain(1, 2, 2));
  CHECK_NOTHROW(require_matching(plain(1, 2, 2), v));
  CHECK_THROWS_AS(require_matching(plain(3, 2, 2), v), StructuralError);
  CHECK_THROWS_AS(require_matching(plain(1, 2, 3), v), StructuralError);
}

TEST_CASE("generic polytope vertices") {
  // x + y + z = 1, x - y = 0
  RationalMatrix a(2, 3);
  a(0, 0) = a(0, 1) = a(0, 2) = 1;
  a(1, 0) = 1;
  a(1, 1) = -1;
  const auto v = enumerate_polytope_vertices(a, ints({1, 0}));
  REQUIRE(v.size() == 2);
  CHECK(v[0] == ints({0, 0, 1}));
  CHECK(v[1] == std::vector<Rational>{q("1/2"), q("1/2"), q("0")});
  CHECK(matrix_rank(a) == 2);
  CHECK_FALSE(is_polytope_vertex(a, ints({1, 0}), std::vector<Rational>{q("1/4"), q("1/4"), q("1/2")}));
}
