#include <algorithm>
#include <numeric>
#include <random>

#include "ctxlab/errors.hpp"
#include "ctxlab/generators.hpp"
#include "ctxlab/membership.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ctxlab;
using test::plain;
using test::q;

namespace {

// Relabels preparations by `perm` (new i = perm[old i]) together with the
// equivalence coefficients.
std::pair<Scenario, Behavior> relabel_preparations(const Scenario& s, const Behavior& b,
                                                   const std::vector<std::size_t>& perm) {
  Scenario t = s;
  Behavior c(s.preparations, s.measurements, s.outcomes);
  for (std::size_t i = 0; i < s.preparations; ++i)
    for (std::size_t j = 0; j < s.measurements; ++j)
      for (std::size_t k = 0; k < s.outcomes; ++k) c(perm[i], j, k) = b(i, j, k);
  for (std::size_t n = 0; n < s.prep_equivalences.size(); ++n) {
    for (std::size_t i = 0; i < s.preparations; ++i) {
      t.prep_equivalences[n].alpha[perm[i]] = s.prep_equivalences[n].alpha[i];
      t.prep_equivalences[n].beta[perm[i]] = s.prep_equivalences[n].beta[i];
    }
  }
  return {t, c};
}

// Swaps outcome labels 0 and 1 of measurement `j`, with the measurement
// equivalence coefficients.
std::pair<Scenario, Behavior> swap_outcomes(const Scenario& s, const Behavior& b, std::size_t j) {
  Scenario t = s;
  Behavior c = b;
  for (std::size_t i = 0; i < s.preparations; ++i) std::swap(c(i, j, 0), c(i, j, 1));
  for (auto& e : t.meas_equivalences) {
    std::swap(e.alpha[s.event(0, j)], e.alpha[s.event(1, j)]);
    std::swap(e.beta[s.event(0, j)], e.beta[s.event(1, j)]);
  }
  return {t, c};
}

}  // namespace

TEST_CASE("uniform behavior is noncontextual with a verified model") {
  Scenario with_meas = plain(2, 2, 2);
  with_meas.meas_equivalences.push_back(test::event_equivalence(with_meas, 0, 0, 0, 1));
  for (const Scenario& s : {pom_scenario(), plain(3, 3, 3), with_meas}) {
    const VertexSet v = enumerate_vertices(s);
    const Behavior u = uniform_behavior(s);
    const auto r = check_membership(s, u, v);
    REQUIRE(r.noncontextual);
    REQUIRE(r.model);
    CHECK(verify_model(s, u, v, *r.model));
    CHECK(model_behavior(s, v, *r.model) == u);
  }
}

TEST_CASE("vertex image with a deterministic model") {
  const Scenario s = plain(3, 2, 2);
  const VertexSet v = enumerate_vertices(s);
  NCModel m(3, v.size());
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 3) = 1;
  const Behavior b = model_behavior(s, v, m);
  CHECK(verify_model(s, b, v, m));
  const auto r = check_membership(s, b, v);
  REQUIRE(r.noncontextual);
  CHECK(verify_model(s, b, v, *r.model));
}

TEST_CASE("POM behavior is contextual with a Farkas witness") {
  const Scenario s = pom_scenario();
  const VertexSet v = enumerate_vertices(s);
  const Behavior b = pom_behavior();
  const auto r = check_membership(s, b, v);
  CHECK_FALSE(r.noncontextual);
  REQUIRE(r.witness);
  CHECK(verify_witness(s, b, v, *r.witness));
  // A witness for one table does not certify another.
  CHECK_FALSE(verify_witness(s, uniform_behavior(s), v, *r.witness));
}

TEST_CASE("perturbed model fails verification") {
  const Scenario s = pom_scenario();
  const VertexSet v = enumerate_vertices(s);
  std::mt19937_64 rng(4);
  const auto [b, m] = random_nc_behavior_with_model(s, v, rng);
  CHECK(verify_model(s, b, v, m));
  NCModel bad = m;
  bad(0, 0) += q("1/1000");
  CHECK_FALSE(verify_model(s, b, v, bad));
}

TEST_CASE("invalid tables have no model") {
  const Scenario s = plain(2, 2, 2);
  const VertexSet v = enumerate_vertices(s);
  Behavior b = uniform_behavior(s);
  b(1, 1, 0) = q("3/4");
  const auto r = check_membership(s, b, v);
  CHECK_FALSE(r.noncontextual);
  REQUIRE(r.witness);
  CHECK(verify_witness(s, b, v, *r.witness));
}

TEST_CASE("shape mismatch and stale vertex sets are structural errors") {
  const Scenario s = pom_scenario();
  const VertexSet v = enumerate_vertices(s);
  CHECK_THROWS_AS(check_membership(s, Behavior(4, 2, 3), v), StructuralError);
  Scenario other = s;
  other.outcomes = 3;
  other.prep_equivalences.clear();
  CHECK_THROWS_AS(check_membership(other, uniform_behavior(other), v), StructuralError);
}

TEST_CASE("mixtures of noncontextual behaviors stay noncontextual") {
  std::mt19937_64 rng(21);
  const Scenario s = pom_scenario();
  const VertexSet v = enumerate_vertices(s);
  for (int n = 0; n < 10; ++n) {
    const Behavior a = random_nc_behavior(s, v, rng);
    const Behavior b = random_nc_behavior(s, v, rng);
    const Rational pi = test::frac(static_cast<long>(rng() % 9) + 1, 10);
    const Behavior m = mix(pi, a, b);
    const auto r = check_membership(s, m, v);
    REQUIRE(r.noncontextual);
    CHECK(verify_model(s, m, v, *r.model));
  }
}

TEST_CASE("membership is invariant under relabeling") {
  std::mt19937_64 rng(8);
  const Scenario s = pom_scenario();
  const VertexSet v = enumerate_vertices(s);
  std::vector<std::size_t> perm(4);
  std::iota(perm.begin(), perm.end(), 0);
  for (int n = 0; n < 12; ++n) {
    const Behavior b = n == 0 ? pom_behavior(40) : random_valid_behavior(s, v, rng);
    const bool nc = check_membership(s, b, v).noncontextual;
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto [ps, pb] = relabel_preparations(s, b, perm);
    CHECK(check_membership(ps, pb, enumerate_vertices(ps)).noncontextual == nc);
    const auto [os, ob] = swap_outcomes(s, b, n % 2);
    CHECK(check_membership(os, ob, enumerate_vertices(os)).noncontextual == nc);
  }
}

TEST_CASE("scenarios without preparation equivalences are always noncontextual") {
  std::mt19937_64 rng(2);
  Scenario s = plain(3, 2, 3);
  s.meas_equivalences.push_back(test::event_equivalence(s, 2, 0, 0, 1));
  const VertexSet v = enumerate_vertices(s);
  for (int n = 0; n < 8; ++n) {
    const Behavior b = random_behavior_vertex(s, rng);
    CHECK(check_membership(s, b, v).noncontextual);
  }
}
