#include "doctest.h"

#include <random>

#include "ctxlab/errors.hpp"
#include "ctxlab/generators.hpp"
#include "ctxlab/membership.hpp"
#include "ctxlab/scenario.hpp"
#include "helpers.hpp"

using namespace ctxlab;
using test::q;

TEST_CASE("minimal scenario is valid") {
  Scenario s;
  s.outcomes = 2;
  CHECK(validate_scenario(s).ok());
}

TEST_CASE("unequal and trivial equivalences are reported") {
  Scenario s;
  s.preparations = 2;
  s.outcomes = 2;
  s.prep_equivalences.push_back({{q("0.6"), q("0.3")}, {q("1"), q("0")}});
  CHECK(validate_scenario(s).has("unequal-mass"));

  s.prep_equivalences = {{{q("1/2"), q("1/2")}, {q("1/2"), q("1/2")}}};
  CHECK(validate_scenario(s).has("trivial-equivalence"));

  s.prep_equivalences = {{{q("1"), q("0")}, {q("1")}}};
  CHECK(validate_scenario(s).has("bad-dimension"));

  Scenario zero;
  zero.preparations = 0;
  CHECK(validate_scenario(zero).has("bad-dimension"));
}

TEST_CASE("equal positive masses are rescaled to one") {
  Scenario s;
  s.preparations = 3;
  s.outcomes = 2;
  s.prep_equivalences.push_back({{q("2"), q("0"), q("0")}, {q("0"), q("1"), q("1")}});
  CHECK(validate_scenario(s).ok());
  const Scenario c = canonicalize(s);
  CHECK(sum(c.prep_equivalences[0].alpha) == 1);
  CHECK(sum(c.prep_equivalences[0].beta) == 1);
  CHECK(c.prep_equivalences[0].beta[1] == q("1/2"));
  CHECK(fingerprint(c) == fingerprint(s));

  s.prep_equivalences[0].beta = {q("0"), q("1"), q("2")};
  CHECK_THROWS_AS(canonicalize(s), InvalidInput);
}

TEST_CASE("behavior validation") {
  const Scenario pom = pom_scenario();
  CHECK(validate_behavior(pom, uniform_behavior(pom)).ok());
  CHECK(validate_behavior(pom, pom_behavior(30)).ok());

  Behavior b = uniform_behavior(pom);
  b(0, 0, 0) = q("0.7");
  b(0, 0, 1) = q("0.4");
  CHECK(validate_behavior(pom, b).has("row-not-normalized"));

  // Preparation 0 always gives outcome 0, the others are uniform: the two
  // mixtures differ.
  Behavior broken = uniform_behavior(pom);
  broken(0, 0, 0) = 1;
  broken(0, 0, 1) = 0;
  CHECK(validate_behavior(pom, broken).has("prep-equivalence-broken"));

  Behavior negative = uniform_behavior(pom);
  negative(1, 1, 0) = q("-1/2");
  negative(1, 1, 1) = q("3/2");
  CHECK(validate_behavior(pom, negative).has("negative-probability"));

  CHECK_THROWS_AS(validate_behavior(pom, Behavior(2, 2, 2)), StructuralError);
}

TEST_CASE("measurement equivalences constrain behaviors") {
  Scenario s;
  s.preparations = 2;
  s.measurements = 2;
  s.outcomes = 2;
  // [0|0] ~ [0|1]
  MeasEquivalence e{std::vector<Rational>(4), std::vector<Rational>(4)};
  e.alpha[s.event(0, 0)] = 1;
  e.beta[s.event(0, 1)] = 1;
  s.meas_equivalences.push_back(e);
  CHECK(validate_behavior(s, uniform_behavior(s)).ok());
  Behavior b = uniform_behavior(s);
  b(1, 0, 0) = q("1/4");
  b(1, 0, 1) = q("3/4");
  CHECK(validate_behavior(s, b).has("meas-equivalence-broken"));
}

TEST_CASE("uniform behavior") {
  Scenario s;
  s.preparations = 2;
  s.measurements = 2;
  s.outcomes = 3;
  const Behavior thirds = uniform_behavior(s);
  for (const auto& x : thirds.values()) CHECK(x == q("1/3"));
  s.outcomes = 2;
  const Behavior halves = uniform_behavior(s);
  for (const auto& x : halves.values()) CHECK(x == q("1/2"));
}

TEST_CASE("juxtaposition flattening and factorization") {
  std::mt19937_64 rng(11);
  Scenario s1;
  s1.preparations = 2;
  s1.measurements = 2;
  s1.outcomes = 2;
  Scenario s2;
  s2.preparations = 3;
  s2.measurements = 1;
  s2.outcomes = 3;
  s2.prep_equivalences.push_back({{q("1/2"), q("1/2"), q("0")}, {q("0"), q("0"), q("1")}});
  const Behavior b1 = random_behavior_vertex(s1, rng);
  const Behavior b2 = random_behavior_vertex(s2, rng);
  const auto [s, b] = juxtapose(s1, b1, s2, b2);
  CHECK(s.preparations == 6);
  CHECK(s.measurements == 2);
  CHECK(s.outcomes == 6);
  CHECK(validate_scenario(s).ok());
  CHECK(validate_behavior(s, b).ok());
  // One equivalence of s2 per preparation of s1.
  CHECK(s.prep_equivalences.size() == 2);
  for (std::size_t i1 = 0; i1 < 2; ++i1)
    for (std::size_t i2 = 0; i2 < 3; ++i2)
      for (std::size_t j1 = 0; j1 < 2; ++j1)
        for (std::size_t k1 = 0; k1 < 2; ++k1)
          for (std::size_t k2 = 0; k2 < 3; ++k2) {
            CHECK(b(i1 * 3 + i2, j1, k1 * 3 + k2) == b1(i1, j1, k1) * b2(i2, 0, k2));
          }

  const auto [su, bu] = juxtapose(s1, uniform_behavior(s1), s1, uniform_behavior(s1));
  CHECK(bu == uniform_behavior(su));
}

TEST_CASE("juxtaposition is associative") {
  std::mt19937_64 rng(5);
  const Scenario a = pom_scenario();
  Scenario c;
  c.preparations = 2;
  c.outcomes = 2;
  const Behavior ba = random_behavior_vertex(a, rng);
  const Behavior bc = random_behavior_vertex(c, rng);
  const auto [ab, bab] = juxtapose(a, ba, c, bc);
  const auto [left, bl] = juxtapose(ab, bab, c, bc);
  const auto [cc, bcc] = juxtapose(c, bc, c, bc);
  const auto [right, br] = juxtapose(a, ba, cc, bcc);
  CHECK(bl == br);
  CHECK(left.preparations == right.preparations);
  CHECK(left.outcomes == right.outcomes);
}

TEST_CASE("juxtaposition of noncontextual behaviors is noncontextual") {
  std::mt19937_64 rng(9);
  const Scenario s = pom_scenario();
  const VertexSet v = enumerate_vertices(s);
  Scenario t;
  t.preparations = 2;
  t.outcomes = 2;
  const VertexSet vt = enumerate_vertices(t);
  const Behavior b = random_nc_behavior(s, v, rng);
  const Behavior bt = random_nc_behavior(t, vt, rng);
  const auto [ps, pb] = juxtapose(s, b, t, bt);
  CHECK(check_membership(ps, pb, enumerate_vertices(ps)).noncontextual);
}

TEST_CASE("mix is entry-wise") {
  const Scenario s = pom_scenario();
  const Behavior u = uniform_behavior(s);
  const Behavior p = pom_behavior(10);
  const Behavior m = mix(q("1/3"), p, u);
  for (std::size_t n = 0; n < m.size(); ++n) CHECK(m.values()[n] == q("1/3") * p.values()[n] + q("2/3") * u.values()[n]);
  CHECK_THROWS_AS(mix(q("1/2"), p, Behavior(1, 1, 2)), StructuralError);
}
