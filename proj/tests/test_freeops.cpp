#include <random>

#include "ctxlab/errors.hpp"
#include "ctxlab/freeops.hpp"
#include "ctxlab/generators.hpp"
#include "ctxlab/quantifiers.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ctxlab;
using test::plain;
using test::q;

namespace {

RationalMatrix permutation(const std::vector<std::size_t>& to) {
  RationalMatrix m(to.size(), to.size());
  for (std::size_t c = 0; c < to.size(); ++c) m(to[c], c) = 1;
  return m;
}

// Operation that only relabels preparations: target i~ uses source perm[i~].
FreeOperation prep_relabeling(const Scenario& s, const std::vector<std::size_t>& perm) {
  FreeOperation t = identity_operation(s);
  t.q_prep = permutation(perm);
  t.target = s;
  for (std::size_t n = 0; n < s.prep_equivalences.size(); ++n) {
    for (std::size_t it = 0; it < perm.size(); ++it) {
      t.target.prep_equivalences[n].alpha[it] = s.prep_equivalences[n].alpha[perm[it]];
      t.target.prep_equivalences[n].beta[it] = s.prep_equivalences[n].beta[perm[it]];
    }
  }
  return t;
}

// T2 first, then T1 drawn into T2's source scenario.
std::pair<FreeOperation, FreeOperation> random_chain(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FreeOpRequest r2;
  r2.seed = seed * 7 + 1;
  r2.source_preparations = 2 + rng() % 3;
  r2.source_measurements = 1 + rng() % 3;
  r2.source_outcomes = 2 + rng() % 2;
  r2.target_preparations = 2 + rng() % 3;
  r2.target_measurements = 1 + rng() % 3;
  r2.target_outcomes = 2 + rng() % 2;
  r2.prep_equivalences = rng() % 2;
  r2.meas_equivalences = rng() % 2;
  const FreeOperation t2 = sample_random_freeop(r2);
  FreeOpRequest r1;
  r1.seed = seed * 7 + 2;
  r1.source_preparations = 2 + rng() % 3;
  r1.source_measurements = 1 + rng() % 3;
  r1.source_outcomes = 2 + rng() % 2;
  r1.target_preparations = t2.source.preparations;
  r1.target_measurements = t2.source.measurements;
  r1.target_outcomes = t2.source.outcomes;
  r1.target = t2.source;
  return {sample_random_freeop(r1), t2};
}

}  // namespace

TEST_CASE("identity operation") {
  const Scenario s = pom_scenario();
  const FreeOperation id = identity_operation(s);
  CHECK(validate_freeop(id).ok());
  const Behavior b = pom_behavior(20);
  CHECK(apply_freeop(id, b) == b);
  CHECK(fixes(id, b));
}

TEST_CASE("validation catches bad maps and lift mismatches") {
  const Scenario s = pom_scenario();
  FreeOperation t = identity_operation(s);
  t.q_prep(0, 0) = q("0.9");
  CHECK(validate_freeop(t).has("not-stochastic"));

  t = identity_operation(s);
  t.q_prep = RationalMatrix(3, 4);
  CHECK(validate_freeop(t).has("bad-dimension"));

  // The source claims 1/2 P0 + 1/2 P1 ~ 1/2 P2 + 1/2 P3 while the identity maps
  // the target's equivalence onto a different one.
  t = identity_operation(s);
  t.source.prep_equivalences[0] = {{q("1/2"), q("1/2"), q("0"), q("0")}, {q("0"), q("0"), q("1/2"), q("1/2")}};
  const auto report = validate_freeop(t);
  CHECK(report.has("lift-mismatch"));
  CHECK(report.summary().find("equivalence lift mismatch") != std::string::npos);

  t = identity_operation(s);
  t.source.prep_equivalences.clear();
  CHECK(validate_freeop(t).has("equivalence-count"));
}

TEST_CASE("a single target preparation copies source preparation 0") {
  const Scenario src = plain(3, 2, 2);
  std::mt19937_64 rng(3);
  const Behavior b = random_behavior_vertex(src, rng);
  FreeOperation t;
  t.source = src;
  t.target = plain(1, 2, 2);
  t.q_prep = RationalMatrix(3, 1);
  t.q_prep(0, 0) = 1;
  t.q_meas = RationalMatrix::identity(2);
  t.q_out.assign(2, std::vector<RationalMatrix>(2, RationalMatrix::identity(2)));
  REQUIRE(validate_freeop(t).ok());
  const Behavior out = apply_freeop(t, b);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) CHECK(out(0, j, k) == b(0, j, k));
}

TEST_CASE("lifting examples") {
  RationalMatrix qp(3, 2);
  qp(0, 0) = q("1/4");
  qp(1, 0) = q("3/4");
  qp(2, 1) = 1;
  const RationalMatrix qm = RationalMatrix::identity(1);
  const std::vector<std::vector<RationalMatrix>> qo(1, std::vector<RationalMatrix>(1, RationalMatrix::identity(2)));
  const PrepEquivalence target{{q("1"), q("0")}, {q("0"), q("1")}};
  const auto lifted = lift_equivalences(qp, qm, qo, 2, {target}, {});
  REQUIRE(lifted.prep.size() == 1);
  CHECK(lifted.prep[0].alpha == std::vector<Rational>{q("1/4"), q("3/4"), q("0")});
  CHECK(lifted.prep[0].beta == std::vector<Rational>{q("0"), q("0"), q("1")});

  const RationalMatrix perm = permutation({2, 0, 1});
  const PrepEquivalence t3{{q("1/2"), q("1/2"), q("0")}, {q("0"), q("0"), q("1")}};
  const auto lp = lift_equivalences(perm, qm, qo, 2, {t3}, {});
  // Source i = perm[i~] carries the coefficient of i~.
  CHECK(lp.prep[0].alpha == std::vector<Rational>{q("1/2"), q("0"), q("1/2")});
  CHECK(lp.prep[0].beta == std::vector<Rational>{q("0"), q("1"), q("0")});

  std::mt19937_64 rng(17);
  for (int n = 0; n < 20; ++n) {
    RationalMatrix r(4, 3);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto col = detail::random_distribution(rng, 4, n % 2 == 0);
      for (std::size_t i = 0; i < 4; ++i) r(i, c) = col[i];
    }
    PrepEquivalence e{detail::random_distribution(rng, 3, false), detail::random_distribution(rng, 3, false)};
    if (e.alpha == e.beta) continue;
    try {
      const auto l = lift_equivalences(r, qm, qo, 2, {e}, {});
      CHECK(sum(l.prep[0].alpha) == 1);
      CHECK(sum(l.prep[0].beta) == 1);
    } catch (const InvalidInput&) {
      // Only a trivial lift may be refused.
    }
  }
}

TEST_CASE("balanced outcome maps have equal row sums") {
  std::mt19937_64 rng(23);
  for (std::size_t rows : {1u, 2u, 3u}) {
    for (std::size_t cols : {1u, 2u, 3u}) {
      const RationalMatrix m = detail::random_balanced_map(rng, rows, cols);
      CHECK(m.is_column_stochastic());
      for (std::size_t r = 0; r < rows; ++r) {
        Rational total = 0;
        for (std::size_t c = 0; c < cols; ++c) total += m(r, c);
        CHECK(total == test::frac(static_cast<long>(cols), static_cast<long>(rows)));
      }
    }
  }
}

TEST_CASE("sampled operations are valid and reproducible") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const FreeOperation t = sample_random_freeop(2 + seed % 3, 1 + seed % 3, 2 + seed % 2, seed);
    CHECK(validate_freeop(t).ok());
    CHECK(digest(sample_random_freeop(2 + seed % 3, 1 + seed % 3, 2 + seed % 2, seed)) == digest(t));
  }
  // Regression fixture for seed 1, dims (2, 2, 2).
  CHECK(digest(sample_random_freeop(2, 2, 2, 1)) == 1947343482304379206ull);
}

TEST_CASE("requests with a fixed target reuse it") {
  FreeOpRequest r;
  r.source_preparations = 4;
  r.target_preparations = 4;
  r.target = pom_scenario();
  r.seed = 5;
  const FreeOperation t = sample_random_freeop(r);
  CHECK(t.target == canonicalize(pom_scenario()));
  CHECK(validate_freeop(t).ok());
  r.target_preparations = 3;
  CHECK_THROWS_AS(sample_random_freeop(r), InvalidInput);
}

TEST_CASE("application is linear and preserves validity") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    std::mt19937_64 rng(seed + 100);
    const FreeOperation t = sample_random_freeop(2 + seed % 3, 1 + seed % 2, 2 + seed % 2, seed);
    const VertexSet v = enumerate_vertices(t.source);
    const Behavior a = random_valid_behavior(t.source, v, rng);
    const Behavior b = random_valid_behavior(t.source, v, rng);
    const Rational pi = test::frac(static_cast<long>(rng() % 7), 7);
    const Behavior lhs = apply_freeop(t, mix(pi, a, b));
    const Behavior ta = apply_freeop(t, a);
    CHECK(lhs == mix(pi, ta, apply_freeop(t, b)));
    CHECK(validate_behavior(t.target, ta).ok());
  }
}

TEST_CASE("noncontextual behaviors stay noncontextual") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    std::mt19937_64 rng(seed + 300);
    const FreeOperation t = sample_random_freeop(2 + seed % 3, 1 + seed % 3, 2 + seed % 2, seed + 1000);
    const VertexSet v = enumerate_vertices(t.source);
    const Behavior b = random_nc_behavior(t.source, v, rng);
    CHECK(check_membership(t.target, apply_freeop(t, b), enumerate_vertices(t.target)).noncontextual);
  }
}

TEST_CASE("composition") {
  const Scenario s = pom_scenario();
  const Behavior b = pom_behavior(20);
  const FreeOperation p1 = prep_relabeling(s, {1, 0, 3, 2});
  REQUIRE(validate_freeop(p1).ok());
  const FreeOperation p2 = prep_relabeling(p1.target, {2, 3, 0, 1});
  REQUIRE(validate_freeop(p2).ok());
  const FreeOperation both = compose_freeops(p2, p1);
  CHECK(both.q_prep == permutation({3, 2, 1, 0}));
  CHECK(apply_freeop(both, b) == apply_freeop(p2, apply_freeop(p1, b)));

  const FreeOperation id = identity_operation(p1.target);
  CHECK(apply_freeop(compose_freeops(id, p1), b) == apply_freeop(p1, b));
  CHECK_THROWS_AS(compose_freeops(p1, identity_operation(plain(2, 2, 2))), StructuralError);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto [t1, t2] = random_chain(seed);
    REQUIRE(validate_freeop(t1).ok());
    const FreeOperation t = compose_freeops(t2, t1);
    CHECK(validate_freeop(t).ok());
    std::mt19937_64 rng(seed + 50);
    const VertexSet v = enumerate_vertices(t1.source);
    for (int n = 0; n < 3; ++n) {
      const Behavior x = random_valid_behavior(t1.source, v, rng);
      CHECK(apply_freeop(t, x) == apply_freeop(t2, apply_freeop(t1, x)));
    }
  }
}

TEST_CASE("POM under random free operations: KL does not increase") {
  const Scenario s = pom_scenario();
  const Behavior b = pom_behavior(30);
  const VertexSet v = enumerate_vertices(s);
  const double before = kl_contextuality(s, b, v).value_float;
  CHECK(before > 1e-3);
  int used = 0;
  for (std::uint64_t seed = 1; used < 20 && seed < 2000; ++seed) {
    // Draw into a 4-preparation target with a halves equivalence; keep draws
    // whose lifted source is the POM scenario.
    FreeOpRequest r;
    r.seed = seed;
    r.source_preparations = 4;
    r.source_measurements = 2;
    r.source_outcomes = 2;
    r.target_preparations = 4;
    r.target_measurements = 1 + seed % 2;
    r.target_outcomes = 2;
    r.permutation_preprocessing = seed % 3 != 0;
    r.halves_equivalences = true;
    FreeOperation t = sample_random_freeop(r);
    if (t.source != canonicalize(s)) {
      auto swapped = canonicalize(s);
      std::swap(swapped.prep_equivalences[0].alpha, swapped.prep_equivalences[0].beta);
      if (t.source != swapped) continue;
    }
    t.source = s;
    REQUIRE(validate_freeop(t).ok());
    ++used;
    const Behavior tb = apply_freeop(t, b);
    const auto after = kl_contextuality(t.target, tb, enumerate_vertices(t.target));
    CHECK(after.value_float <= before + 1e-4);
  }
  CHECK(used == 20);
}
