#pragma once

#include <random>
#include <string_view>

#include "ctxlab/rational.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab::test {

inline Rational q(std::string_view text) { return parse_rational(text); }

// mpq_class(num, den) does not reduce; arithmetic needs canonical operands.
inline Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Scenario plain(std::size_t i, std::size_t j, std::size_t k) {
  Scenario s;
  s.preparations = i;
  s.measurements = j;
  s.outcomes = k;
  return s;
}

// [k1|j1] ~ [k2|j2] as a measurement equivalence.
inline MeasEquivalence event_equivalence(const Scenario& s, std::size_t k1, std::size_t j1, std::size_t k2,
                                         std::size_t j2) {
  MeasEquivalence e{std::vector<Rational>(s.events()), std::vector<Rational>(s.events())};
  e.alpha[s.event(k1, j1)] = 1;
  e.beta[s.event(k2, j2)] = 1;
  return e;
}

}  // namespace ctxlab::test
