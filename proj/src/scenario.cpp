#include "ctxlab/scenario.hpp"

#include <sstream>

#include "ctxlab/errors.hpp"

namespace ctxlab {

bool ValidationReport::has(std::string_view code) const {
  for (const auto& v : violations) {
    if (v.code == code) return true;
  }
  return false;
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += '\n';
    out += v.code + ": " + v.message;
  }
  return out;
}

Behavior::Behavior(std::size_t preparations, std::size_t measurements, std::size_t outcomes)
    : preparations_(preparations),
      measurements_(measurements),
      outcomes_(outcomes),
      values_(preparations * measurements * outcomes) {}

Behavior::Behavior(std::size_t preparations, std::size_t measurements, std::size_t outcomes,
                   std::vector<Rational> values)
    : preparations_(preparations), measurements_(measurements), outcomes_(outcomes), values_(std::move(values)) {
  if (values_.size() != preparations * measurements * outcomes) {
    throw StructuralError("behavior table has " + std::to_string(values_.size()) + " entries, expected " +
                          std::to_string(preparations * measurements * outcomes));
  }
}

namespace {

template <class Equivalence>
void check_equivalence(ValidationReport& report, const Equivalence& eq, std::size_t dim, const std::string& what) {
  if (eq.alpha.size() != dim || eq.beta.size() != dim) {
    report.add("bad-dimension", what + ": coefficient vectors must have length " + std::to_string(dim));
    return;
  }
  if (!all_nonnegative(eq.alpha) || !all_nonnegative(eq.beta)) {
    report.add("negative-coefficient", what + ": negative coefficient");
    return;
  }
  const Rational ma = sum(eq.alpha);
  const Rational mb = sum(eq.beta);
  if (sgn(ma) == 0 || sgn(mb) == 0) {
    report.add("zero-mass", what + ": a side has zero mass");
    return;
  }
  if (ma != mb) {
    report.add("unequal-mass", what + ": unequal equivalence mass (" + to_string(ma) + " vs " + to_string(mb) + ")");
    return;
  }
  if (eq.alpha == eq.beta) report.add("trivial-equivalence", what + ": trivial equivalence (alpha equals beta)");
}

template <class Equivalence>
Equivalence rescaled(Equivalence eq) {
  const Rational ma = sum(eq.alpha);
  const Rational mb = sum(eq.beta);
  if (sgn(ma) > 0) {
    for (auto& a : eq.alpha) a /= ma;
  }
  if (sgn(mb) > 0) {
    for (auto& b : eq.beta) b /= mb;
  }
  return eq;
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport report;
  if (s.preparations == 0 || s.measurements == 0 || s.outcomes == 0) {
    report.add("bad-dimension", "scenario dimensions must be at least 1");
    return report;
  }
  for (std::size_t n = 0; n < s.prep_equivalences.size(); ++n) {
    check_equivalence(report, s.prep_equivalences[n], s.preparations, "prep equivalence " + std::to_string(n));
  }
  for (std::size_t n = 0; n < s.meas_equivalences.size(); ++n) {
    check_equivalence(report, s.meas_equivalences[n], s.events(), "meas equivalence " + std::to_string(n));
  }
  return report;
}

ValidationReport validate_behavior(const Scenario& s, const Behavior& b) {
  if (!b.fits(s)) {
    throw StructuralError("behavior dimensions (" + std::to_string(b.preparations()) + "," +
                          std::to_string(b.measurements()) + "," + std::to_string(b.outcomes()) +
                          ") do not match the scenario (" + std::to_string(s.preparations) + "," +
                          std::to_string(s.measurements) + "," + std::to_string(s.outcomes) + ")");
  }
  ValidationReport report;
  const std::size_t I = s.preparations, J = s.measurements, K = s.outcomes;
  for (std::size_t i = 0; i < I; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      Rational total = 0;
      for (std::size_t k = 0; k < K; ++k) {
        if (sgn(b(i, j, k)) < 0) {
          report.add("negative-probability", "negative probability at (i=" + std::to_string(i) +
                                                 ", j=" + std::to_string(j) + ", k=" + std::to_string(k) + ")");
        }
        total += b(i, j, k);
      }
      if (total != 1) {
        report.add("row-not-normalized", "row not normalized at (i=" + std::to_string(i) + ", j=" + std::to_string(j) +
                                             "): sum is " + to_string(total));
      }
    }
  }
  for (std::size_t n = 0; n < s.prep_equivalences.size(); ++n) {
    if (s.prep_equivalences[n].alpha.size() != I || s.prep_equivalences[n].beta.size() != I) continue;
    const auto eq = rescaled(s.prep_equivalences[n]);
    bool broken = false;
    for (std::size_t j = 0; j < J && !broken; ++j) {
      for (std::size_t k = 0; k < K && !broken; ++k) {
        Rational lhs = 0, rhs = 0;
        for (std::size_t i = 0; i < I; ++i) {
          lhs += eq.alpha[i] * b(i, j, k);
          rhs += eq.beta[i] * b(i, j, k);
        }
        broken = lhs != rhs;
      }
    }
    if (broken) report.add("prep-equivalence-broken", "prep equivalence " + std::to_string(n) + " broken");
  }
  for (std::size_t n = 0; n < s.meas_equivalences.size(); ++n) {
    if (s.meas_equivalences[n].alpha.size() != s.events() || s.meas_equivalences[n].beta.size() != s.events()) continue;
    const auto eq = rescaled(s.meas_equivalences[n]);
    bool broken = false;
    for (std::size_t i = 0; i < I && !broken; ++i) {
      Rational lhs = 0, rhs = 0;
      for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
          lhs += eq.alpha[s.event(k, j)] * b(i, j, k);
          rhs += eq.beta[s.event(k, j)] * b(i, j, k);
        }
      }
      broken = lhs != rhs;
    }
    if (broken) report.add("meas-equivalence-broken", "meas equivalence " + std::to_string(n) + " broken");
  }
  return report;
}

Scenario canonicalize(Scenario s) {
  const auto report = validate_scenario(s);
  if (!report.ok()) throw InvalidInput("invalid scenario: " + report.summary());
  for (auto& eq : s.prep_equivalences) eq = rescaled(std::move(eq));
  for (auto& eq : s.meas_equivalences) eq = rescaled(std::move(eq));
  return s;
}

std::uint64_t fingerprint(const Scenario& s) {
  const Scenario c = canonicalize(s);
  std::ostringstream text;
  text << c.preparations << ',' << c.measurements << ',' << c.outcomes << ';';
  for (const auto& eq : c.prep_equivalences) {
    text << 'P';
    for (const auto& a : eq.alpha) text << a << ' ';
    text << '|';
    for (const auto& b : eq.beta) text << b << ' ';
  }
  for (const auto& eq : c.meas_equivalences) {
    text << 'M';
    for (const auto& a : eq.alpha) text << a << ' ';
    text << '|';
    for (const auto& b : eq.beta) text << b << ' ';
  }
  // FNV-1a
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Behavior uniform_behavior(const Scenario& s) {
  if (!validate_scenario(s).ok()) throw InvalidInput("uniform_behavior: invalid scenario");
  Behavior b(s.preparations, s.measurements, s.outcomes);
  const Rational u(1, static_cast<unsigned long>(s.outcomes));
  for (auto& x : b.values()) x = u;
  return b;
}

Scenario juxtapose_scenarios(const Scenario& s1_in, const Scenario& s2_in) {
  const Scenario s1 = canonicalize(s1_in);
  const Scenario s2 = canonicalize(s2_in);
  Scenario out;
  out.preparations = s1.preparations * s2.preparations;
  out.measurements = s1.measurements * s2.measurements;
  out.outcomes = s1.outcomes * s2.outcomes;

  const std::size_t I2 = s2.preparations;
  for (const auto& eq : s1.prep_equivalences) {
    for (std::size_t fixed = 0; fixed < I2; ++fixed) {
      PrepEquivalence e{std::vector<Rational>(out.preparations), std::vector<Rational>(out.preparations)};
      for (std::size_t i1 = 0; i1 < s1.preparations; ++i1) {
        e.alpha[i1 * I2 + fixed] = eq.alpha[i1];
        e.beta[i1 * I2 + fixed] = eq.beta[i1];
      }
      out.prep_equivalences.push_back(std::move(e));
    }
  }
  for (const auto& eq : s2.prep_equivalences) {
    for (std::size_t fixed = 0; fixed < s1.preparations; ++fixed) {
      PrepEquivalence e{std::vector<Rational>(out.preparations), std::vector<Rational>(out.preparations)};
      for (std::size_t i2 = 0; i2 < I2; ++i2) {
        e.alpha[fixed * I2 + i2] = eq.alpha[i2];
        e.beta[fixed * I2 + i2] = eq.beta[i2];
      }
      out.prep_equivalences.push_back(std::move(e));
    }
  }

  const std::size_t J2 = s2.measurements, K2 = s2.outcomes;
  auto product_event = [&](std::size_t k1, std::size_t j1, std::size_t k2, std::size_t j2) {
    return out.event(k1 * K2 + k2, j1 * J2 + j2);
  };
  for (const auto& eq : s1.meas_equivalences) {
    for (std::size_t j2 = 0; j2 < J2; ++j2) {
      for (std::size_t k2 = 0; k2 < K2; ++k2) {
        MeasEquivalence e{std::vector<Rational>(out.events()), std::vector<Rational>(out.events())};
        for (std::size_t j1 = 0; j1 < s1.measurements; ++j1) {
          for (std::size_t k1 = 0; k1 < s1.outcomes; ++k1) {
            e.alpha[product_event(k1, j1, k2, j2)] = eq.alpha[s1.event(k1, j1)];
            e.beta[product_event(k1, j1, k2, j2)] = eq.beta[s1.event(k1, j1)];
          }
        }
        out.meas_equivalences.push_back(std::move(e));
      }
    }
  }
  for (const auto& eq : s2.meas_equivalences) {
    for (std::size_t j1 = 0; j1 < s1.measurements; ++j1) {
      for (std::size_t k1 = 0; k1 < s1.outcomes; ++k1) {
        MeasEquivalence e{std::vector<Rational>(out.events()), std::vector<Rational>(out.events())};
        for (std::size_t j2 = 0; j2 < J2; ++j2) {
          for (std::size_t k2 = 0; k2 < K2; ++k2) {
            e.alpha[product_event(k1, j1, k2, j2)] = eq.alpha[s2.event(k2, j2)];
            e.beta[product_event(k1, j1, k2, j2)] = eq.beta[s2.event(k2, j2)];
          }
        }
        out.meas_equivalences.push_back(std::move(e));
      }
    }
  }
  return out;
}

std::pair<Scenario, Behavior> juxtapose(const Scenario& s1, const Behavior& b1, const Scenario& s2,
                                        const Behavior& b2) {
  if (auto r = validate_behavior(s1, b1); !r.ok()) throw InvalidInput("juxtapose: first behavior invalid: " + r.summary());
  if (auto r = validate_behavior(s2, b2); !r.ok()) throw InvalidInput("juxtapose: second behavior invalid: " + r.summary());
  Scenario s = juxtapose_scenarios(s1, s2);
  Behavior b(s.preparations, s.measurements, s.outcomes);
  for (std::size_t i1 = 0; i1 < s1.preparations; ++i1)
    for (std::size_t i2 = 0; i2 < s2.preparations; ++i2)
      for (std::size_t j1 = 0; j1 < s1.measurements; ++j1)
        for (std::size_t j2 = 0; j2 < s2.measurements; ++j2)
          for (std::size_t k1 = 0; k1 < s1.outcomes; ++k1)
            for (std::size_t k2 = 0; k2 < s2.outcomes; ++k2)
              b(i1 * s2.preparations + i2, j1 * s2.measurements + j2, k1 * s2.outcomes + k2) =
                  b1(i1, j1, k1) * b2(i2, j2, k2);
  return {std::move(s), std::move(b)};
}

Behavior mix(const Rational& pi, const Behavior& a, const Behavior& b) {
  if (!a.same_shape(b)) throw StructuralError("mix: behaviors have different shapes");
  Behavior out(a.preparations(), a.measurements(), a.outcomes());
  const Rational rest = 1 - pi;
  for (std::size_t n = 0; n < out.size(); ++n) out.values()[n] = pi * a.values()[n] + rest * b.values()[n];
  return out;
}

}  // namespace ctxlab
