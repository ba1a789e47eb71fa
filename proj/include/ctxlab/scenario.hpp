#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxlab/rational.hpp"

namespace ctxlab {

/// sum_i alpha_i P_i ~ sum_i beta_i P_i over the preparations of a scenario.
struct PrepEquivalence {
  std::vector<Rational> alpha;
  std::vector<Rational> beta;
  bool operator==(const PrepEquivalence&) const = default;
};

/// sum alpha_{k|j} [k|j] ~ sum beta_{k|j} [k|j]. Both vectors are indexed by the
/// flat event index j*K + k (see Scenario::event).
struct MeasEquivalence {
  std::vector<Rational> alpha;
  std::vector<Rational> beta;
  bool operator==(const MeasEquivalence&) const = default;
};

/// A prepare-and-measure scenario: I preparations, J measurements with K
/// outcomes each, and the operational equivalences that hold among them.
struct Scenario {
  std::size_t preparations = 1;
  std::size_t measurements = 1;
  std::size_t outcomes = 1;
  std::vector<PrepEquivalence> prep_equivalences;
  std::vector<MeasEquivalence> meas_equivalences;

  std::size_t events() const { return measurements * outcomes; }
  std::size_t event(std::size_t k, std::size_t j) const { return j * outcomes + k; }
  std::size_t table_size() const { return preparations * measurements * outcomes; }

  bool operator==(const Scenario&) const = default;
};

struct Violation {
  std::string code;
  std::string message;
};

/// Result of a report-based validation; empty means valid.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
  void add(std::string code, std::string message) { violations.push_back({std::move(code), std::move(message)}); }
  /// One violation per line.
  std::string summary() const;
};

/// Conditional probability table p(k|j,i), stored row-major as [i][j][k].
class Behavior {
 public:
  Behavior() = default;
  Behavior(std::size_t preparations, std::size_t measurements, std::size_t outcomes);
  Behavior(std::size_t preparations, std::size_t measurements, std::size_t outcomes,
           std::vector<Rational> values);

  std::size_t preparations() const { return preparations_; }
  std::size_t measurements() const { return measurements_; }
  std::size_t outcomes() const { return outcomes_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * measurements_ + j) * outcomes_ + k;
  }
  Rational& operator()(std::size_t i, std::size_t j, std::size_t k) { return values_[index(i, j, k)]; }
  const Rational& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[index(i, j, k)];
  }

  std::span<const Rational> values() const { return values_; }
  std::span<Rational> values() { return values_; }

  bool same_shape(const Behavior& other) const {
    return preparations_ == other.preparations_ && measurements_ == other.measurements_ &&
           outcomes_ == other.outcomes_;
  }
  bool fits(const Scenario& s) const {
    return preparations_ == s.preparations && measurements_ == s.measurements && outcomes_ == s.outcomes;
  }

  bool operator==(const Behavior&) const = default;

 private:
  std::size_t preparations_ = 0;
  std::size_t measurements_ = 0;
  std::size_t outcomes_ = 0;
  std::vector<Rational> values_;
};

ValidationReport validate_scenario(const Scenario& s);

/// Throws StructuralError when the table dimensions differ from the scenario.
ValidationReport validate_behavior(const Scenario& s, const Behavior& b);

/// Rescales every equivalence to unit mass on each side. Throws InvalidInput
/// when validate_scenario reports a violation.
Scenario canonicalize(Scenario s);

/// Stable 64-bit digest of the canonical form; used to detect stale vertex sets.
std::uint64_t fingerprint(const Scenario& s);

/// p = 1/K everywhere.
Behavior uniform_behavior(const Scenario& s);

/// Product scenario of two scenarios (row-major flattening, first factor most
/// significant) with the tensored equivalence sets.
Scenario juxtapose_scenarios(const Scenario& s1, const Scenario& s2);

/// Entry-wise product behavior; both inputs are validated first.
std::pair<Scenario, Behavior> juxtapose(const Scenario& s1, const Behavior& b1, const Scenario& s2,
                                        const Behavior& b2);

/// pi*a + (1-pi)*b, entry-wise.
Behavior mix(const Rational& pi, const Behavior& a, const Behavior& b);

}  // namespace ctxlab
