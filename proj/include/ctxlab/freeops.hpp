#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ctxlab/matrix.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab {

/// Stochastic pre/post-processing from a source to a target scenario.
///
///   q_prep: I x I~ , column i~ is q_P(.|i~)
///   q_meas: J x J~ , column j~ is q_M(.|j~)
///   q_out[j~][j]: K~ x K, column k is q_O(.|k) applied when target measurement
///                 j~ was routed to source measurement j
///
/// The outcome map may depend on the routed source measurement as well as the
/// target one; maps that depend on j~ only are the special case with equal
/// entries along j, and composition stays inside the class.
struct FreeOperation {
  Scenario source;
  Scenario target;
  RationalMatrix q_prep;
  RationalMatrix q_meas;
  std::vector<std::vector<RationalMatrix>> q_out;

  /// True when q_out[j~][j] is the same matrix for every j.
  bool outcome_maps_measurement_independent() const;
  bool operator==(const FreeOperation&) const = default;
};

/// Identity operation on a scenario.
FreeOperation identity_operation(const Scenario& s);

/// Violation codes: bad-dimension, not-stochastic, source-invalid, target-invalid,
/// equivalence-count, lift-mismatch ("equivalence lift mismatch"), lift-unbalanced,
/// lift-trivial.
ValidationReport validate_freeop(const FreeOperation& t);

/// p~(k~|j~,i~) = sum q_O^{j~,j}(k~|k) p(k|j,i) q_P(i|i~) q_M(j|j~).
/// Throws InvalidInput when t or b is invalid.
Behavior apply_freeop(const FreeOperation& t, const Behavior& b);

/// Same map without validating the operation or the behavior.
Behavior apply_freeop_unchecked(const FreeOperation& t, const Behavior& b);

/// t2 after t1. Throws StructuralError when t1.target differs from t2.source.
FreeOperation compose_freeops(const FreeOperation& t2, const FreeOperation& t1);

struct LiftedEquivalences {
  std::vector<PrepEquivalence> prep;
  std::vector<MeasEquivalence> meas;
};

/// Source coefficients induced by the target equivalences, canonicalized to unit
/// mass. Throws InvalidInput when an induced measurement equivalence has zero
/// mass or unequal masses on its two sides.
LiftedEquivalences lift_equivalences(const RationalMatrix& q_prep, const RationalMatrix& q_meas,
                                     const std::vector<std::vector<RationalMatrix>>& q_out,
                                     std::size_t source_outcomes, const std::vector<PrepEquivalence>& target_prep,
                                     const std::vector<MeasEquivalence>& target_meas);

struct FreeOpRequest {
  std::size_t source_preparations = 2, source_measurements = 2, source_outcomes = 2;
  std::size_t target_preparations = 2, target_measurements = 2, target_outcomes = 2;
  std::size_t prep_equivalences = 1;
  std::size_t meas_equivalences = 0;
  std::uint64_t seed = 1;
  std::size_t max_attempts = 1000;
  bool sparse_preprocessing = true;  // favor point-mass columns in q_P and q_M
  bool permutation_preprocessing = false;  // q_P a random permutation when I = I~
  bool halves_equivalences = false;        // target prep equivalences of the form 1/2 P_a + 1/2 P_b ~ 1/2 P_c + 1/2 P_d
  /// Use this target scenario instead of drawing one; its dimensions must
  /// match the target fields. The equivalence counts are then ignored.
  std::optional<Scenario> target;
};

/// Draws a valid operation with the requested dimensions: target equivalences
/// first, then the source scenario induced by lifting. Deterministic per
/// request. Throws ResourceError when no valid draw is found within
/// max_attempts.
FreeOperation sample_random_freeop(const FreeOpRequest& request);

/// Convenience form: target dimensions fixed, source dimensions and the number
/// of preparation equivalences drawn from the seed.
FreeOperation sample_random_freeop(std::size_t target_preparations, std::size_t target_measurements,
                                   std::size_t target_outcomes, std::uint64_t seed);

/// t(b_ref) = b_ref, for operations whose source and target shapes agree.
bool fixes(const FreeOperation& t, const Behavior& b_ref);

/// Stable 64-bit digest of the operation (maps and both scenarios).
std::uint64_t digest(const FreeOperation& t);

namespace detail {

/// Random probability vector with small denominators.
std::vector<Rational> random_distribution(std::mt19937_64& rng, std::size_t n, bool sparse);

/// Random K~ x K column-stochastic matrix whose rows all sum to K / K~.
RationalMatrix random_balanced_map(std::mt19937_64& rng, std::size_t rows, std::size_t cols);

}  // namespace detail

}  // namespace ctxlab
