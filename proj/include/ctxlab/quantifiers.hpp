#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctxlab/membership.hpp"

namespace ctxlab {

enum class Measure { ContextualFraction, Robustness, RobustnessRef, L1Distance, UniformL1, RelativeEntropy };

std::string to_string(Measure m);
/// Accepts the CLI names cf, rob, rob-ref, l1, uniform-l1, kl. Throws InvalidInput.
Measure parse_measure(const std::string& name);

enum class Arithmetic { Exact, Float };

struct QuantifierOptions {
  Arithmetic arithmetic = Arithmetic::Exact;
};

/// Behavior with real-valued entries, used for relative-entropy witnesses and
/// float-mode results.
struct FloatBehavior {
  std::size_t preparations = 0, measurements = 0, outcomes = 0;
  std::vector<double> p;  // [i][j][k]
};

struct QuantifierReport {
  Measure measure = Measure::ContextualFraction;
  bool exact = true;
  bool defined = true;     // false: robustness_ref with no admissible mixing weight
  Rational value;          // exact LP measures
  double value_float = 0;  // always set
  double gap = 0;          // relative entropy: upper bound minus certified lower bound
  bool converged = true;
  std::size_t iterations = 0;
  std::vector<double> upper_trace;  // relative entropy: best upper bound after each iteration

  // Witnesses (exact mode).
  Rational weight;                    // CF: lambda_max; robustness: lambda
  std::optional<Behavior> nc_part;    // B^NC
  std::optional<NCModel> nc_model;    // model of B^NC
  std::optional<Behavior> residual;   // CF: B'
  std::optional<Behavior> mixture;    // robustness: lambda B^NC + (1 - lambda) B (or with b_ref)
  std::optional<NCModel> mixture_model;
  std::optional<Behavior> closest;    // distances: closest noncontextual behavior
  std::optional<NCModel> closest_model;

  // Relative-entropy witness.
  std::optional<FloatBehavior> closest_float;
  std::vector<double> closest_mu;
};

QuantifierReport contextual_fraction(const Scenario& s, const Behavior& b, const VertexSet& v,
                                     const QuantifierOptions& options = {});

QuantifierReport robustness(const Scenario& s, const Behavior& b, const VertexSet& v,
                            const QuantifierOptions& options = {});

/// Throws PreconditionError when b_ref is contextual.
QuantifierReport robustness_ref(const Scenario& s, const Behavior& b, const Behavior& b_ref, const VertexSet& v,
                                const QuantifierOptions& options = {});

/// max over (i, j) of sum_k |p - p'|. Throws StructuralError on shape mismatch.
Rational l1_behavior_distance(const Behavior& b, const Behavior& other);

QuantifierReport l1_contextuality_distance(const Scenario& s, const Behavior& b, const VertexSet& v,
                                           const QuantifierOptions& options = {});

/// (1 / (2 I J)) min over NC behaviors of sum_{i,j,k} |p - p'|.
QuantifierReport uniform_l1_distance(const Scenario& s, const Behavior& b, const VertexSet& v,
                                     const QuantifierOptions& options = {});

struct KlOptions {
  double tolerance = 1e-6;
  std::size_t max_iterations = 500;  // Newton steps
  double barrier_growth = 10;         // barrier weight factor between centerings
};

/// Upper bound on min over NC behaviors of max_{i,j} D(p(.|j,i) || p'(.|j,i)),
/// with the certified gap. Not converged within the cap: converged = false.
QuantifierReport kl_contextuality(const Scenario& s, const Behavior& b, const VertexSet& v,
                                  const KlOptions& options = {});

/// max over (i, j) of the relative entropy; +inf when p > 0 meets q = 0.
double max_relative_entropy(const Behavior& b, const FloatBehavior& q);

/// Dispatches on the measure; b_ref is required for RobustnessRef.
QuantifierReport quantify(Measure m, const Scenario& s, const Behavior& b, const VertexSet& v,
                          const QuantifierOptions& options = {}, const Behavior* b_ref = nullptr,
                          const KlOptions& kl = {});

/// Re-checks the witnesses of a report: exactly for LP measures, within 1e-9
/// for relative entropy.
bool verify_report(const Scenario& s, const Behavior& b, const VertexSet& v, const QuantifierReport& r,
                   const Behavior* b_ref = nullptr);

}  // namespace ctxlab
