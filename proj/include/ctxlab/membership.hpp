#pragma once

#include <optional>
#include <vector>

#include "ctxlab/lp.hpp"
#include "ctxlab/polytope.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab {

/// Weights mu[i][kappa] of preparation i on assignment vertex kappa.
struct NCModel {
  std::size_t preparations = 0;
  std::size_t vertices = 0;
  std::vector<Rational> mu;

  NCModel() = default;
  NCModel(std::size_t i, std::size_t v) : preparations(i), vertices(v), mu(i * v) {}

  Rational& operator()(std::size_t i, std::size_t kappa) { return mu[i * vertices + kappa]; }
  const Rational& operator()(std::size_t i, std::size_t kappa) const { return mu[i * vertices + kappa]; }
  bool operator==(const NCModel&) const = default;
};

struct MembershipResult {
  bool noncontextual = false;
  std::optional<NCModel> model;
  std::optional<std::vector<Rational>> witness;  // Farkas vector over the rows of membership_program
  std::size_t pivots = 0;
};

/// Feasibility program in the variables mu[i][kappa] (flat i*V + kappa), with
/// rows in this order: normalization per i, preparation equivalence per
/// (s, kappa), reproduction per (i, j, k).
LinearProgram membership_program(const Scenario& s, const Behavior& b, const VertexSet& v);

/// Exact membership test. Throws StructuralError on shape mismatch or a vertex
/// set enumerated for another scenario. A table that is not a valid behavior
/// simply has no model and comes back contextual with a witness.
MembershipResult check_membership(const Scenario& s, const Behavior& b, const VertexSet& v);

/// Behavior reproduced by a model: p(k|j,i) = sum_kappa xi_{k|j}(kappa) mu[i][kappa].
Behavior model_behavior(const Scenario& s, const VertexSet& v, const NCModel& m);

/// Nonnegativity, normalization, preparation equivalences and reproduction of b,
/// all exact.
bool verify_model(const Scenario& s, const Behavior& b, const VertexSet& v, const NCModel& m);

/// Exact Farkas check of a contextuality witness.
bool verify_witness(const Scenario& s, const Behavior& b, const VertexSet& v, const std::vector<Rational>& witness);

namespace detail {

// Appends I*V nonnegative variables for a model block and its preparation
// equivalence rows; returns the offset of the block.
std::size_t add_model_block(LinearProgram& lp, const Scenario& s, const VertexSet& v);

// Coefficients of sum_kappa xi_{k|j}(kappa) mu[i][kappa] for block `offset`,
// appended to `row` with the given scale.
void add_reproduction_terms(LinearRow<Rational>& row, const VertexSet& v, std::size_t offset, std::size_t i,
                            std::size_t event, const Rational& scale);

NCModel extract_model(const std::vector<Rational>& x, std::size_t offset, std::size_t preparations,
                      std::size_t vertices);

}  // namespace detail

}  // namespace ctxlab
