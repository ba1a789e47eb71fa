#pragma once

#include <random>

#include "ctxlab/membership.hpp"

namespace ctxlab {

/// Parity-oblivious scenario: I=4 with i = 2*b0 + b1, J=2, K=2 and
/// 1/2 P0 + 1/2 P3 ~ 1/2 P1 + 1/2 P2.
Scenario pom_scenario();

/// p(b_j | j, i) = cos^2(pi/8) = 1/2 + sqrt(2)/4, with sqrt(2) truncated to
/// `digits` decimals.
Behavior pom_behavior(unsigned digits = 200);

/// Random point of NC(S), as the image of a random element of the model
/// polytope. Exact and deterministic per generator state.
Behavior random_nc_behavior(const Scenario& s, const VertexSet& v, std::mt19937_64& rng);

/// Same, also returning the model that produced it.
std::pair<Behavior, NCModel> random_nc_behavior_with_model(const Scenario& s, const VertexSet& v,
                                                           std::mt19937_64& rng);

/// Random valid behavior: a vertex of the behavior polytope (random objective)
/// mixed with a random noncontextual behavior; pure vertices with probability
/// 1/4.
Behavior random_valid_behavior(const Scenario& s, const VertexSet& v, std::mt19937_64& rng);

/// Vertex of {valid behaviors of s} maximizing a random objective.
Behavior random_behavior_vertex(const Scenario& s, std::mt19937_64& rng);

}  // namespace ctxlab
