#pragma once

// Independent brute-force path for small scenarios: the noncontextual set as
// the convex hull of images of the model polytope's vertices.

#include <vector>

#include "ctxlab/membership.hpp"

namespace ctxlab {

struct NCBehaviorHull {
  std::vector<Behavior> extreme_behaviors;
  std::uint64_t scenario_fingerprint = 0;
};

/// Vertices of {mu >= 0, sum_kappa mu[i][kappa] = 1, preparation equivalences}
/// mapped to behaviors and deduplicated. Throws ResourceError over budget.
NCBehaviorHull enumerate_nc_hull(const Scenario& s, const VertexSet& v, const EnumerationOptions& options = {});

/// b is an exact convex combination of the hull points.
bool oracle_membership(const NCBehaviorHull& h, const Behavior& b);

/// Robustness by bisection over dyadic mixing weights, each step an exact
/// feasibility LP over hull weights. Returns the smallest feasible weight found;
/// the true value lies within eps below it.
Rational oracle_robustness(const NCBehaviorHull& h, const Behavior& b, const Rational& eps);

/// Contextual fraction recomputed from the hull: 1 - max lambda with
/// lambda * hull point <= b entry-wise.
Rational oracle_contextual_fraction(const NCBehaviorHull& h, const Behavior& b);

}  // namespace ctxlab
