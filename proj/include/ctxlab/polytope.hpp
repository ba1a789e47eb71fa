#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ctxlab/matrix.hpp"
#include "ctxlab/rational.hpp"
#include "ctxlab/scenario.hpp"

namespace ctxlab {

struct EnumerationOptions {
  std::uint64_t basis_budget = 10'000'000;
  unsigned workers = 1;
};

/// Vertices of {x >= 0, A x = b}, found by solving every basis of a row-reduced
/// copy of the system. Sorted lexicographically, no duplicates. Throws
/// ResourceError when the number of candidate bases exceeds the budget.
std::vector<std::vector<Rational>> enumerate_polytope_vertices(const RationalMatrix& a, const std::vector<Rational>& b,
                                                               const EnumerationOptions& options = {});

/// Rank of A, computed exactly.
std::size_t matrix_rank(const RationalMatrix& a);

/// x satisfies A x = b, x >= 0, and its active constraints have rank n.
bool is_polytope_vertex(const RationalMatrix& a, const std::vector<Rational>& b, std::span<const Rational> x);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Extremal noncontextual measurement assignment; entry j*K + k is xi_{k|j}.
using AssignmentVertex = std::vector<Rational>;

struct VertexSet {
  std::vector<AssignmentVertex> vertices;
  std::uint64_t scenario_fingerprint = 0;
  std::size_t events = 0;

  std::size_t size() const { return vertices.size(); }
  const AssignmentVertex& operator[](std::size_t n) const { return vertices[n]; }
};

/// Equality system of the assignment polytope: one normalization row per
/// measurement followed by one row (alpha - beta) per measurement equivalence.
void assignment_constraints(const Scenario& s, RationalMatrix& a, std::vector<Rational>& b);

/// All extremal points of the assignment polytope of a valid scenario.
VertexSet enumerate_vertices(const Scenario& s, const EnumerationOptions& options = {});

/// C(J*K, rank of the assignment equality system).
std::uint64_t vertex_count_bound(const Scenario& s);

/// Throws StructuralError when v was not enumerated for s.
void require_matching(const Scenario& s, const VertexSet& v);

}  // namespace ctxlab
