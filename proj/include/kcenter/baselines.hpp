#pragma once

#include <cstddef>
#include <vector>

#include "kcenter/geometry.hpp"

namespace kcenter {

/// Farthest-first traversal from the lowest-id point; exactly min(k, n)
/// centers and cost <= 2 OPT.
std::vector<Index> gonzalez_baseline(const PointSet& points, std::size_t k);

struct BruteForceResult {
  std::vector<Index> centers;
  double opt = 0.0;
};

/// C(n, k); infinity once the value exceeds `cap`.
double binomial_capped(std::size_t n, std::size_t k, double cap);

/// Whether brute_force_opt accepts (n, k): C(n, k) <= 1e6 and at most
/// 2e9 distance evaluations.
bool brute_force_feasible(std::size_t n, std::size_t k);

/// Exact optimum over all k-subsets (first in lexicographic order on ties).
/// Throws TooLarge.
BruteForceResult brute_force_opt(const PointSet& points, std::size_t k);

}  // namespace kcenter
