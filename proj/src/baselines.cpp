#include "kcenter/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kcenter/error.hpp"
#include "kcenter/greedy.hpp"

namespace kcenter {

namespace {
constexpr double kMaxSubsets = 1e6;
constexpr double kMaxWork = 2e9;
}  // namespace

std::vector<Index> gonzalez_baseline(const PointSet& points, std::size_t k) {
  if (points.empty()) throw Error(ErrorKind::kEmptySet, "no points");
  if (k < 1) throw Error(ErrorKind::kInvalidParams, "k must be >= 1");
  const auto all = all_indices(points);
  const auto lowest = std::min_element(all.begin(), all.end(), [&](Index a, Index b) {
    return points.id(a) < points.id(b);
  });
  auto centers = farthest_first(points, all, *lowest, std::min(k, points.size()));
  std::sort(centers.begin(), centers.end());
  return centers;
}

double binomial_capped(std::size_t n, std::size_t k, double cap) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > cap) return std::numeric_limits<double>::infinity();
  }
  return std::round(c);
}

bool brute_force_feasible(std::size_t n, std::size_t k) {
  const std::size_t kk = std::min(k, n);
  const double subsets = binomial_capped(n, kk, kMaxSubsets);
  return subsets <= kMaxSubsets && subsets * static_cast<double>(n) * static_cast<double>(kk) <= kMaxWork;
}

BruteForceResult brute_force_opt(const PointSet& points, std::size_t k) {
  const std::size_t n = points.size();
  if (n == 0) throw Error(ErrorKind::kEmptySet, "no points");
  if (k < 1) throw Error(ErrorKind::kInvalidParams, "k must be >= 1");
  k = std::min(k, n);
  if (!brute_force_feasible(n, k)) {
    throw Error(ErrorKind::kTooLarge, "C(" + std::to_string(n) + ", " + std::to_string(k) + ") is too large");
  }

  // Distance table for small n; larger inputs only reach here with tiny k.
  std::vector<double> d;
  if (n <= 4096) {
    d.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = dist(points.coords(i), points.coords(j));
    }
  }
  auto between = [&](std::size_t p, Index c) {
    return d.empty() ? dist(points.coords(p), points.coords(c)) : d[p * n + c];
  };

  BruteForceResult best;
  best.opt = std::numeric_limits<double>::infinity();
  std::vector<Index> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = static_cast<Index>(i);
  while (true) {
    double worst = 0.0;
    for (std::size_t p = 0; p < n && worst < best.opt; ++p) {
      double near = std::numeric_limits<double>::infinity();
      for (Index c : pick) near = std::min(near, between(p, c));
      worst = std::max(worst, near);
    }
    if (worst < best.opt) {
      best.opt = worst;
      best.centers = pick;
    }
    // Next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace kcenter
