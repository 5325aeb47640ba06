#include "kcenter/planted.hpp"

#include <cmath>
#include <random>
#include <string>

#include "kcenter/error.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

namespace {
constexpr std::size_t kPlacementAttempts = 1000;
}

PlantedInstance generate_planted(std::size_t k, std::size_t n, std::size_t d, double r_star, double separation,
                                 std::uint64_t seed, double box_side) {
  if (k < 1 || n < k) throw Error(ErrorKind::kInvalidParams, "planted instance needs n >= k >= 1");
  if (d < 1 || d > kMaxDim) throw Error(ErrorKind::kInvalidParams, "planted dimension must be in [1, 8]");
  if (!(r_star > 0.0)) throw Error(ErrorKind::kInvalidParams, "r_star must be positive");
  if (!(separation > 2.0 * r_star)) throw Error(ErrorKind::kInvalidParams, "separation must exceed 2 r_star");
  if (box_side <= 0.0) {
    box_side = 2.0 * separation * std::ceil(std::pow(static_cast<double>(k), 1.0 / static_cast<double>(d)));
  }

  std::mt19937_64 rng(derive_seed(seed, {0x706c616eULL}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> centers;
  centers.reserve(k * d);
  std::vector<double> cand(d);
  for (std::size_t c = 0; c < k; ++c) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      for (auto& v : cand) v = unit(rng) * box_side;
      placed = true;
      for (std::size_t o = 0; o < c && placed; ++o) {
        placed = dist(std::span<const double>(cand), std::span<const double>(centers.data() + o * d, d)) >= separation;
      }
    }
    if (!placed) {
      throw Error(ErrorKind::kInfeasibleGeometry, "could not place center " + std::to_string(c) + " of " +
                                                      std::to_string(k) + " at separation " +
                                                      std::to_string(separation));
    }
    centers.insert(centers.end(), cand.begin(), cand.end());
  }

  std::vector<double> coords;
  coords.reserve(n * d);
  PlantedInstance inst;
  inst.k_true = k;
  inst.seed = seed;
  std::vector<double> dir(d);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t size = n / k + (c < n % k ? 1 : 0);
    inst.planted_centers.push_back(static_cast<Index>(inst.membership.size()));
    for (std::size_t m = 0; m < size; ++m) {
      const double* centre = centers.data() + c * d;
      if (m == 0) {
        coords.insert(coords.end(), centre, centre + d);
      } else {
        double norm = 0.0;
        do {
          norm = 0.0;
          for (auto& v : dir) {
            v = gauss(rng);
            norm += v * v;
          }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        const double radius = r_star * std::pow(unit(rng), 1.0 / static_cast<double>(d));
        for (std::size_t a = 0; a < d; ++a) coords.push_back(centre[a] + radius * dir[a] / norm);
      }
      inst.membership.push_back(static_cast<std::uint32_t>(c));
    }
  }

  std::vector<std::int64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(i);
  PointSet raw(d, std::move(coords), std::move(ids));
  if (n >= 2) {
    inst.scale = 1.0 / raw.min_pair_dist();
    inst.points = normalize(raw);
  } else {
    inst.points = std::move(raw);
  }
  inst.r_star = r_star * inst.scale;
  inst.separation = separation * inst.scale;
  return inst;
}

}  // namespace kcenter
