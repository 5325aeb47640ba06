#pragma once

// p-stable (Gaussian) locality-sensitive hashing for Euclidean space.
//
// One elementary hash is floor(a.x / (w r) + u) with a ~ N(0, I_d) and
// u ~ U[0, 1). A family function f_l concatenates K of them; the K-tuple is
// folded into a single 64-bit BucketId.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kcenter/geometry.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

using BucketId = std::uint64_t;

/// Collision probability of one elementary hash for two points at distance
/// `c` when the bucket width is `w` (both in units of r).
double pstable_collision_probability(double c, double w) noexcept;

struct LshCalibration {
  std::size_t K = 1;
  double c_rho = 2.0;
  double p_near = 0.0;  // p(1)^K
  double p_far = 0.0;   // p(c_rho)^K
};

/// K = max(1, floor(rho ln n / ln(1/p(1)))); c_rho is the smallest c with
/// p(c)^K <= 1/n, floored at 2.
LshCalibration calibrate_lsh(std::size_t n, double rho, double w);

struct LshParams {
  double r = 1.0;
  double rho = 0.5;
  std::size_t n = 2;
  double c_rho = 4.0;
  std::size_t L = 1;
  std::size_t K = 1;
  double bucket_width_factor = 1.0;  // w
  std::size_t I = 1;
  std::size_t max_hubs_per_bucket = 10;
  std::uint64_t seed = 0;

  /// Calibrated K and c_rho, L = ceil(n^rho), I = ceil(2 log2 n).
  static LshParams defaults(std::size_t n, double rho, double w = 1.0);
  /// Throws InvalidParams.
  void validate() const;
};

class LshFamily {
 public:
  /// Draws L * K Gaussian directions and offsets from `params.seed`.
  LshFamily(const LshParams& params, std::size_t dim);

  const LshParams& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return dim_; }

  /// f_ell(p). Throws DimensionMismatch / InvalidParams (ell >= L).
  BucketId hash(std::size_t ell, std::span<const double> p) const;
  BucketId hash(std::size_t ell, const Point& p) const { return hash(ell, std::span<const double>(p.coords)); }

  /// The K x dim direction block of f_ell, row-major.
  std::span<const double> directions(std::size_t ell) const noexcept {
    return {directions_->data() + ell * params_.K * dim_, params_.K * dim_};
  }

  /// Same directions, radius `r`, offsets redrawn from `offset_seed`.
  LshFamily at_radius(double r, std::uint64_t offset_seed) const;

  /// Unchecked f_ell(p) for hot loops.
  BucketId hash_unchecked(std::size_t ell, const double* p) const noexcept {
    switch (dim_) {
      case 1: return hash_fixed<1>(ell, p);
      case 2: return hash_fixed<2>(ell, p);
      case 3: return hash_fixed<3>(ell, p);
      case 4: return hash_fixed<4>(ell, p);
      default: return hash_dynamic(ell, p);
    }
  }

 private:
  LshFamily(LshParams params, std::size_t dim, std::shared_ptr<const std::vector<double>> directions,
            std::uint64_t offset_seed);
  void draw_offsets(std::uint64_t offset_seed);

  template <std::size_t D>
  BucketId hash_fixed(std::size_t ell, const double* p) const noexcept {
    const std::size_t K = params_.K;
    const double* a = directions_->data() + ell * K * D;
    const double* u = offsets_.data() + ell * K;
    std::uint64_t h = ell_salt(ell);
    for (std::size_t k = 0; k < K; ++k, a += D) {
      double dot = 0.0;
      for (std::size_t c = 0; c < D; ++c) dot += a[c] * p[c];
      h = fold(h, cell_of(dot * inv_width_ + u[k]));
    }
    return splitmix64(h);
  }

  BucketId hash_dynamic(std::size_t ell, const double* p) const noexcept {
    const std::size_t K = params_.K;
    const double* a = directions_->data() + ell * K * dim_;
    const double* u = offsets_.data() + ell * K;
    std::uint64_t h = ell_salt(ell);
    for (std::size_t k = 0; k < K; ++k, a += dim_) {
      double dot = 0.0;
      for (std::size_t c = 0; c < dim_; ++c) dot += a[c] * p[c];
      h = fold(h, cell_of(dot * inv_width_ + u[k]));
    }
    return splitmix64(h);
  }

  static std::int64_t cell_of(double v) noexcept {
    auto cell = static_cast<std::int64_t>(v);
    return cell - (v < static_cast<double>(cell) ? 1 : 0);
  }

  static std::uint64_t ell_salt(std::size_t ell) noexcept { return mix(0x6c736866ULL, ell); }
  static std::uint64_t fold(std::uint64_t h, std::int64_t cell) noexcept {
    return (h ^ static_cast<std::uint64_t>(cell)) * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL;
  }

  LshParams params_;
  std::size_t dim_;
  double inv_width_;
  std::shared_ptr<const std::vector<double>> directions_;  // L x K x dim
  std::vector<double> offsets_;                            // L x K
};

}  // namespace kcenter
