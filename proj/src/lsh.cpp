#include "kcenter/lsh.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "kcenter/error.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

double pstable_collision_probability(double c, double w) noexcept {
  if (c <= 0.0) return 1.0;
  const double t = w / c;
  const double phi_neg = 0.5 * std::erfc(t / std::numbers::sqrt2);
  return 1.0 - 2.0 * phi_neg - (2.0 / (std::sqrt(2.0 * std::numbers::pi) * t)) * (1.0 - std::exp(-t * t / 2.0));
}

LshCalibration calibrate_lsh(std::size_t n, double rho, double w) {
  if (n < 2) throw Error(ErrorKind::kInvalidParams, "LSH calibration needs n >= 2");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::kInvalidParams, "rho must lie in (0, 1)");
  if (!(w > 0.0)) throw Error(ErrorKind::kInvalidParams, "bucket width must be positive");
  const double ln_n = std::log(static_cast<double>(n));
  const double p1 = pstable_collision_probability(1.0, w);
  LshCalibration cal;
  cal.K = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(rho * ln_n / std::log(1.0 / p1))));
  const double target = std::pow(static_cast<double>(n), -1.0 / static_cast<double>(cal.K));

  // p(c) decreases in c; bisect for p(c) = target.
  double lo = 1e-9;
  double hi = 1.0;
  while (pstable_collision_probability(hi, w) > target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pstable_collision_probability(mid, w) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  cal.c_rho = std::max(2.0, hi);
  cal.p_near = std::pow(p1, static_cast<double>(cal.K));
  cal.p_far = std::pow(pstable_collision_probability(cal.c_rho, w), static_cast<double>(cal.K));
  return cal;
}

LshParams LshParams::defaults(std::size_t n, double rho, double w) {
  LshParams p;
  p.n = std::max<std::size_t>(n, 2);
  p.rho = rho;
  p.bucket_width_factor = w;
  const auto cal = calibrate_lsh(p.n, rho, w);
  p.K = cal.K;
  p.c_rho = cal.c_rho;
  p.L = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(p.n), rho)));
  p.I = static_cast<std::size_t>(std::ceil(2.0 * std::log2(static_cast<double>(p.n))));
  return p;
}

void LshParams::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::kInvalidParams, "LSH radius must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::kInvalidParams, "rho must lie in (0, 1)");
  if (!(c_rho > 1.0)) throw Error(ErrorKind::kInvalidParams, "c_rho must exceed 1");
  if (L < 1 || K < 1 || I < 1) throw Error(ErrorKind::kInvalidParams, "L, K and I must be >= 1");
  if (max_hubs_per_bucket < 1) throw Error(ErrorKind::kInvalidParams, "max_hubs_per_bucket must be >= 1");
  if (!(bucket_width_factor > 0.0)) throw Error(ErrorKind::kInvalidParams, "bucket width must be positive");
}

namespace {

std::shared_ptr<const std::vector<double>> draw_directions(const LshParams& params, std::size_t dim) {
  auto dirs = std::make_shared<std::vector<double>>(params.L * params.K * dim);
  std::mt19937_64 rng(derive_seed(params.seed, {0x646972ULL}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : *dirs) v = gauss(rng);
  return dirs;
}

}  // namespace

LshFamily::LshFamily(const LshParams& params, std::size_t dim) : params_(params), dim_(dim) {
  params_.validate();
  if (dim_ == 0 || dim_ > kMaxDim) throw Error(ErrorKind::kInvalidParams, "unsupported dimension");
  inv_width_ = 1.0 / (params_.bucket_width_factor * params_.r);
  directions_ = draw_directions(params_, dim_);
  draw_offsets(derive_seed(params_.seed, {0x6f6666ULL}));
}

LshFamily::LshFamily(LshParams params, std::size_t dim, std::shared_ptr<const std::vector<double>> directions,
                     std::uint64_t offset_seed)
    : params_(params), dim_(dim), directions_(std::move(directions)) {
  params_.validate();
  inv_width_ = 1.0 / (params_.bucket_width_factor * params_.r);
  draw_offsets(offset_seed);
}

void LshFamily::draw_offsets(std::uint64_t offset_seed) {
  offsets_.resize(params_.L * params_.K);
  for (std::size_t i = 0; i < offsets_.size(); ++i) offsets_[i] = unit_interval(mix(offset_seed, i));
}

LshFamily LshFamily::at_radius(double r, std::uint64_t offset_seed) const {
  LshParams p = params_;
  p.r = r;
  return LshFamily(p, dim_, directions_, offset_seed);
}

BucketId LshFamily::hash(std::size_t ell, std::span<const double> p) const {
  if (p.size() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "point has dimension " + std::to_string(p.size()) + ", family " + std::to_string(dim_));
  }
  if (ell >= params_.L) throw Error(ErrorKind::kInvalidParams, "function index out of range");
  return hash_unchecked(ell, p.data());
}

}  // namespace kcenter
