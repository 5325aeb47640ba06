#include "kcenter/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "kcenter/error.hpp"

namespace kcenter {

double iter_log(double n, std::size_t j) {
  double v = n;
  for (std::size_t i = 0; i < j; ++i) v = std::max(2.0, std::log2(v));
  return v;
}

std::size_t log_star(double n) {
  std::size_t count = 0;
  double v = n;
  while (v > 1.0) {
    v = std::log2(v);
    ++count;
  }
  return count;
}

std::size_t log_star_of_pow2(double exponent) { return exponent <= 0.0 ? 0 : 1 + log_star(exponent); }

std::size_t clamp_alpha(std::size_t alpha, std::size_t n, std::size_t c0) {
  const std::size_t ls = log_star(static_cast<double>(n));
  const std::size_t hi = ls > c0 ? std::max<std::size_t>(1, ls - c0) : 1;
  return std::clamp<std::size_t>(alpha, 1, hi);
}

UniformSchedule UniformSchedule::make(double t, std::size_t n, double delta, const ScheduleConstants& c) {
  if (!(t >= 1.0)) throw Error(ErrorKind::kInvalidParams, "uniform schedule needs t >= 1");
  UniformSchedule u;
  u.t = t;
  u.tau = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c.c_tau * iter_log(std::max(t, 2.0), 2))));
  const double nn = std::max<double>(static_cast<double>(n), 2.0);
  u.s.push_back(t);
  u.p.push_back(std::min(1.0, c.c_p * std::log2(nn) / std::pow(nn, delta)));
  for (std::size_t i = 1; i <= u.tau; ++i) {
    u.s.push_back(std::sqrt(u.s.back()));
    u.p.push_back(std::min(1.0, 1.0 / u.s.back()));
  }
  return u;
}

double ExtSchedule::cost_certificate(double c_rho) const {
  double sum = 0.0;
  for (std::size_t j = 0; j < alpha; ++j) sum += r_stage[j] * static_cast<double>(uniform[j].tau);
  return 4.0 * c_rho * (sum + static_cast<double>(beta) * r);
}

std::size_t ExtSchedule::sample_solve_calls() const {
  std::size_t calls = beta;
  for (const auto& u : uniform) calls += u.tau;
  return calls;
}

ExtSchedule ExtSchedule::make(std::size_t n, std::size_t dim, std::size_t alpha, double r, double delta,
                              const ScheduleConstants& c) {
  if (alpha < 1) throw Error(ErrorKind::kInvalidParams, "alpha must be >= 1");
  if (!(r > 0.0)) throw Error(ErrorKind::kInvalidParams, "radius must be positive");
  ExtSchedule e;
  e.n = n;
  e.alpha = alpha;
  e.r = r;
  const double nn = std::max<double>(static_cast<double>(n), 2.0);
  e.t.push_back(nn);
  for (std::size_t j = 1; j <= alpha; ++j) {
    const double prev = e.t.back();
    const double next =
        std::ceil(c.c_t * iter_log(prev, 1) * std::pow(iter_log(prev, 2), static_cast<double>(dim + 2)));
    e.t.push_back(std::min(prev, next));
  }
  for (std::size_t j = 0; j < alpha; ++j) {
    e.r_stage.push_back(r / iter_log(e.t[j], 2));
    e.uniform.push_back(UniformSchedule::make(e.t[j], n, delta, c));
  }
  e.beta = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c.c_beta * iter_log(nn, alpha + 1))));
  return e;
}

std::size_t center_count_threshold(std::size_t k, std::size_t n, std::size_t alpha, double c_add) {
  if (k < 1) throw Error(ErrorKind::kInvalidParams, "k must be >= 1");
  const double L = std::max(2.0, iter_log(std::max<double>(static_cast<double>(n), 2.0), alpha));
  const double kk = static_cast<double>(k);
  // Tiny relative slack keeps exact products such as 10000 * 17/16 from
  // rounding up by one.
  const double value = kk * (1.0 + 1.0 / L) + c_add * L * L * L;
  return static_cast<std::size_t>(std::ceil(value - 1e-9 * value));
}

std::size_t default_psi(std::size_t n, double delta, double c_psi) {
  const double base = std::max(static_cast<double>(std::max<std::size_t>(n, 2)), std::log2(std::max(delta, 2.0)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c_psi * std::log2(base))));
}

std::size_t default_phi(double delta) {
  if (delta <= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log2(delta))) + 1;
}

}  // namespace kcenter
