#pragma once

#include <cstddef>
#include <vector>

namespace kcenter {

/// Named constants behind the Theta(.) terms of the refinement schedules.
struct ScheduleConstants {
  double c_tau = 1.0;
  double c_p = 2.0;
  double c_t = 1.0;
  double c_beta = 2.0;
  double c_psi = 1.0;
  double c_add = 8.0;
  std::size_t c0 = 3;
};

/// j-fold base-2 logarithm of n; each step is clamped below at 2.
/// iter_log(n, 0) = n.
double iter_log(double n, std::size_t j);

/// Number of base-2 logarithms needed to bring n down to <= 1.
std::size_t log_star(double n);
/// log_star(2^exponent) for exponents whose power overflows a double.
std::size_t log_star_of_pow2(double exponent);

/// Alpha clamped to [1, max(1, log_star(n) - c0)].
std::size_t clamp_alpha(std::size_t alpha, std::size_t n, std::size_t c0);

struct UniformSchedule {
  double t = 2.0;
  std::size_t tau = 1;
  std::vector<double> s;  // s_0 .. s_tau
  std::vector<double> p;  // p_0 .. p_tau; call i uses p_{i-1}

  /// tau = max(1, ceil(c_tau log log t)), s_0 = t, s_i = sqrt(s_{i-1}),
  /// p_0 = min(1, c_p log2 n / n^delta), p_i = min(1, 1 / s_i).
  static UniformSchedule make(double t, std::size_t n, double delta, const ScheduleConstants& c);
};

struct ExtSchedule {
  std::size_t n = 0;
  std::size_t alpha = 1;
  std::size_t beta = 1;
  double r = 1.0;
  std::vector<double> t;                  // t_0 .. t_alpha
  std::vector<double> r_stage;            // r_0 .. r_{alpha-1}
  std::vector<UniformSchedule> uniform;   // phase 1.j uses uniform[j-1]

  /// 4 c_rho (sum_j r_{j-1} tau_{j-1} + beta r).
  double cost_certificate(double c_rho) const;
  std::size_t sample_solve_calls() const;

  /// t_0 = n, t_j = min(t_{j-1}, ceil(c_t log t_{j-1} (log log t_{j-1})^{d+2})),
  /// r_j = r / log log t_j, beta = ceil(c_beta log^{(alpha+1)} n).
  /// `alpha` is used as given; clamp it first if required.
  static ExtSchedule make(std::size_t n, std::size_t dim, std::size_t alpha, double r, double delta,
                          const ScheduleConstants& c);
};

/// ceil(k (1 + 1/L) + c_add L^3) with L = iter_log(n, alpha) (>= 2).
std::size_t center_count_threshold(std::size_t k, std::size_t n, std::size_t alpha, double c_add);

/// psi = ceil(c_psi log2 max(n, log2 delta)), at least 1.
std::size_t default_psi(std::size_t n, double delta, double c_psi);
/// phi = ceil(log2 delta) + 1 (1 when delta <= 1).
std::size_t default_phi(double delta);

}  // namespace kcenter
