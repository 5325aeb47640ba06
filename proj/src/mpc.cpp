#include "kcenter/mpc.hpp"

#include <cmath>

namespace kcenter::mpc {

std::size_t MpcConfig::local_space_for(std::size_t n, double delta, double c_s) {
  const double s = std::ceil(c_s * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), delta));
  return std::max<std::size_t>(1, static_cast<std::size_t>(s));
}

void MpcConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::kInvalidParams, "delta must lie in (0, 1)");
  if (!(rho > 0.0)) throw Error(ErrorKind::kInvalidParams, "rho must be positive");
  if (local_space_words < 1) throw Error(ErrorKind::kInvalidParams, "local_space_words must be >= 1");
  if (machine_count < 1) throw Error(ErrorKind::kInvalidParams, "machine_count must be >= 1");
  if (machine_count * local_space_words < n) {
    throw Error(ErrorKind::kCapacityExceeded, "machine_count * local_space_words must be >= n");
  }
  if (primitive_round_cost < 1) throw Error(ErrorKind::kInvalidParams, "primitive_round_cost must be >= 1");
}

const char* to_string(Primitive p) noexcept {
  switch (p) {
    case Primitive::kSort:
      return "sort";
    case Primitive::kPrefixSum:
      return "prefix_sum";
    case Primitive::kBroadcast:
      return "broadcast";
  }
  return "unknown";
}

}  // namespace kcenter::mpc
