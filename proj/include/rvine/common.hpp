#pragma once

#include <stdexcept>
#include <string>

namespace rvine {

struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Observations and propagated conditional CDF values are kept this far away
// from 0 and 1; densities diverge at the boundary.
constexpr double unit_eps = 1e-10;

inline double clamp_unit(double u) {
  if (u < unit_eps) return unit_eps;
  if (u > 1.0 - unit_eps) return 1.0 - unit_eps;
  return u;
}

inline void require_unit_open(double u, const char* what) {
  if (!(u > 0.0) || !(u < 1.0))
    throw validation_error(std::string(what) + " must lie strictly inside (0,1)");
}

}  // namespace rvine
