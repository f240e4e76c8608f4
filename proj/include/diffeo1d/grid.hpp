#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace diffeo1d {

// Standard sample grid on [0,1]: a uniform middle block glued to
// dyadic-geometric tails at both endpoints (where all the invariants
// of interval diffeomorphisms concentrate their behavior).
//
// Left tail reaches 2^-(7+levels); the right tail stops at 1 - 2^-52,
// the last scale at which 1 - w is still a distinct double.
struct GridSpec {
  std::size_t mid_cells = 4096;  // power of two >= 256
  int levels = 64;               // geometric levels per end, ratio 1/2
  int sub = 8;                   // log-uniform subdivisions per level
};

inline std::vector<double> standard_grid(const GridSpec& spec = {}) {
  if (spec.mid_cells < 256 || (spec.mid_cells & (spec.mid_cells - 1)) != 0)
    throw std::invalid_argument("standard_grid: mid_cells must be a power of two >= 256");
  const int k0 = 7;  // middle block spans [2^-7, 1 - 2^-7]
  const double xm = std::ldexp(1.0, -k0);
  std::vector<double> xs;
  xs.reserve(spec.mid_cells + 2 * spec.levels * spec.sub + 16);
  xs.push_back(0.0);
  const int kmax_left = k0 + spec.levels - 1;
  for (int k = kmax_left; k >= k0; --k) {
    const double lo = std::ldexp(1.0, -(k + 1));
    for (int j = (k == kmax_left ? 0 : 1); j < spec.sub; ++j)
      xs.push_back(lo * std::pow(2.0, double(j) / spec.sub));
  }
  for (std::size_t i = 0; i <= spec.mid_cells; ++i)
    xs.push_back(xm + (1.0 - 2.0 * xm) * double(i) / double(spec.mid_cells));
  const int kmax_right = std::min(k0 + spec.levels - 1, 52);
  for (int k = k0; k <= kmax_right; ++k) {
    const double lo = std::ldexp(1.0, -(k + 1));
    for (int j = 1; j <= (k == kmax_right ? spec.sub : spec.sub - 1); ++j)
      xs.push_back(1.0 - lo * std::pow(2.0, 1.0 - double(j) / spec.sub));
  }
  xs.push_back(1.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// Coarser probe grid for sup-norm style checks (commutation defects,
// path continuity). Uniform core plus a few dyadic points at each end.
inline std::vector<double> probe_grid(std::size_t uniform = 512, int end_levels = 24) {
  std::vector<double> xs;
  xs.reserve(uniform + 2 * end_levels + 2);
  for (std::size_t i = 0; i <= uniform; ++i) xs.push_back(double(i) / double(uniform));
  for (int k = 2; k < 2 + end_levels; ++k) {
    const double w = std::ldexp(1.0, -k);
    xs.push_back(w);
    xs.push_back(1.0 - w);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace diffeo1d
