#ifndef CAPSIM_SRC_FAST_LOG_HPP
#define CAPSIM_SRC_FAST_LOG_HPP

#include <bit>
#include <cstdint>

namespace capsim::detail {

// Vectorizable natural log for positive normal doubles, ~1e-13 relative
// accuracy: mantissa reduced to [1/sqrt2, sqrt2) by exponent arithmetic,
// then 2*atanh((m-1)/(m+1)) by a degree-13 odd polynomial.
inline double fast_log(double x) {
  constexpr std::uint64_t kOff = 0x3fe6a09e667f3bcdULL;
  std::uint64_t ib = std::bit_cast<std::uint64_t>(x);
  std::int64_t e = static_cast<std::int64_t>(ib - kOff) >> 52;
  double m = std::bit_cast<double>(ib - (static_cast<std::uint64_t>(e) << 52));
  double r = (m - 1.0) / (m + 1.0);
  double s = r * r;
  double p = 2.0 * r *
             (1.0 + s * (1.0 / 3 + s * (1.0 / 5 + s * (1.0 / 7 + s * (1.0 / 9 +
                          s * (1.0 / 11 + s * (1.0 / 13)))))));
  return p + 0.6931471805599453 * static_cast<double>(e);
}

}  // namespace capsim::detail

#endif
