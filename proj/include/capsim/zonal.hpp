#ifndef CAPSIM_ZONAL_HPP
#define CAPSIM_ZONAL_HPP

#include <vector>

#include "capsim/geometry.hpp"

namespace capsim {

// Zonal cap: piecewise-constant absolute vorticity on latitude bands.
// Interfaces theta_1 < ... < theta_{N-1} in (0,pi); band k = [theta_{k-1},
// theta_k) carries level omega_k (theta_0 = 0, theta_N = pi).  Levels satisfy
// the Gauss constraint  sum_k omega_k (cos theta_k - cos theta_{k-1}) = 0.
struct ZonalCap {
  std::vector<double> thetas;  // N-1 interface co-latitudes
  std::vector<double> omegas;  // N band levels
  double gamma{};              // background rotation speed

  int bands() const { return static_cast<int>(omegas.size()); }
  int interfaces() const { return static_cast<int>(thetas.size()); }
};

// First- and second-order Taylor coefficients of alpha(mu) at interface k0,
// one-sided (side = +1 for mu > 0, -1 for mu < 0).
struct DriftExpansion {
  double a1{};
  double a2{};
  int k0{};
  int side{};
};

// Solves the Gauss constraint for the last level.  thetas strictly increasing
// in (0,pi); omegas_free are the first N-1 levels.
ZonalCap make_gauss_cap(std::vector<double> thetas, std::vector<double> omegas_free,
                        double gamma);

// Residual of the Gauss identity sum_k omega_k (cos theta_k - cos theta_{k-1}).
double gauss_residual(const ZonalCap& cap);

// Monotonicity condition of the filamentation theorem: levels strictly
// decreasing when gamma >= 0, strictly increasing when gamma <= 0 (gamma = 0
// accepts either strict ordering).
bool is_monotone(const ZonalCap& cap);

// d/dtheta of the stream function G[zeta*], closed form; bands are
// right-open, [theta_{k0-1}, theta_k0).  DomainError outside (0,pi).
double dtheta_G_star(const ZonalCap& cap, double theta);

// Angular drift rate of the zonal flow: dtheta_G_star / sin(theta) + gamma.
double phi_dot_star(const ZonalCap& cap, double theta);

// Drift gap alpha(mu) = phi_dot_star(theta_k0 + mu) - phi_dot_star(theta_k0).
// k0 is the 1-based interface index; theta_k0 + mu must stay strictly inside
// the two bands adjacent to the interface (RangeError otherwise).
double alpha(const ZonalCap& cap, int k0, double mu);

// One-sided Taylor coefficients of alpha at interface k0:
//   a1 = [w sin^2(t0) - 2 C cos(t0)] / sin^3(t0)
//   a2 = [2 C (sin^2(t0) + 3 cos^2(t0)) - 3 w sin^2(t0) cos(t0)] / (2 sin^4(t0))
// with t0 = theta_k0 and, for side +, C = C(k0), w = omega_{k0+1}; for side -,
// C = C(k0-1), w = omega_{k0}; C(k) = sum_{j<=k} omega_j (cos theta_{j-1} - cos theta_j).
DriftExpansion alpha_expansion(const ZonalCap& cap, int k0, int side);

// Smallest positive |mu| with alpha(cap, k0, side*|mu|) = 0, located by a sign
// scan plus bisection; returns the adjacent band width when alpha has no root
// on that side (the whole band is then a valid drift-gap interval).
double find_mu_hat(const ZonalCap& cap, int k0, int side);

// G[x3](theta) = -cos(theta)/2.
inline double g_x3(double theta) { return -0.5 * std::cos(theta); }

}  // namespace capsim

#endif
