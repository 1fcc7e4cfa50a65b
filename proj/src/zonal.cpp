#include "capsim/zonal.hpp"

#include <algorithm>
#include <cmath>

namespace capsim {

namespace {

// cos(a) - cos(b) = 2 sin((a+b)/2) sin((b-a)/2); avoids cancellation for
// nearby angles so band sums hold the Gauss identity at 1e-12 up to N ~ 1e4.
double cos_diff(double a, double b) {
  return 2.0 * std::sin(0.5 * (a + b)) * std::sin(0.5 * (b - a));
}

void check_thetas(const std::vector<double>& thetas) {
  double prev = 0.0;
  for (double t : thetas) {
    if (!(t > prev && t < kPi))
      throw OrderingError("interface co-latitudes must be strictly increasing in (0,pi)");
    prev = t;
  }
}

// theta_k with the closures theta_0 = 0, theta_N = pi.
double theta_at(const ZonalCap& cap, int k) {
  if (k <= 0) return 0.0;
  if (k >= cap.bands()) return kPi;
  return cap.thetas[static_cast<std::size_t>(k - 1)];
}

// C(k) = sum_{j<=k} omega_j (cos theta_{j-1} - cos theta_j)
double band_prefix(const ZonalCap& cap, int k) {
  KahanSum acc;
  for (int j = 1; j <= k; ++j)
    acc.add(cap.omegas[static_cast<std::size_t>(j - 1)] *
            cos_diff(theta_at(cap, j - 1), theta_at(cap, j)));
  return acc.value();
}

}  // namespace

ZonalCap make_gauss_cap(std::vector<double> thetas, std::vector<double> omegas_free,
                        double gamma) {
  check_thetas(thetas);
  if (omegas_free.size() != thetas.size())
    throw OrderingError("make_gauss_cap: need exactly N-1 free levels for N-1 interfaces");
  ZonalCap cap;
  cap.thetas = std::move(thetas);
  cap.omegas = std::move(omegas_free);
  cap.omegas.push_back(0.0);
  cap.gamma = gamma;
  int n = cap.bands();
  // Solve sum omega_k (cos theta_k - cos theta_{k-1}) = 0 for omega_N; the
  // last weight cos(pi) - cos(theta_{N-1}) never vanishes.
  KahanSum acc;
  for (int k = 1; k < n; ++k)
    acc.add(cap.omegas[static_cast<std::size_t>(k - 1)] *
            -cos_diff(theta_at(cap, k - 1), theta_at(cap, k)));
  double w_last = -cos_diff(theta_at(cap, n - 1), kPi);
  cap.omegas.back() = -acc.value() / w_last;
  return cap;
}

double gauss_residual(const ZonalCap& cap) {
  KahanSum acc;
  for (int k = 1; k <= cap.bands(); ++k)
    acc.add(cap.omegas[static_cast<std::size_t>(k - 1)] *
            -cos_diff(theta_at(cap, k - 1), theta_at(cap, k)));
  return acc.value();
}

bool is_monotone(const ZonalCap& cap) {
  bool inc = true, dec = true;
  for (std::size_t k = 1; k < cap.omegas.size(); ++k) {
    inc = inc && cap.omegas[k - 1] < cap.omegas[k];
    dec = dec && cap.omegas[k - 1] > cap.omegas[k];
  }
  if (cap.gamma > 0.0) return dec;
  if (cap.gamma < 0.0) return inc;
  return inc || dec;
}

double dtheta_G_star(const ZonalCap& cap, double theta) {
  if (!(theta > 0.0 && theta < kPi))
    throw DomainError("dtheta_G_star: theta outside (0,pi)");
  // Band selection with right-open convention [theta_{k0-1}, theta_k0).
  int k0 = 1 + static_cast<int>(std::upper_bound(cap.thetas.begin(), cap.thetas.end(), theta) -
                                cap.thetas.begin());
  KahanSum acc;
  for (int k = 1; k < k0; ++k)
    acc.add(cap.omegas[static_cast<std::size_t>(k - 1)] *
            cos_diff(theta_at(cap, k - 1), theta_at(cap, k)));
  acc.add(cap.omegas[static_cast<std::size_t>(k0 - 1)] * cos_diff(theta_at(cap, k0 - 1), theta));
  return acc.value() / std::sin(theta);
}

double phi_dot_star(const ZonalCap& cap, double theta) {
  return dtheta_G_star(cap, theta) / std::sin(theta) + cap.gamma;
}

double alpha(const ZonalCap& cap, int k0, double mu) {
  if (k0 < 1 || k0 > cap.interfaces()) throw IndexError("alpha: interface index out of range");
  double t0 = theta_at(cap, k0);
  double t1 = t0 + mu;
  if (!(t1 > theta_at(cap, k0 - 1) && t1 < theta_at(cap, k0 + 1)))
    throw RangeError("alpha: theta_k0 + mu leaves the adjacent bands");
  if (mu == 0.0) return 0.0;
  return phi_dot_star(cap, t1) - phi_dot_star(cap, t0);
}

DriftExpansion alpha_expansion(const ZonalCap& cap, int k0, int side) {
  if (k0 < 1 || k0 > cap.interfaces())
    throw IndexError("alpha_expansion: interface index out of range");
  if (side != 1 && side != -1) throw IndexError("alpha_expansion: side must be +1 or -1");
  double t0 = theta_at(cap, k0);
  double s = std::sin(t0), c = std::cos(t0);
  // Both one-sided derivatives share C(k0) = sin^2(t0) * Phi_dot(t0); only
  // the local band level switches across the interface.
  double C = band_prefix(cap, k0);
  double w = cap.omegas[static_cast<std::size_t>(side > 0 ? k0 : k0 - 1)];
  double s2 = s * s;
  DriftExpansion ex;
  ex.a1 = (w * s2 - 2.0 * C * c) / (s2 * s);
  ex.a2 = (2.0 * C * (s2 + 3.0 * c * c) - 3.0 * w * s2 * c) / (2.0 * s2 * s2);
  ex.k0 = k0;
  ex.side = side;
  return ex;
}

double find_mu_hat(const ZonalCap& cap, int k0, int side) {
  if (k0 < 1 || k0 > cap.interfaces())
    throw IndexError("find_mu_hat: interface index out of range");
  if (side != 1 && side != -1) throw IndexError("find_mu_hat: side must be +1 or -1");
  double band = side > 0 ? theta_at(cap, k0 + 1) - theta_at(cap, k0)
                         : theta_at(cap, k0) - theta_at(cap, k0 - 1);
  const int n_scan = 512;
  const double lo_frac = 1e-9, hi_frac = 1.0 - 1e-9;
  double prev_mu = lo_frac * band;
  double prev = alpha(cap, k0, side * prev_mu);
  for (int i = 1; i <= n_scan; ++i) {
    double m = (lo_frac + (hi_frac - lo_frac) * i / n_scan) * band;
    double a = alpha(cap, k0, side * m);
    if (a == 0.0) return m;
    if ((a > 0.0) != (prev > 0.0)) {
      double lo = prev_mu, hi = m;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double v = alpha(cap, k0, side * mid);
        if (v == 0.0) return mid;
        if ((v > 0.0) == (prev > 0.0))
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = a;
    prev_mu = m;
  }
  return band;  // no sign change: the whole adjacent band is valid
}

}  // namespace capsim
