#include "capsim/validate.hpp"

#include <algorithm>
#include <cmath>

namespace capsim {

ZonalCap random_cap(std::mt19937_64& rng, int n_bands, bool monotone) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    int n_ifaces = n_bands - 1;
    // interfaces: ordered draw in [0.4, pi-0.4] with gaps >= 0.3
    std::vector<double> t(static_cast<std::size_t>(n_ifaces));
    double lo = 0.4, hi = kPi - 0.4;
    double slack = hi - lo - 0.3 * (n_ifaces - 1);
    if (slack <= 0.0) throw RangeError("random_cap: too many bands");
    std::vector<double> u(static_cast<std::size_t>(n_ifaces));
    for (double& v : u) v = unif(rng);
    std::sort(u.begin(), u.end());
    for (int i = 0; i < n_ifaces; ++i)
      t[static_cast<std::size_t>(i)] = lo + 0.3 * i + slack * u[static_cast<std::size_t>(i)];
    std::vector<double> w(static_cast<std::size_t>(n_ifaces));
    if (monotone) {
      // strictly decreasing free levels in [-1, 1]
      for (double& v : w) v = 2.0 * unif(rng) - 1.0;
      std::sort(w.begin(), w.end(), std::greater<double>());
      for (std::size_t i = 1; i < w.size(); ++i)
        if (w[i - 1] - w[i] < 0.05) w[i] = w[i - 1] - 0.05;
    } else {
      for (double& v : w) v = 2.0 * unif(rng) - 1.0;
    }
    ZonalCap cap = make_gauss_cap(t, w, 0.0);
    // unit-size levels keep quadrature tolerances meaningful; the solved
    // last level can be large when the last band is thin
    double scale = 0.0;
    for (double v : cap.omegas) scale = std::max(scale, std::fabs(v));
    if (scale > 0.0)
      for (double& v : cap.omegas) v /= scale;
    if (!monotone || is_monotone(cap)) return cap;
  }
  throw RangeError("random_cap: failed to draw a monotone cap");
}

namespace {

UnitVec3 random_point(std::mt19937_64& rng, double theta_lo, double theta_hi) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double clo = std::cos(theta_hi), chi = std::cos(theta_lo);
  double c = clo + (chi - clo) * unif(rng);
  double theta = std::acos(c);
  double phi = kTwoPi * unif(rng);
  return chart_forward(SphPoint(theta, phi));
}

double min_interface_distance(const ZonalCap& cap, double theta) {
  double d = 1e300;
  for (double t : cap.thetas) d = std::min(d, std::fabs(theta - t));
  return d;
}

}  // namespace

std::vector<CheckResult> run_validation(const ExperimentConfig& cfg) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(cfg.seed);
  ZonalCap default_cap = cfg.cap();

  {  // zonal exactness of the contour evaluator against the closed forms
    CapState st = make_zonal_state(default_cap, 2048);
    ContourEvaluator eval(st);
    double err_t = 0.0, err_p = 0.0;
    for (int i = 0; i < 24; ++i) {
      double theta = 0.15 + (kPi - 0.3) * (i + 0.5) / 24.0;
      if (min_interface_distance(default_cap, theta) < 0.05) continue;
      std::uniform_real_distribution<double> unif(0.0, kTwoPi);
      UnitVec3 x = chart_forward(SphPoint(theta, unif(rng)));
      VelocitySample u = eval.at_point(x);
      err_t = std::max(err_t, std::fabs(u.u_theta));
      err_p = std::max(err_p, std::fabs(u.u_phi - (dtheta_G_star(default_cap, theta) +
                                                   default_cap.gamma * std::sin(theta))));
    }
    out.push_back({"zonal_contour_utheta", err_t, 1e-4, err_t <= 1e-4});
    out.push_back({"zonal_contour_uphi", err_p, 1e-3, err_p <= 1e-3});
  }

  {  // grid oracle against the same closed forms (coarser point set)
    VorticityMesh mesh = rasterize(default_cap, cfg.oracle_n_theta, cfg.oracle_n_phi);
    double err = 0.0;
    for (int i = 0; i < 8; ++i) {
      double theta = 0.3 + (kPi - 0.6) * (i + 0.5) / 8.0;
      if (min_interface_distance(default_cap, theta) < 0.08) continue;
      std::uniform_real_distribution<double> unif(0.0, kTwoPi);
      UnitVec3 x = chart_forward(SphPoint(theta, unif(rng)));
      VelocitySample u = velocity_oracle(mesh, x);
      err = std::max(err, std::fabs(u.u_theta));
      err = std::max(err, std::fabs(u.u_phi - (dtheta_G_star(default_cap, theta) +
                                               default_cap.gamma * std::sin(theta))));
    }
    out.push_back({"zonal_oracle", err, 1e-3, err <= 1e-3});
  }

  {  // contour vs oracle on a random 2-interface cap
    ZonalCap cap = random_cap(rng, 3, false);
    CapState st = make_zonal_state(cap, 2048);
    VorticityMesh mesh = rasterize(st, cfg.oracle_n_theta, cfg.oracle_n_phi);
    ContourEvaluator eval(st);
    double err = 0.0;
    int found = 0;
    while (found < 20) {
      UnitVec3 x = random_point(rng, 0.15, kPi - 0.15);
      double theta = std::acos(x.z);
      if (min_interface_distance(cap, theta) < 0.05) continue;
      ++found;
      VelocitySample a = eval.at_point(x);
      VelocitySample b = velocity_oracle(mesh, x);
      err = std::max({err, std::fabs(a.u_theta - b.u_theta), std::fabs(a.u_phi - b.u_phi)});
    }
    out.push_back({"oracle_vs_contour", err, 1e-3, err <= 1e-3});
  }

  {  // Green-kernel identity G[x3] = -x3/2
    double err = 0.0;
    for (int i = 0; i < 20; ++i) {
      UnitVec3 x = random_point(rng, 0.05, kPi - 0.05);
      double q = g_x3_quadrature(x, cfg.oracle_n_theta, cfg.oracle_n_phi);
      err = std::max(err, std::fabs(q - (-0.5 * x.z)));
    }
    out.push_back({"gx3_identity", err, 1e-3, err <= 1e-3});
  }

  {  // sup-velocity bound on 5 random Gauss-consistent caps
    double worst = -1e300;  // max over caps of max|u| - 1.01*bound
    for (int c = 0; c < 5; ++c) {
      ZonalCap cap = random_cap(rng, 2 + c % 3, false);
      CapState st = make_zonal_state(cap, 1024);
      VorticityMesh mesh = rasterize(st, 256, 512);
      double bound = sup_velocity_bound(mesh);
      ContourEvaluator eval(st);
      double vmax = 0.0;
      for (int i = 0; i < 1000; ++i) {
        UnitVec3 x = random_point(rng, 0.02, kPi - 0.02);
        VelocitySample u;
        try {
          u = eval.at_point(x);
        } catch (const CoreError&) {
          continue;
        }
        vmax = std::max(vmax, std::hypot(u.u_theta, u.u_phi));
      }
      worst = std::max(worst, vmax - 1.01 * bound);
    }
    out.push_back({"linf_bound", worst, 0.0, worst <= 0.0});
  }

  {  // rotation equivariance about the vertical axis
    BumpCap bump = make_bump_cap(default_cap, {cfg.k0, cfg.mu, cfg.phi_c, cfg.w, 512});
    ContourEvaluator eval(bump.state);
    double err = 0.0;
    std::uniform_real_distribution<double> unif(0.0, kTwoPi);
    for (int i = 0; i < 5; ++i) {
      double beta = unif(rng);
      double theta = 0.6 + 0.4 * i;
      double phi = unif(rng);
      VelocitySample a = eval.at_point(chart_forward(SphPoint(theta, phi)));
      CapState rot = bump.state;
      for (auto& c : rot.curves)
        for (auto& p : c.nodes) p = SphPoint(p.theta, p.phi + beta);
      VelocitySample b = ContourEvaluator(rot).at_point(chart_forward(SphPoint(theta, phi + beta)));
      err = std::max({err, std::fabs(a.u_theta - b.u_theta), std::fabs(a.u_phi - b.u_phi)});
    }
    out.push_back({"rotation_equivariance", err, 1e-10, err <= 1e-10});
  }

  {  // near-interface evaluation midway between nodes vs the oracle
    CapState st = make_zonal_state(default_cap, 1024);
    VorticityMesh mesh = rasterize(st, cfg.oracle_n_theta, cfg.oracle_n_phi);
    ContourEvaluator eval(st);
    double t0 = default_cap.thetas.front();
    double phi_mid = kPi / 1024.0;  // halfway between nodes 0 and 1
    UnitVec3 x = chart_forward(SphPoint(t0, phi_mid));
    VelocitySample a = eval.at_point(x);
    VelocitySample b = velocity_oracle(mesh, x);
    double err = std::max(std::fabs(a.u_theta - b.u_theta), std::fabs(a.u_phi - b.u_phi));
    out.push_back({"near_field_midpoint", err, 1e-3, err <= 1e-3});
  }

  return out;
}

}  // namespace capsim
