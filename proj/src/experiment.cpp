#include "capsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace capsim {

void ExperimentConfig::validate() const {
  std::string problems;
  auto fail = [&](const std::string& m) {
    if (!problems.empty()) problems += "; ";
    problems += m;
  };
  if (thetas.empty()) fail("cap.thetas: need at least one interface");
  double prev = 0.0;
  for (double t : thetas) {
    if (!(t > prev && t < kPi)) {
      fail("cap.thetas: must be strictly increasing in (0,pi)");
      break;
    }
    prev = t;
  }
  if (omegas_free.size() != thetas.size())
    fail("cap.omegas_free: need exactly one level per interface");
  if (k0 < 1 || k0 > static_cast<int>(thetas.size())) fail("bump.k0: out of range");
  if (!(w > 0.0 && w < kPi)) fail("bump.w: outside (0,pi)");
  if (n_nodes < 8 || n_nodes % 2 != 0) fail("bump.n_nodes: must be even and >= 8");
  if (!(flow.dt > 0.0)) fail("flow.dt: must be positive");
  if (!(flow.t_end >= 0.0)) fail("flow.t_end: must be non-negative");
  if (!(flow.theta_min > 0.0 && flow.theta_min < flow.theta_max && flow.theta_max < kPi))
    fail("flow.band: need 0 < theta_min < theta_max < pi");
  if (flow.stride < 1) fail("flow.stride: must be >= 1");
  if (oracle_n_theta < 8 || oracle_n_phi < 8) fail("grids.oracle: too coarse");
  if (raster_n_theta < 8 || raster_n_phi < 8) fail("grids.raster: too coarse");
  if (!(fit_window_fraction > 0.0 && fit_window_fraction <= 1.0))
    fail("tolerances.fit_window_fraction: outside (0,1]");
  if (!(kappa_lower_factor > 0.0 && kappa_lower_factor <= kappa_upper_factor))
    fail("tolerances.kappa factors: need 0 < lower <= upper");
  if (theorem_mode && mu != 0.0) {
    try {
      ZonalCap c = cap();
      if (!is_monotone(c)) fail("cap: theorem mode requires a monotone cap");
    } catch (const Error& e) {
      fail(std::string("cap: ") + e.what());
    }
  }
  if (!problems.empty()) throw ValidationError(problems);
}

ZonalCap ExperimentConfig::cap() const {
  return make_gauss_cap(thetas, omegas_free, gamma);
}

TheoryRates theory_kappa(const ZonalCap& cap, int k0, double mu) {
  if (!is_monotone(cap)) throw RangeError("theory_kappa: cap is not monotone");
  if (mu != 0.0) {
    double mu_hat = find_mu_hat(cap, k0, mu > 0 ? 1 : -1);
    if (std::fabs(mu) > mu_hat)
      throw RangeError("theory_kappa: |mu| exceeds the drift-gap validity interval");
  }
  TheoryRates r;
  r.alpha = alpha(cap, k0, mu);
  double t_lo = cap.thetas.front() - std::fabs(mu);
  double t_hi = cap.thetas.back() + std::fabs(mu);
  r.beta = 0.5 * std::min(std::sin(t_lo), std::sin(t_hi));
  r.kappa = r.beta * std::fabs(r.alpha);
  return r;
}

namespace {

// least squares slope/intercept of y against t over [i0, n)
void fit_line(const std::vector<double>& t, const std::vector<double>& y, std::size_t i0,
              double& slope, double& intercept) {
  std::size_t n = t.size();
  double st = 0, sy = 0, stt = 0, sty = 0, m = 0;
  for (std::size_t i = i0; i < n; ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
    m += 1.0;
  }
  double den = m * stt - st * st;
  if (den <= 0.0) {
    slope = 0.0;
    intercept = m > 0 ? sy / m : 0.0;
    return;
  }
  slope = (m * sty - st * sy) / den;
  intercept = (sy - slope * st) / m;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, const SnapshotSink& sink) {
  cfg.validate();
  RunSummary out;
  ZonalCap cap = cfg.cap();

  out.eps_disc = cfg.eps_disc;
  if (cfg.mu != 0.0 && cfg.theorem_mode) {
    TheoryRates th = theory_kappa(cap, cfg.k0, cfg.mu);
    out.alpha = th.alpha;
    out.beta = th.beta;
    out.kappa_theory = th.kappa;
    DriftExpansion ex = alpha_expansion(cap, cfg.k0, cfg.mu > 0 ? 1 : -1);
    out.taylor_a1 = ex.a1;
    out.taylor_a2 = ex.a2;
    out.taylor_pred = ex.a1 * cfg.mu + ex.a2 * cfg.mu * cfg.mu;
  }

  BumpCap bump = make_bump_cap(cap, {cfg.k0, cfg.mu, cfg.phi_c, cfg.w, cfg.n_nodes});
  CapState& state = bump.state;
  out.gauss_defect_initial = gauss_defect(state);
  out.l1_initial = l1_distance(state, cap, cfg.raster_n_theta, cfg.raster_n_phi);

  std::vector<TrackedPoint> tracked(2);
  {
    const InterfaceCurve& c = state.curves[static_cast<std::size_t>(cfg.k0 - 1)];
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c.ids[i] == bump.anchor_id) tracked[0] = {bump.anchor_id, c.nodes[i], c.nodes[i]};
      if (c.ids[i] == bump.tip_id) tracked[1] = {bump.tip_id, c.nodes[i], c.nodes[i]};
    }
  }

  LevelRaster zonal_raster = rasterize_levels(cap, cfg.raster_n_theta, cfg.raster_n_phi);
  double raster_h = std::sqrt(kPi / cfg.raster_n_theta * (kPi / cfg.raster_n_theta) +
                              kTwoPi / cfg.raster_n_phi * (kTwoPi / cfg.raster_n_phi));
  double max_level = 0.0;
  for (double v : state.levels) max_level = std::max(max_level, std::fabs(v));

  // reference co-latitudes for the confinement diagnostic, per node id
  std::unordered_map<std::uint64_t, double> theta_ref;
  for (const auto& c : state.curves)
    for (std::size_t i = 0; i < c.size(); ++i) theta_ref.emplace(c.ids[i], c.nodes[i].theta);

  out.pass_simple = true;
  bool gauss_ok = true;
  std::vector<double> areas0;

  auto on_frame = [&](const FrameInfo& fi) {
    out.times.push_back(fi.t);
    const InterfaceCurve& bumped = fi.state.curves[static_cast<std::size_t>(cfg.k0 - 1)];
    out.perimeter.push_back(perimeter(bumped));
    out.stretch.push_back(fi.tracked[1].p.phi - fi.tracked[0].p.phi);
    out.x0_theta.push_back(fi.tracked[0].p.theta);
    out.x0_phi.push_back(fi.tracked[0].p.phi);
    out.x1_theta.push_back(fi.tracked[1].p.theta);
    out.x1_phi.push_back(fi.tracked[1].p.phi);

    LevelRaster r = rasterize_levels(fi.state, cfg.raster_n_theta, cfg.raster_n_phi);
    KahanSum l1acc;
    for (int i = 0; i < r.n_theta; ++i) {
      double area = r.cell_area(i);
      KahanSum row;
      for (int j = 0; j < r.n_phi; ++j) {
        std::size_t idx = static_cast<std::size_t>(i) * r.n_phi + j;
        row.add(std::fabs(r.zeta[idx] - zonal_raster.zeta[idx]));
      }
      l1acc.add(row.value() * area);
    }
    out.l1.push_back(l1acc.value());
    out.gauss_raster.push_back(raster_integral(r));
    double total_len = 0.0;
    for (const auto& c : fi.state.curves) total_len += perimeter(c);
    if (std::fabs(out.gauss_raster.back() - out.gauss_defect_initial) >
        2.0 * raster_h * total_len * max_level)
      gauss_ok = false;

    out.areas.push_back(region_areas(fi.state));
    if (areas0.empty()) areas0 = out.areas.back();

    double conf = 0.0;
    for (const auto& c : fi.state.curves)
      for (std::size_t i = 0; i < c.size(); ++i) {
        auto it = theta_ref.find(c.ids[i]);
        if (it == theta_ref.end()) {
          theta_ref.emplace(c.ids[i], c.nodes[i].theta);
          continue;
        }
        conf = std::max(conf, std::fabs(c.nodes[i].theta - it->second));
      }
    out.confinement.push_back(conf);
    out.confinement_max = std::max(out.confinement_max, conf);

    if (!simple_curve_check(bumped, 2000, cfg.seed + static_cast<std::uint64_t>(fi.frame)))
      out.pass_simple = false;
    out.final_nodes = 0;
    for (const auto& c : fi.state.curves) out.final_nodes += c.size();
    ++out.frames;
    if (sink) sink(fi);
  };

  try {
    run_flow(state, tracked, cfg.flow, on_frame);
  } catch (const BandExit& e) {
    out.aborted = true;
    out.abort_reason = e.what();
  } catch (const ResolutionExhausted& e) {
    out.aborted = true;
    out.abort_reason = e.what();
  }

  // stretch slope over t >= 1 (the drift law is linear past the transient)
  if (out.times.size() >= 3) {
    std::size_t i0 = 0;
    while (i0 < out.times.size() && out.times[i0] < 1.0) ++i0;
    if (out.times.size() - i0 >= 2) {
      double b;
      fit_line(out.times, out.stretch, i0, out.stretch_slope, b);
    }
    // growth fit on the tail window: L(t) - L(0) against kappa (t - T0)
    std::size_t tail = static_cast<std::size_t>(
        std::floor(static_cast<double>(out.times.size()) * (1.0 - cfg.fit_window_fraction)));
    std::vector<double> growth(out.perimeter.size());
    for (std::size_t i = 0; i < growth.size(); ++i) growth[i] = out.perimeter[i] - out.perimeter[0];
    double slope, intercept;
    fit_line(out.times, growth, tail, slope, intercept);
    out.kappa_hat = std::max(slope, 0.0);
    out.t0_hat = out.kappa_hat > 1e-12 ? -intercept / out.kappa_hat : 0.0;
  }

  // pass flags
  if (cfg.mu != 0.0 && cfg.theorem_mode) {
    out.pass_stretch =
        std::fabs(out.stretch_slope - out.alpha) <= cfg.stretch_slope_rtol * std::fabs(out.alpha);
    out.pass_kappa = out.kappa_hat >= cfg.kappa_lower_factor * out.kappa_theory &&
                     out.kappa_hat <= cfg.kappa_upper_factor * out.kappa_theory;
    bool bound_ok = true;
    for (std::size_t i = 0; i < out.perimeter.size(); ++i)
      if (out.perimeter[i] < out.beta * std::fabs(out.stretch[i]) - cfg.eps_disc)
        bound_ok = false;
    out.pass_length_bound = bound_ok;
  } else {
    out.pass_stretch = true;
    out.pass_length_bound = true;
    out.pass_kappa = out.kappa_hat <= cfg.kappa_control_tol;
  }
  bool area_ok = !out.areas.empty();
  for (const auto& a : out.areas)
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::fabs(a[k] - areas0[k]) > cfg.area_drift_rtol * areas0[k]) area_ok = false;
  out.pass_area = area_ok && !out.aborted;
  out.pass_gauss = gauss_ok && !out.aborted;
  out.pass_confinement = out.confinement_max <= cfg.confinement_xi && !out.aborted;
  return out;
}

std::vector<RunSummary> sweep(const ExperimentConfig& base, const std::vector<double>& mu_list,
                              const SnapshotSink& sink) {
  std::vector<RunSummary> out;
  out.reserve(mu_list.size());
  for (double mu : mu_list) {
    ExperimentConfig cfg = base;
    cfg.mu = mu;
    try {
      RunSummary s = run_experiment(cfg, sink);
      if (cfg.theorem_mode && mu != 0.0 && std::fabs(mu) <= 0.1 && !s.aborted)
        s.pass_taylor = std::fabs(s.stretch_slope - s.taylor_pred) <=
                        0.15 * std::fabs(s.taylor_pred);
      out.push_back(std::move(s));
    } catch (const Error& e) {
      RunSummary s;
      s.aborted = true;
      s.abort_reason = e.what();
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace capsim
