#include <cmath>

#include "doctest.h"

#include "capsim/flow.hpp"

using namespace capsim;

namespace {
ZonalCap default_cap() { return make_gauss_cap({kPi / 2}, {1.0}, 0.0); }

FlowConfig quick_cfg(double dt, double t_end, int stride = 1000000) {
  FlowConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.stride = stride;
  cfg.threads = 2;
  cfg.refine_frames = false;
  return cfg;
}
}  // namespace

TEST_CASE("rhs: longitudinal drift only") {
  ZonalCap zero = make_gauss_cap({kPi / 2}, {0.0}, 0.3);
  CapState st = make_zonal_state(zero, 64);
  auto [dth, dph] = rhs(st, SphPoint(kPi / 2, 0.4), FlowConfig{});
  CHECK(std::fabs(dth) < 1e-13);
  CHECK(dph == doctest::Approx(0.3).epsilon(1e-12));

  CapState zc = make_zonal_state(default_cap(), 1024);
  auto [dt2, dp2] = rhs(zc, SphPoint(kPi / 4, 2.0), FlowConfig{});
  CHECK(std::fabs(dt2) < 1e-4);
  CHECK(dp2 == doctest::Approx(std::tan(kPi / 8) / std::sin(kPi / 4)).epsilon(1e-8));

  FlowConfig tight;
  tight.theta_min = 1.0;
  tight.theta_max = 2.0;
  CHECK_THROWS_AS(rhs(zc, SphPoint(0.5, 0.0), tight), BandExit);
}

TEST_CASE("zero velocity leaves points unchanged") {
  ZonalCap zero = make_gauss_cap({kPi / 2}, {0.0}, 0.0);
  CapState st = make_zonal_state(zero, 64);
  std::vector<TrackedPoint> pts = {{7, SphPoint(1.0, 2.0), SphPoint(1.0, 2.0)}};
  step(st, pts, quick_cfg(0.01, 0.0));
  CHECK(pts[0].p.theta == 1.0);
  CHECK(pts[0].p.phi == 2.0);
  CHECK(st.curves[0].nodes[5].theta == kPi / 2);
}

TEST_CASE("points on one parallel keep equal co-latitude") {
  CapState st = make_zonal_state(default_cap(), 512);
  std::vector<TrackedPoint> pts = {{0, SphPoint(kPi / 4, 0.0), SphPoint(kPi / 4, 0.0)},
                                   {1, SphPoint(kPi / 4, 1.3), SphPoint(kPi / 4, 1.3)}};
  FlowConfig cfg = quick_cfg(0.01, 0.0);
  for (int s = 0; s < 50; ++s) step(st, pts, cfg);
  CHECK(std::fabs(pts[0].p.theta - pts[1].p.theta) < 1e-10);
}

TEST_CASE("zonal run: interfaces stay parallels, drift is linear") {
  ZonalCap cap = default_cap();
  CapState st = make_zonal_state(cap, 512);
  std::vector<SphPoint> initial = st.curves[0].nodes;
  std::vector<TrackedPoint> pts;
  FlowConfig cfg = quick_cfg(2e-3, 0.5, 50);
  double rate = phi_dot_star(cap, kPi / 2);
  double max_dtheta = 0.0, max_dphi = 0.0, max_step_jump = 0.0;
  std::vector<double> last_phi;
  run_flow(st, pts, cfg, [&](const FrameInfo& fi) {
    const auto& c = fi.state.curves[0];
    for (std::size_t i = 0; i < c.size(); ++i) {
      max_dtheta = std::max(max_dtheta, std::fabs(c.nodes[i].theta - kPi / 2));
      double expect = initial[i].phi + rate * fi.t;
      max_dphi = std::max(max_dphi, std::fabs(c.nodes[i].phi - expect));
    }
    if (!last_phi.empty())
      for (std::size_t i = 0; i < c.size(); ++i)
        max_step_jump = std::max(max_step_jump, std::fabs(c.nodes[i].phi - last_phi[i]));
    last_phi.clear();
    for (std::size_t i = 0; i < c.size(); ++i) last_phi.push_back(c.nodes[i].phi);
  });
  CHECK(max_dtheta < 1e-9);
  CHECK(max_dphi < 1e-7);
  CHECK(max_step_jump < kPi);  // lifted longitude moves continuously
}

TEST_CASE("gamma sign flip negates the pure-rotation drift") {
  for (double gamma : {0.4, -0.4}) {
    ZonalCap rotcap = make_gauss_cap({kPi / 2}, {0.0}, gamma);
    CapState st = make_zonal_state(rotcap, 64);
    std::vector<TrackedPoint> pts = {{0, SphPoint(1.1, 0.0), SphPoint(1.1, 0.0)}};
    FlowConfig cfg = quick_cfg(1e-2, 1.0);
    run_flow(st, pts, cfg, [](const FrameInfo&) {});
    CHECK(pts[0].p.phi == doctest::Approx(gamma * 1.0).epsilon(1e-10));
    CHECK(pts[0].p.theta == doctest::Approx(1.1).epsilon(1e-12));
  }
}

TEST_CASE("RK4 self-consistency order on a bump cap") {
  // the zonal benchmark integrates exactly (constant rates), so the order is
  // measured on a genuinely nonlinear bump trajectory
  auto terminal = [&](double dt) {
    BumpCap b = make_bump_cap(default_cap(), {1, 0.15, 0.0, 0.8, 256});
    std::vector<TrackedPoint> pts;
    FlowConfig cfg = quick_cfg(dt, 1.6);
    run_flow(b.state, pts, cfg, [](const FrameInfo&) {});
    return b.state.curves[0].nodes;
  };
  std::vector<SphPoint> a = terminal(4e-2), b = terminal(2e-2), c = terminal(1e-2);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e1 = std::max(e1, std::hypot(a[i].theta - b[i].theta, a[i].phi - b[i].phi));
    e2 = std::max(e2, std::hypot(b[i].theta - c[i].theta, b[i].phi - c[i].phi));
  }
  double order = std::log2(e1 / e2);
  CHECK(order >= 3.5);
}

TEST_CASE("RK2 runs and is less accurate than RK4") {
  BumpCap b4 = make_bump_cap(default_cap(), {1, 0.15, 0.0, 0.8, 128});
  BumpCap b2 = make_bump_cap(default_cap(), {1, 0.15, 0.0, 0.8, 128});
  BumpCap ref = make_bump_cap(default_cap(), {1, 0.15, 0.0, 0.8, 128});
  std::vector<TrackedPoint> none;
  FlowConfig c4 = quick_cfg(4e-2, 0.8);
  FlowConfig c2 = c4;
  c2.scheme = Scheme::RK2;
  FlowConfig cr = quick_cfg(5e-3, 0.8);
  run_flow(b4.state, none, c4, [](const FrameInfo&) {});
  none.clear();
  run_flow(b2.state, none, c2, [](const FrameInfo&) {});
  none.clear();
  run_flow(ref.state, none, cr, [](const FrameInfo&) {});
  double e4 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < ref.state.curves[0].nodes.size(); ++i) {
    auto& r = ref.state.curves[0].nodes[i];
    e4 = std::max(e4, std::fabs(b4.state.curves[0].nodes[i].phi - r.phi));
    e2 = std::max(e2, std::fabs(b2.state.curves[0].nodes[i].phi - r.phi));
  }
  CHECK(e4 < e2);
}

TEST_CASE("band exit aborts with a diagnostic") {
  BumpCap b = make_bump_cap(default_cap(), {1, 0.1, 0.0, 0.5, 64});
  std::vector<TrackedPoint> pts;
  FlowConfig cfg = quick_cfg(1e-2, 1.0);
  cfg.theta_min = 1.5;
  cfg.theta_max = 1.6;  // tip at pi/2 + 0.1 is outside
  CHECK_THROWS_AS(run_flow(b.state, pts, cfg, [](const FrameInfo&) {}), BandExit);
}

TEST_CASE("tracked points coinciding with nodes follow them exactly") {
  BumpCap b = make_bump_cap(default_cap(), {1, 0.1, 0.3, 0.5, 128});
  const InterfaceCurve& c = b.state.curves[0];
  std::size_t tip_idx = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.ids[i] == b.tip_id) tip_idx = i;
  std::vector<TrackedPoint> pts = {{b.tip_id, c.nodes[tip_idx], c.nodes[tip_idx]}};
  FlowConfig cfg = quick_cfg(1e-2, 0.3);
  run_flow(b.state, pts, cfg, [](const FrameInfo&) {});
  const InterfaceCurve& cf = b.state.curves[0];
  for (std::size_t i = 0; i < cf.size(); ++i)
    if (cf.ids[i] == b.tip_id) {
      CHECK(pts[0].p.theta == cf.nodes[i].theta);
      CHECK(pts[0].p.phi == cf.nodes[i].phi);
    }
}

TEST_CASE("refinement during a run keeps the node cap honest") {
  BumpCap b = make_bump_cap(default_cap(), {1, 0.1, 0.0, 0.5, 64});
  std::vector<TrackedPoint> pts;
  FlowConfig cfg = quick_cfg(1e-2, 0.2, 10);
  cfg.refine_frames = true;
  cfg.h_max = 0.04;  // forces immediate refinement of the 64-node curve
  int frames = 0;
  std::size_t nodes_seen = 0;
  run_flow(b.state, pts, cfg, [&](const FrameInfo& fi) {
    ++frames;
    nodes_seen = fi.state.curves[0].size();
  });
  CHECK(frames >= 2);
  CHECK(nodes_seen > 64);
  for (std::size_t i = 0; i < b.state.curves[0].size(); ++i) {
    UnitVec3 p = chart_forward(b.state.curves[0].nodes[i]);
    UnitVec3 q = chart_forward(b.state.curves[0].nodes[(i + 1) % b.state.curves[0].size()]);
    CHECK(geodesic_distance(p, q) <= cfg.h_max * 1.2);
  }
}
