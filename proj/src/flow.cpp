#include "capsim/flow.hpp"

#include <cmath>
#include <cstdio>
#include <thread>
#include <unordered_map>

namespace capsim {

void FlowConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("flow.dt must be positive");
  if (!(t_end >= 0.0)) throw ValidationError("flow.t_end must be non-negative");
  if (!(theta_min > 0.0 && theta_min < theta_max && theta_max < kPi))
    throw ValidationError("flow band must satisfy 0 < theta_min < theta_max < pi");
  if (renorm_every < 1) throw ValidationError("flow.renorm_every must be >= 1");
  if (stride < 1) throw ValidationError("flow.stride must be >= 1");
  if (!(h_max > 0.0)) throw ValidationError("flow.h_max must be positive");
}

namespace {

int effective_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Flattened (theta, phi) system: curve nodes in curve-major order, then the
// unlinked tracked points.  Tracked points that start on a node share its
// trajectory through the node id link.
struct System {
  std::vector<double> th, ph;
  std::vector<std::size_t> offset;  // curve start indices, plus total at back
  std::vector<double> jumps;
  std::size_t n_nodes{};
  std::size_t n_free{};
  double gamma{};
  std::vector<long> point_slot;  // per tracked point: dof index (node or free)

  std::size_t size() const { return n_nodes + n_free; }

  void rebuild(const CapState& state, const std::vector<TrackedPoint>& pts) {
    offset.clear();
    jumps.clear();
    n_nodes = 0;
    for (const auto& c : state.curves) {
      offset.push_back(n_nodes);
      jumps.push_back(c.jump);
      n_nodes += c.size();
    }
    offset.push_back(n_nodes);
    gamma = state.gamma;

    std::unordered_map<std::uint64_t, std::size_t> id_to_flat;
    id_to_flat.reserve(n_nodes);
    th.resize(n_nodes);
    ph.resize(n_nodes);
    for (std::size_t c = 0; c < state.curves.size(); ++c) {
      const auto& curve = state.curves[c];
      for (std::size_t i = 0; i < curve.size(); ++i) {
        std::size_t f = offset[c] + i;
        th[f] = curve.nodes[i].theta;
        ph[f] = curve.nodes[i].phi;
        id_to_flat.emplace(curve.ids[i], f);
      }
    }
    point_slot.assign(pts.size(), -1);
    n_free = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      // link to a node when starting on one (same material trajectory)
      long found = -1;
      UnitVec3 x = chart_forward(pts[p].p);
      for (std::size_t f = 0; f < n_nodes && found < 0; ++f) {
        double st = std::sin(th[f]);
        double dx = x.x - st * std::cos(ph[f]);
        double dy = x.y - st * std::sin(ph[f]);
        double dz = x.z - std::cos(th[f]);
        if (dx * dx + dy * dy + dz * dz < 1e-24) found = static_cast<long>(f);
      }
      if (found >= 0) {
        point_slot[p] = found;
      } else {
        th.push_back(pts[p].p.theta);
        ph.push_back(pts[p].p.phi);
        point_slot[p] = static_cast<long>(n_nodes + n_free);
        ++n_free;
      }
    }
  }

  void sync_state(CapState& state) const {
    for (std::size_t c = 0; c < state.curves.size(); ++c) {
      auto& curve = state.curves[c];
      for (std::size_t i = 0; i < curve.size(); ++i) {
        std::size_t f = offset[c] + i;
        curve.nodes[i] = SphPoint(th[f], ph[f]);
      }
    }
  }

  void sync_points(std::vector<TrackedPoint>& pts) const {
    for (std::size_t p = 0; p < pts.size(); ++p) {
      std::size_t f = static_cast<std::size_t>(point_slot[p]);
      pts[p].p = SphPoint(th[f], ph[f]);
    }
  }

  std::vector<CurveView> views(const std::vector<double>& T, const std::vector<double>& P) const {
    std::vector<CurveView> v(jumps.size());
    for (std::size_t c = 0; c < jumps.size(); ++c)
      v[c] = {T.data() + offset[c], P.data() + offset[c], offset[c + 1] - offset[c], jumps[c]};
    return v;
  }

  void rate(const std::vector<double>& T, const std::vector<double>& P, double t,
            const FlowConfig& cfg, int threads, std::vector<double>& dth,
            std::vector<double>& dph) const {
    std::size_t n = size();
    for (std::size_t f = 0; f < n; ++f)
      if (!(T[f] >= cfg.theta_min && T[f] <= cfg.theta_max)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "BandExit: point left the safety band at t=%.6f (theta=%.6f)", t, T[f]);
        throw BandExit(buf);
      }
    std::vector<CurveView> v = views(T, P);
    ContourEvaluator eval(v, gamma);
    std::vector<VelocitySample> u(n_nodes);
    eval.eval_all_nodes(u.data(), threads);
    dth.resize(n);
    dph.resize(n);
    for (std::size_t f = 0; f < n_nodes; ++f) {
      dth[f] = u[f].u_theta;
      dph[f] = u[f].u_phi / std::sin(T[f]);
    }
    for (std::size_t f = n_nodes; f < n; ++f) {
      double st = std::sin(T[f]);
      UnitVec3 x{st * std::cos(P[f]), st * std::sin(P[f]), std::cos(T[f])};
      VelocitySample s = eval.at_point(x);
      dth[f] = s.u_theta;
      dph[f] = s.u_phi / st;
    }
  }

  void renorm() {
    for (std::size_t f = 0; f < size(); ++f) {
      double st = std::sin(th[f]);
      Vec3 x{st * std::cos(ph[f]), st * std::sin(ph[f]), std::cos(th[f])};
      UnitVec3 u = normalized(x);
      th[f] = std::acos(std::clamp(u.z, -1.0, 1.0));
      double base = std::atan2(u.y, u.x);
      ph[f] = base + kTwoPi * std::round((ph[f] - base) / kTwoPi);
    }
  }
};

void rk_step(System& sys, double t, const FlowConfig& cfg, int threads) {
  std::size_t n = sys.size();
  static thread_local std::vector<double> ts, ps, k1t, k1p, k2t, k2p, k3t, k3p, k4t, k4p;
  ts.resize(n);
  ps.resize(n);
  double dt = cfg.dt;
  sys.rate(sys.th, sys.ph, t, cfg, threads, k1t, k1p);
  if (cfg.scheme == Scheme::RK2) {
    for (std::size_t f = 0; f < n; ++f) {
      ts[f] = sys.th[f] + 0.5 * dt * k1t[f];
      ps[f] = sys.ph[f] + 0.5 * dt * k1p[f];
    }
    sys.rate(ts, ps, t + 0.5 * dt, cfg, threads, k2t, k2p);
    for (std::size_t f = 0; f < n; ++f) {
      sys.th[f] += dt * k2t[f];
      sys.ph[f] += dt * k2p[f];
    }
    return;
  }
  for (std::size_t f = 0; f < n; ++f) {
    ts[f] = sys.th[f] + 0.5 * dt * k1t[f];
    ps[f] = sys.ph[f] + 0.5 * dt * k1p[f];
  }
  sys.rate(ts, ps, t + 0.5 * dt, cfg, threads, k2t, k2p);
  for (std::size_t f = 0; f < n; ++f) {
    ts[f] = sys.th[f] + 0.5 * dt * k2t[f];
    ps[f] = sys.ph[f] + 0.5 * dt * k2p[f];
  }
  sys.rate(ts, ps, t + 0.5 * dt, cfg, threads, k3t, k3p);
  for (std::size_t f = 0; f < n; ++f) {
    ts[f] = sys.th[f] + dt * k3t[f];
    ps[f] = sys.ph[f] + dt * k3p[f];
  }
  sys.rate(ts, ps, t + dt, cfg, threads, k4t, k4p);
  const double w = dt / 6.0;
  for (std::size_t f = 0; f < n; ++f) {
    sys.th[f] += w * (k1t[f] + 2.0 * k2t[f] + 2.0 * k3t[f] + k4t[f]);
    sys.ph[f] += w * (k1p[f] + 2.0 * k2p[f] + 2.0 * k3p[f] + k4p[f]);
  }
}

}  // namespace

std::pair<double, double> rhs(const CapState& state, const SphPoint& p, const FlowConfig& cfg) {
  if (!(p.theta >= cfg.theta_min && p.theta <= cfg.theta_max))
    throw BandExit("rhs: point outside the safety band");
  VelocitySample u = velocity_contour(state, chart_forward(p));
  return {u.u_theta, u.u_phi / std::sin(p.theta)};
}

void step(CapState& state, std::vector<TrackedPoint>& points, const FlowConfig& cfg) {
  cfg.validate();
  System sys;
  sys.rebuild(state, points);
  rk_step(sys, state.time, cfg, effective_threads(cfg.threads));
  sys.sync_state(state);
  sys.sync_points(points);
  state.time += cfg.dt;
}

void run_flow(CapState& state, std::vector<TrackedPoint>& points, const FlowConfig& cfg,
              const FrameCallback& on_frame) {
  cfg.validate();
  int threads = effective_threads(cfg.threads);
  long n_steps = std::lround(cfg.t_end / cfg.dt);
  double t0 = state.time;

  System sys;
  sys.rebuild(state, points);

  int frame = 0;
  int inserted_since = 0;
  for (long s = 0; s <= n_steps; ++s) {
    double t = t0 + cfg.dt * static_cast<double>(s);
    if (s % cfg.stride == 0 || s == n_steps) {
      sys.sync_state(state);
      sys.sync_points(points);
      state.time = t;
      if (cfg.refine_frames) {
        int ins = 0;
        for (auto& c : state.curves) ins += refine(c, cfg.h_max, cfg.node_cap, state.next_id);
        inserted_since += ins;
        if (ins > 0) sys.rebuild(state, points);
      }
      on_frame(FrameInfo{frame, s, t, state, points, inserted_since});
      ++frame;
      inserted_since = 0;
      if (s == n_steps) break;
    }
    rk_step(sys, t, cfg, threads);
    if ((s + 1) % cfg.renorm_every == 0) sys.renorm();
  }
  sys.sync_state(state);
  sys.sync_points(points);
  state.time = t0 + cfg.dt * static_cast<double>(n_steps);
}

}  // namespace capsim
