#include "capsim/curves.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace capsim {

namespace {

// cos^2 bump profile, C^1, compactly supported on |s| <= 1; exactly 0 outside
// and exactly 1 at s = 0 so the tip and the flat part are bit-exact.
double bump_profile(double s) {
  if (std::fabs(s) >= 1.0) return 0.0;
  double c = std::cos(0.5 * kPi * s);
  return c * c;
}

InterfaceCurve make_parallel(double theta, int n_nodes, double phi0, double jump, int label,
                             std::uint64_t& next_id) {
  InterfaceCurve c;
  c.jump = jump;
  c.label = label;
  c.nodes.reserve(static_cast<std::size_t>(n_nodes));
  c.ids.reserve(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) {
    c.nodes.emplace_back(theta, phi0 + kTwoPi * i / n_nodes);
    c.ids.push_back(next_id++);
  }
  return c;
}

}  // namespace

CapState make_zonal_state(const ZonalCap& cap, int n_nodes) {
  if (n_nodes < 8) throw DegenerateCurve("make_zonal_state: need at least 8 nodes");
  CapState st;
  st.levels = cap.omegas;
  st.gamma = cap.gamma;
  for (int k = 1; k <= cap.interfaces(); ++k) {
    double jump = cap.omegas[static_cast<std::size_t>(k)] -
                  cap.omegas[static_cast<std::size_t>(k - 1)];
    st.curves.push_back(make_parallel(cap.thetas[static_cast<std::size_t>(k - 1)], n_nodes,
                                      0.0, jump, k, st.next_id));
  }
  return st;
}

BumpCap make_bump_cap(const ZonalCap& cap, const BumpSpec& spec) {
  if (spec.k0 < 1 || spec.k0 > cap.interfaces())
    throw IndexError("make_bump_cap: interface index out of range");
  if (!(spec.w > 0.0 && spec.w < kPi)) throw RangeError("make_bump_cap: w outside (0,pi)");
  if (spec.n_nodes < 8 || spec.n_nodes % 2 != 0)
    throw RangeError("make_bump_cap: n_nodes must be even and >= 8");
  double t0 = cap.thetas[static_cast<std::size_t>(spec.k0 - 1)];
  double lo = spec.k0 == 1 ? 0.0 : cap.thetas[static_cast<std::size_t>(spec.k0 - 2)];
  double hi = spec.k0 == cap.interfaces() ? kPi : cap.thetas[static_cast<std::size_t>(spec.k0)];
  if (!(t0 + spec.mu > lo && t0 + spec.mu < hi))
    throw RangeError("make_bump_cap: theta_k0 + mu leaves the adjacent bands");

  BumpCap out;
  out.state.levels = cap.omegas;
  out.state.gamma = cap.gamma;
  for (int k = 1; k <= cap.interfaces(); ++k) {
    double jump = cap.omegas[static_cast<std::size_t>(k)] -
                  cap.omegas[static_cast<std::size_t>(k - 1)];
    if (k != spec.k0) {
      out.state.curves.push_back(make_parallel(cap.thetas[static_cast<std::size_t>(k - 1)],
                                               spec.n_nodes, spec.phi_c, jump, k,
                                               out.state.next_id));
      continue;
    }
    InterfaceCurve c;
    c.jump = jump;
    c.label = k;
    for (int i = 0; i < spec.n_nodes; ++i) {
      double phi = spec.phi_c + kTwoPi * i / spec.n_nodes;
      double s = (phi - spec.phi_c) / spec.w;
      // wrap the profile argument so the support is centered at phi_c on the circle
      if (s > kPi / spec.w) s -= kTwoPi / spec.w;
      double theta = t0 + spec.mu * bump_profile(s);
      c.nodes.emplace_back(theta, phi);
      c.ids.push_back(out.state.next_id);
      if (i == 0) out.tip_id = out.state.next_id;
      if (i == spec.n_nodes / 2) out.anchor_id = out.state.next_id;
      ++out.state.next_id;
    }
    out.state.curves.push_back(std::move(c));
  }
  return out;
}

double perimeter(const InterfaceCurve& curve) {
  return polyline_length(curve.nodes, /*closed=*/true);
}

int refine(InterfaceCurve& curve, double h_max, std::size_t node_cap,
           std::uint64_t& next_id) {
  int inserted = 0;
  bool again = true;
  while (again) {
    again = false;
    std::vector<SphPoint> nodes;
    std::vector<std::uint64_t> ids;
    nodes.reserve(curve.nodes.size() * 2);
    ids.reserve(curve.nodes.size() * 2);
    std::size_t n = curve.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
      const SphPoint& a = curve.nodes[i];
      const SphPoint& b = curve.nodes[(i + 1) % n];
      nodes.push_back(a);
      ids.push_back(curve.ids[i]);
      double blift = i + 1 < n ? b.phi : b.phi + kTwoPi;
      double len = geodesic_distance(chart_forward(a), chart_forward(b));
      if (len > h_max) {
        nodes.emplace_back(0.5 * (a.theta + b.theta), 0.5 * (a.phi + blift));
        ids.push_back(next_id++);
        ++inserted;
        if (len > 2.0 * h_max) again = true;
      }
    }
    if (nodes.size() > node_cap)
      throw ResolutionExhausted("refine: node cap exceeded");
    curve.nodes = std::move(nodes);
    curve.ids = std::move(ids);
  }
  return inserted;
}

double north_area(const InterfaceCurve& curve) {
  // Solid-angle fan from the north pole: for triangle (N, a, b) the signed
  // excess is 2 atan2(N.(a x b), 1 + N.a + a.b + b.N).
  std::size_t n = curve.nodes.size();
  std::vector<UnitVec3> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = chart_forward(curve.nodes[i]);
  KahanSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    const UnitVec3& a = xs[i];
    const UnitVec3& b = xs[(i + 1) % n];
    double det = a.x * b.y - a.y * b.x;  // N . (a x b)
    double den = 1.0 + a.z + dot(a, b) + b.z;
    acc.add(2.0 * std::atan2(det, den));
  }
  return acc.value();
}

std::vector<double> region_areas(const CapState& state) {
  std::size_t n_regions = state.levels.size();
  if (state.curves.size() + 1 != n_regions)
    throw TopologyError("region_areas: curve/level count mismatch");
  std::vector<double> areas(n_regions);
  double prev = 0.0;
  for (std::size_t k = 0; k < state.curves.size(); ++k) {
    double a = north_area(state.curves[k]);
    areas[k] = a - prev;
    if (areas[k] <= 0.0) throw TopologyError("region_areas: non-positive band area");
    prev = a;
  }
  areas[n_regions - 1] = 4.0 * kPi - prev;
  if (areas[n_regions - 1] <= 0.0) throw TopologyError("region_areas: non-positive last area");
  return areas;
}

double gauss_defect(const CapState& state) {
  std::vector<double> areas = region_areas(state);
  KahanSum acc;
  for (std::size_t k = 0; k < areas.size(); ++k) acc.add(state.levels[k] * areas[k]);
  return acc.value();
}

bool simple_curve_check(const InterfaceCurve& curve, int samples, std::uint64_t seed) {
  std::size_t n = curve.nodes.size();
  if (n < 8) return true;
  std::vector<UnitVec3> xs(n);
  std::vector<double> spacing(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = chart_forward(curve.nodes[i]);
  for (std::size_t i = 0; i < n; ++i) spacing[i] = chord_distance(xs[i], xs[(i + 1) % n]);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (int s = 0; s < samples; ++s) {
    std::size_t i = pick(rng), j = pick(rng);
    std::size_t gap = i > j ? i - j : j - i;
    if (gap < 2 || gap > n - 2) continue;  // adjacent segments share a node
    // conservative test: midpoint separation below half the local spacing
    Vec3 mi = 0.5 * (xs[i].vec() + xs[(i + 1) % n].vec());
    Vec3 mj = 0.5 * (xs[j].vec() + xs[(j + 1) % n].vec());
    double d = norm(mi - mj);
    if (d < 0.5 * std::min(spacing[i], spacing[j])) return false;
  }
  return true;
}

}  // namespace capsim
