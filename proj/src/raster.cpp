#include "capsim/raster.hpp"

#include <algorithm>
#include <cmath>

namespace capsim {

double LevelRaster::cell_area(int i) const {
  return std::sin((i + 0.5) * dtheta()) * dtheta() * dphi();
}

namespace {

// theta of every crossing of curve segments with the meridian of column j,
// collected per column.  Segments are linear in the lifted chart.
std::vector<std::vector<double>> column_crossings(const InterfaceCurve& curve, int n_phi) {
  std::vector<std::vector<double>> cross(static_cast<std::size_t>(n_phi));
  double dphi = kTwoPi / n_phi;
  std::size_t n = curve.nodes.size();
  for (std::size_t s = 0; s < n; ++s) {
    const SphPoint& a = curve.nodes[s];
    const SphPoint& b = curve.nodes[(s + 1) % n];
    double pa = a.phi;
    double pb = s + 1 < n ? b.phi : b.phi + kTwoPi;
    if (pa == pb) continue;
    double lo = std::min(pa, pb), hi = std::max(pa, pb);
    // Column centers are at (j + 1/2) dphi + 2pi m; inclusion is the
    // half-open [lo, hi) evaluated on phi(q) itself, so a center that
    // coincides with a shared node is counted by exactly one segment.
    long first = static_cast<long>(std::ceil(lo / dphi - 0.5)) - 1;
    for (long q = first;; ++q) {
      double phi = (q + 0.5) * dphi;
      if (phi >= hi) break;
      if (phi < lo) continue;
      double t = (phi - pa) / (pb - pa);
      double theta = a.theta + t * (b.theta - a.theta);
      long j = q % n_phi;
      if (j < 0) j += n_phi;
      cross[static_cast<std::size_t>(j)].push_back(theta);
    }
  }
  for (auto& v : cross) std::sort(v.begin(), v.end());
  return cross;
}

}  // namespace

LevelRaster rasterize_levels(const CapState& state, int n_theta, int n_phi) {
  std::size_t n_curves = state.curves.size();
  if (n_curves + 1 != state.levels.size())
    throw TopologyError("rasterize_levels: curve/level count mismatch");
  LevelRaster r;
  r.n_theta = n_theta;
  r.n_phi = n_phi;
  r.zeta.assign(static_cast<std::size_t>(n_theta) * n_phi, 0.0);

  std::vector<std::vector<std::vector<double>>> cross;
  cross.reserve(n_curves);
  for (const auto& c : state.curves) cross.push_back(column_crossings(c, n_phi));

  double dth = r.dtheta();
  for (int j = 0; j < n_phi; ++j) {
    // walk the column north to south, flipping parities at crossings
    std::vector<std::size_t> next(n_curves, 0);
    std::vector<int> parity(n_curves, 0);
    for (int i = 0; i < n_theta; ++i) {
      double theta = (i + 0.5) * dth;
      int south_of = 0;
      for (std::size_t k = 0; k < n_curves; ++k) {
        const auto& col = cross[k][static_cast<std::size_t>(j)];
        while (next[k] < col.size() && col[next[k]] <= theta) {
          parity[k] ^= 1;
          ++next[k];
        }
        south_of += parity[k];
      }
      // nesting check: the south-of set must be the prefix {1..south_of}
      for (std::size_t k = 0; k < n_curves; ++k)
        if ((parity[k] == 1) != (k < static_cast<std::size_t>(south_of)))
          throw TopologyError("rasterize_levels: region assignment ambiguous");
      r.zeta[static_cast<std::size_t>(i) * n_phi + j] =
          state.levels[static_cast<std::size_t>(south_of)];
    }
  }
  return r;
}

LevelRaster rasterize_levels(const ZonalCap& cap, int n_theta, int n_phi) {
  LevelRaster r;
  r.n_theta = n_theta;
  r.n_phi = n_phi;
  r.zeta.assign(static_cast<std::size_t>(n_theta) * n_phi, 0.0);
  double dth = r.dtheta();
  for (int i = 0; i < n_theta; ++i) {
    double theta = (i + 0.5) * dth;
    // right-open bands [theta_{k-1}, theta_k)
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(cap.thetas.begin(), cap.thetas.end(), theta) - cap.thetas.begin());
    double level = cap.omegas[k];
    for (int j = 0; j < n_phi; ++j) r.zeta[static_cast<std::size_t>(i) * n_phi + j] = level;
  }
  return r;
}

double raster_integral(const LevelRaster& r) {
  KahanSum acc;
  for (int i = 0; i < r.n_theta; ++i) {
    double area = r.cell_area(i);
    KahanSum row;
    for (int j = 0; j < r.n_phi; ++j)
      row.add(r.zeta[static_cast<std::size_t>(i) * r.n_phi + j]);
    acc.add(row.value() * area);
  }
  return acc.value();
}

double l1_distance(const CapState& state, const ZonalCap& cap, int n_theta, int n_phi) {
  LevelRaster a = rasterize_levels(state, n_theta, n_phi);
  LevelRaster b = rasterize_levels(cap, n_theta, n_phi);
  KahanSum acc;
  for (int i = 0; i < n_theta; ++i) {
    double area = a.cell_area(i);
    KahanSum row;
    for (int j = 0; j < n_phi; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * n_phi + j;
      row.add(std::fabs(a.zeta[idx] - b.zeta[idx]));
    }
    acc.add(row.value() * area);
  }
  return acc.value();
}

}  // namespace capsim
