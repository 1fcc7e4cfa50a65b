#include "capsim/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include "fast_log.hpp"
#include "parallel.hpp"

namespace capsim {

namespace {

constexpr double kLog2 = 0.69314718055994530942;

// ---------------------------------------------------------------------------
// Quadrature tables for the log-kernel product rule (Kussmaul/Martensen):
//   lg[d] = log(4 sin^2(pi d / n))
//   R[d]  = -(4pi/n) sum_{m=1..M} cos(2pi m d/n)/m  [- (4pi/n^2) cos(pi d), n even]
// Both depend only on n; cached and shared across evaluator snapshots.
// Tables are doubled (size 2n) so a rotated lookup t[d + offset] is a plain
// sequential read.
struct KussmaulTables {
  std::vector<double> lg2;
  std::vector<double> r2;
};

std::shared_ptr<const KussmaulTables> kussmaul_tables(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const KussmaulTables>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  auto t = std::make_shared<KussmaulTables>();
  t->lg2.assign(static_cast<std::size_t>(2 * n), 0.0);
  t->r2.assign(static_cast<std::size_t>(2 * n), 0.0);
  int m_max = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
  for (int d = 0; d < n; ++d) {
    double s = 0.0;
    for (int m = 1; m <= m_max; ++m) s += std::cos(kTwoPi * m * d / n) / m;
    double r = -(2.0 * kTwoPi / n) * s;
    if (n % 2 == 0) r -= (2.0 * kTwoPi / (static_cast<double>(n) * n)) * std::cos(kPi * d);
    double sv = std::sin(kPi * d / n);
    double lg = d == 0 ? 0.0 : std::log(4.0 * sv * sv);
    t->r2[static_cast<std::size_t>(d)] = t->r2[static_cast<std::size_t>(d + n)] = r;
    t->lg2[static_cast<std::size_t>(d)] = t->lg2[static_cast<std::size_t>(d + n)] = lg;
  }
  cache.emplace(n, t);
  return t;
}

// weights of the singular rule against the tangent samples, vector part
void weight_pass(const double* __restrict yx, const double* __restrict yy,
                 const double* __restrict yz, const double* __restrict lgo,
                 const double* __restrict ro, double* __restrict w, double xx, double xy,
                 double xz, double ds, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    double c = 1.0 - (xx * yx[k] + xy * yy[k] + xz * yz[k]);
    c = c > 1e-300 ? c : 1e-300;
    w[k] = ds * (detail::fast_log(c) - lgo[k]) + ro[k];
  }
}

// plain periodic trapezoid weights (target off this curve)
void weight_pass_far(const double* __restrict yx, const double* __restrict yy,
                     const double* __restrict yz, double* __restrict w, double xx, double xy,
                     double xz, double ds, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    double c = 1.0 - (xx * yx[k] + xy * yy[k] + xz * yz[k]);
    c = c > 1e-300 ? c : 1e-300;
    w[k] = ds * detail::fast_log(c);
  }
}

void accum_pass(const double* __restrict tx, const double* __restrict ty,
                const double* __restrict tz, const double* __restrict w, std::size_t n,
                double out[3]) {
  constexpr std::size_t L = 8;
  double ax[L] = {0}, ay[L] = {0}, az[L] = {0};
  std::size_t k = 0;
  for (; k + L <= n; k += L)
    for (std::size_t j = 0; j < L; ++j) {
      ax[j] += tx[k + j] * w[k + j];
      ay[j] += ty[k + j] * w[k + j];
      az[j] += tz[k + j] * w[k + j];
    }
  for (; k < n; ++k) {
    ax[0] += tx[k] * w[k];
    ay[0] += ty[k] * w[k];
    az[0] += tz[k] * w[k];
  }
  out[0] = out[1] = out[2] = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    out[0] += ax[j];
    out[1] += ay[j];
    out[2] += az[j];
  }
}

// exact integral_0^1 log(ca + s (cb - ca)) ds
double chord_log_integral(double ca, double cb) {
  double d = cb - ca, m = 0.5 * (ca + cb);
  if (std::fabs(d) < 1e-6 * m) {
    double e = d / m;
    return std::log(m) - e * e / 24.0 - e * e * e * e / 320.0;
  }
  double ga = ca > 1e-300 ? ca * std::log(ca) : 0.0;
  double gb = cb > 1e-300 ? cb * std::log(cb) : 0.0;
  return (gb - ga) / d - 1.0;
}

// Exact integral of log(1 - x.y) dl(y) over the geodesic arc from a to b.
// With y(u) = a cos u + t sin u the argument is 1 - R cos(u - psi), and both
// component integrals  int log(1 - R cos v) {sin, cos} v dv  are elementary;
// the near-parallel factor (R -> 1) is grouped as (2g/R) atan(((1+R)/g)
// tan(v/2)), g = sqrt(1-R^2), which stays finite down to g = 0.
bool arc_log_integral(const Vec3& a, const Vec3& b, const double* xv, Vec3& out) {
  double cD = a.x * b.x + a.y * b.y + a.z * b.z;
  if (cD >= 1.0 - 1e-14) return false;
  double D = std::acos(std::min(1.0, std::max(-1.0, cD)));
  double sD = std::sin(D);
  Vec3 t{(b.x - cD * a.x) / sD, (b.y - cD * a.y) / sD, (b.z - cD * a.z) / sD};
  double A = xv[0] * a.x + xv[1] * a.y + xv[2] * a.z;
  double B = xv[0] * t.x + xv[1] * t.y + xv[2] * t.z;
  // 1 - R^2 = (x.n)^2 with n the unit normal of the arc's great circle;
  // computing g from the normal component avoids the cancellation in 1 - R^2
  // when x lies close to that plane.
  Vec3 nrm{(a.y * b.z - a.z * b.y) / sD, (a.z * b.x - a.x * b.z) / sD,
           (a.x * b.y - a.y * b.x) / sD};
  double g = std::fabs(xv[0] * nrm.x + xv[1] * nrm.y + xv[2] * nrm.z);
  if (g > 1.0) g = 1.0;
  double R = std::sqrt(std::max(0.0, (1.0 - g) * (1.0 + g)));
  if (R < 1e-300) R = 1e-300;
  double psi = std::atan2(B, A);
  double v0 = -psi, v1 = D - psi;
  if (std::fabs(v0) > 1.5 || std::fabs(v1) > 1.5) return false;  // far: chord is fine
  auto w_of = [&](double v) { return std::max(1.0 - R * std::cos(v), 0.0); };
  auto wlogw = [](double w) { return w > 1e-300 ? w * std::log(w) : 0.0; };
  auto logw_sin = [&](double v) {
    double w = w_of(v);
    return w > 1e-300 ? std::log(w) * std::sin(v) : 0.0;
  };
  auto atan_term = [&](double v) {
    if (g < 1e-150) return 0.0;
    return (2.0 * g / R) * std::atan(((1.0 + R) / g) * std::tan(0.5 * v));
  };
  double Js, Jc;
  if (R < 1e-8) {
    // x nearly orthogonal to the arc plane: log(1 - R cos v) ~ -R cos v
    Js = -R * 0.5 * (std::sin(v1) * std::sin(v1) - std::sin(v0) * std::sin(v0));
    Jc = -R * 0.5 * ((v1 + std::sin(v1) * std::cos(v1)) - (v0 + std::sin(v0) * std::cos(v0)));
  } else {
    Js = (wlogw(w_of(v1)) - w_of(v1) - (wlogw(w_of(v0)) - w_of(v0))) / R;
    Jc = (logw_sin(v1) - std::sin(v1) - v1 / R + atan_term(v1)) -
         (logw_sin(v0) - std::sin(v0) - v0 / R + atan_term(v0));
  }
  double cp = std::cos(psi), sp = std::sin(psi);
  double ca = cp * Js + sp * Jc;  // coefficient of -a
  double ct = cp * Jc - sp * Js;  // coefficient of +t
  out = {-a.x * ca + t.x * ct, -a.y * ca + t.y * ct, -a.z * ca + t.z * ct};
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

struct ContourEvaluator::CurveData {
  std::size_t n{};
  double ds{};
  double factor{};  // jump / 4pi
  std::vector<double> yx, yy, yz;     // node positions
  std::vector<double> tx, ty, tz;     // dy/ds, 4th-order in index space
  std::vector<double> logq_self;      // log(|y'(s_i)|^2 / 2) per node
  std::shared_ptr<const KussmaulTables> tables;
};

ContourEvaluator::ContourEvaluator(const CapState& state) : gamma_(state.gamma) {
  std::vector<std::vector<double>> th(state.curves.size()), ph(state.curves.size());
  std::vector<CurveView> views(state.curves.size());
  for (std::size_t j = 0; j < state.curves.size(); ++j) {
    const auto& curve = state.curves[j];
    th[j].resize(curve.size());
    ph[j].resize(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
      th[j][i] = curve.nodes[i].theta;
      ph[j][i] = curve.nodes[i].phi;
    }
    views[j] = {th[j].data(), ph[j].data(), curve.size(), curve.jump};
  }
  build(views);
}

ContourEvaluator::ContourEvaluator(std::span<const CurveView> views, double gamma)
    : gamma_(gamma) {
  build(views);
}

ContourEvaluator::ContourEvaluator(ContourEvaluator&&) noexcept = default;
ContourEvaluator::~ContourEvaluator() = default;

void ContourEvaluator::build(std::span<const CurveView> views) {
  curves_.reserve(views.size());
  for (const CurveView& view : views) {
    CurveData c;
    c.n = view.n;
    if (c.n < 8) throw DegenerateCurve("ContourEvaluator: curve with fewer than 8 nodes");
    c.ds = kTwoPi / static_cast<double>(c.n);
    c.factor = view.jump / (4.0 * kPi);
    c.yx.resize(c.n);
    c.yy.resize(c.n);
    c.yz.resize(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
      double st = std::sin(view.theta[i]);
      c.yx[i] = st * std::cos(view.phi[i]);
      c.yy[i] = st * std::sin(view.phi[i]);
      c.yz[i] = std::cos(view.theta[i]);
    }
    c.tx.resize(c.n);
    c.ty.resize(c.n);
    c.tz.resize(c.n);
    c.logq_self.resize(c.n);
    double scale = 1.0 / (12.0 * c.ds);
    for (std::size_t i = 0; i < c.n; ++i) {
      std::size_t im2 = (i + c.n - 2) % c.n, im1 = (i + c.n - 1) % c.n;
      std::size_t ip1 = (i + 1) % c.n, ip2 = (i + 2) % c.n;
      c.tx[i] = (8.0 * (c.yx[ip1] - c.yx[im1]) - (c.yx[ip2] - c.yx[im2])) * scale;
      c.ty[i] = (8.0 * (c.yy[ip1] - c.yy[im1]) - (c.yy[ip2] - c.yy[im2])) * scale;
      c.tz[i] = (8.0 * (c.yz[ip1] - c.yz[im1]) - (c.yz[ip2] - c.yz[im2])) * scale;
      double q = 0.5 * (c.tx[i] * c.tx[i] + c.ty[i] * c.ty[i] + c.tz[i] * c.tz[i]);
      c.logq_self[i] = std::log(q > 1e-300 ? q : 1e-300);
    }
    c.tables = kussmaul_tables(static_cast<int>(c.n));
    total_nodes_ += c.n;
    curves_.push_back(std::move(c));
  }
}

VelocitySample ContourEvaluator::project(const Vec3& acc, double st, double ct, double sp,
                                         double cp) const {
  // e_theta = (ct cp, ct sp, -st), e_phi = (-sp, cp, 0)
  double ut = acc.x * ct * cp + acc.y * ct * sp - acc.z * st;
  double up = -acc.x * sp + acc.y * cp;
  up += gamma_ * st;
  return {ut, up};
}

void ContourEvaluator::accumulate_curve(const CurveData& c, const double* xv, int self_index,
                                        Vec3& acc, std::vector<double>& scratch) const {
  if (scratch.size() < c.n) scratch.resize(c.n);
  double out[3];
  if (self_index < 0) {
    weight_pass_far(c.yx.data(), c.yy.data(), c.yz.data(), scratch.data(), xv[0], xv[1], xv[2],
                    c.ds, c.n);
    accum_pass(c.tx.data(), c.ty.data(), c.tz.data(), scratch.data(), c.n, out);
  } else {
    std::size_t i = static_cast<std::size_t>(self_index);
    std::size_t off = c.n - i;
    weight_pass(c.yx.data(), c.yy.data(), c.yz.data(), c.tables->lg2.data() + off,
                c.tables->r2.data() + off, scratch.data(), xv[0], xv[1], xv[2], c.ds, c.n);
    // replace the self weight: lim log((1-x.y)/(4sin^2)) = log(|y'|^2/2)
    scratch[i] = c.ds * c.logq_self[i] + c.tables->r2[c.n];
    accum_pass(c.tx.data(), c.ty.data(), c.tz.data(), scratch.data(), c.n, out);
  }
  acc.x += c.factor * out[0];
  acc.y += c.factor * out[1];
  acc.z += c.factor * out[2];
}

void ContourEvaluator::accumulate_curve_chords(const CurveData& c, const double* xv,
                                               Vec3& acc) const {
  // Exact log integral over every segment: geodesic-arc form for segments
  // close to the target (the chord model is only first-order accurate at the
  // log singularity), chord form elsewhere.  Finite for any x that is not a
  // node, and integrable even through one.
  double ox = 0.0, oy = 0.0, oz = 0.0;
  double ca = 1.0 - (xv[0] * c.yx[0] + xv[1] * c.yy[0] + xv[2] * c.yz[0]);
  double c0 = ca;
  for (std::size_t k = 0; k < c.n; ++k) {
    std::size_t k1 = k + 1 < c.n ? k + 1 : 0;
    double cb = k1 == 0 ? c0
                        : 1.0 - (xv[0] * c.yx[k1] + xv[1] * c.yy[k1] + xv[2] * c.yz[k1]);
    Vec3 a{c.yx[k], c.yy[k], c.yz[k]}, b{c.yx[k1], c.yy[k1], c.yz[k1]};
    double seg2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y) +
                  (b.z - a.z) * (b.z - a.z);
    Vec3 arc;
    if (std::min(ca, cb) < 64.0 * seg2 && arc_log_integral(a, b, xv, arc)) {
      ox += arc.x;
      oy += arc.y;
      oz += arc.z;
    } else {
      double J = chord_log_integral(std::max(ca, 0.0), std::max(cb, 0.0));
      ox += (b.x - a.x) * J;
      oy += (b.y - a.y) * J;
      oz += (b.z - a.z) * J;
    }
    ca = cb;
  }
  acc.x += c.factor * ox;
  acc.y += c.factor * oy;
  acc.z += c.factor * oz;
}

VelocitySample ContourEvaluator::at_node(int curve, std::size_t node) const {
  std::vector<double> scratch;
  const CurveData& self = curves_[static_cast<std::size_t>(curve)];
  double xv[3] = {self.yx[node], self.yy[node], self.yz[node]};
  Vec3 acc{};
  for (std::size_t j = 0; j < curves_.size(); ++j)
    accumulate_curve(curves_[j], xv,
                     j == static_cast<std::size_t>(curve) ? static_cast<int>(node) : -1, acc,
                     scratch);
  double ct = xv[2];
  double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  double cp = xv[0] / st, sp = xv[1] / st;
  return project(acc, st, ct, sp, cp);
}

VelocitySample ContourEvaluator::at_point(const UnitVec3& x, double eps_core) const {
  std::vector<double> scratch;
  double xv[3] = {x.x, x.y, x.z};
  Vec3 acc{};
  for (const CurveData& c : curves_) {
    // locate the closest node to decide the rule
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < c.n; ++k) {
      double dx = x.x - c.yx[k], dy = x.y - c.yy[k], dz = x.z - c.yz[k];
      double d2 = dx * dx + dy * dy + dz * dz;
      if (d2 < best) {
        best = d2;
        arg = k;
      }
    }
    if (best < eps_core * eps_core)
      throw CoreError("velocity_contour: target within eps_core of an interface node");
    std::size_t nxt = (arg + 1) % c.n, prv = (arg + c.n - 1) % c.n;
    double hx = c.yx[nxt] - c.yx[prv], hy = c.yy[nxt] - c.yy[prv], hz = c.yz[nxt] - c.yz[prv];
    double h_local = 0.5 * std::sqrt(hx * hx + hy * hy + hz * hz);
    if (best < 9.0 * h_local * h_local)
      accumulate_curve_chords(c, xv, acc);
    else
      accumulate_curve(c, xv, -1, acc, scratch);
  }
  double ct = x.z;
  double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  if (st < 1e-12) throw PoleError("velocity at a pole has no (e_theta, e_phi) frame");
  double cp = x.x / st, sp = x.y / st;
  return project(acc, st, ct, sp, cp);
}

void ContourEvaluator::eval_all_nodes(VelocitySample* out, int nthreads) const {
  struct Target {
    int curve;
    std::size_t node;
  };
  std::vector<Target> targets;
  targets.reserve(total_nodes_);
  for (std::size_t j = 0; j < curves_.size(); ++j)
    for (std::size_t i = 0; i < curves_[j].n; ++i)
      targets.push_back({static_cast<int>(j), i});

  std::size_t n = targets.size();
  if (nthreads < 1) nthreads = 1;
  std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(nthreads), n);
  std::size_t chunk = (n + nt - 1) / nt;
  auto run = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> scratch;
    for (std::size_t t = lo; t < hi; ++t) {
      const CurveData& self = curves_[static_cast<std::size_t>(targets[t].curve)];
      std::size_t node = targets[t].node;
      double xv[3] = {self.yx[node], self.yy[node], self.yz[node]};
      Vec3 acc{};
      for (std::size_t j = 0; j < curves_.size(); ++j)
        accumulate_curve(curves_[j], xv,
                         j == static_cast<std::size_t>(targets[t].curve)
                             ? static_cast<int>(node)
                             : -1,
                         acc, scratch);
      double ct = xv[2];
      double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      double cp = xv[0] / st, sp = xv[1] / st;
      out[t] = project(acc, st, ct, sp, cp);
    }
  };
  if (nt == 1) {
    run(0, n);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo < hi) pool.emplace_back(run, lo, hi);
  }
  run(0, std::min(chunk, n));
  for (auto& th : pool) th.join();
}

VelocitySample velocity_contour(const CapState& state, const UnitVec3& x) {
  return ContourEvaluator(state).at_point(x);
}

// ---------------------------------------------------------------------------

double VorticityMesh::sup_norm() const {
  double m = 0.0;
  for (double v : omega) m = std::max(m, std::fabs(v));
  return m;
}

double VorticityMesh::l1_norm() const {
  KahanSum acc;
  for (int i = 0; i < n_theta; ++i) {
    double area = cell_area(i);
    KahanSum row;
    for (int j = 0; j < n_phi; ++j)
      row.add(std::fabs(omega[static_cast<std::size_t>(i) * n_phi + j]));
    acc.add(row.value() * area);
  }
  return acc.value();
}

namespace {

VorticityMesh finish_mesh(LevelRaster&& levels, double gamma) {
  VorticityMesh m;
  m.n_theta = levels.n_theta;
  m.n_phi = levels.n_phi;
  m.omega = std::move(levels.zeta);
  m.sin_theta.resize(static_cast<std::size_t>(m.n_theta));
  m.cos_theta.resize(static_cast<std::size_t>(m.n_theta));
  m.sin_phi.resize(static_cast<std::size_t>(m.n_phi));
  m.cos_phi.resize(static_cast<std::size_t>(m.n_phi));
  for (int i = 0; i < m.n_theta; ++i) {
    double th = (i + 0.5) * m.dtheta();
    m.sin_theta[static_cast<std::size_t>(i)] = std::sin(th);
    m.cos_theta[static_cast<std::size_t>(i)] = std::cos(th);
  }
  for (int j = 0; j < m.n_phi; ++j) {
    double ph = (j + 0.5) * m.dphi();
    m.sin_phi[static_cast<std::size_t>(j)] = std::sin(ph);
    m.cos_phi[static_cast<std::size_t>(j)] = std::cos(ph);
  }
  // omega = zeta + 2 gamma cos(theta), then projected to zero mean
  KahanSum tot, area_tot;
  for (int i = 0; i < m.n_theta; ++i) {
    double area = m.cell_area(i);
    KahanSum row;
    for (int j = 0; j < m.n_phi; ++j) {
      std::size_t idx = static_cast<std::size_t>(i) * m.n_phi + j;
      m.omega[idx] += 2.0 * gamma * m.cos_theta[static_cast<std::size_t>(i)];
      row.add(m.omega[idx]);
    }
    tot.add(row.value() * area);
    area_tot.add(area * m.n_phi);
  }
  double mean = tot.value() / area_tot.value();
  for (double& v : m.omega) v -= mean;
  return m;
}

}  // namespace

VorticityMesh rasterize(const CapState& state, int n_theta, int n_phi) {
  return finish_mesh(rasterize_levels(state, n_theta, n_phi), state.gamma);
}

VorticityMesh rasterize(const ZonalCap& cap, int n_theta, int n_phi) {
  return finish_mesh(rasterize_levels(cap, n_theta, n_phi), cap.gamma);
}

VelocitySample velocity_oracle(const VorticityMesh& mesh, const UnitVec3& x) {
  double dth = mesh.dtheta(), dph = mesh.dphi();
  Vec3 acc{};
  for (int i = 0; i < mesh.n_theta; ++i) {
    double st = mesh.sin_theta[static_cast<std::size_t>(i)];
    double ct = mesh.cos_theta[static_cast<std::size_t>(i)];
    double area = st * dth * dph;
    double diag2 = dth * dth + st * st * dph * dph;
    double ax = 0.0, ay = 0.0, az = 0.0;
    for (int j = 0; j < mesh.n_phi; ++j) {
      double yx = st * mesh.cos_phi[static_cast<std::size_t>(j)];
      double yy = st * mesh.sin_phi[static_cast<std::size_t>(j)];
      double w = mesh.omega[static_cast<std::size_t>(i) * mesh.n_phi + j];
      double r2 = 2.0 * (1.0 - (x.x * yx + x.y * yy + x.z * ct));
      if (r2 < 4.0 * diag2) {
        // near-field: 8x8 subsample of the cell with the parent level
        double th0 = i * dth, ph0 = j * dph;
        double sub_area_scale = (dth / 8.0) * (dph / 8.0);
        for (int a = 0; a < 8; ++a) {
          double ths = th0 + (a + 0.5) * dth / 8.0;
          double sts = std::sin(ths), cts = std::cos(ths);
          for (int b = 0; b < 8; ++b) {
            double phs = ph0 + (b + 0.5) * dph / 8.0;
            double ysx = sts * std::cos(phs), ysy = sts * std::sin(phs);
            double r2s = 2.0 * (1.0 - (x.x * ysx + x.y * ysy + x.z * cts));
            if (r2s < 1e-24) continue;  // symmetric principal-value skip
            double f = w * sts * sub_area_scale / r2s;
            ax += (x.y * cts - x.z * ysy) * f;
            ay += (x.z * ysx - x.x * cts) * f;
            az += (x.x * ysy - x.y * ysx) * f;
          }
        }
        continue;
      }
      if (r2 < 1e-24) throw SingularityError("velocity_oracle: source coincides with target");
      double f = w * area / r2;
      ax += (x.y * ct - x.z * yy) * f;
      ay += (x.z * yx - x.x * ct) * f;
      az += (x.x * yy - x.y * yx) * f;
    }
    acc.x += ax;
    acc.y += ay;
    acc.z += az;
  }
  acc = (-1.0 / kTwoPi) * acc;
  double ct = x.z;
  double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  if (st < 1e-12) throw PoleError("velocity at a pole has no (e_theta, e_phi) frame");
  double cp = x.x / st, sp = x.y / st;
  double ut = acc.x * ct * cp + acc.y * ct * sp - acc.z * st;
  double up = -acc.x * sp + acc.y * cp;
  return {ut, up};
}

double g_x3_quadrature(const UnitVec3& x, int n_theta, int n_phi) {
  double dth = kPi / n_theta, dph = kTwoPi / n_phi;
  KahanSum acc;
  for (int i = 0; i < n_theta; ++i) {
    double th = (i + 0.5) * dth;
    double st = std::sin(th), ct = std::cos(th);
    double area = st * dth * dph;
    double diag2 = dth * dth + st * st * dph * dph;
    double row = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      double ph = (j + 0.5) * dph;
      double yx = st * std::cos(ph), yy = st * std::sin(ph);
      double r2 = 2.0 * (1.0 - (x.x * yx + x.y * yy + x.z * ct));
      if (r2 < 4.0 * diag2) {
        double th0 = i * dth, ph0 = j * dph;
        double sub_scale = (dth / 8.0) * (dph / 8.0);
        for (int a = 0; a < 8; ++a) {
          double ths = th0 + (a + 0.5) * dth / 8.0;
          double sts = std::sin(ths), cts = std::cos(ths);
          for (int b = 0; b < 8; ++b) {
            double phs = ph0 + (b + 0.5) * dph / 8.0;
            double ysx = sts * std::cos(phs), ysy = sts * std::sin(phs);
            double r2s = 2.0 * (1.0 - (x.x * ysx + x.y * ysy + x.z * cts));
            if (r2s < 1e-28) continue;
            double g = (std::log(0.25 * r2s) - kLog2) / (2.0 * kTwoPi);
            row += g * cts * sts * sub_scale;
          }
        }
        continue;
      }
      double g = (std::log(0.25 * r2) - kLog2) / (2.0 * kTwoPi);
      row += g * ct * area;
    }
    acc.add(row);
  }
  return acc.value();
}

double sup_velocity_bound(const VorticityMesh& mesh) {
  return 1.5 / std::sqrt(kPi) * std::sqrt(mesh.sup_norm() * mesh.l1_norm());
}

}  // namespace capsim
