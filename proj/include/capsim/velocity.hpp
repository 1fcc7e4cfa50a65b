#ifndef CAPSIM_VELOCITY_HPP
#define CAPSIM_VELOCITY_HPP

#include <memory>
#include <vector>

#include "capsim/curves.hpp"
#include "capsim/raster.hpp"

namespace capsim {

// Tangential velocity components in the (e_theta, e_phi) frame.
struct VelocitySample {
  double u_theta{};
  double u_phi{};
};

// Cell-centered samples of the relative vorticity omega = zeta + 2 gamma x3
// on a lat-lon grid, projected to zero mean (the Green kernel inverts the
// Laplacian on mean-zero data; a uniform offset induces no velocity).
struct VorticityMesh {
  int n_theta{}, n_phi{};
  std::vector<double> omega;      // row-major
  std::vector<double> sin_theta;  // per row
  std::vector<double> cos_theta;
  std::vector<double> sin_phi;  // per column
  std::vector<double> cos_phi;

  double dtheta() const { return kPi / n_theta; }
  double dphi() const { return kTwoPi / n_phi; }
  double cell_area(int i) const { return sin_theta[static_cast<std::size_t>(i)] * dtheta() * dphi(); }
  double sup_norm() const;
  double l1_norm() const;
};

VorticityMesh rasterize(const CapState& state, int n_theta, int n_phi);
VorticityMesh rasterize(const ZonalCap& cap, int n_theta, int n_phi);

// Midpoint-rule Biot-Savart sum u(x) = -(1/2pi) sum (x cross y) w(y) a(y) / |x-y|^2,
// projected on the tangent frame at x.  Cells whose center lies within two
// cell diameters of x are 8x8-subsampled (near-field refinement).
VelocitySample velocity_oracle(const VorticityMesh& mesh, const UnitVec3& x);

// Quadrature of int G(x,y) y3 dsigma(y); equals -x3/2 in the continuum.
double g_x3_quadrature(const UnitVec3& x, int n_theta, int n_phi);

// (3/(2 sqrt(pi))) sqrt(sup|w| * ||w||_L1): L-infinity velocity bound from the
// optimal near/far split of the convolution estimate.
double sup_velocity_bound(const VorticityMesh& mesh);

// Contour-dynamics evaluator for a fixed state snapshot:
//   u(x) = sum_j (jump_j / 4pi) closed-int_{Gamma_j} log(1 - x.y) dl(y)
//          + gamma sin(theta) e_phi,
// with per-curve precomputed Cartesian nodes, index-space tangents and
// log-kernel quadrature tables.  Node targets use the singular product
// quadrature; off-curve targets the periodic trapezoid rule; near-curve
// targets exact integrals of the log over each chord segment.
// Lightweight view of one curve's node coordinates (lifted chart).
struct CurveView {
  const double* theta{};
  const double* phi{};
  std::size_t n{};
  double jump{};
};

class ContourEvaluator {
 public:
  explicit ContourEvaluator(const CapState& state);
  ContourEvaluator(std::span<const CurveView> views, double gamma);
  ContourEvaluator(ContourEvaluator&&) noexcept;
  ~ContourEvaluator();

  // velocity at node `node` of curve `curve` (the hot path)
  VelocitySample at_node(int curve, std::size_t node) const;

  // velocity at an arbitrary point; CoreError within eps_core of any node
  VelocitySample at_point(const UnitVec3& x, double eps_core = 1e-6) const;

  // evaluates every node of every curve; out arrays sized sum of curve sizes,
  // in curve-major node order
  void eval_all_nodes(VelocitySample* out, int nthreads) const;

  std::size_t total_nodes() const { return total_nodes_; }

 private:
  struct CurveData;
  void build(std::span<const CurveView> views);
  VelocitySample project(const Vec3& acc, double st, double ct, double sp, double cp) const;
  void accumulate_curve(const CurveData& c, const double* xv, int self_index,
                        Vec3& acc, std::vector<double>& scratch) const;
  void accumulate_curve_chords(const CurveData& c, const double* xv, Vec3& acc) const;

  std::vector<CurveData> curves_;
  double gamma_{};
  std::size_t total_nodes_{};
};

// One-off convenience wrapper over ContourEvaluator::at_point.
VelocitySample velocity_contour(const CapState& state, const UnitVec3& x);

}  // namespace capsim

#endif
