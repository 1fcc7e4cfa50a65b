#ifndef CAPSIM_CURVES_HPP
#define CAPSIM_CURVES_HPP

#include <cstdint>
#include <vector>

#include "capsim/geometry.hpp"
#include "capsim/zonal.hpp"

namespace capsim {

// Closed material interface, nodes ordered by increasing lifted longitude
// (region with smaller co-latitude on the left).  jump is the vorticity step
// across the curve, south level minus north level.
struct InterfaceCurve {
  std::vector<SphPoint> nodes;
  std::vector<std::uint64_t> ids;  // stable per-node ids, survive refinement
  double jump{};
  int label{};  // 1-based interface index

  std::size_t size() const { return nodes.size(); }
};

// Piecewise-constant absolute vorticity state: curves ordered north to south,
// region levels zeta_1..zeta_N, background rotation, simulation time.
struct CapState {
  std::vector<InterfaceCurve> curves;
  std::vector<double> levels;
  double gamma{};
  double time{};
  std::uint64_t next_id{};
};

struct BumpSpec {
  int k0{1};          // interface to perturb (1-based)
  double mu{};        // bump amplitude in radians (signed)
  double phi_c{};     // bump center longitude
  double w{};         // bump half-width in radians
  int n_nodes{4096};  // nodes per curve; must be even so phi_c + pi is a node
};

struct BumpCap {
  CapState state;
  std::uint64_t anchor_id{};  // x0: on the unperturbed parallel, phi_c + pi
  std::uint64_t tip_id{};     // x1: bump tip at (theta_k0 + mu, phi_c)
};

// All interfaces as exact parallels of the zonal cap.
CapState make_zonal_state(const ZonalCap& cap, int n_nodes);

// Zonal state with interface k0 deformed by theta(phi) = theta_k0 +
// mu * cos^2((pi/2)(phi-phi_c)/w) on |phi-phi_c| <= w.  Nodes sit exactly at
// theta_k0 outside the support and exactly at theta_k0 + mu at phi_c.
BumpCap make_bump_cap(const ZonalCap& cap, const BumpSpec& spec);

// Geodesic polyline length of the closed curve.
double perimeter(const InterfaceCurve& curve);

// Splits every segment with geodesic length > h_max at the lifted-chart
// midpoint, repeatedly, never removing nodes.  Throws ResolutionExhausted
// when the result would exceed node_cap.  Returns the number of insertions.
int refine(InterfaceCurve& curve, double h_max, std::size_t node_cap,
           std::uint64_t& next_id);

// Signed spherical area between the curve and the north pole, by a fan of
// triangle excesses from the pole (van Oosterom-Strackee solid angles).
// Positive for curves ordered with increasing phi.
double north_area(const InterfaceCurve& curve);

// Region areas north to south; they sum to 4pi by construction.
std::vector<double> region_areas(const CapState& state);

// sum_k level_k * area_k; zero for Gauss-consistent states (zonal parallels),
// O(mu*w*jump) for one-signed bump states, and conserved along the flow.
double gauss_defect(const CapState& state);

// Probabilistic simplicity check: samples non-adjacent segment pairs and
// reports the minimal chord separation found relative to local spacing.
bool simple_curve_check(const InterfaceCurve& curve, int samples, std::uint64_t seed);

}  // namespace capsim

#endif
