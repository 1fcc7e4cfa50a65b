#ifndef CAPSIM_RASTER_HPP
#define CAPSIM_RASTER_HPP

#include <vector>

#include "capsim/curves.hpp"

namespace capsim {

// Cell-centered lat-lon raster of the absolute vorticity levels (no rotation
// term): cell (i,j) has center theta_i = (i+1/2) pi/n_theta,
// phi_j = (j+1/2) 2pi/n_phi, and value = level of the containing region.
struct LevelRaster {
  int n_theta{}, n_phi{};
  std::vector<double> zeta;  // row-major, n_theta * n_phi

  double cell_area(int i) const;
  double dtheta() const { return kPi / n_theta; }
  double dphi() const { return kTwoPi / n_phi; }
};

// Scanline region assignment: per column, crossing parities against each
// curve decide the region of every cell center.  TopologyError when the
// south-of sets are not nested.
LevelRaster rasterize_levels(const CapState& state, int n_theta, int n_phi);

// Analytic raster of a zonal cap on the same grid.
LevelRaster rasterize_levels(const ZonalCap& cap, int n_theta, int n_phi);

// Sum_cells zeta * area of a raster (first-order boundary error vs the exact
// region integral).
double raster_integral(const LevelRaster& r);

// L1 distance between a cap state and the zonal reference on a shared grid:
// sum |zeta_state - zeta_zonal| * cell area.
double l1_distance(const CapState& state, const ZonalCap& cap, int n_theta, int n_phi);

}  // namespace capsim

#endif
