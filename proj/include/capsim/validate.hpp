#ifndef CAPSIM_VALIDATE_HPP
#define CAPSIM_VALIDATE_HPP

#include <random>

#include "capsim/experiment.hpp"

namespace capsim {

struct CheckResult {
  std::string check_name;
  double max_error{};
  double tolerance{};
  bool pass{};
};

// Cross-validation suite: contour evaluator vs grid oracle vs the zonal
// closed forms, Green-kernel identity, velocity sup bound, rotation
// equivariance, near-interface behaviour.
std::vector<CheckResult> run_validation(const ExperimentConfig& cfg);

// Random Gauss-consistent zonal cap with n_bands levels, interfaces kept away
// from the poles and from each other.  When monotone is set, resamples until
// the monotonicity condition of the filamentation theorem holds (gamma = 0).
ZonalCap random_cap(std::mt19937_64& rng, int n_bands, bool monotone);

}  // namespace capsim

#endif
