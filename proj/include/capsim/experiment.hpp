#ifndef CAPSIM_EXPERIMENT_HPP
#define CAPSIM_EXPERIMENT_HPP

#include <string>

#include "capsim/flow.hpp"
#include "capsim/raster.hpp"

namespace capsim {

struct ExperimentConfig {
  // cap
  std::vector<double> thetas{kPi / 2};
  std::vector<double> omegas_free{1.0};
  double gamma{0.0};
  // bump
  int k0{1};
  double mu{0.1};
  double phi_c{0.0};
  double w{0.5};
  int n_nodes{4096};
  // flow
  FlowConfig flow{};
  // grids
  int oracle_n_theta{512};
  int oracle_n_phi{1024};
  int raster_n_theta{1024};
  int raster_n_phi{2048};
  // fit and acceptance knobs
  double fit_window_fraction{2.0 / 3.0};
  double kappa_lower_factor{0.5};
  double kappa_upper_factor{4.0};
  double kappa_control_tol{1e-3};  // bound on kappa_hat for mu = 0 controls
  double stretch_slope_rtol{0.2};
  double confinement_xi{0.05};
  double area_drift_rtol{1e-3};
  double eps_disc{1e-3};  // slack in the perimeter lower-bound check
  bool theorem_mode{true};
  std::uint64_t seed{20240101};
  // output
  std::string out_dir{"out"};
  bool write_snapshots{true};

  void validate() const;  // throws ValidationError listing every violation
  ZonalCap cap() const;
};

struct TheoryRates {
  double alpha{};
  double beta{};
  double kappa{};
};

// alpha from the zonal closed forms, beta = min(sin(theta_1-|mu|),
// sin(theta_{N-1}+|mu|))/2, kappa = beta |alpha|.  RangeError when |mu|
// exceeds the drift-gap validity interval from find_mu_hat.
TheoryRates theory_kappa(const ZonalCap& cap, int k0, double mu);

struct RunSummary {
  // per-frame series
  std::vector<double> times;
  std::vector<double> perimeter;    // bumped interface
  std::vector<double> stretch;      // Phi(t,x1) - Phi(t,x0), lifted
  std::vector<double> l1;           // ||zeta(t) - zeta*||_L1, rasterized
  std::vector<double> confinement;  // max over material points of |Theta - theta_ref|
  std::vector<double> gauss_raster;
  std::vector<std::vector<double>> areas;
  // trajectories of the named points
  std::vector<double> x0_theta, x0_phi, x1_theta, x1_phi;

  double l1_initial{};
  double gauss_defect_initial{};
  double confinement_max{};
  double stretch_slope{};
  double kappa_hat{};
  double t0_hat{};
  double alpha{}, beta{}, kappa_theory{};
  double taylor_a1{}, taylor_a2{};
  double taylor_pred{};     // a1 mu + a2 mu^2 for the run's mu
  bool pass_taylor{true};   // set by sweep for |mu| <= 0.1 runs
  double eps_disc{};
  std::size_t final_nodes{};
  int frames{};
  bool aborted{false};
  std::string abort_reason;

  bool pass_stretch{};
  bool pass_length_bound{};
  bool pass_kappa{};
  bool pass_area{};
  bool pass_gauss{};
  bool pass_confinement{};
  bool pass_simple{};

  bool all_pass() const {
    return !aborted && pass_stretch && pass_length_bound && pass_kappa && pass_area &&
           pass_gauss && pass_confinement && pass_simple;
  }
};

// Frame sink for file emission (snapshots); may be empty.
using SnapshotSink = std::function<void(const FrameInfo&)>;

// Builds the bump initial data, runs the flow with per-frame refinement and
// diagnostics, fits the growth law on the tail window and fills pass flags.
// BandExit / ResolutionExhausted abort the run but return the partial summary.
RunSummary run_experiment(const ExperimentConfig& cfg, const SnapshotSink& sink = {});

// Independent runs, order preserved; per-run failures are recorded in the
// summaries, not thrown.
std::vector<RunSummary> sweep(const ExperimentConfig& base, const std::vector<double>& mu_list,
                              const SnapshotSink& sink = {});

}  // namespace capsim

#endif
