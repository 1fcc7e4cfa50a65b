#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "capsim/config.hpp"
#include "capsim/validate.hpp"

namespace fs = std::filesystem;
using namespace capsim;

namespace {

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("CAPSIM_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 0;  // evaluator falls back to hardware concurrency
}

ExperimentConfig load(const std::string& config_path, const std::string& out_dir, int threads) {
  ExperimentConfig cfg =
      config_path.empty() ? ExperimentConfig{} : parse_config(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  cfg.flow.threads = resolve_threads(threads > 0 ? threads : cfg.flow.threads);
  cfg.validate();
  return cfg;
}

void write_run_outputs(const fs::path& dir, const ExperimentConfig& cfg, const RunSummary& s,
                       const std::string& snapshots) {
  fs::create_directories(dir);
  write_text((dir / "resolved_config.json").string(), emit_config(cfg).dump(2) + "\n");
  write_text((dir / "summary.json").string(), summary_to_json(s).dump(2) + "\n");
  write_series_csv((dir / "series.csv").string(), s);
  write_trajectory_csv((dir / "trajectory.csv").string(), s, 0, 1);
  if (!snapshots.empty()) write_text((dir / "snapshots.csv").string(), snapshots);
}

int cmd_zonal(const ExperimentConfig& cfg, int samples) {
  ZonalCap cap = cfg.cap();
  std::string buf = "theta,dthetaG,phidot\n";
  for (int i = 0; i < samples; ++i) {
    double theta = (i + 0.5) * kPi / samples;
    buf += csv_number(theta) + "," + csv_number(dtheta_G_star(cap, theta)) + "," +
           csv_number(phi_dot_star(cap, theta)) + "\n";
  }
  std::cout << buf;
  return 0;
}

int cmd_simulate(const ExperimentConfig& cfg) {
  std::string snapshots = snapshot_header();
  SnapshotSink sink = [&](const FrameInfo& fi) {
    if (cfg.write_snapshots) append_snapshot(snapshots, fi);
    std::size_t nodes = 0;
    for (const auto& c : fi.state.curves) nodes += c.size();
    std::cerr << "frame " << fi.frame << " t=" << fi.t << " nodes=" << nodes << "\n";
  };
  RunSummary s = run_experiment(cfg, sink);
  write_run_outputs(cfg.out_dir, cfg, s,
                    cfg.write_snapshots ? snapshots : std::string{});
  std::cerr << (s.all_pass() ? "simulate: all checks passed" : "simulate: CHECK FAILURES")
            << " (kappa_hat=" << s.kappa_hat << ", kappa_theory=" << s.kappa_theory << ")\n";
  return s.all_pass() ? 0 : 1;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::vector<double>& mu_list) {
  std::vector<RunSummary> runs = sweep(cfg, mu_list);
  bool all = true;
  nlohmann::json idx = nlohmann::json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ExperimentConfig c = cfg;
    c.mu = mu_list[i];
    fs::path dir = fs::path(cfg.out_dir) / ("mu_" + std::to_string(mu_list[i]));
    write_run_outputs(dir, c, runs[i], {});
    idx.push_back({{"mu", mu_list[i]},
                   {"stretch_slope", runs[i].stretch_slope},
                   {"kappa_hat", runs[i].kappa_hat},
                   {"pass", runs[i].all_pass()}});
    all = all && runs[i].all_pass();
  }
  fs::create_directories(cfg.out_dir);
  write_text((fs::path(cfg.out_dir) / "sweep.json").string(), idx.dump(2) + "\n");
  return all ? 0 : 1;
}

int cmd_validate(const ExperimentConfig& cfg) {
  std::vector<CheckResult> checks = run_validation(cfg);
  nlohmann::json j = nlohmann::json::array();
  bool all = true;
  for (const CheckResult& c : checks) {
    j.push_back({{"check_name", c.check_name},
                 {"max_error", c.max_error},
                 {"tolerance", c.tolerance},
                 {"pass", c.pass}});
    all = all && c.pass;
  }
  std::cout << j.dump(2) << "\n";
  fs::create_directories(cfg.out_dir);
  write_text((fs::path(cfg.out_dir) / "validate.json").string(), j.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capsim: contour dynamics for vortex caps on the rotating sphere"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file (see docs/format.md)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--threads", threads, "max worker threads (env CAPSIM_THREADS as fallback)");

  auto* zonal = app.add_subcommand("zonal", "print the zonal profile table as CSV");
  int samples = 1000;
  zonal->add_option("--samples", samples, "number of theta samples");

  auto* simulate = app.add_subcommand("simulate", "run one filamentation experiment");
  auto* sweep_cmd = app.add_subcommand("sweep", "run experiments over a list of mu values");
  std::vector<double> mu_list;
  sweep_cmd->add_option("--mu", mu_list, "bump amplitudes")->delimiter(',');
  auto* validate = app.add_subcommand("validate", "run the cross-check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = load(config_path, out_dir, threads);
    if (zonal->parsed()) return cmd_zonal(cfg, samples);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (sweep_cmd->parsed()) {
      if (mu_list.empty()) {
        std::cerr << "sweep: --mu list is required\n";
        return 2;
      }
      return cmd_sweep(cfg, mu_list);
    }
    if (validate->parsed()) return cmd_validate(cfg);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "config validation: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
