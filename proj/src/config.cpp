#include "capsim/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace capsim {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ParseError("unknown key \"" + where + it.key() + "\"");
  }
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (!j.is_object()) throw ParseError("config root must be a JSON object");
  reject_unknown(j, {"cap", "bump", "flow", "grids", "tolerances", "output", "seed"}, "");
  if (j.contains("cap")) {
    const json& c = j.at("cap");
    reject_unknown(c, {"thetas", "omegas_free", "gamma"}, "cap.");
    get_to(c, "thetas", cfg.thetas);
    get_to(c, "omegas_free", cfg.omegas_free);
    get_to(c, "gamma", cfg.gamma);
  }
  if (j.contains("bump")) {
    const json& b = j.at("bump");
    reject_unknown(b, {"k0", "mu", "phi_c", "w", "n_nodes"}, "bump.");
    get_to(b, "k0", cfg.k0);
    get_to(b, "mu", cfg.mu);
    get_to(b, "phi_c", cfg.phi_c);
    get_to(b, "w", cfg.w);
    get_to(b, "n_nodes", cfg.n_nodes);
  }
  if (j.contains("flow")) {
    const json& f = j.at("flow");
    reject_unknown(f,
                   {"dt", "t_end", "scheme", "renorm_every", "theta_min", "theta_max", "stride",
                    "threads", "h_max", "h_min", "node_cap", "refine_frames"},
                   "flow.");
    get_to(f, "dt", cfg.flow.dt);
    get_to(f, "t_end", cfg.flow.t_end);
    if (f.contains("scheme")) {
      std::string s = f.at("scheme").get<std::string>();
      if (s == "rk4")
        cfg.flow.scheme = Scheme::RK4;
      else if (s == "rk2")
        cfg.flow.scheme = Scheme::RK2;
      else
        throw ParseError("flow.scheme must be \"rk4\" or \"rk2\"");
    }
    get_to(f, "renorm_every", cfg.flow.renorm_every);
    get_to(f, "theta_min", cfg.flow.theta_min);
    get_to(f, "theta_max", cfg.flow.theta_max);
    get_to(f, "stride", cfg.flow.stride);
    get_to(f, "threads", cfg.flow.threads);
    get_to(f, "h_max", cfg.flow.h_max);
    get_to(f, "h_min", cfg.flow.h_min);
    get_to(f, "node_cap", cfg.flow.node_cap);
    get_to(f, "refine_frames", cfg.flow.refine_frames);
  }
  if (j.contains("grids")) {
    const json& g = j.at("grids");
    reject_unknown(g, {"oracle_n_theta", "oracle_n_phi", "raster_n_theta", "raster_n_phi"},
                   "grids.");
    get_to(g, "oracle_n_theta", cfg.oracle_n_theta);
    get_to(g, "oracle_n_phi", cfg.oracle_n_phi);
    get_to(g, "raster_n_theta", cfg.raster_n_theta);
    get_to(g, "raster_n_phi", cfg.raster_n_phi);
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t,
                   {"fit_window_fraction", "kappa_lower_factor", "kappa_upper_factor",
                    "kappa_control_tol", "stretch_slope_rtol", "confinement_xi",
                    "area_drift_rtol", "eps_disc", "theorem_mode"},
                   "tolerances.");
    get_to(t, "fit_window_fraction", cfg.fit_window_fraction);
    get_to(t, "kappa_lower_factor", cfg.kappa_lower_factor);
    get_to(t, "kappa_upper_factor", cfg.kappa_upper_factor);
    get_to(t, "kappa_control_tol", cfg.kappa_control_tol);
    get_to(t, "stretch_slope_rtol", cfg.stretch_slope_rtol);
    get_to(t, "confinement_xi", cfg.confinement_xi);
    get_to(t, "area_drift_rtol", cfg.area_drift_rtol);
    get_to(t, "eps_disc", cfg.eps_disc);
    get_to(t, "theorem_mode", cfg.theorem_mode);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"dir", "snapshots"}, "output.");
    get_to(o, "dir", cfg.out_dir);
    get_to(o, "snapshots", cfg.write_snapshots);
  }
  get_to(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  bool blank = true;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      blank = false;
      break;
    }
  if (blank) {
    ExperimentConfig cfg;
    cfg.validate();
    return cfg;
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

nlohmann::json emit_config(const ExperimentConfig& cfg) {
  json j;
  j["cap"] = {{"thetas", cfg.thetas}, {"omegas_free", cfg.omegas_free}, {"gamma", cfg.gamma}};
  j["bump"] = {{"k0", cfg.k0}, {"mu", cfg.mu}, {"phi_c", cfg.phi_c}, {"w", cfg.w},
               {"n_nodes", cfg.n_nodes}};
  j["flow"] = {{"dt", cfg.flow.dt},
               {"t_end", cfg.flow.t_end},
               {"scheme", cfg.flow.scheme == Scheme::RK4 ? "rk4" : "rk2"},
               {"renorm_every", cfg.flow.renorm_every},
               {"theta_min", cfg.flow.theta_min},
               {"theta_max", cfg.flow.theta_max},
               {"stride", cfg.flow.stride},
               {"threads", cfg.flow.threads},
               {"h_max", cfg.flow.h_max},
               {"h_min", cfg.flow.h_min},
               {"node_cap", cfg.flow.node_cap},
               {"refine_frames", cfg.flow.refine_frames}};
  j["grids"] = {{"oracle_n_theta", cfg.oracle_n_theta},
                {"oracle_n_phi", cfg.oracle_n_phi},
                {"raster_n_theta", cfg.raster_n_theta},
                {"raster_n_phi", cfg.raster_n_phi}};
  j["tolerances"] = {{"fit_window_fraction", cfg.fit_window_fraction},
                     {"kappa_lower_factor", cfg.kappa_lower_factor},
                     {"kappa_upper_factor", cfg.kappa_upper_factor},
                     {"kappa_control_tol", cfg.kappa_control_tol},
                     {"stretch_slope_rtol", cfg.stretch_slope_rtol},
                     {"confinement_xi", cfg.confinement_xi},
                     {"area_drift_rtol", cfg.area_drift_rtol},
                     {"eps_disc", cfg.eps_disc},
                     {"theorem_mode", cfg.theorem_mode}};
  j["output"] = {{"dir", cfg.out_dir}, {"snapshots", cfg.write_snapshots}};
  j["seed"] = cfg.seed;
  return j;
}

nlohmann::json summary_to_json(const RunSummary& s) {
  json j;
  j["times"] = s.times;
  j["perimeter"] = s.perimeter;
  j["stretch"] = s.stretch;
  j["l1"] = s.l1;
  j["confinement"] = s.confinement;
  j["gauss_raster"] = s.gauss_raster;
  j["areas"] = s.areas;
  j["x0"] = {{"theta", s.x0_theta}, {"phi", s.x0_phi}};
  j["x1"] = {{"theta", s.x1_theta}, {"phi", s.x1_phi}};
  j["l1_initial"] = s.l1_initial;
  j["gauss_defect_initial"] = s.gauss_defect_initial;
  j["confinement_max"] = s.confinement_max;
  j["stretch_slope"] = s.stretch_slope;
  j["kappa_hat"] = s.kappa_hat;
  j["t0_hat"] = s.t0_hat;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["kappa_theory"] = s.kappa_theory;
  j["taylor_a1"] = s.taylor_a1;
  j["taylor_a2"] = s.taylor_a2;
  j["taylor_pred"] = s.taylor_pred;
  j["pass_taylor"] = s.pass_taylor;
  j["eps_disc"] = s.eps_disc;
  j["final_nodes"] = s.final_nodes;
  j["frames"] = s.frames;
  j["aborted"] = s.aborted;
  j["abort_reason"] = s.abort_reason;
  j["pass"] = {{"stretch", s.pass_stretch},
               {"length_bound", s.pass_length_bound},
               {"kappa", s.pass_kappa},
               {"area", s.pass_area},
               {"gauss", s.pass_gauss},
               {"confinement", s.pass_confinement},
               {"simple", s.pass_simple},
               {"all", s.all_pass()}};
  return j;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write: " + path);
  out << text;
}

void write_series_csv(const std::string& path, const RunSummary& s) {
  std::string buf = "t,perimeter,stretch,l1,confinement,gauss_raster";
  std::size_t n_areas = s.areas.empty() ? 0 : s.areas.front().size();
  for (std::size_t k = 0; k < n_areas; ++k) buf += ",area" + std::to_string(k + 1);
  buf += "\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    buf += csv_number(s.times[i]) + "," + csv_number(s.perimeter[i]) + "," +
           csv_number(s.stretch[i]) + "," + csv_number(s.l1[i]) + "," +
           csv_number(s.confinement[i]) + "," + csv_number(s.gauss_raster[i]);
    for (std::size_t k = 0; k < n_areas; ++k) buf += "," + csv_number(s.areas[i][k]);
    buf += "\n";
  }
  write_text(path, buf);
}

void write_trajectory_csv(const std::string& path, const RunSummary& s, std::uint64_t x0_id,
                          std::uint64_t x1_id) {
  std::string buf = "t,point_id,theta,phi_lifted\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    buf += csv_number(s.times[i]) + "," + std::to_string(x0_id) + "," +
           csv_number(s.x0_theta[i]) + "," + csv_number(s.x0_phi[i]) + "\n";
    buf += csv_number(s.times[i]) + "," + std::to_string(x1_id) + "," +
           csv_number(s.x1_theta[i]) + "," + csv_number(s.x1_phi[i]) + "\n";
  }
  write_text(path, buf);
}

std::string snapshot_header() { return "frame,curve_label,node_index,theta,phi_lifted\n"; }

void append_snapshot(std::string& buf, const FrameInfo& fi) {
  for (const auto& c : fi.state.curves)
    for (std::size_t i = 0; i < c.size(); ++i)
      buf += std::to_string(fi.frame) + "," + std::to_string(c.label) + "," + std::to_string(i) +
             "," + csv_number(c.nodes[i].theta) + "," + csv_number(c.nodes[i].phi) + "\n";
}

}  // namespace capsim
