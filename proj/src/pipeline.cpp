#include "nslab/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "nslab/audit.hpp"
#include "nslab/ws.hpp"

namespace nslab {

namespace {

namespace fs = std::filesystem;

constexpr const char* kCodeVersion = "nslab 0.1.0";

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ManifestBuilder {
  RunManifest m;
  fs::path dir;

  explicit ManifestBuilder(const RunConfig& cfg) : dir(cfg.out_dir) {
    fs::create_directories(dir);
    m.config_hash = fnv1a_hex(cfg.source_text);
    m.code_version = kCodeVersion;
    m.started_at = now_iso8601();
  }
  std::string path(const std::string& name) {
    m.artifacts.push_back(name);
    return (dir / name).string();
  }
  void status(const std::string& key, bool pass) {
    m.statuses.emplace_back(key, pass ? "PASS" : "FAIL");
    m.all_pass = m.all_pass && pass;
  }
  RunManifest finish() {
    m.finished_at = now_iso8601();
    write_manifest(m, (dir / "manifest.json").string());
    return m;
  }
};

Json ledger_json(const EnergyLedger& led) {
  Json j;
  j["tau"] = led.tau;
  j["lhs"] = {{"final_energy", led.final_energy},
              {"inflow_relative_term", led.inflow_relative_term},
              {"outflow_helmholtz_term", led.outflow_helmholtz_term},
              {"viscous_dissipation", led.viscous_dissipation},
              {"eps_density_dissipation", led.eps_density_dissipation},
              {"eps_quartic_dissipation", led.eps_quartic_dissipation}};
  j["rhs"] = {{"initial_energy", led.initial_energy},
              {"inflow_helmholtz_flux", led.inflow_helmholtz_flux},
              {"pressure_div_uinf", led.pressure_div_uinf},
              {"convection_uinf", led.convection_uinf},
              {"eps_cross_term", led.eps_cross_term},
              {"forcing_work", led.forcing_work}};
  j["residual"] = led.residual();
  return j;
}

Json rel_energy_json(const RelEnergyReport& rep) {
  Json j;
  j["variant"] = rep.variant == RelEnergyVariant::REA   ? "REA"
                 : rep.variant == RelEnergyVariant::REI ? "REI"
                                                        : "REIS";
  j["tau"] = rep.tau;
  j["e_tau"] = rep.e_tau;
  j["e_initial"] = rep.e_initial;
  j["dissipation_diff"] = rep.dissipation_diff;
  j["lhs_terms"] = rep.lhs_terms;
  j["rhs_terms"] = rep.rhs_terms;
  j["residual"] = rep.residual;
  j["test_pair_continuity_residual"] = rep.test_pair_continuity_residual;
  if (rep.variant == RelEnergyVariant::REIS) {
    j["remainder"] = {{"boundary", rep.remainder_boundary},
                      {"velocity_group", rep.remainder_velocity_group},
                      {"pressure_group", rep.remainder_pressure_group},
                      {"grad_r_group", rep.remainder_grad_r_group},
                      {"forcing_group", rep.remainder_forcing_group},
                      {"total", rep.remainder_total}};
  }
  return j;
}

// Slack for the signed inequality residuals: c_slack (dx + dt) * scale.
double inequality_slack(const Trajectory& traj, double scale) {
  constexpr double c_slack = 2.0;
  return c_slack * (traj.domain.max_spacing() + traj.dt) * std::max(scale, 1e-12);
}

std::vector<std::string> default_audits() {
  return {"mass", "maxprinciple", "energy", "renorm", "l2", "weak_ce", "weak_me"};
}

void run_audits(const RunConfig& cfg, const Trajectory& traj, ManifestBuilder& mb,
                Json& summary_rows) {
  std::vector<std::string> which = cfg.audits.empty() ? default_audits() : cfg.audits;
  const double tau = traj.times.back();
  for (const std::string& a : which) {
    Json row;
    row["audit"] = a;
    bool pass = true;
    if (a == "mass") {
      const MassReport rep = mass_ledger(traj);
      const double tol = 1e-10 * traj.k_history.size() *
                         std::max(1.0, std::abs(rep.mass_t));
      pass = std::abs(rep.worst_residual) <= tol;
      row["residual"] = rep.residual;
      row["worst_residual"] = rep.worst_residual;
      row["tolerance"] = tol;
      Json j;
      j["mass_t"] = rep.mass_t;
      j["inflow_integral"] = rep.inflow_integral;
      j["outflow_integral"] = rep.outflow_integral;
      j["residual"] = rep.residual;
      j["worst_residual"] = rep.worst_residual;
      j["pass"] = pass;
      write_json(j, mb.path("mass_ledger.json"));
    } else if (a == "maxprinciple") {
      const MaxPrincipleReport rep = max_principle_audit(traj);
      pass = rep.pass;
      row["worst_lower_excess"] = rep.worst_lower_excess;
      row["worst_upper_excess"] = rep.worst_upper_excess;
      Json j;
      j["pass"] = rep.pass;
      j["worst_lower_excess"] = rep.worst_lower_excess;
      j["worst_upper_excess"] = rep.worst_upper_excess;
      j["rho_lo"] = rep.rho_lo;
      j["rho_hi"] = rep.rho_hi;
      j["slack"] = rep.slack;
      write_json(j, mb.path("max_principle.json"));
    } else if (a == "energy") {
      const EnergyLedger led = energy_ledger(traj, tau);
      const double slack =
          inequality_slack(traj, std::abs(led.initial_energy) + 1.0);
      pass = led.residual() >= -slack;
      row["residual"] = led.residual();
      row["slack"] = slack;
      Json j = ledger_json(led);
      j["slack"] = slack;
      j["pass"] = pass;
      write_json(j, mb.path("energy_ledger.json"));
    } else if (a == "renorm") {
      const TestField tf = test_field("parabola", traj.domain);
      Json j;
      double worst = 0.0;
      for (const auto& [name, rb] :
           {std::pair<std::string, RenormFunction>{"identity", renorm_identity()},
            {"constant", renorm_constant(2.0)},
            {"half_square", renorm_half_square()}}) {
        const double res = renorm_residual(traj, rb, tf);
        j[name] = res;
        worst = std::max(worst, res);
      }
      const double slack = inequality_slack(traj, 1.0);
      pass = worst <= slack;
      row["worst_residual"] = worst;
      row["slack"] = slack;
      j["pass"] = pass;
      write_json(j, mb.path("renorm.json"));
    } else if (a == "l2") {
      const double defect = l2_identity_audit(traj);
      const double slack = inequality_slack(traj, 1.0);
      pass = std::abs(defect) <= slack;
      row["defect"] = defect;
      row["slack"] = slack;
      Json j;
      j["defect"] = defect;
      j["slack"] = slack;
      j["pass"] = pass;
      write_json(j, mb.path("l2_identity.json"));
    } else if (a == "weak_ce" || a == "weak_me") {
      const TestField tf = test_field(a == "weak_ce" ? "parabola_cos" : "parabola",
                                      traj.domain);
      const double res = weak_form_residual(
          traj, a == "weak_ce" ? WeakForm::CE : WeakForm::ME, tf, tau);
      const double slack = inequality_slack(traj, 1.0);
      pass = res <= slack;
      row["residual"] = res;
      row["slack"] = slack;
      Json j;
      j["test_field"] = tf.name;
      j["residual"] = res;
      j["slack"] = slack;
      j["pass"] = pass;
      write_json(j, mb.path(a + ".json"));
    } else {
      throw ConfigError("unknown audit '" + a + "'");
    }
    row["pass"] = pass;
    summary_rows.push_back(row);
    mb.status(a, pass);
  }
}

void write_summary_csv(const Json& rows, const std::string& path) {
  std::ofstream out(path);
  out << "audit,pass,detail\n";
  for (const auto& row : rows) {
    out << row["audit"].get<std::string>() << ","
        << (row["pass"].get<bool>() ? "PASS" : "FAIL") << ",";
    Json detail = row;
    detail.erase("audit");
    detail.erase("pass");
    out << "\"" << detail.dump() << "\"\n";
  }
}

RunManifest run_single(const RunConfig& cfg) {
  ManifestBuilder mb(cfg);
  SimCase sim = make_sim_case(cfg);
  if (cfg.mode == "audit" || cfg.mode == "probe") sim.cadence = 1;
  Trajectory traj = run_simulation(sim);
  save_trajectory_csv(traj, mb.path("trajectory.csv"));
  save_runlog_csv(traj, mb.path("runlog.csv"));

  if (cfg.mode == "audit") {
    Json rows = Json::array();
    run_audits(cfg, traj, mb, rows);
    write_summary_csv(rows, mb.path("summary.csv"));
  } else if (cfg.mode == "probe") {
    const PressureProbeReport rep =
        boundary_pressure_probe(traj, cfg.probe_h, cfg.probe_alpha, cfg.probe_kappa);
    const bool pass = rep.fitted_exponent >= 0.9 * rep.predicted_exponent;
    Json j;
    j["h_values"] = rep.h_values;
    j["integrals"] = rep.integrals;
    j["fitted_exponent"] = rep.fitted_exponent;
    j["predicted_exponent"] = rep.predicted_exponent;
    j["alpha"] = rep.alpha;
    j["kappa"] = rep.kappa;
    j["pass"] = pass;
    write_json(j, mb.path("pressure_probe.json"));
    mb.status("probe", pass);
  }
  return mb.finish();
}

RunManifest run_ws(const RunConfig& cfg) {
  ManifestBuilder mb(cfg);
  const PressureLaw law = make_law(cfg);
  StabilityConfig scfg;
  scfg.base_case = cfg.ws_case;
  scfg.param_a = cfg.ws_param_a;
  scfg.param_b = cfg.ws_param_b;
  scfg.perturb = cfg.ws_perturb;
  scfg.etas = cfg.ws_etas;
  scfg.cells = cfg.domain.cells[0];
  scfg.t_end = cfg.t_end;
  scfg.seed = static_cast<unsigned>(cfg.seed);
  const auto verdicts = stability_experiment(law, cfg.viscosity, scfg);
  Json j = Json::array();
  bool all = true;
  for (const auto& v : verdicts) {
    Json e;
    e["case"] = v.case_name;
    e["eta"] = v.eta;
    e["meshes"] = v.cells;
    e["e0"] = v.e0;
    e["max_violation"] = v.max_violation;
    e["pass"] = v.pass;
    e["times"] = v.times;
    e["E_curve"] = v.e_curve;
    e["bound_curve"] = v.bound_curve;
    j.push_back(e);
    all = all && v.pass;
  }
  write_json(j, mb.path("ws_verdicts.json"));
  mb.status("ws", all);
  return mb.finish();
}

RunManifest run_constants(const RunConfig& cfg) {
  ManifestBuilder mb(cfg);
  const PressureLaw law = make_law(cfg);
  const LowerBoundConstant lb =
      lower_bound_constant(law, cfg.const_a, cfg.const_b, cfg.const_grid);
  const ResidualPressureConstant rp =
      residual_pressure_check(law, cfg.const_a, cfg.const_b, cfg.const_grid);
  Json j;
  j["law"] = law.kind_name();
  j["a"] = cfg.const_a;
  j["b"] = cfg.const_b;
  j["grid"] = {{"rho_max", lb.grid.rho_max},
               {"rho_step", lb.grid.rho_step},
               {"r_step", lb.grid.r_step}};
  j["c"] = lb.c;
  j["argmin"] = {{"rho", lb.arg_rho}, {"r", lb.arg_r}};
  j["residual_pressure_c"] = rp.c;
  j["residual_pressure_argmax"] = {{"rho", rp.arg_rho}, {"r", rp.arg_r}};
  j["rentropy_c"] = rentropy_constant(lb.c, rp.c);
  write_json(j, mb.path("constants.json"));
  mb.status("constants", lb.c > 0.0);
  return mb.finish();
}

}  // namespace

RunManifest run_sweep(const RunConfig& cfg) {
  ManifestBuilder mb(cfg);
  std::vector<double> eps = cfg.sweep_epsilon.empty()
                                ? std::vector<double>{cfg.epsilon}
                                : cfg.sweep_epsilon;
  std::vector<double> del =
      cfg.sweep_delta.empty() ? std::vector<double>{cfg.delta} : cfg.sweep_delta;
  std::vector<int> cells = cfg.sweep_cells.empty()
                               ? std::vector<int>{cfg.domain.cells[0]}
                               : cfg.sweep_cells;

  struct Point {
    double epsilon, delta;
    int cells;
    std::string dir;
    double z_total = 0.0;
    double final_mass = 0.0;
    Field rho_final;
    double spacing = 0.0;
    bool ok = false;
    std::string error;
  };
  std::vector<Point> points;
  for (double e : eps)
    for (double dl : del)
      for (int c : cells) {
        Point p;
        p.epsilon = e;
        p.delta = dl;
        p.cells = c;
        char name[96];
        std::snprintf(name, sizeof(name), "eps%g_delta%g_cells%d", e, dl, c);
        p.dir = name;
        points.push_back(p);
      }

  auto run_point = [&](Point& p) {
    try {
      RunConfig sub = cfg;
      sub.mode = "simulate";
      sub.epsilon = p.epsilon;
      sub.delta = p.delta;
      if (p.delta > 0.0 && sub.beta <= std::max(sub.law_gamma, 4.5)) sub.beta = 6.0;
      sub.domain.cells[0] = p.cells;
      sub.out_dir = (fs::path(cfg.out_dir) / p.dir).string();
      sub.cadence = cfg.cadence;
      SimCase sim = make_sim_case(sub);
      Trajectory traj = run_simulation(sim);
      fs::create_directories(sub.out_dir);
      save_trajectory_csv(traj, (fs::path(sub.out_dir) / "trajectory.csv").string());
      save_runlog_csv(traj, (fs::path(sub.out_dir) / "runlog.csv").string());
      for (double z : traj.z_norm_history) p.z_total += std::pow(z, 4.0 / 3.0) * traj.dt;
      p.z_total = std::pow(p.z_total, 0.75);  // space-time L^{4/3} norm
      p.final_mass = integrate(traj.domain, traj.rho.back());
      p.rho_final = traj.rho.back();
      p.spacing = traj.domain.spacing[0];
      p.ok = true;
    } catch (const std::exception& e) {
      p.ok = false;
      p.error = e.what();
    }
  };

  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (Point& p : points) run_point(p);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= points.size()) return;
          run_point(points[i]);
        }
      });
    for (auto& th : pool) th.join();
  }

  // Deterministic aggregation (points were generated in sorted axis order).
  std::ofstream agg((fs::path(cfg.out_dir) / "sweep.csv").string());
  mb.m.artifacts.push_back("sweep.csv");
  agg << "epsilon,delta,cells,ok,z_total,final_mass,l1_cauchy_prev,conv_order\n";
  bool all_ok = true;
  const Point* prev_delta_pt = nullptr;
  std::vector<std::pair<int, double>> mesh_errors;  // for Richardson ratios
  for (size_t i = 0; i < points.size(); ++i) {
    Point& p = points[i];
    all_ok = all_ok && p.ok;
    double l1_cauchy = std::numeric_limits<double>::quiet_NaN();
    if (p.ok && prev_delta_pt && prev_delta_pt->ok &&
        prev_delta_pt->cells == p.cells && prev_delta_pt->epsilon == p.epsilon &&
        prev_delta_pt->rho_final.size() == p.rho_final.size()) {
      l1_cauchy =
          (p.rho_final - prev_delta_pt->rho_final).abs().sum() * p.spacing;
    }
    double conv_order = std::numeric_limits<double>::quiet_NaN();
    if (p.ok && i >= 2 && points[i - 1].ok && points[i - 2].ok &&
        points[i - 1].cells != p.cells && points[i - 2].cells != points[i - 1].cells &&
        points[i - 1].epsilon == p.epsilon && points[i - 1].delta == p.delta) {
      // Successive Richardson ratio on the final mass as a proxy functional.
      const double d1 = std::abs(points[i - 1].final_mass - points[i - 2].final_mass);
      const double d2 = std::abs(p.final_mass - points[i - 1].final_mass);
      if (d2 > 0.0) conv_order = std::log2(d1 / d2);
    }
    agg << fmt_double(p.epsilon) << "," << fmt_double(p.delta) << "," << p.cells
        << "," << (p.ok ? "1" : "0") << "," << fmt_double(p.z_total) << ","
        << fmt_double(p.final_mass) << "," << fmt_double(l1_cauchy) << ","
        << fmt_double(conv_order) << "\n";
    prev_delta_pt = &p;
  }
  mb.status("sweep", all_ok);
  return mb.finish();
}

RunManifest run_pipeline(const RunConfig& cfg) {
  if (cfg.mode == "sweep") return run_sweep(cfg);
  if (cfg.mode == "ws") return run_ws(cfg);
  if (cfg.mode == "constants") return run_constants(cfg);
  return run_single(cfg);
}

}  // namespace nslab
