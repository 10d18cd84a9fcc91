#include "nslab/reports.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nslab {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory to '" + path + "'");
  const Domain& d = traj.domain;
  out << "# nslab trajectory v1\n";
  out << "# dim=" << d.dim << " cells=" << d.cells[0];
  if (d.dim == 2) out << "x" << d.cells[1];
  out << " x=[" << fmt_double(d.lower[0]) << "," << fmt_double(d.upper[0]) << "]";
  if (d.dim == 2)
    out << " y=[" << fmt_double(d.lower[1]) << "," << fmt_double(d.upper[1]) << "]";
  out << " epsilon=" << fmt_double(traj.epsilon) << " delta=" << fmt_double(traj.delta)
      << " beta=" << fmt_double(traj.beta) << " dt=" << fmt_double(traj.dt)
      << " cadence=" << traj.store_cadence << "\n";
  out << "t,step,inflow_acc,outflow_acc,k_prev,z_prev";
  const int n = d.cell_count();
  for (int i = 0; i < n; ++i) out << ",rho_" << i;
  for (int b = 0; b < d.dim; ++b)
    for (int i = 0; i < n; ++i) out << ",u" << b << "_" << i;
  out << "\n";
  for (int s = 0; s < traj.steps(); ++s) {
    const int step = traj.step_index[s];
    const double k_prev = step > 0 ? traj.k_history[step - 1] : 0.0;
    const double z_prev = step > 0 ? traj.z_norm_history[step - 1] : 0.0;
    out << fmt_double(traj.times[s]) << "," << step << ","
        << fmt_double(traj.inflow_acc[s]) << "," << fmt_double(traj.outflow_acc[s])
        << "," << fmt_double(k_prev) << "," << fmt_double(z_prev);
    for (int i = 0; i < n; ++i) out << "," << fmt_double(traj.rho[s][i]);
    for (int b = 0; b < d.dim; ++b)
      for (int i = 0; i < n; ++i) out << "," << fmt_double(traj.u[s](i, b));
    out << "\n";
  }
}

void load_trajectory_csv(Trajectory& traj, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read trajectory from '" + path + "'");
  std::string line;
  const int n = traj.domain.cell_count();
  const int dim = traj.domain.dim;
  traj.times.clear();
  traj.step_index.clear();
  traj.rho.clear();
  traj.u.clear();
  traj.inflow_acc.clear();
  traj.outflow_acc.clear();
  traj.k_history.clear();
  traj.z_norm_history.clear();
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string tok;
    auto next = [&]() {
      if (!std::getline(row, tok, ','))
        throw Error("trajectory row truncated in '" + path + "'");
      return std::stod(tok);
    };
    const double t = next();
    const int step = static_cast<int>(next());
    const double in_acc = next();
    const double out_acc = next();
    const double k_prev = next();
    const double z_prev = next();
    Field rho(n);
    for (int i = 0; i < n; ++i) rho[i] = next();
    VecField u(n, dim);
    for (int b = 0; b < dim; ++b)
      for (int i = 0; i < n; ++i) u(i, b) = next();
    traj.times.push_back(t);
    traj.step_index.push_back(step);
    traj.inflow_acc.push_back(in_acc);
    traj.outflow_acc.push_back(out_acc);
    traj.rho.push_back(std::move(rho));
    traj.u.push_back(std::move(u));
    if (step > 0) {
      traj.k_history.push_back(k_prev);
      traj.z_norm_history.push_back(z_prev);
    }
  }
  if (traj.times.empty()) throw Error("trajectory file '" + path + "' is empty");
}

void save_runlog_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write run log to '" + path + "'");
  out << "t,mass,kinetic,helmholtz,z_norm,min_rho,max_rho\n";
  for (const RunLogRow& r : traj.runlog) {
    out << fmt_double(r.t) << "," << fmt_double(r.mass) << ","
        << fmt_double(r.kinetic) << "," << fmt_double(r.helmholtz) << ","
        << fmt_double(r.z_norm) << "," << fmt_double(r.min_rho) << ","
        << fmt_double(r.max_rho) << "\n";
  }
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write report to '" + path + "'");
  out << j.dump(2) << "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

void write_manifest(const RunManifest& m, const std::string& path) {
  Json j;
  j["config_hash"] = m.config_hash;
  j["code_version"] = m.code_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["artifacts"] = m.artifacts;
  Json st = Json::object();
  for (const auto& [k, v] : m.statuses) st[k] = v;
  j["statuses"] = st;
  j["all_pass"] = m.all_pass;
  write_json(j, path);
}

}  // namespace nslab
