#include "nslab/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace nslab {

namespace {

struct IniEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

using IniSection = std::map<std::string, IniEntry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::map<std::string, IniSection> parse_ini(const std::string& text,
                                            const std::string& origin) {
  std::map<std::string, IniSection> sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key outside any [section]");
    sections[section][key] = IniEntry{trim(line.substr(eq + 1)), lineno, false};
  }
  return sections;
}

struct Reader {
  std::map<std::string, IniSection>& ini;
  std::string origin;

  bool has(const std::string& sec, const std::string& key) {
    auto s = ini.find(sec);
    return s != ini.end() && s->second.count(key) > 0;
  }
  std::string raw(const std::string& sec, const std::string& key,
                  const std::string& def) {
    auto s = ini.find(sec);
    if (s == ini.end()) return def;
    auto k = s->second.find(key);
    if (k == s->second.end()) return def;
    k->second.used = true;
    return k->second.value;
  }
  double num(const std::string& sec, const std::string& key, double def) {
    const std::string v = raw(sec, key, "");
    if (v.empty()) return def;
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError(origin + ": [" + sec + "] " + key +
                        ": not a number: '" + v + "'");
    }
  }
  long integer(const std::string& sec, const std::string& key, long def) {
    const double x = num(sec, key, static_cast<double>(def));
    if (x != std::floor(x))
      throw ConfigError(origin + ": [" + sec + "] " + key + ": expected an integer");
    return static_cast<long>(x);
  }
  std::vector<double> numbers(const std::string& sec, const std::string& key) {
    std::vector<double> out;
    std::istringstream in(raw(sec, key, ""));
    std::string tok;
    while (in >> tok) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError(origin + ": [" + sec + "] " + key +
                          ": not a number: '" + tok + "'");
      }
    }
    return out;
  }
  std::vector<std::string> words(const std::string& sec, const std::string& key) {
    std::vector<std::string> out;
    std::istringstream in(raw(sec, key, ""));
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  }
  SamplerSpec sampler(const std::string& sec, const std::string& key,
                      const SamplerSpec& def) {
    const auto w = words(sec, key);
    if (w.empty()) return def;
    SamplerSpec s;
    s.kind = w[0];
    for (size_t i = 1; i < w.size(); ++i) {
      try {
        s.params.push_back(std::stod(w[i]));
      } catch (const std::exception&) {
        throw ConfigError(origin + ": [" + sec + "] " + key +
                          ": bad sampler parameter '" + w[i] + "'");
      }
    }
    return s;
  }
  void check_all_used() {
    for (auto& [sec, entries] : ini)
      for (auto& [key, e] : entries)
        if (!e.used)
          throw ConfigError(origin + ":" + std::to_string(e.line) +
                            ": unknown key [" + sec + "] " + key);
  }
};

const std::vector<std::string> kKnownModes = {"simulate", "audit",  "ws",
                                              "probe",    "sweep", "constants"};

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  auto ini = parse_ini(text, origin);
  Reader rd{ini, origin};
  RunConfig cfg;
  cfg.source_text = text;

  cfg.mode = rd.raw("run", "mode", cfg.mode);
  bool known = false;
  for (const auto& m : kKnownModes) known |= (m == cfg.mode);
  if (!known) throw ConfigError(origin + ": [run] mode: unknown mode '" + cfg.mode + "'");
  cfg.out_dir = rd.raw("run", "out", cfg.out_dir);
  cfg.seed = static_cast<unsigned long long>(rd.num("run", "seed", 0.0));
  cfg.workers = static_cast<int>(rd.integer("run", "workers", 1));
  if (cfg.workers < 1) throw ConfigError(origin + ": [run] workers must be >= 1");

  cfg.domain.dim = static_cast<int>(rd.integer("domain", "dim", 1));
  {
    auto x = rd.numbers("domain", "x");
    if (x.empty()) x = {0.0, 1.0};
    if (x.size() != 2)
      throw ConfigError(origin + ": [domain] x: expected 'lower upper'");
    cfg.domain.lower[0] = x[0];
    cfg.domain.upper[0] = x[1];
    auto y = rd.numbers("domain", "y");
    if (cfg.domain.dim == 2) {
      if (y.size() != 2)
        throw ConfigError(origin + ": [domain] y: expected 'lower upper'");
      cfg.domain.lower[1] = y[0];
      cfg.domain.upper[1] = y[1];
    } else if (!y.empty()) {
      throw ConfigError(origin + ": [domain] y given for a 1D domain");
    }
    auto cells = rd.numbers("domain", "cells");
    if (cells.empty()) cells = {100.0};
    if (static_cast<int>(cells.size()) != cfg.domain.dim)
      throw ConfigError(origin + ": [domain] cells: one count per axis");
    for (int k = 0; k < cfg.domain.dim; ++k)
      cfg.domain.cells[k] = static_cast<int>(cells[k]);
  }

  {
    const SamplerSpec zero{"constant", {0.0}};
    cfg.boundary_u.push_back(rd.sampler("boundary", "u", zero));
    if (cfg.domain.dim == 2)
      cfg.boundary_u.push_back(rd.sampler("boundary", "v", zero));
    if (rd.has("boundary", "rho_in")) {
      cfg.boundary_rho = rd.sampler("boundary", "rho_in", SamplerSpec{});
      cfg.has_boundary_rho = true;
    }
  }

  cfg.law_kind = rd.raw("law", "kind", cfg.law_kind);
  cfg.law_a = rd.num("law", "a", cfg.law_a);
  cfg.law_gamma = rd.num("law", "gamma", cfg.law_gamma);
  cfg.pert_amp = rd.num("law", "pert_amp", cfg.pert_amp);
  cfg.pert_center = rd.num("law", "pert_center", cfg.pert_center);
  cfg.pert_width = rd.num("law", "pert_width", cfg.pert_width);

  cfg.viscosity.mu = rd.num("fluid", "mu", 1.0);
  cfg.viscosity.lambda = rd.num("fluid", "lambda", 0.0);

  cfg.epsilon = rd.num("scheme", "epsilon", 0.0);
  cfg.delta = rd.num("scheme", "delta", 0.0);
  cfg.beta = rd.num("scheme", "beta", 0.0);

  cfg.dt = rd.num("time", "dt", 0.0);
  cfg.cfl = rd.num("time", "cfl", 0.5);
  cfg.t_end = rd.num("time", "T", 0.5);
  cfg.cadence = static_cast<int>(rd.integer("time", "cadence", 0));

  cfg.init_rho = rd.sampler("initial", "rho", cfg.init_rho);
  {
    const SamplerSpec zero{"constant", {0.0}};
    cfg.init_u.push_back(rd.sampler("initial", "u", zero));
    if (cfg.domain.dim == 2) cfg.init_u.push_back(rd.sampler("initial", "v", zero));
  }

  cfg.collar = rd.num("extension", "collar", 0.0);
  cfg.audits = rd.words("audit", "which");

  cfg.ws_case = rd.raw("ws", "case", cfg.ws_case);
  cfg.ws_param_a = rd.num("ws", "param_a", cfg.ws_param_a);
  cfg.ws_param_b = rd.num("ws", "param_b", cfg.ws_param_b);
  cfg.ws_perturb = rd.raw("ws", "perturb", cfg.ws_perturb);
  if (rd.has("ws", "etas")) cfg.ws_etas = rd.numbers("ws", "etas");

  cfg.probe_h = rd.numbers("probe", "h");
  cfg.probe_alpha = rd.num("probe", "alpha", 0.0);
  cfg.probe_kappa = rd.num("probe", "kappa", 0.0);

  cfg.sweep_epsilon = rd.numbers("sweep", "epsilon");
  cfg.sweep_delta = rd.numbers("sweep", "delta");
  for (double c : rd.numbers("sweep", "cells"))
    cfg.sweep_cells.push_back(static_cast<int>(c));

  cfg.const_a = rd.num("constants", "a", cfg.const_a);
  cfg.const_b = rd.num("constants", "b", cfg.const_b);
  cfg.const_grid.rho_max = rd.num("constants", "rho_max", 0.0);
  cfg.const_grid.rho_step = rd.num("constants", "rho_step", 1e-3);
  cfg.const_grid.r_step = rd.num("constants", "r_step", 1e-3);

  rd.check_all_used();

  // Semantic validation: the pieces must be constructible.
  if (cfg.t_end <= 0.0) throw ConfigError(origin + ": [time] T must be positive");
  if (cfg.dt < 0.0) throw ConfigError(origin + ": [time] dt must be nonnegative");
  if (cfg.cadence < 0) throw ConfigError(origin + ": [time] cadence must be >= 0");
  cfg.viscosity.validate();
  make_law(cfg);
  if (cfg.mode == "simulate" || cfg.mode == "audit" || cfg.mode == "probe" ||
      cfg.mode == "sweep") {
    make_sim_case(cfg);  // surfaces domain/boundary/data errors now
  }
  if (cfg.mode == "probe" && cfg.probe_h.size() < 4)
    throw ConfigError(origin + ": [probe] h: need at least 4 values");
  if (cfg.mode == "sweep" && cfg.sweep_epsilon.empty() &&
      cfg.sweep_delta.empty() && cfg.sweep_cells.empty())
    throw ConfigError(origin + ": [sweep] needs at least one nonempty axis");
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

PressureLaw make_law(const RunConfig& cfg) {
  PressureLaw base = PressureLaw::power(cfg.law_a, cfg.law_gamma);
  if (cfg.law_kind == "nonmonotone") {
    PressurePerturbation pert;
    pert.amplitude = cfg.pert_amp;
    pert.center = cfg.pert_center;
    pert.width = cfg.pert_width;
    base = PressureLaw::nonmonotone(base, pert);
  } else if (cfg.law_kind != "power") {
    throw ConfigError("[law] kind must be 'power' or 'nonmonotone'");
  }
  if (cfg.delta > 0.0) {
    if (!(cfg.beta > std::max(cfg.law_gamma, 4.5)))
      throw ConfigError("[scheme] beta = " + std::to_string(cfg.beta) +
                        " rejected: requires beta > max{gamma, 9/2}");
    base = PressureLaw::regularized(base, cfg.delta, cfg.beta);
  }
  return base;
}

SimCase make_sim_case(const RunConfig& cfg) {
  SimCase sim;
  sim.domain = build_domain(cfg.domain);
  const VelocitySampler ub = make_velocity_sampler(sim.domain, cfg.boundary_u);
  DensitySampler rhob;
  if (cfg.has_boundary_rho) rhob = make_density_sampler(sim.domain, cfg.boundary_rho);
  sim.partition = classify_boundary(sim.domain, ub, rhob);
  const double collar =
      cfg.collar > 0.0
          ? cfg.collar
          : std::max(0.1 * sim.domain.min_extent(), 2.05 * sim.domain.max_spacing());
  sim.ext = build_extension(sim.domain, sim.partition, collar);
  sim.law = make_law(cfg);
  sim.viscosity = cfg.viscosity;
  sim.epsilon = cfg.epsilon;
  sim.rho0 = make_initial_density(sim.domain, cfg.init_rho);
  sim.u0 = make_initial_velocity(sim.domain, cfg.init_u);
  sim.t_end = cfg.t_end;

  if (cfg.dt > 0.0) {
    sim.dt = cfg.dt;
  } else {
    double umax = sim.u0.abs().maxCoeff();
    for (int f = 0; f < sim.partition.face_count(); ++f)
      umax = std::max(umax, std::abs(sim.partition.ub_dot_n[f]));
    sim.dt = cfg.cfl * sim.domain.max_spacing() / std::max(umax, 1.0);
  }
  const int nst = std::max(1, static_cast<int>(std::ceil(cfg.t_end / sim.dt - 1e-12)));
  sim.dt = cfg.t_end / nst;

  const bool audit_like = cfg.mode == "audit" || cfg.mode == "probe";
  sim.cadence = cfg.cadence > 0 ? cfg.cadence : (audit_like ? 1 : 10);
  return sim;
}

}  // namespace nslab
