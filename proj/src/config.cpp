#include "biofilm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "biofilm/errors.hpp"

namespace biofilm {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  long long x = to_integer(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(key + ": integer out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

Preconditioner to_preconditioner(const std::string& key, const std::string& v) {
  if (v == "jacobi") return Preconditioner::Jacobi;
  if (v == "none") return Preconditioner::None;
  throw ConfigError(key + ": expected jacobi or none, got '" + v + "'");
}

Advection to_advection(const std::string& key, const std::string& v) {
  if (v == "cn") return Advection::CrankNicolson;
  if (v == "explicit") return Advection::Explicit;
  throw ConfigError(key + ": expected cn or explicit, got '" + v + "'");
}

IcVariant to_variant(const std::string& key, const std::string& v) {
  if (v == "uniform") return IcVariant::UniformPerturbed;
  if (v == "base") return IcVariant::BaseLayer;
  if (v == "mushroom") return IcVariant::MushroomPair;
  throw ConfigError(key + ": expected uniform, base or mushroom, got '" + v + "'");
}

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&)>;

#define BIOFILM_DOUBLE(path) [](SimConfig& c, const std::string& k, const std::string& v) { c.path = to_double(k, v); }
#define BIOFILM_INT(path) [](SimConfig& c, const std::string& k, const std::string& v) { c.path = to_int(k, v); }

void add_solver_keys(std::map<std::string, Setter>& m, const std::string& name, SolverConfig SolverSet::*which) {
  const std::string p = "solver." + name + ".";
  m[p + "rtol"] = [which](SimConfig& c, const std::string& k, const std::string& v) { (c.solver.*which).rtol = to_double(k, v); };
  m[p + "atol"] = [which](SimConfig& c, const std::string& k, const std::string& v) { (c.solver.*which).atol = to_double(k, v); };
  m[p + "max_iter"] = [which](SimConfig& c, const std::string& k, const std::string& v) {
    (c.solver.*which).max_iterations = to_int(k, v);
  };
  m[p + "restart"] = [which](SimConfig& c, const std::string& k, const std::string& v) { (c.solver.*which).restart = to_int(k, v); };
  m[p + "precond"] = [which](SimConfig& c, const std::string& k, const std::string& v) {
    (c.solver.*which).preconditioner = to_preconditioner(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    m["dt"] = BIOFILM_DOUBLE(dt);
    m["steps"] = BIOFILM_INT(steps);
    m["ranks"] = BIOFILM_INT(ranks);
    m["mode"] = [](SimConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); };
    m["grid.n"] = [](SimConfig& c, const std::string& k, const std::string& v) {
      const int n = to_int(k, v);
      if (n < 3) throw ConfigError("grid.n must be at least 3 intervals");
      c.grid = GridSpec::from_intervals(n);
    };
    m["grid.nx"] = [](SimConfig& c, const std::string& k, const std::string& v) {
      const int n = to_int(k, v);
      if (n < 4) throw ConfigError("grid.nx must be at least 4 nodes");
      c.grid = GridSpec::from_nodes(n, c.grid.ny);
    };
    m["grid.ny"] = [](SimConfig& c, const std::string& k, const std::string& v) {
      const int n = to_int(k, v);
      if (n < 4) throw ConfigError("grid.ny must be at least 4 nodes");
      c.grid = GridSpec::from_nodes(c.grid.nx, n);
    };

    m["ch.gamma1"] = BIOFILM_DOUBLE(ch.gamma1);
    m["ch.gamma2"] = BIOFILM_DOUBLE(ch.gamma2);
    m["ch.lambda"] = BIOFILM_DOUBLE(ch.lambda);
    m["ch.mu"] = BIOFILM_DOUBLE(ch.mu);
    m["ch.kc"] = BIOFILM_DOUBLE(ch.kc);
    m["ch.epsilon"] = BIOFILM_DOUBLE(ch.epsilon);
    m["ch.stabilization"] = BIOFILM_DOUBLE(ch.stabilization);
    m["ch.production"] = [](SimConfig& c, const std::string& k, const std::string& v) {
      if (!to_bool(k, v)) c.ch.epsilon = 0.0;
    };
    m["nutrient.ds"] = BIOFILM_DOUBLE(nutrient.ds);
    m["nutrient.a"] = BIOFILM_DOUBLE(nutrient.a);
    m["nutrient.theta"] = BIOFILM_DOUBLE(nutrient.theta);
    m["flow.viscous_theta"] = BIOFILM_DOUBLE(flow.viscous_theta);
    m["flow.viscosity"] = [](SimConfig& c, const std::string& k, const std::string& v) {
      if (v == "reference") c.flow.viscosity = Viscosity::Reference;
      else if (v == "averaged") c.flow.viscosity = Viscosity::Averaged;
      else throw ConfigError(k + ": expected reference or averaged, got '" + v + "'");
    };
    m["advection"] = [](SimConfig& c, const std::string& k, const std::string& v) {
      c.ch.advection = c.nutrient.advection = to_advection(k, v);
    };

    m["flow.re_s"] = BIOFILM_DOUBLE(flow.re_s);
    m["flow.re_n"] = BIOFILM_DOUBLE(flow.re_n);
    m["flow.rho_n_ratio"] = BIOFILM_DOUBLE(flow.rho_n_ratio);
    m["flow.rho_s_ratio"] = BIOFILM_DOUBLE(flow.rho_s_ratio);
    m["flow.lid_u"] = BIOFILM_DOUBLE(flow.lid_u);
    m["flow.lid_v"] = BIOFILM_DOUBLE(flow.lid_v);
    m["flow.include_r"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.flow.include_r = to_bool(k, v); };

    add_solver_keys(m, "ch", &SolverSet::ch);
    add_solver_keys(m, "nutrient", &SolverSet::nutrient);
    add_solver_keys(m, "momentum", &SolverSet::momentum);
    add_solver_keys(m, "pressure", &SolverSet::pressure);

    m["ic.variant"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.ic.variant = to_variant(k, v); };
    m["ic.base_height"] = BIOFILM_DOUBLE(ic.base_height);
    m["ic.phi_bulk"] = BIOFILM_DOUBLE(ic.phi_bulk);
    m["ic.phi_neck"] = BIOFILM_DOUBLE(ic.phi_neck);
    m["ic.cap_radius"] = BIOFILM_DOUBLE(ic.cap_radius);
    m["ic.cap1_x"] = BIOFILM_DOUBLE(ic.cap1_x);
    m["ic.cap2_x"] = BIOFILM_DOUBLE(ic.cap2_x);
    m["ic.cap_y"] = BIOFILM_DOUBLE(ic.cap_y);
    m["ic.neck_width"] = BIOFILM_DOUBLE(ic.neck_width);
    m["ic.smoothing"] = BIOFILM_DOUBLE(ic.smoothing);
    m["ic.uniform_value"] = BIOFILM_DOUBLE(ic.uniform_value);
    m["ic.amplitude"] = BIOFILM_DOUBLE(ic.amplitude);
    m["ic.seed"] = [](SimConfig& c, const std::string& k, const std::string& v) {
      const long long s = to_integer(k, v);
      if (s < 0) throw ConfigError("ic.seed must be non-negative");
      c.ic.seed = static_cast<std::uint64_t>(s);
    };
    m["ic.c_init"] = BIOFILM_DOUBLE(ic.c_init);

    m["output.dir"] = [](SimConfig& c, const std::string&, const std::string& v) { c.output.dir = v; };
    m["output.interval"] = BIOFILM_INT(output.interval);

    m["scaling.ranks"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.scaling.ranks = to_int_list(k, v); };
    m["scaling.grids"] = [](SimConfig& c, const std::string& k, const std::string& v) { c.scaling.grids = to_int_list(k, v); };
    m["scaling.steps"] = BIOFILM_INT(scaling.steps);
    return m;
  }();
  return table;
}

#undef BIOFILM_DOUBLE
#undef BIOFILM_INT

void validate_solver(const SolverConfig& s, const std::string& name) {
  try {
    s.validate();
  } catch (const ContractError& e) {
    throw ConfigError("solver." + name + ": " + e.what());
  }
}

}  // namespace

void InitialCondition::validate() const {
  if (!(phi_bulk > 0.0 && phi_bulk < 1.0)) throw ConfigError("ic.phi_bulk must lie in (0, 1)");
  if (!(phi_neck > 0.0 && phi_neck <= phi_bulk)) throw ConfigError("ic.phi_neck must lie in (0, phi_bulk]");
  if (!(uniform_value >= 0.0 && uniform_value < 1.0)) throw ConfigError("ic.uniform_value must lie in [0, 1)");
  if (!(amplitude >= 0.0)) throw ConfigError("ic.amplitude must be non-negative");
  if (!(smoothing > 0.0)) throw ConfigError("ic.smoothing must be positive");
  if (!(c_init >= 0.0)) throw ConfigError("ic.c_init must be non-negative");
  if (!(base_height >= 0.0 && base_height < 1.0)) throw ConfigError("ic.base_height must lie in [0, 1)");
  if (variant == IcVariant::MushroomPair) {
    if (!(cap_radius > 0.0)) throw ConfigError("ic.cap_radius must be positive");
    if (!(neck_width > 0.0)) throw ConfigError("ic.neck_width must be positive");
    if (!(cap_y - cap_radius > base_height && cap_y + cap_radius < 1.0)) {
      throw ConfigError("ic.cap_y: caps must sit above the base and below the lid");
    }
    for (double x : {cap1_x, cap2_x}) {
      if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("ic.cap1_x/cap2_x must lie in [0, 1]");
    }
  }
}

SimConfig::SimConfig() {
  flow.lid_u = 0.1;
  // Jacobi-GMRES on the default scenario needs thousands of iterations for
  // the diffusion-dominated systems; 30/500 fails there from the first step.
  for (SolverConfig* s : {&solver.ch, &solver.nutrient, &solver.momentum, &solver.pressure}) {
    s->restart = 60;
    s->max_iterations = 20000;
  }
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (steps < 1) throw ConfigError("steps must be at least 1");
  if (ranks < 1) throw ConfigError("ranks must be at least 1");
  if (grid.nx < 4 || grid.ny < 4) throw ConfigError("grid must have at least 4 nodes per direction");
  ch.validate();
  nutrient.validate();
  flow.validate();
  if (flow.gamma1 != ch.gamma1) throw ConfigError("flow.gamma1 must equal ch.gamma1");
  validate_solver(solver.ch, "ch");
  validate_solver(solver.nutrient, "nutrient");
  validate_solver(solver.momentum, "momentum");
  validate_solver(solver.pressure, "pressure");
  ic.validate();
  if (output.interval < 0) throw ConfigError("output.interval must be non-negative");
  if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
  if (scaling.steps < 1) throw ConfigError("scaling.steps must be at least 1");
  for (int r : scaling.ranks)
    if (r < 1) throw ConfigError("scaling.ranks entries must be positive");
  for (int n : scaling.grids)
    if (n < 3) throw ConfigError("scaling.grids entries must be at least 3");
}

void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(cfg, key, value);
  // gamma1 is one physical constant shared by both equations.
  if (key == "ch.gamma1") cfg.flow.gamma1 = cfg.ch.gamma1;
}

SimConfig parse_config(std::string_view text, const std::string& source) {
  SimConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    auto where = [&](std::size_t col) {
      return source + ":" + std::to_string(line_no) + ":" + std::to_string(col + 1) + ": ";
    };
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      const std::size_t col = line.find_first_not_of(" \t");
      throw ConfigError(where(col) + "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where(0) + "missing key");
    if (value.empty()) throw ConfigError(where(eq + 1) + "missing value for '" + key + "'");
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      const std::size_t col = line.find_first_not_of(" \t");
      throw ConfigError(where(col) + e.what());
    }
    if (end == text.size()) break;
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Simulate:
      return "simulate";
    case Mode::Scaling:
      return "scaling";
    case Mode::SerialCheck:
      return "serialcheck";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "simulate") return Mode::Simulate;
  if (text == "scaling") return Mode::Scaling;
  if (text == "serialcheck") return Mode::SerialCheck;
  throw ConfigError("mode: expected simulate, scaling or serialcheck, got '" + text + "'");
}

}  // namespace biofilm
