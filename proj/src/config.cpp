#include "shockshift/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace shockshift {

namespace {

// section -> allowed keys; "" is the top level.
const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> s{
      {"", {"flux", "u_minus", "u_plus", "grid", "mode", "shift", "perturbation", "run", "profile", "output", "sweep"}},
      {"flux", {"kind", "a1", "transverse"}},
      {"grid", {"L", "n1", "n_perp", "N"}},
      {"shift", {"M", "t0", "phi_shape"}},
      {"perturbation", {"family", "amplitude", "seed", "center", "width", "wavenumber", "modulation"}},
      {"run", {"T", "dt", "cfl_safety", "diag_stride", "snapshot_interval", "balance_profile", "backend"}},
      {"profile", {"dx"}},
      {"output", {"dir"}},
      {"sweep", {"amplitudes", "workers"}},
  };
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string where(const YAML::Node& n, const std::string& source) {
  const auto m = n.Mark();
  if (m.is_null()) return source;
  return source + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

void check_keys(const YAML::Node& node, const std::string& section, const std::string& source) {
  if (!node.IsMap()) {
    throw ConfigError(where(node, source) + ": '" + (section.empty() ? "<root>" : section) + "' must be a mapping");
  }
  const auto& allowed = schema().at(section);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      const std::string full = section.empty() ? key : section + "." + key;
      throw ConfigError(where(kv.first, source) + ": unknown key '" + full + "'; valid keys" +
                        (section.empty() ? "" : " in '" + section + "'") + ": " + join(allowed));
    }
    if (section.empty() && schema().count(key) && key != "") check_keys(kv.second, key, source);
  }
}

template <class T>
void read(const YAML::Node& parent, const char* key, const std::string& name, T& out, const std::string& source) {
  const auto n = parent[key];
  if (!n) return;
  try {
    out = n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(n, source) + ": '" + name + "' has the wrong type");
  }
}

void apply_override(YAML::Node& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);

  // Node assignment in yaml-cpp rebinds handles, so walk with fresh lookups.
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw ConfigError("--set " + key + ": cannot parse value '" + value + "': " + e.msg);
  }
  if (parts.size() == 1) {
    root[parts[0]] = parsed;
  } else if (parts.size() == 2) {
    if (!root[parts[0]] || root[parts[0]].IsNull()) root[parts[0]] = YAML::Node(YAML::NodeType::Map);
    root[parts[0]][parts[1]] = parsed;
  } else {
    throw ConfigError("--set " + key + ": keys are at most two levels deep");
  }
}

ExperimentConfig from_yaml(const YAML::Node& root, const std::string& source) {
  ExperimentConfig c;
  if (!root || root.IsNull()) return c;
  check_keys(root, "", source);

  if (const auto f = root["flux"]) {
    read(f, "kind", "flux.kind", c.flux.kind, source);
    read(f, "a1", "flux.a1", c.flux.a1, source);
    read(f, "transverse", "flux.transverse", c.flux.transverse, source);
  }
  read(root, "u_minus", "u_minus", c.u_minus, source);
  read(root, "u_plus", "u_plus", c.u_plus, source);
  if (const auto g = root["grid"]) {
    if (g["L"]) {
      double L = 0;
      read(g, "L", "grid.L", L, source);
      c.grid.L = L;
    }
    read(g, "n1", "grid.n1", c.grid.n1, source);
    read(g, "n_perp", "grid.n_perp", c.grid.n_perp, source);
    read(g, "N", "grid.N", c.grid.N, source);
  }
  if (root["mode"]) {
    std::string m;
    read(root, "mode", "mode", m, source);
    try {
      c.mode = shift_mode_from_string(m);
    } catch (const std::exception& e) {
      throw ConfigError(where(root["mode"], source) + ": mode: " + e.what());
    }
  }
  if (const auto s = root["shift"]) {
    read(s, "M", "shift.M", c.shift.M, source);
    read(s, "t0", "shift.t0", c.shift.t0, source);
    if (s["phi_shape"]) {
      std::string shape;
      read(s, "phi_shape", "shift.phi_shape", shape, source);
      if (shape == "smoothstep") {
        c.shift.phi_shape = RampShape::SmoothStep;
      } else if (shape == "identity") {
        c.shift.phi_shape = RampShape::Identity;
      } else {
        throw ConfigError(where(s["phi_shape"], source) + ": shift.phi_shape must be smoothstep or identity");
      }
    }
  }
  if (const auto p = root["perturbation"]) {
    read(p, "family", "perturbation.family", c.perturbation.family, source);
    read(p, "amplitude", "perturbation.amplitude", c.perturbation.amplitude, source);
    read(p, "seed", "perturbation.seed", c.perturbation.seed, source);
    read(p, "center", "perturbation.center", c.perturbation.center, source);
    read(p, "width", "perturbation.width", c.perturbation.width, source);
    read(p, "wavenumber", "perturbation.wavenumber", c.perturbation.wavenumber, source);
    read(p, "modulation", "perturbation.modulation", c.perturbation.modulation, source);
  }
  if (const auto r = root["run"]) {
    read(r, "T", "run.T", c.T, source);
    if (r["dt"] && !r["dt"].IsNull()) {
      double dt = 0;
      read(r, "dt", "run.dt", dt, source);
      c.dt = dt;
    }
    read(r, "cfl_safety", "run.cfl_safety", c.cfl_safety, source);
    read(r, "diag_stride", "run.diag_stride", c.diag_stride, source);
    read(r, "snapshot_interval", "run.snapshot_interval", c.snapshot_interval, source);
    read(r, "balance_profile", "run.balance_profile", c.balance_profile, source);
    read(r, "backend", "run.backend", c.backend, source);
  }
  if (const auto p = root["profile"]) read(p, "dx", "profile.dx", c.profile_dx, source);
  if (const auto o = root["output"]) read(o, "dir", "output.dir", c.output_dir, source);
  if (const auto s = root["sweep"]) {
    read(s, "amplitudes", "sweep.amplitudes", c.sweep_amplitudes, source);
    read(s, "workers", "sweep.workers", c.sweep_workers, source);
  }
  return c;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("invalid " + field + ": " + what);
}

}  // namespace

FluxField FluxSpec::build(int n_components) const {
  std::vector<Polynomial> tr;
  for (const auto& c : transverse) tr.emplace_back(c);
  if (kind == "burgers") return FluxField::burgers(n_components, tr);
  if (kind == "cubic_convex") return FluxField::cubic_convex(n_components, tr);
  if (kind == "custom") {
    if (tr.empty()) tr.assign(std::size_t(n_components - 1), Polynomial({0.0, 1.0}));
    return FluxField::custom(Polynomial(a1), tr);
  }
  throw ConfigError("invalid flux.kind: '" + kind + "' (expected burgers, cubic_convex or custom)");
}

void ExperimentConfig::validate() const {
  require(flux.kind == "burgers" || flux.kind == "cubic_convex" || flux.kind == "custom", "flux.kind",
          "expected burgers, cubic_convex or custom");
  require(flux.kind != "custom" || flux.a1.size() >= 3, "flux.a1", "custom flux needs at least a quadratic A_1");
  require(flux.kind == "custom" || flux.a1.empty(), "flux.a1", "only allowed with kind: custom");
  require(flux.transverse.empty() || int(flux.transverse.size()) == grid.N - 1, "flux.transverse",
          "needs one coefficient list per transverse direction");
  require(std::isfinite(u_minus) && std::isfinite(u_plus) && u_minus > u_plus, "u_minus/u_plus",
          "need finite states with u_minus > u_plus");
  require(grid.N == 2 || grid.N == 3, "grid.N", "must be 2 or 3");
  require(!grid.L || *grid.L > 0, "grid.L", "must be positive");
  require(grid.n1 >= 16, "grid.n1", "must be >= 16");
  require(grid.n_perp >= 8, "grid.n_perp", "must be >= 8");
  try {
    shift.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid shift: ") + e.what());
  }
  const auto& fam = perturbation.family;
  require(fam == "gaussian_bump" || fam == "transverse_sine" || fam == "noise", "perturbation.family",
          "expected gaussian_bump, transverse_sine or noise");
  require(std::isfinite(perturbation.amplitude) && perturbation.amplitude >= 0, "perturbation.amplitude",
          "must be >= 0");
  require(perturbation.width > 0, "perturbation.width", "must be positive");
  require(perturbation.wavenumber >= 0, "perturbation.wavenumber", "must be >= 0");
  require(std::isfinite(T) && T > 0, "run.T", "horizon must be positive");
  require(!dt || (std::isfinite(*dt) && *dt > 0), "run.dt", "must be positive");
  require(cfl_safety > 0 && cfl_safety <= 1, "run.cfl_safety", "must be in (0, 1]");
  require(diag_stride >= 1, "run.diag_stride", "must be >= 1");
  require(snapshot_interval >= 0, "run.snapshot_interval", "must be >= 0");
  require(backend == "omp" || backend == "serial", "run.backend", "expected omp or serial");
  require(profile_dx > 0 && profile_dx <= 0.05, "profile.dx", "must be in (0, 0.05]");
  require(!output_dir.empty(), "output.dir", "must not be empty");
  require(!sweep_amplitudes.empty(), "sweep.amplitudes", "must not be empty");
  for (double a : sweep_amplitudes) require(std::isfinite(a) && a >= 0, "sweep.amplitudes", "entries must be >= 0");
  require(sweep_workers >= 1, "sweep.workers", "must be >= 1");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& top : schema().at("")) {
      const auto it = schema().find(top);
      if (it == schema().end()) {
        k.push_back(top);
      } else {
        for (const auto& sub : it->second) k.push_back(top + "." + sub);
      }
    }
    return k;
  }();
  return keys;
}

ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                              const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": parse error: " + e.msg);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);
  auto cfg = from_yaml(root, source);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path);
}

double resolved_L(const ExperimentConfig& cfg, const ShockProfile& profile) {
  if (cfg.grid.L) return *cfg.grid.L;
  const double c = std::min(profile.decay_minus(), profile.decay_plus());
  return std::max(20.0, 20.0 / c);
}

std::string dump_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "flux" << YAML::Value << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << c.flux.kind;
  if (!c.flux.a1.empty()) e << YAML::Key << "a1" << YAML::Value << YAML::Flow << c.flux.a1;
  if (!c.flux.transverse.empty()) {
    e << YAML::Key << "transverse" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : c.flux.transverse) e << YAML::Flow << t;
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;
  e << YAML::Key << "u_minus" << YAML::Value << c.u_minus;
  e << YAML::Key << "u_plus" << YAML::Value << c.u_plus;
  e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  if (c.grid.L) e << YAML::Key << "L" << YAML::Value << *c.grid.L;
  e << YAML::Key << "n1" << YAML::Value << c.grid.n1 << YAML::Key << "n_perp" << YAML::Value << c.grid.n_perp
    << YAML::Key << "N" << YAML::Value << c.grid.N << YAML::EndMap;
  e << YAML::Key << "mode" << YAML::Value << to_string(c.mode);
  e << YAML::Key << "shift" << YAML::Value << YAML::BeginMap << YAML::Key << "M" << YAML::Value << c.shift.M
    << YAML::Key << "t0" << YAML::Value << c.shift.t0 << YAML::Key << "phi_shape" << YAML::Value
    << (c.shift.phi_shape == RampShape::SmoothStep ? "smoothstep" : "identity") << YAML::EndMap;
  const auto& p = c.perturbation;
  e << YAML::Key << "perturbation" << YAML::Value << YAML::BeginMap << YAML::Key << "family" << YAML::Value
    << p.family << YAML::Key << "amplitude" << YAML::Value << p.amplitude << YAML::Key << "seed" << YAML::Value
    << p.seed << YAML::Key << "center" << YAML::Value << p.center << YAML::Key << "width" << YAML::Value << p.width
    << YAML::Key << "wavenumber" << YAML::Value << p.wavenumber << YAML::Key << "modulation" << YAML::Value
    << p.modulation << YAML::EndMap;
  e << YAML::Key << "run" << YAML::Value << YAML::BeginMap << YAML::Key << "T" << YAML::Value << c.T;
  if (c.dt) e << YAML::Key << "dt" << YAML::Value << *c.dt;
  e << YAML::Key << "cfl_safety" << YAML::Value << c.cfl_safety << YAML::Key << "diag_stride" << YAML::Value
    << c.diag_stride << YAML::Key << "snapshot_interval" << YAML::Value << c.snapshot_interval << YAML::Key
    << "balance_profile" << YAML::Value << c.balance_profile << YAML::Key << "backend" << YAML::Value << c.backend
    << YAML::EndMap;
  e << YAML::Key << "profile" << YAML::Value << YAML::BeginMap << YAML::Key << "dx" << YAML::Value << c.profile_dx
    << YAML::EndMap;
  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "dir" << YAML::Value << c.output_dir
    << YAML::EndMap;
  e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap << YAML::Key << "amplitudes" << YAML::Value
    << YAML::Flow << c.sweep_amplitudes << YAML::Key << "workers" << YAML::Value << c.sweep_workers << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace shockshift
