#include "perifract/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "perifract/errors.hpp"

namespace perifract {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::optional<double> to_auto_double(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"material.E", [](RunConfig& c, const std::string& v) { c.material.E = to_double("material.E", v); }},
      {"material.Gc", [](RunConfig& c, const std::string& v) { c.material.Gc = to_double("material.Gc", v); }},
      {"material.rho", [](RunConfig& c, const std::string& v) { c.material.rho = to_double("material.rho", v); }},
      {"material.nu", [](RunConfig& c, const std::string& v) { c.material.nu = to_double("material.nu", v); }},
      {"material.calibration",
       [](RunConfig& c, const std::string& v) {
         try {
           c.material.calibration = calibration_mode_from_string(v);
         } catch (const std::exception& e) {
           throw ConfigError("material.calibration", e.what());
         }
       }},
      {"material.c", [](RunConfig& c, const std::string& v) { c.material.c = to_auto_double("material.c", v); }},
      {"material.beta",
       [](RunConfig& c, const std::string& v) { c.material.beta = to_auto_double("material.beta", v); }},
      {"domain.a", [](RunConfig& c, const std::string& v) { c.domain.a = to_double("domain.a", v); }},
      {"domain.b", [](RunConfig& c, const std::string& v) { c.domain.b = to_double("domain.b", v); }},
      {"domain.ell0", [](RunConfig& c, const std::string& v) { c.domain.ell0 = to_double("domain.ell0", v); }},
      {"domain.d",
       [](RunConfig& c, const std::string& v) {
         const auto d = to_auto_double("domain.d", v);
         c.d_auto = !d;
         if (d) c.domain.d = *d;
       }},
      {"domain.epsilon",
       [](RunConfig& c, const std::string& v) { c.domain.epsilon = to_double("domain.epsilon", v); }},
      {"domain.h_ratio",
       [](RunConfig& c, const std::string& v) {
         c.domain.h_ratio = static_cast<int>(to_int("domain.h_ratio", v));
       }},
      {"domain.delta",
       [](RunConfig& c, const std::string& v) {
         const auto d = to_auto_double("domain.delta", v);
         c.delta_auto = !d;
         if (d) c.domain.delta = *d;
       }},
      {"load.f0", [](RunConfig& c, const std::string& v) { c.load.f0 = to_double("load.f0", v); }},
      {"load.t_ramp", [](RunConfig& c, const std::string& v) { c.load.t_ramp = to_double("load.t_ramp", v); }},
      {"quadrature.n_sub",
       [](RunConfig& c, const std::string& v) {
         c.domain.n_sub = static_cast<int>(to_int("quadrature.n_sub", v));
       }},
      {"quadrature.gauss_order",
       [](RunConfig& c, const std::string& v) {
         c.gauss_order = static_cast<int>(to_int("quadrature.gauss_order", v));
       }},
      {"time.dt", [](RunConfig& c, const std::string& v) { c.time.dt = to_double("time.dt", v); }},
      {"time.t_end", [](RunConfig& c, const std::string& v) { c.time.t_end = to_double("time.t_end", v); }},
      {"time.output_every",
       [](RunConfig& c, const std::string& v) {
         c.time.output_every = static_cast<int>(to_int("time.output_every", v));
       }},
      {"time.stability_factor",
       [](RunConfig& c, const std::string& v) {
         c.time.stability_factor = to_double("time.stability_factor", v);
       }},
      {"init.u0", [](RunConfig& c, const std::string& v) { c.init_u0 = v; }},
      {"init.v0", [](RunConfig& c, const std::string& v) { c.init_v0 = v; }},
      {"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; }},
      {"output.write_vtk",
       [](RunConfig& c, const std::string& v) { c.write_vtk = to_bool("output.write_vtk", v); }},
      {"output.seed",
       [](RunConfig& c, const std::string& v) {
         const long long s = to_int("output.seed", v);
         if (s < 0) throw ConfigError("output.seed", "must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"output.field_every",
       [](RunConfig& c, const std::string& v) {
         c.field_every = static_cast<int>(to_int("output.field_every", v));
       }},
      {"threads", [](RunConfig& c, const std::string& v) { c.threads = static_cast<int>(to_int("threads", v)); }},
      {"diagnostics.box_half_x",
       [](RunConfig& c, const std::string& v) { c.box_half_x = to_auto_double("diagnostics.box_half_x", v); }},
      {"diagnostics.box_half_y",
       [](RunConfig& c, const std::string& v) { c.box_half_y = to_auto_double("diagnostics.box_half_y", v); }},
      {"diagnostics.tip_window",
       [](RunConfig& c, const std::string& v) {
         c.tip_window = static_cast<int>(to_int("diagnostics.tip_window", v));
       }},
  };
  return table;
}

std::string auto_or(const std::optional<double>& v) { return v ? format_double(*v) : "auto"; }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void RunConfig::resolve() {
  if (d_auto) domain.d = domain.epsilon;
  if (delta_auto) domain.delta = domain.epsilon;
  load.delta = domain.delta;
}

void RunConfig::validate() const {
  if (material.nu != 0.25) throw ConfigError("material.nu", "bond-based model requires nu=0.25");
  if (!(material.E > 0.0)) throw ConfigError("material.E", "must be positive (Pa)");
  if (!(material.Gc > 0.0)) throw ConfigError("material.Gc", "must be positive (J/m^2)");
  if (!(material.rho > 0.0)) throw ConfigError("material.rho", "must be positive (kg/m^3)");
  if (material.calibration == CalibrationMode::Paper) {
    if (!material.c) throw ConfigError("material.c", "required with calibration = paper");
    if (!material.beta) throw ConfigError("material.beta", "required with calibration = paper");
    if (!(*material.c > 0.0)) throw ConfigError("material.c", "must be positive");
    if (!(*material.beta > 0.0)) throw ConfigError("material.beta", "must be positive");
  } else if (material.c || material.beta) {
    throw ConfigError(material.c ? "material.c" : "material.beta",
                      "only allowed with calibration = paper");
  }
  try {
    domain.validate();
  } catch (const SpecError& e) {
    throw ConfigError("domain", e.what());
  }
  if (!(load.f0 >= 0.0)) throw ConfigError("load.f0", "must be nonnegative (Pa)");
  if (!(load.t_ramp >= 0.0)) throw ConfigError("load.t_ramp", "must be nonnegative (s)");
  if (gauss_order < 16) throw ConfigError("quadrature.gauss_order", "must be at least 16");
  if (!(time.dt > 0.0)) throw ConfigError("time.dt", "must be positive (s)");
  if (!(time.t_end > 0.0)) throw ConfigError("time.t_end", "must be positive (s)");
  if (time.output_every < 1) throw ConfigError("time.output_every", "must be at least 1");
  if (!(time.stability_factor > 0.0)) throw ConfigError("time.stability_factor", "must be positive");
  if (field_every < 0) throw ConfigError("output.field_every", "must be nonnegative");
  if (threads < 0) throw ConfigError("threads", "must be nonnegative");
  if (tip_window < 1) throw ConfigError("diagnostics.tip_window", "must be at least 1");
  if (box_half_x && !(*box_half_x > 0.0)) throw ConfigError("diagnostics.box_half_x", "must be positive (m)");
  if (box_half_y && !(*box_half_y > 0.0)) throw ConfigError("diagnostics.box_half_y", "must be positive (m)");
}

MaterialModel RunConfig::material_model() const {
  const InfluenceFunction J(InfluenceKind::LinearDecay);
  if (material.calibration == CalibrationMode::Paper) {
    return calibrate_with_constants(material.E, material.Gc, material.rho, J, *material.c,
                                    *material.beta);
  }
  return calibrate(material.E, material.Gc, material.rho, J);
}

Vec2 RunConfig::box_half_widths() const {
  return {box_half_x.value_or(4.0 * domain.epsilon), box_half_y.value_or(4.0 * domain.epsilon)};
}

bool RunConfig::operator==(const RunConfig& o) const {
  return echo_config(*this) == echo_config(o);
}

RunConfig parse_config_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    if (value.empty()) throw ConfigError(key, "missing value");
    it->second(cfg, value);
  }
  cfg.resolve();
  cfg.validate();
  const double h = cfg.domain.h();
  const double cl = cfg.material_model().cl;
  const double limit = cfg.time.stable_dt(h, cfg.material_model());
  if (cfg.time.dt > limit) {
    cfg.warnings.push_back("time.dt = " + format_double(cfg.time.dt) +
                           " s exceeds the stability factor: dt * c_l / h = " +
                           format_double(cfg.time.dt * cl / h) + " > " +
                           format_double(cfg.time.stability_factor));
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

std::string echo_config(const RunConfig& c) {
  std::ostringstream o;
  o << "material.E = " << format_double(c.material.E) << "\n"
    << "material.Gc = " << format_double(c.material.Gc) << "\n"
    << "material.rho = " << format_double(c.material.rho) << "\n"
    << "material.nu = " << format_double(c.material.nu) << "\n"
    << "material.calibration = " << to_string(c.material.calibration) << "\n";
  if (c.material.c) o << "material.c = " << format_double(*c.material.c) << "\n";
  if (c.material.beta) o << "material.beta = " << format_double(*c.material.beta) << "\n";
  o << "domain.a = " << format_double(c.domain.a) << "\n"
    << "domain.b = " << format_double(c.domain.b) << "\n"
    << "domain.ell0 = " << format_double(c.domain.ell0) << "\n"
    << "domain.d = " << (c.d_auto ? std::string("auto") : format_double(c.domain.d)) << "\n"
    << "domain.epsilon = " << format_double(c.domain.epsilon) << "\n"
    << "domain.h_ratio = " << c.domain.h_ratio << "\n"
    << "domain.delta = " << (c.delta_auto ? std::string("auto") : format_double(c.domain.delta))
    << "\n"
    << "load.f0 = " << format_double(c.load.f0) << "\n"
    << "load.t_ramp = " << format_double(c.load.t_ramp) << "\n"
    << "quadrature.n_sub = " << c.domain.n_sub << "\n"
    << "quadrature.gauss_order = " << c.gauss_order << "\n"
    << "time.dt = " << format_double(c.time.dt) << "\n"
    << "time.t_end = " << format_double(c.time.t_end) << "\n"
    << "time.output_every = " << c.time.output_every << "\n"
    << "time.stability_factor = " << format_double(c.time.stability_factor) << "\n"
    << "init.u0 = " << c.init_u0 << "\n"
    << "init.v0 = " << c.init_v0 << "\n"
    << "output.dir = " << c.output_dir << "\n"
    << "output.write_vtk = " << (c.write_vtk ? "true" : "false") << "\n"
    << "output.seed = " << c.seed << "\n"
    << "output.field_every = " << c.field_every << "\n"
    << "threads = " << c.threads << "\n"
    << "diagnostics.box_half_x = " << auto_or(c.box_half_x) << "\n"
    << "diagnostics.box_half_y = " << auto_or(c.box_half_y) << "\n"
    << "diagnostics.tip_window = " << c.tip_window << "\n";
  return o.str();
}

}  // namespace perifract
