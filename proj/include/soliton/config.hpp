// Run configuration: one JSON file per run. Unknown keys are rejected and
// every default is written back into the echoed effective config.
#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "soliton/errors.hpp"
#include "soliton/grid.hpp"
#include "soliton/nonlinearity.hpp"
#include "soliton/operator_matrix.hpp"
#include "soliton/profiles.hpp"

namespace soliton {

enum class Command { profile, spectrum, scan, virial, derrick, verify };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::profile: return "profile";
    case Command::spectrum: return "spectrum";
    case Command::scan: return "scan";
    case Command::virial: return "virial";
    case Command::derrick: return "derrick";
    case Command::verify: return "verify";
  }
  return "?";
}

inline Command parse_command(const std::string& s) {
  for (Command c : {Command::profile, Command::spectrum, Command::scan, Command::virial, Command::derrick,
                    Command::verify})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown command '" + s + "' (expected profile, spectrum, scan, virial, derrick or verify)");
}

struct ModelSpec {
  Family family = Family::soler_power;
  int k = 1;
  double m = 1.0;
  std::vector<double> coefficients;
};

struct GridSpec {
  std::optional<double> L;  // absent: default half-width at each omega
  int N = 512;
  Scheme scheme = Scheme::fourier_periodic;
  double wilson_r = 1.0;
};

struct OmegaGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  std::vector<double> values() const {
    std::vector<double> out;
    for (int i = 0; i < count; ++i)
      out.push_back(count == 1 ? start : start + (stop - start) * i / static_cast<double>(count - 1));
    return out;
  }
};

struct Tolerances {
  double re_tol = 1e-3;
  double im_tol = 1e-4;
  double localization_threshold = 0.6;
  double zero_tol_rel = 1e-4;
  std::optional<double> band_distance;  // absent: 10 / L
  double eps_Q_rel = 1e-6;
  double h_omega_rel = 1e-4;
  std::optional<double> disk_radius;  // absent: min(0.05 m, 0.4 (m - |w|))
  double bisection_tol = 1e-4;
  double side_offset = 5e-3;
  double newton_tol = 1e-9;
  int newton_max_iter = 40;
  int max_dense_size = 4096;
};

struct OutputSpec {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "json", "svg"};

  bool wants(const std::string& f) const {
    for (const auto& x : formats)
      if (x == f) return true;
    return false;
  }
};

struct RunConfig {
  Command command = Command::verify;
  Equation equation = Equation::dirac1d;
  ModelSpec model;
  std::optional<double> omega;
  std::optional<OmegaGrid> omega_grid;
  GridSpec grid;
  std::string eigensolver = "structured";  // or "real_schur"
  Tolerances tolerances;
  OutputSpec output;
  int threads = 1;

  NonlinearityModel nonlinearity() const {
    if (model.family == Family::soler_power) return NonlinearityModel::soler_power(model.k, model.m);
    return NonlinearityModel::polynomial(model.coefficients);
  }

  NlwModel nlw_model() const { return NlwModel(model.coefficients); }

  double mass() const { return equation == Equation::nlw ? 0.0 : nonlinearity().mass(); }

  /// Grid at frequency omega: fixed when L is configured, else the default width.
  Grid1D grid_at(double w) const {
    double L = 0.0;
    if (grid.L) {
      L = *grid.L;
    } else {
      const double m = mass();
      const double rate = equation == Equation::nls       ? nls_decay_rate(m, w)
                          : equation == Equation::dirac1d ? dirac_decay_rate(m, w)
                                                          : std::sqrt(std::max(0.0, nlw_model().gprime(0.0)));
      if (!(rate > 0)) throw PreconditionError("no decay rate at omega = " + std::to_string(w));
      L = default_half_width(rate);
    }
    return Grid1D::validated({L, grid.N, grid.scheme, grid.wilson_r});
  }

  NewtonOptions newton() const { return {tolerances.newton_max_iter, tolerances.newton_tol}; }
};

namespace detail {

using cjson = nlohmann::ordered_json;

inline void reject_unknown(const cjson& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where.empty() ? "config must be a JSON object" : where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key()))
      throw ConfigError("unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
}

inline double get_number(const cjson& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path + " must be a number");
  return v.get<double>();
}

inline int get_int(const cjson& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path + " must be an integer");
  return v.get<int>();
}

inline std::string get_string(const cjson& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(path + " must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline Equation parse_equation(const std::string& s) {
  if (s == "nls") return Equation::nls;
  if (s == "dirac1d") return Equation::dirac1d;
  if (s == "nlw") return Equation::nlw;
  throw ConfigError("equation must be one of nls, dirac1d, nlw (got '" + s + "')");
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "fourier_periodic") return Scheme::fourier_periodic;
  if (s == "fd2_wilson") return Scheme::fd2_wilson;
  throw ConfigError("grid.scheme must be fourier_periodic or fd2_wilson (got '" + s + "')");
}

inline RunConfig parse_config(const nlohmann::ordered_json& j, std::optional<Command> cli_command = std::nullopt) {
  using detail::get_int;
  using detail::get_number;
  using detail::get_string;
  detail::reject_unknown(j, "", {"command", "equation", "model", "omega", "omega_grid", "grid", "eigensolver",
                                 "tolerances", "output", "threads"});
  RunConfig c;
  if (j.contains("command")) {
    c.command = parse_command(get_string(j, "command", "command"));
    if (cli_command && *cli_command != c.command)
      throw ConfigError(std::string("command mismatch: config says '") + to_string(c.command) +
                        "', command line says '" + to_string(*cli_command) + "'");
  } else if (cli_command) {
    c.command = *cli_command;
  } else {
    throw ConfigError("command is missing");
  }

  if (c.command == Command::derrick) {
    c.equation = Equation::nlw;
    if (j.contains("equation") && get_string(j, "equation", "equation") != "nlw")
      throw ConfigError("equation must be nlw for the derrick command");
  } else {
    if (!j.contains("equation")) throw ConfigError("equation is missing");
    c.equation = parse_equation(get_string(j, "equation", "equation"));
    if (c.equation == Equation::nlw && c.command != Command::profile)
      throw ConfigError("equation nlw is only available for the profile and derrick commands");
  }

  if (j.contains("model")) {
    const auto& mj = j.at("model");
    detail::reject_unknown(mj, "model", {"family", "k", "m", "coefficients"});
    const std::string fam = mj.contains("family") ? get_string(mj, "family", "model.family") : "soler_power";
    if (fam == "soler_power") {
      if (c.equation == Equation::nlw) throw ConfigError("model.family for nlw must be polynomial");
      c.model.family = Family::soler_power;
      if (mj.contains("coefficients")) throw ConfigError("model.coefficients is not used by soler_power");
      if (mj.contains("k")) c.model.k = get_int(mj, "k", "model.k");
      if (mj.contains("m")) c.model.m = get_number(mj, "m", "model.m");
      if (c.model.k < 1) throw ConfigError("model.k must be a positive integer");
      if (!(c.model.m > 0)) throw ConfigError("model.m must be positive");
    } else if (fam == "polynomial") {
      c.model.family = Family::polynomial;
      if (mj.contains("k") || mj.contains("m"))
        throw ConfigError("model.k and model.m are not used by the polynomial family (m is the constant coefficient)");
      if (!mj.contains("coefficients") || !mj.at("coefficients").is_array())
        throw ConfigError("model.coefficients must be an array of numbers");
      for (const auto& v : mj.at("coefficients")) {
        if (!v.is_number()) throw ConfigError("model.coefficients must be an array of numbers");
        c.model.coefficients.push_back(v.get<double>());
      }
      if (c.equation == Equation::nlw) {
        if (c.model.coefficients.empty() || c.model.coefficients.front() != 0.0)
          throw ConfigError("model.coefficients[0] must be 0 for nlw (g(0) = 0)");
      } else if (c.model.coefficients.empty() || !(c.model.coefficients.front() > 0)) {
        throw ConfigError("model.coefficients[0] = m must be positive");
      }
    } else if (fam == "custom") {
      throw ConfigError("model.family custom needs callables and cannot be given in a config file");
    } else {
      throw ConfigError("model.family must be soler_power or polynomial (got '" + fam + "')");
    }
  } else if (c.equation == Equation::nlw) {
    c.model.family = Family::polynomial;
    c.model.coefficients = NlwModel::default_demo().coefficients();
  } else {
    throw ConfigError("model is missing");
  }

  if (j.contains("omega")) c.omega = get_number(j, "omega", "omega");
  if (j.contains("omega_grid")) {
    const auto& g = j.at("omega_grid");
    detail::reject_unknown(g, "omega_grid", {"start", "stop", "count"});
    for (const char* k : {"start", "stop", "count"})
      if (!g.contains(k)) throw ConfigError(std::string("omega_grid.") + k + " is missing");
    c.omega_grid = OmegaGrid{get_number(g, "start", "omega_grid.start"), get_number(g, "stop", "omega_grid.stop"),
                             get_int(g, "count", "omega_grid.count")};
    if (c.omega_grid->count < 1) throw ConfigError("omega_grid.count must be at least 1");
  }
  const bool needs_omega = c.command == Command::profile || c.command == Command::spectrum ||
                           c.command == Command::verify;
  if (c.equation != Equation::nlw && needs_omega && !c.omega) throw ConfigError("omega is missing");
  if (c.command == Command::scan && !c.omega_grid) throw ConfigError("omega_grid is missing");
  if (c.command == Command::virial && !c.omega && !c.omega_grid) throw ConfigError("omega or omega_grid is required");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::reject_unknown(g, "grid", {"L", "N", "scheme", "wilson_r"});
    if (g.contains("L")) {
      if (g.at("L").is_string() && g.at("L").get<std::string>() == "auto") {
        c.grid.L.reset();
      } else {
        c.grid.L = get_number(g, "L", "grid.L");
        if (!(*c.grid.L > 0)) throw ConfigError("grid.L must be positive");
      }
    }
    if (g.contains("N")) c.grid.N = get_int(g, "N", "grid.N");
    if (g.contains("scheme")) c.grid.scheme = parse_scheme(get_string(g, "scheme", "grid.scheme"));
    if (g.contains("wilson_r")) c.grid.wilson_r = get_number(g, "wilson_r", "grid.wilson_r");
  }
  if (c.grid.N <= 0 || c.grid.N % 2 != 0)
    throw ConfigError("grid.N must be a positive even integer (got " + std::to_string(c.grid.N) + ")");

  if (j.contains("eigensolver")) {
    c.eigensolver = get_string(j, "eigensolver", "eigensolver");
    if (c.eigensolver != "structured" && c.eigensolver != "real_schur")
      throw ConfigError("eigensolver must be structured or real_schur");
  }

  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    detail::reject_unknown(t, "tolerances",
                           {"re_tol", "im_tol", "localization_threshold", "zero_tol_rel", "band_distance", "eps_Q_rel",
                            "h_omega_rel", "disk_radius", "bisection_tol", "side_offset", "newton_tol",
                            "newton_max_iter", "max_dense_size"});
    auto& T = c.tolerances;
    auto num = [&](const char* key, double& dst) {
      if (!t.contains(key)) return;
      dst = get_number(t, key, std::string("tolerances.") + key);
      if (!(dst > 0)) throw ConfigError(std::string("tolerances.") + key + " must be positive");
    };
    auto opt = [&](const char* key, std::optional<double>& dst) {
      if (!t.contains(key)) return;
      if (t.at(key).is_string() && t.at(key).get<std::string>() == "auto") return;
      double v = 0;
      num(key, v);
      dst = v;
    };
    num("re_tol", T.re_tol);
    num("im_tol", T.im_tol);
    num("localization_threshold", T.localization_threshold);
    num("zero_tol_rel", T.zero_tol_rel);
    opt("band_distance", T.band_distance);
    num("eps_Q_rel", T.eps_Q_rel);
    num("h_omega_rel", T.h_omega_rel);
    opt("disk_radius", T.disk_radius);
    num("bisection_tol", T.bisection_tol);
    num("side_offset", T.side_offset);
    num("newton_tol", T.newton_tol);
    if (t.contains("newton_max_iter")) T.newton_max_iter = get_int(t, "newton_max_iter", "tolerances.newton_max_iter");
    if (t.contains("max_dense_size")) T.max_dense_size = get_int(t, "max_dense_size", "tolerances.max_dense_size");
    if (T.newton_max_iter < 1) throw ConfigError("tolerances.newton_max_iter must be at least 1");
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    detail::reject_unknown(o, "output", {"dir", "formats"});
    if (o.contains("dir")) c.output.dir = get_string(o, "dir", "output.dir");
    if (o.contains("formats")) {
      if (!o.at("formats").is_array()) throw ConfigError("output.formats must be an array");
      c.output.formats.clear();
      for (const auto& f : o.at("formats")) {
        if (!f.is_string()) throw ConfigError("output.formats entries must be strings");
        const auto s = f.get<std::string>();
        if (s != "csv" && s != "json" && s != "svg")
          throw ConfigError("output.formats: unknown format '" + s + "' (expected csv, json, svg)");
        c.output.formats.push_back(s);
      }
    }
  }
  if (j.contains("threads")) {
    c.threads = get_int(j, "threads", "threads");
    if (c.threads < 1) throw ConfigError("threads must be at least 1");
  }
  return c;
}

inline RunConfig load_config(const std::string& path, std::optional<Command> cli_command = std::nullopt) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  nlohmann::ordered_json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j, cli_command);
}

/// The effective configuration with every default written out.
inline nlohmann::ordered_json effective_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = to_string(c.command);
  j["equation"] = to_string(c.equation);
  if (c.model.family == Family::soler_power)
    j["model"] = {{"family", "soler_power"}, {"k", c.model.k}, {"m", c.model.m}};
  else
    j["model"] = {{"family", "polynomial"}, {"coefficients", c.model.coefficients}};
  if (c.omega) j["omega"] = *c.omega;
  if (c.omega_grid)
    j["omega_grid"] = {{"start", c.omega_grid->start}, {"stop", c.omega_grid->stop}, {"count", c.omega_grid->count}};
  nlohmann::ordered_json g;
  if (c.grid.L) g["L"] = *c.grid.L;
  else g["L"] = "auto";
  g["N"] = c.grid.N;
  g["scheme"] = to_string(c.grid.scheme);
  g["wilson_r"] = c.grid.wilson_r;
  j["grid"] = g;
  j["eigensolver"] = c.eigensolver;
  const auto& T = c.tolerances;
  nlohmann::ordered_json t;
  t["re_tol"] = T.re_tol;
  t["im_tol"] = T.im_tol;
  t["localization_threshold"] = T.localization_threshold;
  t["zero_tol_rel"] = T.zero_tol_rel;
  if (T.band_distance) t["band_distance"] = *T.band_distance;
  else t["band_distance"] = "auto";
  t["eps_Q_rel"] = T.eps_Q_rel;
  t["h_omega_rel"] = T.h_omega_rel;
  if (T.disk_radius) t["disk_radius"] = *T.disk_radius;
  else t["disk_radius"] = "auto";
  t["bisection_tol"] = T.bisection_tol;
  t["side_offset"] = T.side_offset;
  t["newton_tol"] = T.newton_tol;
  t["newton_max_iter"] = T.newton_max_iter;
  t["max_dense_size"] = T.max_dense_size;
  j["tolerances"] = t;
  j["output"] = {{"dir", c.output.dir}, {"formats", c.output.formats}};
  j["threads"] = c.threads;
  return j;
}

/// Hash over the parts of the config that determine numerical results.
inline std::string config_hash_input(const RunConfig& c) {
  auto j = effective_config(c);
  j.erase("output");
  j.erase("threads");
  return j.dump();
}

}  // namespace soliton
