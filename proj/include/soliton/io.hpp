// CSV / JSON / SVG writers. Every CSV starts with a block of '# ' lines
// (tool version, config hash, certified checks); numbers use %.15e.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "soliton/derrick.hpp"
#include "soliton/errors.hpp"
#include "soliton/profiles.hpp"
#include "soliton/spectra.hpp"
#include "soliton/stability.hpp"

#ifndef SOLITON_VERSION
#define SOLITON_VERSION "1.0.0"
#endif

namespace soliton {

using ojson = nlohmann::ordered_json;

inline std::string tool_version() { return std::string("soliton-spectra ") + SOLITON_VERSION; }

/// FNV-1a 64, printed as 16 hex digits; stable across platforms.
inline std::string stable_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

struct OutputHeader {
  std::string config_hash;
  std::string command;
  std::vector<std::string> checks;  // certified checks carried by the file
  std::vector<std::pair<std::string, std::string>> extra;
};

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const OutputHeader& header, const std::vector<std::string>& columns)
      : os_(path, std::ios::binary) {
    if (!os_) throw Error("cannot open " + path.string() + " for writing");
    os_ << "# " << tool_version() << "\n";
    os_ << "# config_hash " << header.config_hash << "\n";
    os_ << "# command " << header.command << "\n";
    if (!header.checks.empty()) {
      os_ << "# checks";
      for (const auto& c : header.checks) os_ << ' ' << c;
      os_ << "\n";
    }
    for (const auto& [k, v] : header.extra) os_ << "# " << k << ' ' << v << "\n";
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

 private:
  std::ofstream os_;
};

inline void write_json(const std::filesystem::path& path, const ojson& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << "\n";
}

// Profiles.

inline void write_profile_csv(const std::filesystem::path& path, const SolitaryWaveProfile& p, OutputHeader header) {
  header.extra.push_back({"equation", to_string(p.equation)});
  header.extra.push_back({"omega", fmt(p.omega)});
  header.extra.push_back({"m", fmt(p.m())});
  header.extra.push_back({"family", std::holds_alternative<NonlinearityModel>(p.model)
                                        ? p.nonlinearity().describe()
                                        : std::string("nlw_polynomial")});
  header.extra.push_back({"grid", p.grid.id()});
  std::vector<std::string> cols{"x"};
  if (p.equation == Equation::dirac1d) {
    cols.push_back("v");
    cols.push_back("u");
  } else {
    cols.push_back(p.equation == Equation::nlw ? "theta" : "phi");
  }
  CsvWriter w(path, header, cols);
  for (int j = 0; j < p.grid.n_points; ++j) {
    std::vector<std::string> cells{fmt(p.grid.node(j))};
    for (Eigen::Index c = 0; c < p.n_components(); ++c) cells.push_back(fmt(p.components(j, c)));
    w.row(cells);
  }
}

inline ojson profile_summary_json(const SolitaryWaveProfile& p) {
  ojson j;
  j["equation"] = to_string(p.equation);
  j["omega"] = p.omega;
  j["m"] = p.m();
  j["grid"] = p.grid.id();
  j["decay_rate"] = p.decay_rate;
  j["residual"] = p.residual;
  j["tail_ratio"] = p.tail_ratio;
  j["newton_iterations"] = p.newton_iterations;
  j["reflection_residual"] = reflection_residual(p);
  if (p.equation != Equation::nlw) j["Q"] = charge_Q(p);
  return j;
}

// Spectra.

/// Indices sorted by real part, then imaginary part.
inline std::vector<std::size_t> eigen_order(const SpectrumReport& r) {
  std::vector<std::size_t> idx(r.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto &za = r.eigenvalues[a], &zb = r.eigenvalues[b];
    if (za.real() != zb.real()) return za.real() < zb.real();
    return za.imag() < zb.imag();
  });
  return idx;
}

inline ojson spectrum_json(const SpectrumReport& r) {
  ojson j;
  j["operator"] = {{"name", r.meta.name},
                   {"equation", to_string(r.meta.equation)},
                   {"omega", r.meta.omega},
                   {"m", r.meta.m},
                   {"grid", r.meta.grid_id},
                   {"structure", to_string(r.structure)}};
  j["method"] = r.method;
  j["essential_bands"] = r.bands.describe();
  j["operator_norm_1"] = r.operator_norm;
  ojson eig = ojson::array(), cls = ojson::array(), loc = ojson::array(), res = ojson::array();
  for (std::size_t k : eigen_order(r)) {
    eig.push_back({r.eigenvalues[k].real(), r.eigenvalues[k].imag()});
    cls.push_back(k < r.classifications.size() ? to_string(r.classifications[k]) : "unclassified");
    loc.push_back(r.localization.empty() ? std::nan("") : r.localization[k]);
    res.push_back(r.residuals.empty() ? std::nan("") : r.residuals[k]);
  }
  j["eigenvalues"] = std::move(eig);
  j["classifications"] = std::move(cls);
  j["localization"] = std::move(loc);
  j["residuals"] = std::move(res);
  return j;
}

inline void write_spectrum_csv(const std::filesystem::path& path, const SpectrumReport& r, OutputHeader header) {
  header.extra.push_back({"operator", r.meta.name + " " + to_string(r.meta.equation) + " omega=" + fmt(r.meta.omega)});
  header.extra.push_back({"grid", r.meta.grid_id});
  header.extra.push_back({"method", r.method});
  CsvWriter w(path, header, {"re", "im", "classification", "localization", "residual"});
  for (std::size_t k : eigen_order(r))
    w.row({fmt(r.eigenvalues[k].real()), fmt(r.eigenvalues[k].imag()),
           k < r.classifications.size() ? to_string(r.classifications[k]) : "unclassified",
           fmt(r.localization.empty() ? std::nan("") : r.localization[k]),
           fmt(r.residuals.empty() ? std::nan("") : r.residuals[k])});
}

// Scans.

inline const std::vector<std::string>& scan_columns() {
  static const std::vector<std::string> cols{"omega",           "Q",
                                             "dQ_domega",       "vk_verdict",
                                             "real_pair_count", "nullspace_dim",
                                             "disk_radius",     "max_real_eigenvalue",
                                             "virial_residual1", "virial_residual2",
                                             "ok",              "notes"};
  return cols;
}

inline std::string csv_escape(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
  return out + "\"";
}

inline void write_scan_csv(const std::filesystem::path& path, const std::vector<StabilityScanRecord>& rows,
                           const OutputHeader& header) {
  CsvWriter w(path, header, scan_columns());
  for (const auto& r : rows)
    w.row({fmt(r.omega), fmt(r.Q), fmt(r.dQ_domega), to_string(r.verdict), std::to_string(r.real_pair_count),
           std::to_string(r.nullspace_dim), fmt(r.disk_radius), fmt(r.max_real_eigenvalue),
           fmt(r.virial_residual1), fmt(r.virial_residual2), r.ok ? "1" : "0", csv_escape(r.notes)});
}

inline ojson scan_row_json(const StabilityScanRecord& r) {
  return ojson{{"omega", r.omega},
               {"Q", r.Q},
               {"dQ_domega", r.dQ_domega},
               {"vk_verdict", to_string(r.verdict)},
               {"real_pair_count", r.real_pair_count},
               {"nullspace_dim", r.nullspace_dim},
               {"disk_radius", r.disk_radius},
               {"max_real_eigenvalue", r.max_real_eigenvalue},
               {"virial_residuals", {r.virial_residual1, r.virial_residual2}},
               {"ok", r.ok},
               {"notes", r.notes}};
}

inline ojson bifurcation_json(const BifurcationReport& b) {
  auto side = [](const SideCheck& s) {
    return ojson{{"omega", s.omega},
                 {"dQ_domega", s.dQ_domega},
                 {"real_pair_count", s.real_pair_count},
                 {"nullspace_dim", s.nullspace_dim},
                 {"max_real_eigenvalue", s.max_real_eigenvalue}};
  };
  ojson j{{"found", b.found}};
  if (b.found) {
    j["omega_star"] = b.omega_star;
    j["bracket"] = {b.bracket_lo, b.bracket_hi};
    j["nearest_bracket_omega"] = b.nearest_bracket_omega;
    j["rank_at_bracket"] = b.rank_at_bracket;
    j["below"] = side(b.below);
    j["above"] = side(b.above);
    j["sided"] = b.sided;
    j["rank_jump"] = b.rank_jump;
  }
  j["notes"] = b.notes;
  return j;
}

// Derrick.

inline ojson derrick_json(const DerrickReport& d) {
  return ojson{{"lambda_min", d.lambda_min},
               {"lambda_second", d.lambda_second},
               {"growth_rate", d.growth_rate},
               {"block_eigenvalue_plus", d.block_lambda_plus},
               {"block_eigenvalue_minus", d.block_lambda_minus},
               {"block_residual", d.block_residual},
               {"ground_state_sign_changes", d.ground_state_sign_changes},
               {"quadratic_form", d.quadratic_form},
               {"energy_second_variation", d.energy_second_variation},
               {"theta_max", d.theta.components.maxCoeff()},
               {"profile_residual", d.theta.residual},
               {"grid", d.theta.grid.id()}};
}

inline void write_derrick_csv(const std::filesystem::path& path, const DerrickReport& d, const OutputHeader& header) {
  CsvWriter w(path, header, {"x", "theta", "chi"});
  for (int j = 0; j < d.theta.grid.n_points; ++j)
    w.row({fmt(d.theta.grid.node(j)), fmt(d.theta.components(j, 0)), fmt(d.chi(j))});
}

// SVG line plots.

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;  // dots instead of a polyline
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace detail

inline void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
                           const std::string& ylabel, const std::vector<Series>& series) {
  const double W = 640, H = 420, left = 80, right = 20, top = 40, bottom = 60;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };
  using detail::svg_num;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << detail::xml_escape(title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
     << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + t * (x1 - x0) / 4, yv = y0 + t * (y1 - y0) / 4;
    os << "<text x=\"" << svg_num(px(xv)) << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << detail::tick_label(xv) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << svg_num(py(yv) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
       << detail::tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << detail::xml_escape(xlabel) << "</text>\n";
  os << "<text x=\"18\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " << H / 2
     << ")\">" << detail::xml_escape(ylabel) << "</text>\n";
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          os << "<circle cx=\"" << svg_num(px(s.x[i])) << "\" cy=\"" << svg_num(py(s.y[i])) << "\" r=\"2\" fill=\""
             << colors[k % 4] << "\"/>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << colors[k % 4] << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << svg_num(px(s.x[i])) << ',' << svg_num(py(s.y[i])) << ' ';
      os << "\"/>\n";
    }
    if (!s.label.empty())
      os << "<text x=\"" << W - right - 8 << "\" y=\"" << top + 16 + 14 * k << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
         << colors[k % 4] << "\">" << detail::xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace soliton
