// Command dispatch for the command-line tool. Each command writes its files
// into the output directory next to effective_config.json.
#pragma once

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "soliton/config.hpp"
#include "soliton/derrick.hpp"
#include "soliton/io.hpp"
#include "soliton/operators.hpp"
#include "soliton/profiles.hpp"
#include "soliton/spectra.hpp"
#include "soliton/stability.hpp"

namespace soliton {

struct CheckRow {
  std::string tag;   // short identifier, also written to file headers
  std::string name;  // human-readable row
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

namespace detail {

inline CheckRow at_most(std::string tag, std::string name, double value, double threshold) {
  return {std::move(tag), std::move(name), value, threshold, std::isfinite(value) && value <= threshold};
}

inline CheckRow equals(std::string tag, std::string name, double value, double expected) {
  return {std::move(tag), std::move(name), value, expected, value == expected};
}

class RunContext {
 public:
  RunContext(const RunConfig& cfg, std::ostream& log)
      : cfg_(cfg), log_(log), dir_(cfg.output.dir), hash_(stable_hash(config_hash_input(cfg))) {
    std::filesystem::create_directories(dir_);
    write_json(dir_ / "effective_config.json", effective_config(cfg));
  }

  const RunConfig& cfg() const { return cfg_; }
  std::ostream& log() { return log_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }
  bool wants(const char* f) const { return cfg_.output.wants(f); }

  OutputHeader header(std::vector<std::string> checks = {}) const {
    return {hash_, to_string(cfg_.command), std::move(checks), {}};
  }

  ojson json_header(const std::vector<std::string>& checks = {}) const {
    return ojson{{"tool", tool_version()}, {"config_hash", hash_}, {"command", to_string(cfg_.command)},
                 {"checks", checks}};
  }

  void note_file(const std::string& name) { log_ << "  wrote " << (dir_ / name).string() << "\n"; }

 private:
  const RunConfig& cfg_;
  std::ostream& log_;
  std::filesystem::path dir_;
  std::string hash_;
};

inline ScanOptions scan_options(const RunConfig& c) {
  const auto& T = c.tolerances;
  ScanOptions o;
  o.disk_radius = T.disk_radius.value_or(-1.0);
  o.re_tol = T.re_tol;
  o.im_tol = T.im_tol;
  o.localization_threshold = T.localization_threshold;
  o.band_distance = T.band_distance.value_or(-1.0);
  o.zero_tol = T.zero_tol_rel * c.mass();
  o.eps_Q_rel = T.eps_Q_rel;
  o.h_omega_rel = T.h_omega_rel;
  o.newton = c.newton();
  return o;
}

inline ClassifyOptions classify_options(const RunConfig& c) {
  ClassifyOptions o;
  o.localization_threshold = c.tolerances.localization_threshold;
  o.band_distance = c.tolerances.band_distance.value_or(-1.0);
  o.zero_tol = c.tolerances.zero_tol_rel * c.mass();
  return o;
}

inline SolitaryWaveProfile config_profile(const RunConfig& c, double omega) {
  return solve_profile(c.equation, c.nonlinearity(), omega, c.grid_at(omega), c.newton());
}

/// Residual of JL (a - i b) = 2 w i (a - i b) for the alpha_0 pair.
inline double alpha0_pair_residual(const LinearizationBlocks& blocks, const Alpha0Pair& ab, double omega) {
  const Eigen::VectorXd ra = apply_JL(blocks, ab.a) - 2.0 * omega * ab.b;
  const Eigen::VectorXd rb = apply_JL(blocks, ab.b) + 2.0 * omega * ab.a;
  return std::sqrt(ra.squaredNorm() + rb.squaredNorm()) / std::sqrt(ab.a.squaredNorm() + ab.b.squaredNorm());
}

/// Residual of L a = -2 w a.
inline double alpha0_L_residual(const LinearizationBlocks& blocks, const Alpha0Pair& ab, double omega) {
  return residual_check(blocks, ab.a, -2.0 * omega);
}

inline SpectrumReport config_spectrum(const RunConfig& c, const SolitaryWaveProfile& p,
                                      const LinearizationBlocks& blocks) {
  SpectrumReport rep;
  if (c.eigensolver == "real_schur") {
    const OperatorMatrix JL = p.equation == Equation::dirac1d ? assemble_dirac_JL(assemble_dirac_L(p))
                                                              : assemble_nls_JL(blocks.Lminus, blocks.Lplus);
    rep = eigen_decompose(JL, true, c.tolerances.max_dense_size);
  } else {
    if (2 * blocks.Lminus.size() > c.tolerances.max_dense_size)
      throw PreconditionError("spectrum: size " + std::to_string(2 * blocks.Lminus.size()) +
                              " exceeds tolerances.max_dense_size " + std::to_string(c.tolerances.max_dense_size));
    rep = linearization_spectrum(p, blocks, true, true);
  }
  return classify(std::move(rep), gap_band_imaginary(p.m() - p.omega), classify_options(c));
}

inline double disk_radius_for(const RunConfig& c, double omega) {
  return c.tolerances.disk_radius.value_or(default_disk_radius(c.mass(), omega));
}

inline void print_table(std::ostream& os, const std::vector<CheckRow>& rows) {
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.name.size());
  for (const auto& r : rows) {
    os << "  " << (r.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(static_cast<int>(w)) << r.name
       << std::right << "  value " << fmt(r.value) << "  limit " << fmt(r.threshold) << "  [" << r.tag << "]\n";
  }
}

inline std::vector<std::string> tags_of(const std::vector<CheckRow>& rows, bool passed_only = true) {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (!passed_only || r.pass) out.push_back(r.tag);
  return out;
}

// Commands.

inline int run_profile(RunContext& ctx) {
  const auto& c = ctx.cfg();
  SolitaryWaveProfile p;
  if (c.equation == Equation::nlw) p = solve_nlw_stationary(c.nlw_model(), c.grid_at(0.0), c.newton());
  else p = config_profile(c, *c.omega);
  std::vector<CheckRow> checks{at_most("profile_residual", "profile residual", p.residual, c.tolerances.newton_tol)};
  ctx.log() << "profile: " << to_string(p.equation) << " omega " << fmt(p.omega) << " residual " << fmt(p.residual)
            << " newton iterations " << p.newton_iterations << "\n";
  if (ctx.wants("csv")) {
    write_profile_csv(ctx.path("profile.csv"), p, ctx.header(tags_of(checks)));
    ctx.note_file("profile.csv");
  }
  if (ctx.wants("json")) {
    auto j = ctx.json_header(tags_of(checks));
    j["profile"] = profile_summary_json(p);
    write_json(ctx.path("profile.json"), j);
    ctx.note_file("profile.json");
  }
  if (ctx.wants("svg")) {
    std::vector<Series> s;
    const Eigen::VectorXd x = p.grid.nodes();
    const char* names[] = {p.equation == Equation::dirac1d ? "v" : (p.equation == Equation::nlw ? "theta" : "phi"),
                           "u"};
    for (Eigen::Index k = 0; k < p.n_components(); ++k) {
      Series ser{names[k], {x.data(), x.data() + x.size()}, {}};
      ser.y.assign(p.components.col(k).data(), p.components.col(k).data() + x.size());
      s.push_back(std::move(ser));
    }
    write_svg_plot(ctx.path("profile.svg"), std::string("profile, omega = ") + detail::tick_label(p.omega), "x",
                   "amplitude", s);
    ctx.note_file("profile.svg");
  }
  return checks.front().pass ? 0 : 1;
}

inline int run_spectrum(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const double w = *c.omega;
  const auto p = config_profile(c, w);
  const auto blocks = assemble_blocks(p);
  const auto rep = config_spectrum(c, p, blocks);
  const auto& T = c.tolerances;
  const auto pairs = detect_real_pairs(rep, T.re_tol, T.im_tol, T.localization_threshold);
  const int nreal = count_real_eigenvalues(rep, T.re_tol, T.im_tol, T.localization_threshold);
  const double radius = disk_radius_for(c, w);
  double used_radius = radius;
  const int rank0 = rank_at_zero(rep, radius, &used_radius);
  const double sym_tol = 1e-8;
  std::vector<CheckRow> checks{
      at_most("profile_residual", "profile residual", p.residual, T.newton_tol),
      at_most("conjugation_symmetry", "conjugation symmetry defect", conjugation_defect(rep, T.zero_tol_rel * p.m()),
              sym_tol),
      at_most("reflection_symmetry", "lambda -> -lambda symmetry defect", reflection_defect(rep, T.zero_tol_rel * p.m()),
              sym_tol)};
  if (p.equation == Equation::nls)
    checks.push_back(at_most("axis_dichotomy", "real-or-imaginary dichotomy", axis_dichotomy_defect(rep), 1e-6));

  ojson extra;
  if (p.equation == Equation::dirac1d) {
    const auto ab = alpha0_eigenvector(p);
    const double rL = alpha0_L_residual(blocks, ab, w);
    const double rJL = alpha0_pair_residual(blocks, ab, w);
    checks.push_back(at_most("alpha0_eigenvector", "alpha0 eigenvector residual", rL, 1e-8));
    const bool embedded = rJL <= 1e-8 && rep.bands.interior_contains(cplx(0.0, 2.0 * w));
    extra["alpha0"] = {{"eigenvalue", {0.0, 2.0 * w}}, {"L_residual", rL}, {"JL_residual", rJL}, {"embedded", embedded}};
  }

  std::map<std::string, int> counts;
  for (auto cl : rep.classifications) ++counts[to_string(cl)];
  ctx.log() << "spectrum: " << rep.size() << " eigenvalues (" << rep.method << "), real eigenvalues " << nreal
            << ", rank at 0 " << rank0 << "\n";
  for (const auto& [k, v] : counts) ctx.log() << "  " << k << " " << v << "\n";

  if (ctx.wants("csv")) {
    write_spectrum_csv(ctx.path("spectrum.csv"), rep, ctx.header(tags_of(checks)));
    ctx.note_file("spectrum.csv");
  }
  if (ctx.wants("json")) {
    auto j = ctx.json_header(tags_of(checks));
    j["profile"] = profile_summary_json(p);
    j["spectrum"] = spectrum_json(rep);
    j["classification_counts"] = counts;
    j["real_pairs"] = pairs;
    j["real_eigenvalue_count"] = nreal;
    j["rank_at_zero"] = {{"rank", rank0}, {"radius", used_radius}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    ojson cj = ojson::array();
    for (const auto& r : checks) cj.push_back({{"check", r.tag}, {"value", r.value}, {"limit", r.threshold}, {"pass", r.pass}});
    j["check_results"] = cj;
    write_json(ctx.path("spectrum.json"), j);
    ctx.note_file("spectrum.json");
  }
  if (ctx.wants("svg")) {
    Series s{"eigenvalues", {}, {}, true};
    for (const auto& z : rep.eigenvalues) {
      s.x.push_back(z.real());
      s.y.push_back(z.imag());
    }
    write_svg_plot(ctx.path("spectrum.svg"), std::string("spectrum of JL, omega = ") + detail::tick_label(w), "Re",
                   "Im", {s});
    ctx.note_file("spectrum.svg");
  }
  for (const auto& r : checks)
    if (!r.pass) return 1;
  return 0;
}

inline int run_scan(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto model = c.nonlinearity();
  const auto opts = scan_options(c);
  auto grid_for = [&c](double w) { return c.grid_at(w); };
  const auto rows = bifurcation_scan(c.equation, model, c.omega_grid->values(), grid_for, opts, c.threads);
  const auto exceptions = vk_exceptions(rows);

  bool sign_change = false;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (rows[i].ok && rows[i + 1].ok && (rows[i].dQ_domega > 0) != (rows[i + 1].dQ_domega > 0)) sign_change = true;
  std::optional<BifurcationReport> bif;
  std::string bif_error;
  if (sign_change) {
    try {
      bif = analyze_bifurcation(c.equation, model, rows, grid_for, opts, c.tolerances.bisection_tol,
                                c.tolerances.side_offset);
    } catch (const Error& e) {
      bif_error = e.what();
    }
  }

  int failed = 0;
  for (const auto& r : rows) {
    ctx.log() << "  omega " << fmt(r.omega) << "  Q " << fmt(r.Q) << "  dQ/domega " << fmt(r.dQ_domega) << "  "
              << to_string(r.verdict) << "  real " << r.real_pair_count << "  rank0 " << r.nullspace_dim
              << (r.ok ? "" : "  FAILED: " + r.notes) << "\n";
    if (!r.ok) ++failed;
  }
  ctx.log() << "scan: " << rows.size() << " rows, " << failed << " failed, " << exceptions.size()
            << " rows break the VK biconditional\n";
  if (bif && bif->found)
    ctx.log() << "bifurcation: omega* " << fmt(bif->omega_star) << " sided " << bif->sided << " rank jump "
              << bif->rank_jump << "\n";
  if (!bif_error.empty()) ctx.log() << "bifurcation analysis failed: " << bif_error << "\n";

  std::vector<std::string> checks;
  if (exceptions.empty()) checks.push_back("vk_biconditional");
  auto header = ctx.header(checks);
  if (ctx.wants("csv")) {
    write_scan_csv(ctx.path("scan.csv"), rows, header);
    ctx.note_file("scan.csv");
    {
      CsvWriter w(ctx.path("scan_Q.csv"), header, {"omega", "Q"});
      for (const auto& r : rows) w.row({fmt(r.omega), fmt(r.Q)});
    }
    ctx.note_file("scan_Q.csv");
    {
      CsvWriter w(ctx.path("scan_max_real_eigenvalue.csv"), header, {"omega", "max_real_eigenvalue"});
      for (const auto& r : rows) w.row({fmt(r.omega), r.ok ? fmt(r.max_real_eigenvalue) : fmt(std::nan(""))});
    }
    ctx.note_file("scan_max_real_eigenvalue.csv");
  }
  if (ctx.wants("json")) {
    auto j = ctx.json_header(checks);
    ojson arr = ojson::array();
    for (const auto& r : rows) arr.push_back(scan_row_json(r));
    j["rows"] = arr;
    j["vk_exceptions"] = exceptions;
    if (bif) j["bifurcation"] = bifurcation_json(*bif);
    else if (!bif_error.empty()) j["bifurcation"] = {{"found", false}, {"notes", bif_error}};
    else j["bifurcation"] = {{"found", false}, {"notes", "no sign change of dQ/domega among the scan rows"}};
    write_json(ctx.path("scan.json"), j);
    ctx.note_file("scan.json");
  }
  if (ctx.wants("svg")) {
    Series q{"Q", {}, {}}, lam{"max real eigenvalue", {}, {}};
    for (const auto& r : rows) {
      q.x.push_back(r.omega);
      q.y.push_back(r.Q);
      lam.x.push_back(r.omega);
      lam.y.push_back(r.ok ? r.max_real_eigenvalue : std::nan(""));
    }
    write_svg_plot(ctx.path("scan_Q.svg"), "charge along the scan", "omega", "Q", {q});
    write_svg_plot(ctx.path("scan_max_real_eigenvalue.svg"), "largest real eigenvalue of JL", "omega", "lambda", {lam});
    ctx.note_file("scan_Q.svg");
    ctx.note_file("scan_max_real_eigenvalue.svg");
  }
  return failed == 0 && bif_error.empty() ? 0 : 1;
}

inline int run_virial(RunContext& ctx) {
  const auto& c = ctx.cfg();
  std::vector<double> omegas;
  if (c.omega_grid) omegas = c.omega_grid->values();
  else omegas.push_back(*c.omega);
  const bool dirac = c.equation == Equation::dirac1d;
  const double limit = 1e-6;

  struct Row {
    double omega, Q, T, V, pairing, r1, r2;
    bool ok;
    std::string notes;
  };
  std::vector<Row> rows;
  const double nan = std::nan("");
  for (double w : omegas) {
    Row r{w, nan, nan, nan, nan, nan, nan, false, ""};
    try {
      const auto p = config_profile(c, w);
      r.Q = charge_Q(p);
      const auto vr = virial_check(p);
      r.r1 = vr.residual1;
      r.r2 = vr.residual2;
      if (dirac) {
        const auto e = energy_parts(p);
        r.T = e.T;
        r.V = e.V;
        r.pairing = virial_pairing(p);
      }
      r.ok = r.r1 <= limit && r.r2 <= limit;
      if (!r.ok) r.notes = "virial residual above 1e-6";
    } catch (const Error& e) {
      r.notes = e.what();
    }
    ctx.log() << "  omega " << fmt(w) << "  residual1 " << fmt(r.r1) << "  residual2 " << fmt(r.r2)
              << (r.ok ? "" : "  FAILED: " + r.notes) << "\n";
    rows.push_back(r);
  }
  bool all_ok = true;
  for (const auto& r : rows) all_ok = all_ok && r.ok;
  const std::vector<std::string> checks = all_ok ? std::vector<std::string>{"virial_identity"}
                                                 : std::vector<std::string>{};
  if (ctx.wants("csv")) {
    CsvWriter w(ctx.path("virial.csv"), ctx.header(checks),
                {"omega", "Q", "T", "V", "pairing", "T_plus_omega_Q", "residual1", "residual2", "ok", "notes"});
    for (const auto& r : rows)
      w.row({fmt(r.omega), fmt(r.Q), fmt(r.T), fmt(r.V), fmt(r.pairing), fmt(r.T + r.omega * r.Q), fmt(r.r1),
             fmt(r.r2), r.ok ? "1" : "0", csv_escape(r.notes)});
    ctx.note_file("virial.csv");
  }
  if (ctx.wants("json")) {
    auto j = ctx.json_header(checks);
    ojson arr = ojson::array();
    for (const auto& r : rows)
      arr.push_back({{"omega", r.omega},
                     {"Q", r.Q},
                     {"T", r.T},
                     {"V", r.V},
                     {"pairing", r.pairing},
                     {"T_plus_omega_Q", r.T + r.omega * r.Q},
                     {"residual1", r.r1},
                     {"residual2", r.r2},
                     {"ok", r.ok},
                     {"notes", r.notes}});
    j["rows"] = arr;
    write_json(ctx.path("virial.json"), j);
    ctx.note_file("virial.json");
  }
  if (ctx.wants("svg") && rows.size() > 1) {
    Series a{"residual1", {}, {}}, b{"residual2", {}, {}};
    for (const auto& r : rows) {
      a.x.push_back(r.omega);
      a.y.push_back(std::log10(std::max(r.r1, 1e-300)));
      b.x.push_back(r.omega);
      b.y.push_back(std::log10(std::max(r.r2, 1e-300)));
    }
    write_svg_plot(ctx.path("virial.svg"), "virial residuals", "omega", "log10 residual", {a, b});
    ctx.note_file("virial.svg");
  }
  return all_ok ? 0 : 1;
}

inline int run_derrick(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto d = derrick_instability(c.nlw_model(), c.grid_at(0.0));
  const double q_err = std::abs(d.quadratic_form - d.lambda_min);
  std::vector<CheckRow> checks{
      at_most("negative_ground_state", "smallest eigenvalue of -D2 + g'(theta) is negative", d.lambda_min, 0.0),
      at_most("block_pair", "block eigenvalues +-c, residual", d.block_residual, 1e-8),
      at_most("block_pair_value", "block eigenvalue vs sqrt(-lambda_min)",
              std::max(std::abs(d.block_lambda_plus - d.growth_rate), std::abs(d.block_lambda_minus + d.growth_rate)),
              1e-8),
      equals("ground_state_nodes", "ground state sign changes", d.ground_state_sign_changes, 0),
      at_most("quadratic_form", "<chi, L chi> - lambda_min |chi|^2", q_err, 1e-8),
      at_most("energy_second_variation", "second variation of the energy along chi", d.energy_second_variation, 0.0)};
  ctx.log() << "derrick: lambda_min " << fmt(d.lambda_min) << "  c " << fmt(d.growth_rate) << "\n";
  print_table(ctx.log(), checks);
  if (ctx.wants("csv")) {
    write_derrick_csv(ctx.path("derrick.csv"), d, ctx.header(tags_of(checks)));
    ctx.note_file("derrick.csv");
  }
  if (ctx.wants("json")) {
    auto j = ctx.json_header(tags_of(checks));
    j["derrick"] = derrick_json(d);
    write_json(ctx.path("derrick.json"), j);
    ctx.note_file("derrick.json");
  }
  if (ctx.wants("svg")) {
    const Eigen::VectorXd x = d.theta.grid.nodes();
    Series th{"theta", {x.data(), x.data() + x.size()}, {}}, chi{"chi", {x.data(), x.data() + x.size()}, {}};
    th.y.assign(d.theta.components.data(), d.theta.components.data() + x.size());
    chi.y.assign(d.chi.data(), d.chi.data() + x.size());
    write_svg_plot(ctx.path("derrick.svg"), "stationary solution and unstable direction", "x", "", {th, chi});
    ctx.note_file("derrick.svg");
  }
  for (const auto& r : checks)
    if (!r.pass) return 1;
  return 0;
}

}  // namespace detail

/// The checks run by `verify` at the configured omega.
inline std::vector<CheckRow> verify_checks(const RunConfig& c) {
  using detail::at_most;
  using detail::equals;
  const double w = *c.omega;
  const auto model = c.nonlinearity();
  const auto p = detail::config_profile(c, w);
  const auto blocks = assemble_blocks(p);
  const bool dirac = p.equation == Equation::dirac1d;
  const auto& T = c.tolerances;
  std::vector<CheckRow> rows;

  rows.push_back(at_most("profile_residual", "profile residual", p.residual, T.newton_tol));
  const double Q = charge_Q(p);
  if (const auto q = charge_closed_form(p.equation, model, w))
    rows.push_back(at_most("charge_closed_form", "charge vs closed form: |dQ| <= 1e-6", std::abs(Q - *q), 1e-6));

  const auto ch = chain_residuals(p, blocks, T.h_omega_rel * (p.m() - w));
  rows.push_back(at_most("kernel_phase", dirac ? "L J Phi = 0" : "L- phi = 0", ch.kernel_phase, 1e-6));
  rows.push_back(at_most("kernel_translation", dirac ? "L dx Phi = 0" : "L+ phi' = 0", ch.kernel_translation, 1e-6));
  rows.push_back(at_most("chain_omega", dirac ? "L dw Phi = Phi" : "L+ dw phi = phi", ch.chain_omega, 1e-5));
  rows.push_back(at_most("chain_boost", dirac ? "L(A1 Phi - 2 w x J Phi) = 2 J dx Phi" : "L- (x phi) = -phi'",
                         ch.chain_boost, 1e-5));

  const auto sp = detail::config_spectrum(c, p, blocks);
  if (dirac) {
    const auto ab = alpha0_eigenvector(p);
    const double rL = detail::alpha0_L_residual(blocks, ab, w);
    const double rJL = detail::alpha0_pair_residual(blocks, ab, w);
    rows.push_back(at_most("alpha0_eigenvector", "L alpha0 Phi = -2 w alpha0 Phi", rL, 1e-8));
    rows.push_back(at_most("alpha0_pair", "JL eigenvector for +-2 w i", rJL, 1e-8));
    const bool embedded = rJL <= 1e-8 && sp.bands.interior_contains(cplx(0.0, 2.0 * w));
    const bool expected = 3.0 * w > p.m();
    rows.push_back({"embedding_flag",
                    std::string("+-2 w i embedded in the essential spectrum: ") + (embedded ? "yes" : "no") +
                        " (expected " + (expected ? "yes" : "no") + ")",
                    embedded ? 1.0 : 0.0, expected ? 1.0 : 0.0, embedded == expected});
  }

  const auto vr = virial_check(p);
  rows.push_back(at_most("virial_residual1", "virial identity, residual1", vr.residual1, 1e-6));
  rows.push_back(at_most("virial_residual2", "virial identity, residual2", vr.residual2, 1e-6));
  if (dirac) {
    const auto e = energy_parts(p);
    const double pairing = virial_pairing(p);
    const double target = e.T + w * Q;
    rows.push_back(at_most("virial_pairing", "<A1 Phi - 2 w x J Phi, J dx Phi> = T + w Q",
                           std::abs(pairing - target) / (std::abs(target) + 1.0), 1e-5));
    if (model.family() == Family::soler_power)
      rows.push_back({"virial_pairing_positive", "T + w Q > 0", pairing, 0.0, pairing > 0});
  }

  double used = 0.0;
  const int rank0 = rank_at_zero(sp, detail::disk_radius_for(c, w), &used);
  rows.push_back(equals("rank_at_zero", "generalized kernel dimension", rank0, 4));

  const double dQ = local_dQ_domega(p.equation, model, w, p.grid, T.h_omega_rel, c.newton());
  const auto verdict = vk_verdict(dQ, Q, T.eps_Q_rel);
  const int nreal = count_real_eigenvalues(sp, T.re_tol, T.im_tol, T.localization_threshold);
  rows.push_back({"vk_cross_check",
                  std::string("VK cross-check: ") + to_string(verdict) + ", " + std::to_string(nreal) +
                      " real eigenvalues",
                  static_cast<double>(nreal), verdict == VkVerdict::vk_unstable_sign ? 2.0 : 0.0,
                  verdict != VkVerdict::critical && (nreal > 0) == (verdict == VkVerdict::vk_unstable_sign)});

  const double sym_tol = 1e-8;
  const double zt = T.zero_tol_rel * p.m();
  rows.push_back(at_most("conjugation_symmetry", "spectrum symmetric under conjugation", conjugation_defect(sp, zt),
                         sym_tol));
  rows.push_back(at_most("reflection_symmetry", "spectrum symmetric under lambda -> -lambda",
                         reflection_defect(sp, zt), sym_tol));
  if (!dirac)
    rows.push_back(at_most("axis_dichotomy", "isolated eigenvalues real or imaginary", axis_dichotomy_defect(sp),
                           1e-6));
  return rows;
}

namespace detail {

inline int run_verify(RunContext& ctx) {
  const auto& c = ctx.cfg();
  if (c.equation == Equation::nlw) throw ConfigError("verify needs equation nls or dirac1d");
  const auto rows = verify_checks(c);
  ctx.log() << "verify: " << to_string(c.equation) << " " << c.nonlinearity().describe() << " omega "
            << fmt(*c.omega) << " on " << c.grid_at(*c.omega).id() << "\n";
  print_table(ctx.log(), rows);
  int failed = 0;
  for (const auto& r : rows) failed += r.pass ? 0 : 1;
  ctx.log() << (failed ? std::to_string(failed) + " check(s) failed" : std::string("all checks passed")) << "\n";
  if (ctx.wants("csv")) {
    CsvWriter w(ctx.path("verify.csv"), ctx.header(tags_of(rows)), {"check", "description", "value", "limit", "pass"});
    for (const auto& r : rows) w.row({r.tag, csv_escape(r.name), fmt(r.value), fmt(r.threshold), r.pass ? "1" : "0"});
    ctx.note_file("verify.csv");
  }
  if (ctx.wants("json")) {
    auto j = ctx.json_header(tags_of(rows));
    ojson arr = ojson::array();
    for (const auto& r : rows)
      arr.push_back({{"check", r.tag}, {"description", r.name}, {"value", r.value}, {"limit", r.threshold},
                     {"pass", r.pass}});
    j["results"] = arr;
    j["passed"] = failed == 0;
    write_json(ctx.path("verify.json"), j);
    ctx.note_file("verify.json");
  }
  return failed ? 1 : 0;
}

}  // namespace detail

/// Runs one configured command. Returns the process exit status; errors
/// propagate as exceptions after effective_config.json is written.
inline int run(const RunConfig& cfg, std::ostream& log) {
  detail::RunContext ctx(cfg, log);
  switch (cfg.command) {
    case Command::profile: return detail::run_profile(ctx);
    case Command::spectrum: return detail::run_spectrum(ctx);
    case Command::scan: return detail::run_scan(ctx);
    case Command::virial: return detail::run_virial(ctx);
    case Command::derrick: return detail::run_derrick(ctx);
    case Command::verify: return detail::run_verify(ctx);
  }
  return 2;
}

}  // namespace soliton
