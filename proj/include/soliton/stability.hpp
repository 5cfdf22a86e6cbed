// Charge curves, Vakhitov-Kolokolov verdicts, virial identities and omega-scans
// that track real eigenvalues and the generalized kernel of JL.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "soliton/errors.hpp"
#include "soliton/grid.hpp"
#include "soliton/nonlinearity.hpp"
#include "soliton/operators.hpp"
#include "soliton/profiles.hpp"
#include "soliton/spectra.hpp"

namespace soliton {

/// Q = int psi^* psi, trapezoid rule (uniform weights on the periodic grid).
inline double charge_Q(const SolitaryWaveProfile& p) {
  return p.components.size() ? p.components.squaredNorm() * p.grid.spacing() : 0.0;
}

/// Closed-form charge for the soler_power family where one is known:
/// NLS, any k (profile A sech^{1/k}(k kappa x)); Dirac, k = 1: 2 sqrt(m^2 - w^2) / w.
inline std::optional<double> charge_closed_form(Equation eq, const NonlinearityModel& model, double omega) {
  if (model.family() != Family::soler_power) return std::nullopt;
  const int k = model.power();
  const double m = model.mass();
  if (eq == Equation::nls) {
    const double kappa = std::sqrt(2.0 * (m - omega));
    const double A2 = std::pow((k + 1) * (m - omega), 1.0 / k);
    const double a = 1.0 / k;
    return A2 / (k * kappa) * std::tgamma(a) * std::sqrt(M_PI) / std::tgamma(a + 0.5);
  }
  if (eq == Equation::dirac1d && k == 1) return 2.0 * std::sqrt(m * m - omega * omega) / omega;
  return std::nullopt;
}

struct EnergyParts {
  double T = 0.0;  // int psi^* (-i alpha_1 d/dx) psi
  double V = 0.0;  // int G(psi^* beta psi)
  double T_imag = 0.0;
};

/// Kinetic and potential parts of the Dirac energy at a real profile.
inline EnergyParts energy_parts(const SolitaryWaveProfile& p) {
  detail::require_profile(p, Equation::dirac1d, "energy_parts");
  const int N = p.grid.n_points;
  const double h = p.grid.spacing();
  const Eigen::MatrixXd D1 = first_derivative_matrix(p.grid).entries;
  const Eigen::VectorXd v = p.components.col(0), u = p.components.col(1);
  // -i alpha_1 = i sigma_2 = [[0, 1], [-1, 0]] acting on (v, u).
  EnergyParts e;
  e.T = h * (v.dot(D1 * u) - u.dot(D1 * v));
  // Imaginary part of psi^* H psi: the antihermitian part of the discrete kinetic operator.
  const Eigen::MatrixXd K = kinetic_operator(Equation::dirac1d, p.grid);
  const Eigen::VectorXd s = p.stacked();
  e.T_imag = 0.5 * h * std::abs(s.dot((K - K.transpose()) * s));
  if (e.T_imag > 1e-8) throw SolverError("energy_parts: imaginary kinetic residue", e.T_imag);
  const auto& model = p.nonlinearity();
  for (int j = 0; j < N; ++j) e.V += h * model.G(v(j) * v(j) - u(j) * u(j));
  return e;
}

struct VirialResiduals {
  double residual1 = 0.0;
  double residual2 = 0.0;
};

/// Dirac: residual1 = |(n-1)/n T + V - w Q| / (|w Q| + 1),
///        residual2 = |T/n - int(G(rho) - rho g(rho))| / (|T| + 1).
/// NLS: the same roles are played by w Q = 1/2 int phi'^2 + int g(phi^2) phi^2
/// and int phi'^2 = 2 int (G(phi^2) - w phi^2).
inline VirialResiduals virial_check(const SolitaryWaveProfile& p, int n = 1) {
  const double h = p.grid.spacing();
  const double Q = charge_Q(p);
  const auto& model = p.nonlinearity();
  VirialResiduals r;
  if (p.equation == Equation::dirac1d) {
    const EnergyParts e = energy_parts(p);
    double I = 0.0;
    for (int j = 0; j < p.grid.n_points; ++j) {
      const double v = p.components(j, 0), u = p.components(j, 1);
      const double rho = v * v - u * u;
      I += h * (model.G(rho) - rho * model.g(rho));
    }
    r.residual1 = std::abs(static_cast<double>(n - 1) / n * e.T + e.V - p.omega * Q) / (std::abs(p.omega * Q) + 1.0);
    r.residual2 = std::abs(e.T / n - I) / (std::abs(e.T) + 1.0);
    return r;
  }
  if (p.equation == Equation::nls) {
    const Eigen::VectorXd phi = p.components.col(0);
    const Eigen::VectorXd dphi = first_derivative_matrix(p.grid).entries * phi;
    const double K = h * dphi.squaredNorm();
    double gint = 0.0, Gint = 0.0;
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
      const double s = phi(j) * phi(j);
      gint += h * model.g(s) * s;
      Gint += h * model.G(s);
    }
    r.residual1 = std::abs(0.5 * K + gint - p.omega * Q) / (std::abs(p.omega * Q) + 1.0);
    r.residual2 = std::abs(K - 2.0 * (Gint - p.omega * Q)) / (K + 1.0);
    return r;
  }
  throw PreconditionError("virial_check: nls or dirac1d profile required");
}

/// T + w Q computed as the pairing <A1 Phi - 2 w x J Phi, J dx Phi>.
inline double virial_pairing(const SolitaryWaveProfile& p) {
  const Eigen::VectorXd lhs = A1_Phi(p) - 2.0 * p.omega * times_x(p.grid, J_Phi(p));
  return p.grid.spacing() * lhs.dot(apply_J(dx_Phi(p)));
}

enum class VkVerdict { vk_stable_sign, vk_unstable_sign, critical };

inline const char* to_string(VkVerdict v) {
  switch (v) {
    case VkVerdict::vk_stable_sign: return "vk_stable_sign";
    case VkVerdict::vk_unstable_sign: return "vk_unstable_sign";
    case VkVerdict::critical: return "critical";
  }
  return "?";
}

/// Sign of dQ/dw with the dead band eps_rel * Q.
inline VkVerdict vk_verdict(double dQ, double Q, double eps_rel = 1e-6) {
  const double eps = eps_rel * std::abs(Q);
  if (dQ < -eps) return VkVerdict::vk_stable_sign;
  if (dQ > eps) return VkVerdict::vk_unstable_sign;
  return VkVerdict::critical;
}

/// Grid used at frequency omega when none is configured: fixed N, default half-width.
inline Grid1D auto_grid(Equation eq, double m, double omega, int n_points, Scheme scheme = Scheme::fourier_periodic) {
  const double rate = eq == Equation::nls ? nls_decay_rate(m, omega) : dirac_decay_rate(m, omega);
  return Grid1D::validated({default_half_width(rate), n_points, scheme, 1.0});
}

struct ChargePoint {
  double omega = 0.0;
  double Q = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string error;
};

/// Q along a frequency grid; failures are recorded per row and the curve continues.
inline std::vector<ChargePoint> charge_curve(Equation eq, const NonlinearityModel& model,
                                             const std::vector<double>& omegas, const Grid1D& grid) {
  std::vector<ChargePoint> out;
  out.reserve(omegas.size());
  for (double w : omegas) {
    ChargePoint pt;
    pt.omega = w;
    try {
      pt.Q = charge_Q(solve_profile(eq, model, w, grid));
      pt.ok = true;
    } catch (const Error& e) {
      pt.error = e.what();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

/// Central difference on the curve at an interior node.
inline double dQ_domega(const std::vector<ChargePoint>& curve, double omega) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (std::abs(curve[i].omega - omega) > 1e-12 * std::max(1.0, std::abs(omega))) continue;
    if (i == 0 || i + 1 == curve.size())
      throw PreconditionError("dQ_domega: omega is at the edge of the curve");
    const auto &a = curve[i - 1], &b = curve[i + 1];
    if (!a.ok || !b.ok) throw PreconditionError("dQ_domega: neighbouring rows failed");
    return (b.Q - a.Q) / (b.omega - a.omega);
  }
  throw PreconditionError("dQ_domega: omega is not a node of the curve");
}

/// dQ/dw by a central difference with step h_rel (m - w), re-solving the profile.
inline double local_dQ_domega(Equation eq, const NonlinearityModel& model, double omega, const Grid1D& grid,
                              double h_rel = 1e-4, const NewtonOptions& newton = {}) {
  const double h = h_rel * (model.mass() - omega);
  const double qp = charge_Q(solve_profile(eq, model, omega + h, grid, newton));
  const double qm = charge_Q(solve_profile(eq, model, omega - h, grid, newton));
  return (qp - qm) / (2.0 * h);
}

struct ScanOptions {
  double disk_radius = -1.0;  // <= 0: default_disk_radius(m, w)
  double re_tol = 1e-3;
  double im_tol = 1e-4;
  double localization_threshold = 0.6;
  double band_distance = -1.0;  // classification; <= 0 selects the defaults
  double zero_tol = -1.0;
  double eps_Q_rel = 1e-6;
  double h_omega_rel = 1e-4;
  NewtonOptions newton;
};

struct StabilityScanRecord {
  double omega = 0.0;
  double Q = std::numeric_limits<double>::quiet_NaN();
  double dQ_domega = std::numeric_limits<double>::quiet_NaN();
  int real_pair_count = -1;
  int nullspace_dim = -1;
  double disk_radius = 0.0;
  double max_real_eigenvalue = 0.0;
  double max_real_residual = 0.0;
  double virial_residual1 = std::numeric_limits<double>::quiet_NaN();
  double virial_residual2 = std::numeric_limits<double>::quiet_NaN();
  VkVerdict verdict = VkVerdict::critical;
  bool ok = false;
  std::string notes;
};

/// Rank at 0 with the grazing retry: radius r, then 1.2 r, then 0.8 r.
inline int rank_at_zero(const SpectrumReport& rep, double radius, double* used_radius = nullptr) {
  std::string last;
  for (double f : {1.0, 1.2, 0.8}) {
    try {
      const int r = projector_rank(rep, 0.0, f * radius);
      if (used_radius) *used_radius = f * radius;
      return r;
    } catch (const PreconditionError& e) {
      last = e.what();
    }
  }
  throw PreconditionError(last);
}

inline StabilityScanRecord scan_row(Equation eq, const NonlinearityModel& model, double omega, const Grid1D& grid,
                                    const ScanOptions& opts = {}) {
  StabilityScanRecord rec;
  rec.omega = omega;
  try {
    const auto p = solve_profile(eq, model, omega, grid, opts.newton);
    rec.Q = charge_Q(p);
    rec.dQ_domega = local_dQ_domega(eq, model, omega, grid, opts.h_omega_rel, opts.newton);
    rec.verdict = vk_verdict(rec.dQ_domega, rec.Q, opts.eps_Q_rel);
    const auto vr = virial_check(p);
    rec.virial_residual1 = vr.residual1;
    rec.virial_residual2 = vr.residual2;

    const auto blocks = assemble_blocks(p);
    ClassifyOptions co;
    co.localization_threshold = opts.localization_threshold;
    co.band_distance = opts.band_distance;
    co.zero_tol = opts.zero_tol;
    const auto rep = classify(linearization_spectrum(p, blocks, true, false), std::nullopt, co);
    rec.real_pair_count = count_real_eigenvalues(rep, opts.re_tol, opts.im_tol, opts.localization_threshold);
    for (std::size_t j = 0; j < rep.size(); ++j) {
      const cplx z = rep.eigenvalues[j];
      if (std::abs(z.imag()) <= opts.im_tol && z.real() >= opts.re_tol &&
          rep.localization[j] >= opts.localization_threshold) {
        rec.max_real_eigenvalue = std::max(rec.max_real_eigenvalue, z.real());
        rec.max_real_residual = std::max(rec.max_real_residual, rep.residuals[j]);
      }
    }
    const double radius = opts.disk_radius > 0 ? opts.disk_radius : default_disk_radius(model.mass(), omega);
    rec.nullspace_dim = rank_at_zero(rep, radius, &rec.disk_radius);
    if (rec.nullspace_dim > 6) rec.notes = "non-generic degeneracy";
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.notes = e.what();
  }
  return rec;
}

/// Rows are independent; at most `threads` run at once. Output ordered by omega.
inline std::vector<StabilityScanRecord> bifurcation_scan(Equation eq, const NonlinearityModel& model,
                                                         std::vector<double> omegas,
                                                         const std::function<Grid1D(double)>& grid_for,
                                                         const ScanOptions& opts = {}, int threads = 1) {
  std::sort(omegas.begin(), omegas.end());
  std::vector<StabilityScanRecord> rows(omegas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < omegas.size(); i = next++) {
      try {
        rows[i] = scan_row(eq, model, omegas[i], grid_for(omegas[i]), opts);
      } catch (const Error& e) {
        rows[i].omega = omegas[i];
        rows[i].notes = e.what();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(omegas.size())));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

inline std::vector<StabilityScanRecord> bifurcation_scan(Equation eq, const NonlinearityModel& model,
                                                         const std::vector<double>& omegas, const Grid1D& grid,
                                                         const ScanOptions& opts = {}, int threads = 1) {
  return bifurcation_scan(eq, model, omegas, [grid](double) { return grid; }, opts, threads);
}

/// Rows on which a real pair is present iff dQ/dw > eps_Q. Returns the omegas that violate it.
inline std::vector<double> vk_exceptions(const std::vector<StabilityScanRecord>& rows) {
  std::vector<double> bad;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    const bool pair = r.real_pair_count > 0;
    if (pair != (r.verdict == VkVerdict::vk_unstable_sign)) bad.push_back(r.omega);
  }
  return bad;
}

struct SideCheck {
  double omega = 0.0;
  double dQ_domega = 0.0;
  int real_pair_count = -1;
  int nullspace_dim = -1;
  double max_real_eigenvalue = 0.0;
};

struct BifurcationReport {
  bool found = false;
  double omega_star = std::numeric_limits<double>::quiet_NaN();
  double bracket_lo = 0.0, bracket_hi = 0.0;
  /// Projector rank at the bracket endpoint closest to omega_star (the one with the smaller |dQ/dw|).
  double nearest_bracket_omega = 0.0;
  int rank_at_bracket = -1;
  SideCheck below;  // omega_star - offset
  SideCheck above;  // omega_star + offset
  bool sided = false;     // real pair exactly on the side with dQ/dw > 0
  bool rank_jump = false; // rank >= 6 at the bracket
  std::string notes;
};

/// Locates a sign change of dQ/dw among the scan rows, refines it by bisection
/// to |dw| <= tol, and checks both sides at omega_star +- offset.
inline BifurcationReport analyze_bifurcation(Equation eq, const NonlinearityModel& model,
                                             const std::vector<StabilityScanRecord>& rows,
                                             const std::function<Grid1D(double)>& grid_for,
                                             const ScanOptions& opts = {}, double tol = 1e-4,
                                             double offset = 5e-3) {
  BifurcationReport rep;
  auto dQ = [&](double w) { return local_dQ_domega(eq, model, w, grid_for(w), opts.h_omega_rel, opts.newton); };
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto &a = rows[i], &b = rows[i + 1];
    if (!a.ok || !b.ok) continue;
    if ((a.dQ_domega > 0) == (b.dQ_domega > 0)) continue;
    double lo = a.omega, hi = b.omega;
    double flo = a.dQ_domega;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double fm = dQ(mid);
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    rep.found = true;
    rep.bracket_lo = lo;
    rep.bracket_hi = hi;
    rep.omega_star = 0.5 * (lo + hi);
    break;
  }
  if (!rep.found) {
    rep.notes = "no sign change of dQ/domega among the scan rows";
    return rep;
  }
  const double flo = dQ(rep.bracket_lo), fhi = dQ(rep.bracket_hi);
  rep.nearest_bracket_omega = std::abs(flo) <= std::abs(fhi) ? rep.bracket_lo : rep.bracket_hi;
  const auto at = scan_row(eq, model, rep.nearest_bracket_omega, grid_for(rep.nearest_bracket_omega), opts);
  rep.rank_at_bracket = at.nullspace_dim;
  auto side = [&](double w) {
    const auto r = scan_row(eq, model, w, grid_for(w), opts);
    if (!r.ok) throw SolverError("analyze_bifurcation: side check failed at omega " + std::to_string(w) + ": " + r.notes, 0.0);
    return SideCheck{w, r.dQ_domega, r.real_pair_count, r.nullspace_dim, r.max_real_eigenvalue};
  };
  rep.below = side(rep.omega_star - offset);
  rep.above = side(rep.omega_star + offset);
  auto consistent = [](const SideCheck& s) { return (s.real_pair_count > 0) == (s.dQ_domega > 0); };
  const bool one_side = (rep.below.real_pair_count > 0) != (rep.above.real_pair_count > 0);
  rep.sided = one_side && consistent(rep.below) && consistent(rep.above);
  rep.rank_jump = rep.rank_at_bracket >= 6;
  return rep;
}

/// Generalized kernel bookkeeping for a Dirac profile: rank at 0 and the
/// residuals of the explicit kernel/chain vectors.
struct NullspaceAccounting {
  int rank = -1;
  double radius = 0.0;
  ChainResiduals chain;
};

inline NullspaceAccounting nullspace_accounting(const SolitaryWaveProfile& p, double radius = -1.0) {
  const auto blocks = assemble_blocks(p);
  NullspaceAccounting out;
  out.chain = chain_residuals(p, blocks);
  if (radius <= 0) radius = default_disk_radius(p.m(), p.omega);
  const auto rep = linearization_spectrum(p, blocks, false);
  out.rank = rank_at_zero(rep, radius, &out.radius);
  return out;
}

}  // namespace soliton
