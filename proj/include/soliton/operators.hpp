// Linearization operators at a solitary wave, in the real form
// R = [Re rho; Im rho], together with the vectors known to lie in their
// (generalized) kernels.
//
// Layout conventions. NLS: a vector of length 2N holds (Re, Im). Dirac: the
// spinor (v, u) is real, so a vector of length 4N holds
// [Re v; Re u; Im v; Im u] and L = diag(L+, L-) with 2N x 2N blocks.
// In both cases JL = [[0, L-], [-L+, 0]].
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "soliton/errors.hpp"
#include "soliton/grid.hpp"
#include "soliton/operator_matrix.hpp"
#include "soliton/profiles.hpp"

namespace soliton {

struct LinearizationBlocks {
  OperatorMatrix Lminus;
  OperatorMatrix Lplus;
};

namespace detail {

inline void require_profile(const SolitaryWaveProfile& p, Equation eq, const char* what) {
  if (p.equation != eq)
    throw PreconditionError(std::string(what) + ": expected a " + to_string(eq) + " profile, got " +
                            to_string(p.equation));
  if (p.components.rows() != p.grid.n_points)
    throw PreconditionError(std::string(what) + ": profile/grid mismatch");
}

inline OperatorMeta make_meta(const SolitaryWaveProfile& p, const char* name) {
  return {p.equation, p.omega, p.m(), p.grid.id(), name, p.grid.n_points, p.grid.half_width};
}

}  // namespace detail

/// L- = -1/2 D2 + g(phi^2) - omega and L+ = L- + 2 g'(phi^2) phi^2.
inline LinearizationBlocks assemble_nls_L(const SolitaryWaveProfile& p) {
  detail::require_profile(p, Equation::nls, "assemble_nls_L");
  const auto& model = p.nonlinearity();
  const int N = p.grid.n_points;
  Eigen::MatrixXd Lm = kinetic_operator(Equation::nls, p.grid);
  Eigen::MatrixXd Lp = Lm;
  for (int j = 0; j < N; ++j) {
    const double s = p.components(j, 0) * p.components(j, 0);
    const double diag = model.g(s) - p.omega;
    Lm(j, j) += diag;
    Lp(j, j) += diag + 2.0 * model.gprime(s) * s;
  }
  const BandSet bands = half_line_band(p.m() - p.omega);
  return {{std::move(Lm), Structure::selfadjoint, bands, detail::make_meta(p, "L-")},
          {std::move(Lp), Structure::selfadjoint, bands, detail::make_meta(p, "L+")}};
}

/// [[0, L-], [-L+, 0]]; the bands are the imaginary-axis image of the gap.
inline OperatorMatrix assemble_JL(const OperatorMatrix& Lminus, const OperatorMatrix& Lplus) {
  if (Lminus.size() != Lplus.size()) throw PreconditionError("assemble_JL: block size mismatch");
  const Eigen::Index n = Lminus.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n) = Lminus.entries;
  A.bottomLeftCorner(n, n) = -Lplus.entries;
  OperatorMeta meta = Lminus.meta;
  meta.name = "JL";
  return {std::move(A), Structure::j_times_selfadjoint, gap_band_imaginary(meta.m - meta.omega), meta};
}

inline OperatorMatrix assemble_nls_JL(const OperatorMatrix& Lminus, const OperatorMatrix& Lplus) {
  return assemble_JL(Lminus, Lplus);
}

/// L- = i sigma_2 D1 - omega + g beta (plus the Wilson term on fd2 grids) and
/// L+ = L- + 2 g' (beta phi)(beta phi)^T, the last term a 2x2 block at each node.
inline LinearizationBlocks assemble_dirac_blocks(const SolitaryWaveProfile& p) {
  detail::require_profile(p, Equation::dirac1d, "assemble_dirac_blocks");
  const auto& model = p.nonlinearity();
  const int N = p.grid.n_points;
  Eigen::MatrixXd Lm = kinetic_operator(Equation::dirac1d, p.grid);
  for (int j = 0; j < 2 * N; ++j) Lm(j, j) -= p.omega;
  Eigen::MatrixXd Lp;
  for (int j = 0; j < N; ++j) {
    const double v = p.components(j, 0), u = p.components(j, 1);
    const double g = model.g(v * v - u * u);
    Lm(j, j) += g;
    Lm(N + j, N + j) -= g;
  }
  Lp = Lm;
  for (int j = 0; j < N; ++j) {
    const double v = p.components(j, 0), u = p.components(j, 1);
    const double w = 2.0 * model.gprime(v * v - u * u);
    Lp(j, j) += w * v * v;
    Lp(j, N + j) -= w * v * u;
    Lp(N + j, j) -= w * u * v;
    Lp(N + j, N + j) += w * u * u;
  }
  const BandSet bands = gap_band_real(-p.m() - p.omega, p.m() - p.omega);
  return {{std::move(Lm), Structure::selfadjoint, bands, detail::make_meta(p, "L-")},
          {std::move(Lp), Structure::selfadjoint, bands, detail::make_meta(p, "L+")}};
}

/// The full 4N x 4N operator diag(L+, L-).
inline OperatorMatrix assemble_dirac_L(const SolitaryWaveProfile& p) {
  auto blocks = assemble_dirac_blocks(p);
  const Eigen::Index n = blocks.Lplus.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  L.topLeftCorner(n, n) = blocks.Lplus.entries;
  L.bottomRightCorner(n, n) = blocks.Lminus.entries;
  OperatorMeta meta = blocks.Lplus.meta;
  meta.name = "L";
  return {std::move(L), Structure::selfadjoint, blocks.Lplus.essential_bands, meta};
}

inline OperatorMatrix assemble_dirac_JL(const OperatorMatrix& L) {
  if (L.size() % 2 != 0) throw PreconditionError("assemble_dirac_JL: odd operator size");
  const Eigen::Index n = L.size() / 2;
  Eigen::MatrixXd A(2 * n, 2 * n);
  A.topRows(n) = L.entries.bottomRows(n);
  A.bottomRows(n) = -L.entries.topRows(n);
  OperatorMeta meta = L.meta;
  meta.name = "JL";
  return {std::move(A), Structure::j_times_selfadjoint, gap_band_imaginary(meta.m - meta.omega), meta};
}

/// Linearization blocks for either equation.
inline LinearizationBlocks assemble_blocks(const SolitaryWaveProfile& p) {
  if (p.equation == Equation::nls) return assemble_nls_L(p);
  if (p.equation == Equation::dirac1d) return assemble_dirac_blocks(p);
  throw PreconditionError("assemble_blocks: nlw has no J L linearization of this form");
}

/// Max-norm of the off-diagonal blocks of L in (Re spinor, Im spinor) order.
/// Zero for a real profile.
inline double block_diagonal_defect(const OperatorMatrix& L) {
  const Eigen::Index n = L.size() / 2;
  return std::max(L.entries.topRightCorner(n, n).cwiseAbs().maxCoeff(),
                  L.entries.bottomLeftCorner(n, n).cwiseAbs().maxCoeff());
}

// Exact vectors.

/// Phi = (phi, 0) in real form (length 2N for nls, 4N for dirac1d).
inline Eigen::VectorXd real_form(const SolitaryWaveProfile& p) {
  const Eigen::VectorXd s = p.stacked();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * s.size());
  out.head(s.size()) = s;
  return out;
}

inline Eigen::VectorXd J_Phi(const SolitaryWaveProfile& p) { return apply_J(real_form(p)); }

/// d/dx of each component by the grid's first-derivative matrix.
inline Eigen::MatrixXd dx_components(const SolitaryWaveProfile& p) {
  const Eigen::MatrixXd D1 = first_derivative_matrix(p.grid).entries;
  return D1 * p.components;
}

inline Eigen::VectorXd stack_real(const Eigen::MatrixXd& comps) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * comps.size());
  out.head(comps.size()) = Eigen::Map<const Eigen::VectorXd>(comps.data(), comps.size());
  return out;
}

inline Eigen::VectorXd dx_Phi(const SolitaryWaveProfile& p) { return stack_real(dx_components(p)); }

inline Eigen::VectorXd domega_Phi(const SolitaryWaveProfile& p, double h_omega = 0.0) {
  return stack_real(domega_profile(p.equation, p.nonlinearity(), p.omega, p.grid, h_omega));
}

/// A1 Phi = (0, E phi) with E phi = (u, -v); alpha_1 = -sigma_2.
inline Eigen::VectorXd A1_Phi(const SolitaryWaveProfile& p) {
  detail::require_profile(p, Equation::dirac1d, "A1_Phi");
  const int N = p.grid.n_points;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(4 * N);
  out.segment(2 * N, N) = p.components.col(1);
  out.segment(3 * N, N) = -p.components.col(0);
  return out;
}

/// The coordinate x on the periodic grid, rolled off to 0 over a thin layer
/// at +-L so that x f has no jump at the seam. Inside |x| < L - w it is exactly x.
inline Eigen::VectorXd seam_free_x(const Grid1D& grid) {
  const double L = grid.half_width;
  const double w = std::max(0.05 * L, 16.0 * grid.spacing());
  auto f = [](double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; };
  Eigen::VectorXd x = grid.nodes();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double t = (std::abs(x(j)) - (L - w)) / w;
    if (t <= 0) continue;
    x(j) *= t >= 1 ? 0.0 : f(1.0 - t) / (f(1.0 - t) + f(t));
  }
  return x;
}

/// Multiplies each grid function in a stacked real-form vector by seam_free_x.
inline Eigen::VectorXd times_x(const Grid1D& grid, const Eigen::VectorXd& v) {
  const Eigen::VectorXd x = seam_free_x(grid);
  Eigen::VectorXd out = v;
  const Eigen::Index N = grid.n_points;
  for (Eigen::Index b = 0; b < v.size() / N; ++b) out.segment(b * N, N).array() *= x.array();
  return out;
}

struct Alpha0Pair {
  Eigen::VectorXd a;  // (alpha0 phi, 0)
  Eigen::VectorXd b;  // (0, alpha0 phi);  JL a = 2 omega b, JL b = -2 omega a
};

/// alpha_0 = sigma_1 anticommutes with alpha_1 and beta, so alpha_0 phi = (u, v)
/// is an eigenvector of L+ and L- with eigenvalue -2 omega.
inline Alpha0Pair alpha0_eigenvector(const SolitaryWaveProfile& p) {
  detail::require_profile(p, Equation::dirac1d, "alpha0_eigenvector");
  const int N = p.grid.n_points;
  Eigen::VectorXd s(2 * N);
  s.head(N) = p.components.col(1);
  s.tail(N) = p.components.col(0);
  Alpha0Pair out{Eigen::VectorXd::Zero(4 * N), Eigen::VectorXd::Zero(4 * N)};
  out.a.head(2 * N) = s;
  out.b.tail(2 * N) = s;
  return out;
}

/// B applied to a real-form Dirac vector: beta = diag(1, -1) on each half.
inline Eigen::VectorXd apply_B(const Eigen::VectorXd& v) {
  const Eigen::Index N = v.size() / 4;
  Eigen::VectorXd out = v;
  out.segment(N, N) *= -1.0;
  out.segment(3 * N, N) *= -1.0;
  return out;
}

/// Spans the kernel of (JL)^T: {Phi, J dx Phi}.
inline std::vector<Eigen::VectorXd> adjoint_null_vectors(const SolitaryWaveProfile& p) {
  detail::require_profile(p, Equation::dirac1d, "adjoint_null_vectors");
  return {real_form(p), apply_J(dx_Phi(p))};
}

/// Residuals of the kernel and Jordan-chain relations
///   L J Phi = 0, L dx Phi = 0, L dw Phi = Phi, L(A1 Phi - 2 w x J Phi) = 2 J dx Phi
/// (Dirac), or JL(0, phi) = 0, JL(dx phi, 0) = 0, JL(-dw phi, 0) = (0, phi),
/// JL(0, -x phi) = (dx phi, 0) (NLS). Max-norm, relative to max(1, |Phi|).
struct ChainResiduals {
  double kernel_phase = 0.0;
  double kernel_translation = 0.0;
  double chain_omega = 0.0;
  double chain_boost = 0.0;
};

inline ChainResiduals chain_residuals(const SolitaryWaveProfile& p, const LinearizationBlocks& blocks,
                                      double h_omega = 0.0) {
  const Eigen::Index n = blocks.Lminus.size();
  auto apply_L = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(2 * n);
    out.head(n) = blocks.Lplus.entries * v.head(n);
    out.tail(n) = blocks.Lminus.entries * v.tail(n);
    return out;
  };
  const Eigen::VectorXd Phi = real_form(p);
  const double scale = std::max(1.0, Phi.cwiseAbs().maxCoeff());
  auto mx = [&](const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff() / scale; };
  const Eigen::VectorXd JPhi = apply_J(Phi);
  const Eigen::VectorXd dxPhi = dx_Phi(p);
  const Eigen::VectorXd dwPhi = domega_Phi(p, h_omega);
  ChainResiduals r;
  r.kernel_phase = mx(apply_L(JPhi));
  r.kernel_translation = mx(apply_L(dxPhi));
  r.chain_omega = mx(apply_L(dwPhi) - Phi);
  if (p.equation == Equation::dirac1d) {
    const Eigen::VectorXd w = A1_Phi(p) - 2.0 * p.omega * times_x(p.grid, JPhi);
    r.chain_boost = mx(apply_L(w) - 2.0 * apply_J(dxPhi));
  } else {
    // L(-x J Phi) = L(0, x phi) = (0, L- x phi) = (0, -dx phi), i.e. J dx Phi.
    r.chain_boost = mx(apply_L(-times_x(p.grid, JPhi)) - apply_J(dxPhi));
  }
  return r;
}

// Text matrix format: '#'-prefixed header lines "key value", then one row per
// line, entries separated by single spaces, %.17g.

inline void write_matrix_text(std::ostream& os, const OperatorMatrix& A) {
  os << "# size " << A.size() << "\n";
  os << "# structure " << to_string(A.structure) << "\n";
  os << "# equation " << to_string(A.meta.equation) << "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", A.meta.omega);
  os << "# omega " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", A.meta.m);
  os << "# m " << buf << "\n";
  os << "# grid " << A.meta.grid_id << "\n";
  os << "# name " << A.meta.name << "\n";
  for (Eigen::Index i = 0; i < A.size(); ++i) {
    for (Eigen::Index j = 0; j < A.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", A.entries(i, j));
      if (j) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

inline OperatorMatrix read_matrix_text(std::istream& is) {
  OperatorMatrix A;
  Eigen::Index n = -1;
  std::string line;
  auto parse_structure = [](const std::string& s) {
    if (s == "selfadjoint") return Structure::selfadjoint;
    if (s == "J_times_selfadjoint") return Structure::j_times_selfadjoint;
    if (s == "general") return Structure::general;
    throw ConfigError("matrix file: unknown structure '" + s + "'");
  };
  while (is.peek() == '#' && std::getline(is, line)) {
    std::istringstream ls(line.substr(1));
    std::string key, value;
    ls >> key;
    std::getline(ls >> std::ws, value);
    if (key == "size") n = std::stol(value);
    else if (key == "structure") A.structure = parse_structure(value);
    else if (key == "omega") A.meta.omega = std::stod(value);
    else if (key == "m") A.meta.m = std::stod(value);
    else if (key == "grid") A.meta.grid_id = value;
    else if (key == "name") A.meta.name = value;
    else if (key == "equation") {
      if (value == "nls") A.meta.equation = Equation::nls;
      else if (value == "dirac1d") A.meta.equation = Equation::dirac1d;
      else if (value == "nlw") A.meta.equation = Equation::nlw;
    }
  }
  if (n < 0) throw ConfigError("matrix file: missing size header");
  A.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!(is >> A.entries(i, j))) throw ConfigError("matrix file: truncated at row " + std::to_string(i));
  return A;
}

}  // namespace soliton
