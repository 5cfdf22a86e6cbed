// Dense eigensolving of linearization operators, classification of the
// computed eigenvalues against the predicted essential bands, residuals and
// eigenvalue counting in disks.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "soliton/errors.hpp"
#include "soliton/grid.hpp"
#include "soliton/lapack.hpp"
#include "soliton/operator_matrix.hpp"
#include "soliton/operators.hpp"

namespace soliton {

using cplx = std::complex<double>;

enum class Classification { unclassified, essential_artifact, isolated_point, embedded_candidate, near_zero };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::unclassified: return "unclassified";
    case Classification::essential_artifact: return "essential_artifact";
    case Classification::isolated_point: return "isolated_point";
    case Classification::embedded_candidate: return "embedded_candidate";
    case Classification::near_zero: return "near_zero";
  }
  return "?";
}

struct SpectrumReport {
  std::vector<cplx> eigenvalues;
  /// Unit-norm right eigenvectors as columns; only kept for moderate sizes.
  std::optional<Eigen::MatrixXcd> eigenvectors;
  /// Fraction of |v|^2 at nodes with |x| <= L/2; NaN when vectors were not computed.
  std::vector<double> localization;
  /// |A v - lambda v| / |v| and the same divided by |A|_1; NaN without vectors.
  std::vector<double> residuals;
  std::vector<double> backward_errors;
  std::vector<Classification> classifications;

  Structure structure = Structure::general;
  BandSet bands;
  OperatorMeta meta;
  std::string method;
  double operator_norm = 0.0;

  std::size_t size() const { return eigenvalues.size(); }
  bool has_vector_data() const { return !localization.empty() && !std::isnan(localization.front()); }
};

struct ClassifyOptions {
  double localization_threshold = 0.6;
  double band_distance = -1.0;  // <= 0: 10 / L
  double zero_tol = -1.0;       // <= 0: 1e-4 m
};

constexpr Eigen::Index kDefaultMaxDenseSize = 4096;
// Full eigenvector matrices are stored only up to this operator size.
constexpr Eigen::Index kMaxStoredVectors = 4096;

namespace detail {

inline bool central_node(int node, int n_points, double half_width) {
  const double h = 2.0 * half_width / n_points;
  return std::abs(-half_width + node * h) <= 0.5 * half_width + 1e-12 * half_width;
}

inline double one_norm(const Eigen::MatrixXd& A) {
  return A.size() ? A.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
}

}  // namespace detail

/// Fraction of |v|^2 carried by nodes with |x| <= L/2; entry i sits at node i mod N.
inline double central_mass_fraction(const Eigen::VectorXcd& v, int n_points, double half_width) {
  double inside = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double w = std::norm(v(i));
    total += w;
    if (detail::central_node(static_cast<int>(i % n_points), n_points, half_width)) inside += w;
  }
  return total > 0 ? inside / total : 0.0;
}

/// Full spectrum of a dense real matrix through real Schur reduction.
inline SpectrumReport eigen_decompose(const OperatorMatrix& A, bool want_vectors,
                                      Eigen::Index max_size = kDefaultMaxDenseSize) {
  if (A.size() > max_size)
    throw PreconditionError("eigen_decompose: size " + std::to_string(A.size()) + " exceeds the limit " +
                            std::to_string(max_size));
  if (!A.entries.allFinite()) throw PreconditionError("eigen_decompose: non-finite entries");
  SpectrumReport rep;
  rep.structure = A.structure;
  rep.bands = A.essential_bands;
  rep.meta = A.meta;
  rep.method = "real_schur";
  rep.operator_norm = detail::one_norm(A.entries);

  Eigen::MatrixXd work = A.entries;
  auto eig = lapack::geev(work, want_vectors);
  const Eigen::Index n = A.size();
  rep.eigenvalues.assign(eig.values.data(), eig.values.data() + n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.localization.assign(static_cast<std::size_t>(n), nan);
  rep.residuals.assign(static_cast<std::size_t>(n), nan);
  rep.backward_errors.assign(static_cast<std::size_t>(n), nan);
  if (!want_vectors) return rep;

  const Eigen::MatrixXcd AV = A.entries.cast<cplx>() * eig.vectors;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = (AV.col(j) - eig.values(j) * eig.vectors.col(j)).norm();
    rep.residuals[static_cast<std::size_t>(j)] = r;
    const double be = rep.operator_norm > 0 ? r / rep.operator_norm : r;
    rep.backward_errors[static_cast<std::size_t>(j)] = be;
    worst = std::max(worst, be);
    if (A.meta.n_points > 0)
      rep.localization[static_cast<std::size_t>(j)] =
          central_mass_fraction(eig.vectors.col(j), A.meta.n_points, A.meta.half_width);
  }
  if (worst > 1e-8) throw SolverError("eigen_decompose: backward error above 1e-8", worst);
  rep.eigenvectors = std::move(eig.vectors);
  return rep;
}

struct HamiltonianOptions {
  bool want_vectors = true;
  /// Keep full eigenvectors when the operator size allows it.
  bool store_vectors = true;
  /// Symmetric route, valid when L- is positive semidefinite (NLS).
  bool semidefinite_Lminus = false;
  /// >= 0 (product route only): skip the full eigenvector solve and recover
  /// vectors by inverse iteration just for |Re lambda| >= this floor. The
  /// other entries keep NaN residuals and localization.
  double vector_re_floor = -1.0;
};

/// Spectrum of JL = [[0, L-], [-L+, 0]] from the blocks.
///
/// det(lambda^2 + L- L+) = det(lambda I - JL), so every eigenvalue mu of -L- L+
/// gives the pair +-sqrt(mu) with the same algebraic multiplicity. Both blocks
/// commute with the reflection x -> -x, which splits each into two parity
/// sectors handled separately. With L- >= 0 the product is replaced by the
/// symmetric L-^{1/2} L+ L-^{1/2}, which keeps the eigenvalues exactly on the
/// real and imaginary axes. Eigenvectors are (x, -L+ x / lambda) and
/// (x, L+ x / lambda) for -lambda.
inline SpectrumReport eigen_decompose_hamiltonian(const LinearizationBlocks& blocks, const Grid1D& grid,
                                                  const HamiltonianOptions& opts = {}) {
  const OperatorMatrix& Lm = blocks.Lminus;
  const OperatorMatrix& Lp = blocks.Lplus;
  const Eigen::Index n = Lm.size();
  if (Lp.size() != n || n % grid.n_points != 0)
    throw PreconditionError("eigen_decompose_hamiltonian: block/grid size mismatch");
  if (!Lm.entries.allFinite() || !Lp.entries.allFinite())
    throw PreconditionError("eigen_decompose_hamiltonian: non-finite entries");
  const int ncomp = static_cast<int>(n / grid.n_points);
  const std::vector<int> parities =
      ncomp == 2 ? std::vector<int>{1, -1} : std::vector<int>(static_cast<std::size_t>(ncomp), 1);

  SpectrumReport rep;
  rep.structure = Structure::j_times_selfadjoint;
  rep.meta = Lm.meta;
  rep.meta.name = "JL";
  rep.bands = gap_band_imaginary(rep.meta.m - rep.meta.omega);
  rep.method = opts.semidefinite_Lminus ? "hamiltonian_symmetric" : "hamiltonian_product";
  rep.operator_norm = std::max(detail::one_norm(Lm.entries), detail::one_norm(Lp.entries));
  const bool store = opts.want_vectors && opts.store_vectors && 2 * n <= kMaxStoredVectors;
  if (store) rep.eigenvectors = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const bool partial = opts.want_vectors && !opts.semidefinite_Lminus && opts.vector_re_floor >= 0;
  Eigen::MatrixXd Mkeep;
  Eigen::Index col = 0;
  for (int sector : {+1, -1}) {
    const ParityBasis S(grid, parities, sector);
    const Eigen::Index ns = S.size();
    const Eigen::MatrixXd B = S.restrict(Lm.entries);
    const Eigen::MatrixXd C = S.restrict(Lp.entries);

    Eigen::VectorXcd mu(ns);
    Eigen::MatrixXcd X;
    // Columns whose x part vanishes: the vector is (0, w) with L- w = 0.
    std::vector<bool> pure_y(static_cast<std::size_t>(ns), false);
    Eigen::MatrixXd W;
    if (opts.semidefinite_Lminus) {
      auto eb = lapack::syevd(B, true);
      const Eigen::VectorXd root = eb.values.cwiseMax(0.0).cwiseSqrt();
      const Eigen::MatrixXd R = eb.vectors * root.asDiagonal() * eb.vectors.transpose();
      const Eigen::MatrixXd T = R * C * R;
      auto et = lapack::syevd(T, opts.want_vectors);
      mu = (-et.values).cast<cplx>();
      if (opts.want_vectors) {
        X = (R * et.vectors).cast<cplx>();
        W = std::move(et.vectors);
        const double tiny = 1e-6 * std::max(1.0, root.maxCoeff());
        for (Eigen::Index j = 0; j < ns; ++j)
          if (X.col(j).norm() <= tiny) pure_y[static_cast<std::size_t>(j)] = true;
      }
    } else {
      Eigen::MatrixXd M = -(B * C);
      if (partial) Mkeep = M;
      auto em = lapack::geev(M, opts.want_vectors && !partial);
      mu = em.values;
      X = std::move(em.vectors);
    }

    Eigen::VectorXcd lam(ns);
    for (Eigen::Index j = 0; j < ns; ++j) lam(j) = std::sqrt(mu(j));

    if (partial) {
      const auto& cols = S.columns();
      const Eigen::MatrixXcd Bc = B.cast<cplx>(), Cc = C.cast<cplx>();
      for (Eigen::Index j = 0; j < ns; ++j) {
        const bool want = std::abs(lam(j).real()) >= opts.vector_re_floor;
        Eigen::VectorXcd x, y;
        double rp = nan, rm = nan, lj = nan;
        if (want) {
          // inverse iteration with a tiny shift so the factorization stays regular
          const cplx shift = mu(j) + 1e-10 * std::max(1.0, std::abs(mu(j)));
          Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Mkeep.cast<cplx>() -
                                                   shift * Eigen::MatrixXcd::Identity(ns, ns));
          x = Eigen::VectorXcd::Ones(ns);
          for (int it = 0; it < 3; ++it) x = lu.solve(x).normalized();
          y = -(Cc * x) / lam(j);
          const double nrm = std::sqrt(x.squaredNorm() + y.squaredNorm());
          x /= nrm;
          y /= nrm;
          const Eigen::VectorXcd by = Bc * y;
          const double r2 = (-(Cc * x) - lam(j) * y).norm();
          rp = std::hypot((by - lam(j) * x).norm(), r2);
          rm = std::hypot((-by + lam(j) * x).norm(), r2);
          lj = 0.0;
          for (Eigen::Index b = 0; b < ns; ++b) {
            const int node = static_cast<int>(cols[static_cast<std::size_t>(b)].i % grid.n_points);
            if (detail::central_node(node, grid.n_points, grid.half_width)) lj += std::norm(x(b)) + std::norm(y(b));
          }
        }
        for (int sign : {+1, -1}) {
          rep.eigenvalues.push_back(static_cast<double>(sign) * lam(j));
          const double r = sign > 0 ? rp : rm;
          rep.residuals.push_back(r);
          rep.backward_errors.push_back(rep.operator_norm > 0 ? r / rep.operator_norm : r);
          rep.localization.push_back(lj);
          if (store && want) {
            rep.eigenvectors->col(col).head(n) = S.expand<cplx>(x);
            rep.eigenvectors->col(col).tail(n) = static_cast<double>(sign) * S.expand<cplx>(y);
          }
          ++col;
        }
      }
      continue;
    }

    Eigen::MatrixXcd Y;
    Eigen::VectorXd res_plus, res_minus, loc;
    if (opts.want_vectors) {
      const Eigen::MatrixXcd CX = C.cast<cplx>() * X;
      Y.resize(ns, ns);
      for (Eigen::Index j = 0; j < ns; ++j) {
        if (pure_y[static_cast<std::size_t>(j)]) {
          X.col(j).setZero();
          Y.col(j) = W.col(j).cast<cplx>();
        } else if (lam(j) == cplx(0.0)) {
          Y.col(j).setZero();
        } else {
          Y.col(j) = -CX.col(j) / lam(j);
        }
      }
      // Normalize (x, y) to unit length.
      for (Eigen::Index j = 0; j < ns; ++j) {
        const double nrm = std::sqrt(X.col(j).squaredNorm() + Y.col(j).squaredNorm());
        X.col(j) /= nrm;
        Y.col(j) /= nrm;
      }
      // Residuals of JL(x, +-y) = +-lambda (x, +-y): first rows L- y -+ lambda x, second rows -L+ x - lambda y.
      const Eigen::MatrixXcd BY = B.cast<cplx>() * Y;
      const Eigen::MatrixXcd CXn = C.cast<cplx>() * X;
      res_plus.resize(ns);
      res_minus.resize(ns);
      loc.resize(ns);
      for (Eigen::Index j = 0; j < ns; ++j) {
        const double r2 = (-CXn.col(j) - lam(j) * Y.col(j)).norm();
        res_plus(j) = std::hypot((BY.col(j) - lam(j) * X.col(j)).norm(), r2);
        res_minus(j) = std::hypot((-BY.col(j) + lam(j) * X.col(j)).norm(), r2);
        double inside = 0.0;
        const auto& cols = S.columns();
        for (Eigen::Index b = 0; b < ns; ++b) {
          const int node = static_cast<int>(cols[static_cast<std::size_t>(b)].i % grid.n_points);
          if (detail::central_node(node, grid.n_points, grid.half_width))
            inside += std::norm(X(b, j)) + std::norm(Y(b, j));
        }
        loc(j) = inside;
      }
    }

    for (Eigen::Index j = 0; j < ns; ++j) {
      for (int sign : {+1, -1}) {
        rep.eigenvalues.push_back(static_cast<double>(sign) * lam(j));
        if (opts.want_vectors) {
          const double r = sign > 0 ? res_plus(j) : res_minus(j);
          rep.residuals.push_back(r);
          rep.backward_errors.push_back(rep.operator_norm > 0 ? r / rep.operator_norm : r);
          rep.localization.push_back(loc(j));
          if (store) {
            rep.eigenvectors->col(col).head(n) = S.expand<cplx>(X.col(j));
            rep.eigenvectors->col(col).tail(n) = static_cast<double>(sign) * S.expand<cplx>(Y.col(j));
          }
        } else {
          rep.residuals.push_back(nan);
          rep.backward_errors.push_back(nan);
          rep.localization.push_back(nan);
        }
        ++col;
      }
    }
  }
  return rep;
}

/// Structured spectrum of the linearization at a profile, choosing the symmetric
/// route for NLS.
inline SpectrumReport linearization_spectrum(const SolitaryWaveProfile& p, const LinearizationBlocks& blocks,
                                             bool want_vectors = true, bool store_vectors = true) {
  HamiltonianOptions opts;
  opts.want_vectors = want_vectors;
  opts.store_vectors = store_vectors;
  opts.semidefinite_Lminus = p.equation == Equation::nls;
  return eigen_decompose_hamiltonian(blocks, p.grid, opts);
}

/// All eigenvalues, but eigenvectors (hence localization and residuals) only
/// where |Re lambda| >= re_floor. Enough to count real pairs on large grids;
/// classify() needs the full version.
inline SpectrumReport off_axis_spectrum(const SolitaryWaveProfile& p, const LinearizationBlocks& blocks,
                                        double re_floor = 1e-3) {
  HamiltonianOptions opts;
  opts.store_vectors = false;
  opts.semidefinite_Lminus = p.equation == Equation::nls;
  opts.vector_re_floor = re_floor;
  return eigen_decompose_hamiltonian(blocks, p.grid, opts);
}

inline double default_band_distance(const SpectrumReport& r) {
  return r.meta.half_width > 0 ? 10.0 / r.meta.half_width : 0.0;
}

inline double default_zero_tol(const SpectrumReport& r) { return 1e-4 * (r.meta.m > 0 ? r.meta.m : 1.0); }

/// Near-zero first; then delocalized vectors are essential-band artifacts;
/// localized ones are embedded candidates when they sit inside a band, else
/// isolated points.
inline SpectrumReport classify(SpectrumReport report, const std::optional<BandSet>& predicted_bands = std::nullopt,
                               const ClassifyOptions& opts = {}) {
  if (predicted_bands) report.bands = *predicted_bands;
  const double zero_tol = opts.zero_tol > 0 ? opts.zero_tol : default_zero_tol(report);
  report.classifications.assign(report.size(), Classification::unclassified);
  for (std::size_t j = 0; j < report.size(); ++j) {
    const cplx z = report.eigenvalues[j];
    if (std::abs(z) < zero_tol) {
      report.classifications[j] = Classification::near_zero;
      continue;
    }
    const double loc = j < report.localization.size() ? report.localization[j] : std::nan("");
    if (std::isnan(loc)) throw PreconditionError("classify: eigenvectors are required");
    if (loc < opts.localization_threshold) {
      report.classifications[j] = Classification::essential_artifact;
    } else if (report.bands.interior_contains(z) && report.bands.distance(z) <= zero_tol) {
      report.classifications[j] = Classification::embedded_candidate;
    } else {
      report.classifications[j] = Classification::isolated_point;
    }
  }
  return report;
}

/// Fraction of essential_artifact eigenvalues lying within the band distance of
/// the predicted bands (1 when there are none).
inline double band_agreement(const SpectrumReport& r, double band_distance = -1.0) {
  if (band_distance <= 0) band_distance = default_band_distance(r);
  std::size_t total = 0, near = 0;
  for (std::size_t j = 0; j < r.size(); ++j)
    if (j < r.classifications.size() && r.classifications[j] == Classification::essential_artifact) {
      ++total;
      if (r.bands.distance(r.eigenvalues[j]) <= band_distance) ++near;
    }
  return total ? static_cast<double>(near) / static_cast<double>(total) : 1.0;
}

inline double residual_check(const Eigen::MatrixXd& A, const Eigen::VectorXcd& v, cplx lambda) {
  const double nv = v.norm();
  if (!(nv > 0)) throw PreconditionError("residual_check: zero vector");
  return (A.cast<cplx>() * v - lambda * v).norm() / nv;
}

inline double residual_check(const OperatorMatrix& A, const Eigen::VectorXcd& v, cplx lambda) {
  return residual_check(A.entries, v, lambda);
}

inline double residual_check(const OperatorMatrix& A, const Eigen::VectorXd& v, double lambda) {
  const double nv = v.norm();
  if (!(nv > 0)) throw PreconditionError("residual_check: zero vector");
  return (A.entries * v - lambda * v).norm() / nv;
}

/// For a complex eigenvalue of a real matrix given by the real-form pair (a, b),
/// the residual of the invariant subspace: v = a - i b.
inline double residual_check_pair(const OperatorMatrix& A, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                  cplx lambda) {
  const Eigen::VectorXcd v = a.cast<cplx>() - cplx(0.0, 1.0) * b.cast<cplx>();
  return residual_check(A, v, lambda);
}

/// diag(L+, L-) applied without forming it.
inline Eigen::VectorXd apply_L(const LinearizationBlocks& blocks, const Eigen::VectorXd& v) {
  const Eigen::Index n = blocks.Lplus.size();
  Eigen::VectorXd out(2 * n);
  out.head(n) = blocks.Lplus.entries * v.head(n);
  out.tail(n) = blocks.Lminus.entries * v.tail(n);
  return out;
}

/// JL = [[0, L-], [-L+, 0]] applied without forming it.
inline Eigen::VectorXd apply_JL(const LinearizationBlocks& blocks, const Eigen::VectorXd& v) {
  return apply_J(apply_L(blocks, v));
}

inline double residual_check(const LinearizationBlocks& blocks, const Eigen::VectorXd& v, double lambda) {
  const double nv = v.norm();
  if (!(nv > 0)) throw PreconditionError("residual_check: zero vector");
  return (apply_L(blocks, v) - lambda * v).norm() / nv;
}

/// Number of eigenvalues strictly inside the disk, counted with algebraic
/// multiplicity: the rank of the Riesz projector onto that part of the spectrum.
inline int projector_rank(const SpectrumReport& report, cplx center, double radius) {
  if (!(radius > 0)) throw PreconditionError("projector_rank: radius must be positive");
  int count = 0;
  for (const cplx& z : report.eigenvalues) {
    const double d = std::abs(z - center);
    if (std::abs(d - radius) < 0.1 * radius)
      throw PreconditionError("contour grazes spectrum: eigenvalue " + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                              std::to_string(z.imag()) + "i within 0.1 r of the circle");
    if (d < radius) ++count;
  }
  return count;
}

inline int projector_rank(const OperatorMatrix& A, cplx center, double radius) {
  return projector_rank(eigen_decompose(A, false), center, radius);
}

/// Radius used around lambda = 0: a fraction of the spectral gap, capped at 0.05 m.
inline double default_disk_radius(double m, double omega) {
  return std::min(0.05 * m, 0.4 * (m - std::abs(omega)));
}

/// Positive real eigenvalues with localized eigenvectors.
inline std::vector<double> detect_real_pairs(const SpectrumReport& report, double re_tol = 1e-3,
                                             double im_tol = 1e-4, double localization_threshold = 0.6) {
  std::vector<double> out;
  for (std::size_t j = 0; j < report.size(); ++j) {
    const cplx z = report.eigenvalues[j];
    if (std::abs(z.imag()) > im_tol || z.real() < re_tol) continue;
    const double loc = report.localization[j];
    if (std::isnan(loc)) throw PreconditionError("detect_real_pairs: eigenvectors are required");
    if (loc >= localization_threshold) out.push_back(z.real());
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Real eigenvalues of either sign with |lambda| >= re_tol and localized vectors.
inline int count_real_eigenvalues(const SpectrumReport& report, double re_tol = 1e-3, double im_tol = 1e-4,
                                  double localization_threshold = 0.6) {
  int count = 0;
  for (std::size_t j = 0; j < report.size(); ++j) {
    const cplx z = report.eigenvalues[j];
    if (std::abs(z.imag()) > im_tol || std::abs(z.real()) < re_tol) continue;
    if (report.localization[j] >= localization_threshold) ++count;
  }
  return count;
}

namespace detail {

template <typename Map>
double pairing_defect(const SpectrumReport& r, Map map, double exclude_radius) {
  // Greedy one-to-one matching.
  const std::size_t n = r.size();
  std::vector<bool> used(n, false);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx z = r.eigenvalues[i];
    if (std::abs(z) <= exclude_radius) continue;
    const cplx target = map(z);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(r.eigenvalues[j] - target);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (arg < n) used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace detail

/// Largest distance between an eigenvalue and its matched conjugate partner.
inline double conjugation_defect(const SpectrumReport& r, double exclude_radius = 0.0) {
  return detail::pairing_defect(r, [](cplx z) { return std::conj(z); }, exclude_radius);
}

/// Largest distance between an eigenvalue and its matched partner -lambda.
inline double reflection_defect(const SpectrumReport& r, double exclude_radius = 0.0) {
  return detail::pairing_defect(r, [](cplx z) { return -z; }, exclude_radius);
}

/// max |Re l Im l| / (|l|^2 + 1) over eigenvalues classified isolated.
inline double axis_dichotomy_defect(const SpectrumReport& r) {
  double worst = 0.0;
  for (std::size_t j = 0; j < r.size() && j < r.classifications.size(); ++j) {
    if (r.classifications[j] != Classification::isolated_point) continue;
    const cplx z = r.eigenvalues[j];
    worst = std::max(worst, std::abs(z.real() * z.imag()) / (std::norm(z) + 1.0));
  }
  return worst;
}

}  // namespace soliton
