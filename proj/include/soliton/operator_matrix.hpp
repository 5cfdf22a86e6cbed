// Dense real operator with the structural tags the spectral code relies on.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace soliton {

enum class Structure { selfadjoint, j_times_selfadjoint, general };

inline const char* to_string(Structure s) {
  switch (s) {
    case Structure::selfadjoint: return "selfadjoint";
    case Structure::j_times_selfadjoint: return "J_times_selfadjoint";
    case Structure::general: return "general";
  }
  return "?";
}

enum class Equation { nls, dirac1d, nlw };

inline const char* to_string(Equation e) {
  switch (e) {
    case Equation::nls: return "nls";
    case Equation::dirac1d: return "dirac1d";
    case Equation::nlw: return "nlw";
  }
  return "?";
}

/// Union of closed intervals lying on the real axis or on the imaginary axis.
/// Infinite ends are encoded with +-infinity.
struct BandSet {
  enum class Axis { real, imaginary };
  struct Interval {
    double lo;
    double hi;
  };

  Axis axis = Axis::real;
  std::vector<Interval> intervals;

  bool empty() const { return intervals.empty(); }

  /// Euclidean distance from z to the band set in the complex plane.
  double distance(std::complex<double> z) const {
    const double along = axis == Axis::real ? z.real() : z.imag();
    const double across = axis == Axis::real ? z.imag() : z.real();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : intervals) {
      const double d = along < iv.lo ? iv.lo - along : (along > iv.hi ? along - iv.hi : 0.0);
      best = std::min(best, std::hypot(d, across));
    }
    return best;
  }

  /// True when the projection of z on the axis lies strictly inside a band.
  bool interior_contains(std::complex<double> z) const {
    const double along = axis == Axis::real ? z.real() : z.imag();
    for (const auto& iv : intervals)
      if (along > iv.lo && along < iv.hi) return true;
    return false;
  }

  std::string describe() const {
    std::string out;
    for (const auto& iv : intervals) {
      if (!out.empty()) out += " U ";
      out += "[" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + "]";
    }
    return (axis == Axis::imaginary ? "i*" : "") + out;
  }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// [a, inf) on the real axis.
inline BandSet half_line_band(double a) { return {BandSet::Axis::real, {{a, kInf}}}; }

/// R \ (lo, hi) on the real axis.
inline BandSet gap_band_real(double lo, double hi) {
  return {BandSet::Axis::real, {{-kInf, lo}, {hi, kInf}}};
}

/// i(R \ (-gap, gap)).
inline BandSet gap_band_imaginary(double gap) {
  return {BandSet::Axis::imaginary, {{-kInf, -gap}, {gap, kInf}}};
}

struct OperatorMeta {
  Equation equation = Equation::nls;
  double omega = 0.0;
  double m = 0.0;
  std::string grid_id;
  std::string name;
  // Grid shape, so entries can be mapped back to nodes (index i sits at node i mod n_points).
  int n_points = 0;
  double half_width = 0.0;
};

struct OperatorMatrix {
  Eigen::MatrixXd entries;
  Structure structure = Structure::general;
  BandSet essential_bands;
  OperatorMeta meta;

  Eigen::Index size() const { return entries.rows(); }
};

/// Canonical symplectic matrix [[0, I], [-I, 0]] of size 2n.
inline Eigen::MatrixXd canonical_J(Eigen::Index two_n) {
  const Eigen::Index n = two_n / 2;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(two_n, two_n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

/// J v without forming J.
inline Eigen::VectorXd apply_J(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size() / 2;
  Eigen::VectorXd out(v.size());
  out.head(n) = v.tail(n);
  out.tail(n) = -v.head(n);
  return out;
}

inline double symmetry_defect(const Eigen::MatrixXd& A) {
  return (A - A.transpose()).cwiseAbs().maxCoeff();
}

/// max |J^T A - (J^T A)^T|; zero iff A = J S with S symmetric.
inline double hamiltonian_defect(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd S = canonical_J(A.rows()).transpose() * A;
  return symmetry_defect(S);
}

}  // namespace soliton
