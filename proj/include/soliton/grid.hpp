// Uniform periodic 1D grids, differentiation matrices, and the reflection
// x -> -x used to split operators into parity sectors.
#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "soliton/errors.hpp"
#include "soliton/operator_matrix.hpp"

namespace soliton {

enum class Scheme { fourier_periodic, fd2_wilson };

inline const char* to_string(Scheme s) {
  return s == Scheme::fourier_periodic ? "fourier_periodic" : "fd2_wilson";
}

/// Nodes x_j = -L + j h, j = 0..N-1, h = 2L/N, periodic identification x ~ x + 2L.
struct Grid1D {
  double half_width = 20.0;
  int n_points = 256;
  Scheme scheme = Scheme::fourier_periodic;
  // Wilson parameter; only read by the Dirac kinetic term on fd2 grids.
  double wilson_r = 1.0;

  static Grid1D fourier(double L, int N) { return validated({L, N, Scheme::fourier_periodic, 1.0}); }
  static Grid1D fd2(double L, int N, double r = 1.0) { return validated({L, N, Scheme::fd2_wilson, r}); }

  static Grid1D validated(Grid1D g) {
    if (!(g.half_width > 0.0)) throw PreconditionError("grid: half_width L must be positive");
    if (g.n_points <= 0 || g.n_points % 2 != 0)
      throw PreconditionError("grid: n_points N must be a positive even integer");
    return g;
  }

  double spacing() const { return 2.0 * half_width / n_points; }

  double node(int j) const { return -half_width + j * spacing(); }

  Eigen::VectorXd nodes() const {
    Eigen::VectorXd x(n_points);
    for (int j = 0; j < n_points; ++j) x(j) = node(j);
    return x;
  }

  /// Index of the node at -x_j (mod the period).
  int mirror(int j) const { return (n_points - j) % n_points; }

  std::string id() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s:L=%.17g:N=%d", to_string(scheme), half_width, n_points);
    return buf;
  }
};

/// Exact spectral first derivative on the Fourier grid; central differences on fd2.
inline OperatorMatrix first_derivative_matrix(const Grid1D& grid) {
  const int N = grid.n_points;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  if (grid.scheme == Scheme::fourier_periodic) {
    const double t = 2.0 * std::numbers::pi / N;
    const double scale = std::numbers::pi / grid.half_width;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        if (i == j) continue;
        const int k = i - j;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        D(i, j) = scale * 0.5 * sign / std::tan(k * t / 2.0);
      }
  } else {
    const double inv = 1.0 / (2.0 * grid.spacing());
    for (int i = 0; i < N; ++i) {
      D(i, (i + 1) % N) += inv;
      D(i, (i + N - 1) % N) -= inv;
    }
  }
  return {std::move(D), Structure::general, {}, {Equation::nls, 0.0, 0.0, grid.id(), "D1", N, grid.half_width}};
}

inline OperatorMatrix second_derivative_matrix(const Grid1D& grid) {
  const int N = grid.n_points;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  if (grid.scheme == Scheme::fourier_periodic) {
    const double t = 2.0 * std::numbers::pi / N;
    const double scale = std::pow(std::numbers::pi / grid.half_width, 2);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        if (i == j) {
          D(i, j) = scale * (-std::numbers::pi * std::numbers::pi / (3.0 * t * t) - 1.0 / 6.0);
          continue;
        }
        const int k = i - j;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const double s = std::sin(k * t / 2.0);
        D(i, j) = scale * (-0.5 * sign / (s * s));
      }
  } else {
    const double inv = 1.0 / (grid.spacing() * grid.spacing());
    for (int i = 0; i < N; ++i) {
      D(i, i) -= 2.0 * inv;
      D(i, (i + 1) % N) += inv;
      D(i, (i + N - 1) % N) += inv;
    }
  }
  return {std::move(D), Structure::selfadjoint, {}, {Equation::nls, 0.0, 0.0, grid.id(), "D2", N, grid.half_width}};
}

/// Orthonormal basis of one parity sector of multi-component grid functions.
///
/// A vector holds `parities.size()` components stacked block by block, each a
/// function on the grid. Component c transforms as R v_c = parities[c] * v_c
/// under reflection. The sector with sign s collects vectors whose components
/// satisfy R v_c = s * parities[c] * v_c. Every basis column has at most two
/// nonzeros, so restriction and expansion cost O(n^2) and O(n).
class ParityBasis {
 public:
  struct Column {
    Eigen::Index i;
    double ci;
    Eigen::Index j;  // -1 when the column has a single nonzero
    double cj;
  };

  ParityBasis(const Grid1D& grid, const std::vector<int>& parities, int sector) {
    const int N = grid.n_points;
    full_ = static_cast<Eigen::Index>(N) * static_cast<Eigen::Index>(parities.size());
    const double r = 1.0 / std::numbers::sqrt2;
    for (std::size_t c = 0; c < parities.size(); ++c) {
      const Eigen::Index off = static_cast<Eigen::Index>(c) * N;
      const bool even = parities[c] * sector > 0;
      if (even) {
        cols_.push_back({off + 0, 1.0, -1, 0.0});
        cols_.push_back({off + N / 2, 1.0, -1, 0.0});
      }
      for (int j = 1; j < N / 2; ++j) {
        const int mj = grid.mirror(j);
        cols_.push_back({off + mj, r, off + j, even ? r : -r});
      }
    }
  }

  Eigen::Index full_size() const { return full_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(cols_.size()); }
  const std::vector<Column>& columns() const { return cols_; }

  /// S^T A S.
  Eigen::MatrixXd restrict(const Eigen::MatrixXd& A) const {
    const Eigen::Index m = size();
    Eigen::MatrixXd AS(A.rows(), m);
    for (Eigen::Index b = 0; b < m; ++b) {
      const auto& c = cols_[b];
      AS.col(b) = c.ci * A.col(c.i);
      if (c.j >= 0) AS.col(b) += c.cj * A.col(c.j);
    }
    Eigen::MatrixXd B(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto& c = cols_[a];
      B.row(a) = c.ci * AS.row(c.i);
      if (c.j >= 0) B.row(a) += c.cj * AS.row(c.j);
    }
    return B;
  }

  /// S y.
  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expand(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(full_);
    for (Eigen::Index b = 0; b < size(); ++b) {
      const auto& c = cols_[b];
      v(c.i) += c.ci * y(b);
      if (c.j >= 0) v(c.j) += c.cj * y(b);
    }
    return v;
  }

  /// S^T v.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    Eigen::VectorXd y(size());
    for (Eigen::Index b = 0; b < size(); ++b) {
      const auto& c = cols_[b];
      y(b) = c.ci * v(c.i) + (c.j >= 0 ? c.cj * v(c.j) : 0.0);
    }
    return y;
  }

 private:
  Eigen::Index full_ = 0;
  std::vector<Column> cols_;
};

}  // namespace soliton
