// Linear instability of a localized stationary solution of the nonlinear wave
// equation -psi_tt = -psi_xx + g(psi): the operator -D2 + g'(theta) has a
// negative ground state, which yields a real pair +-c of the first-order
// linearization.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "soliton/errors.hpp"
#include "soliton/grid.hpp"
#include "soliton/lapack.hpp"
#include "soliton/nonlinearity.hpp"
#include "soliton/profiles.hpp"

namespace soliton {

struct DerrickReport {
  SolitaryWaveProfile theta;
  double lambda_min = 0.0;
  double lambda_second = 0.0;
  double growth_rate = 0.0;                 // c = sqrt(-lambda_min)
  Eigen::VectorXd chi;                      // ground state, positive, unit grid L2 norm
  std::vector<std::complex<double>> block_eigenvalues;  // full spectrum of [[0, I], [-L, 0]]
  double block_lambda_plus = 0.0;           // largest real eigenvalue of the block
  double block_lambda_minus = 0.0;          // smallest real eigenvalue of the block
  double block_residual = 0.0;              // residual of (chi, +-c chi)
  int ground_state_sign_changes = 0;
  double quadratic_form = 0.0;              // <chi, L chi> / |chi|^2
  double energy_second_variation = 0.0;     // d^2/dtau^2 E(theta + tau chi) / |chi|^2, by differences
};

/// Sign changes along the grid among entries above round-off level.
inline int count_sign_changes(const Eigen::VectorXd& v, double rel_floor = 1e-12) {
  const double floor = rel_floor * v.cwiseAbs().maxCoeff();
  int changes = 0, last = 0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (std::abs(v(j)) <= floor) continue;
    const int s = v(j) > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// Discrete energy int (1/2 psi_x^2 + G(psi)) of a static field.
inline double nlw_static_energy(const NlwModel& model, const Eigen::MatrixXd& negD2, const Eigen::VectorXd& psi,
                                double h) {
  double e = 0.5 * psi.dot(negD2 * psi);
  for (Eigen::Index j = 0; j < psi.size(); ++j) e += model.G(psi(j));
  return h * e;
}

inline DerrickReport derrick_instability(const NlwModel& model, const Grid1D& grid) {
  DerrickReport rep;
  rep.theta = solve_nlw_stationary(model, grid);
  const int N = grid.n_points;
  const double h = grid.spacing();
  const Eigen::MatrixXd negD2 = -second_derivative_matrix(grid).entries;
  Eigen::MatrixXd L = negD2;
  for (int j = 0; j < N; ++j) L(j, j) += model.gprime(rep.theta.components(j, 0));

  const auto eig = lapack::syevd(L, true);
  rep.lambda_min = eig.values(0);
  rep.lambda_second = N > 1 ? eig.values(1) : eig.values(0);
  if (!(rep.lambda_min < 0.0)) throw SolverError("no instability detected", rep.lambda_min);
  rep.growth_rate = std::sqrt(-rep.lambda_min);
  rep.chi = eig.vectors.col(0);
  if (rep.chi.sum() < 0) rep.chi = -rep.chi;
  rep.chi /= std::sqrt(h) * rep.chi.norm();
  rep.ground_state_sign_changes = count_sign_changes(rep.chi);

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  block.topRightCorner(N, N).setIdentity();
  block.bottomLeftCorner(N, N) = -L;
  Eigen::MatrixXd work = block;
  const auto be = lapack::geev(work, false);
  rep.block_eigenvalues.assign(be.values.data(), be.values.data() + be.values.size());
  rep.block_lambda_plus = -1e300;
  rep.block_lambda_minus = 1e300;
  for (const auto& z : rep.block_eigenvalues) {
    if (std::abs(z.imag()) > 1e-8 * std::max(1.0, std::abs(z))) continue;
    rep.block_lambda_plus = std::max(rep.block_lambda_plus, z.real());
    rep.block_lambda_minus = std::min(rep.block_lambda_minus, z.real());
  }
  double worst = 0.0;
  for (double sgn : {1.0, -1.0}) {
    Eigen::VectorXd v(2 * N);
    v.head(N) = rep.chi;
    v.tail(N) = sgn * rep.growth_rate * rep.chi;
    worst = std::max(worst, (block * v - sgn * rep.growth_rate * v).norm() / v.norm());
  }
  rep.block_residual = worst;

  const double chi2 = h * rep.chi.squaredNorm();
  rep.quadratic_form = h * rep.chi.dot(L * rep.chi) / chi2;
  const double tau = 1e-3;
  const Eigen::VectorXd th = rep.theta.components.col(0);
  const double e0 = nlw_static_energy(model, negD2, th, h);
  const double ep = nlw_static_energy(model, negD2, th + tau * rep.chi, h);
  const double em = nlw_static_energy(model, negD2, th - tau * rep.chi, h);
  rep.energy_second_variation = (ep - 2.0 * e0 + em) / (tau * tau) / chi2;
  return rep;
}

}  // namespace soliton
