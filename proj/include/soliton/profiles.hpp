// Solitary-wave profiles of the 1D NLS and Soler equations and stationary
// solutions of the nonlinear wave equation.
//
// Every solver follows the same recipe: the amplitude at x = 0 comes from the
// first integral of the stationary ODE (the shooting map), an RK4 integration
// from x = 0 with the correct parity gives the initial guess on the grid, and
// Newton's method on the discrete collocation residual, restricted to the
// parity sector of the profile, polishes it to round-off.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "soliton/errors.hpp"
#include "soliton/grid.hpp"
#include "soliton/nonlinearity.hpp"
#include "soliton/operator_matrix.hpp"

namespace soliton {

/// Minimum and default domain sizes measured in e-foldings of the decay rate.
constexpr double kMinDecayLengths = 12.0;
constexpr double kDefaultDecayLengths = 25.0;
constexpr double kMinDefaultHalfWidth = 20.0;

inline double default_half_width(double decay_rate) {
  return std::max(kMinDefaultHalfWidth, kDefaultDecayLengths / decay_rate);
}

struct SolitaryWaveProfile {
  Equation equation = Equation::nls;
  double omega = 0.0;
  std::variant<std::monostate, NonlinearityModel, NlwModel> model;
  Grid1D grid;
  /// N x ncomp: phi for nls, theta for nlw, (v, u) for dirac1d.
  Eigen::MatrixXd components;
  double decay_rate = 0.0;
  /// Max-norm of the discrete stationary residual.
  double residual = 0.0;
  /// Largest boundary value relative to the largest value.
  double tail_ratio = 0.0;
  int newton_iterations = 0;

  const NonlinearityModel& nonlinearity() const { return std::get<NonlinearityModel>(model); }
  const NlwModel& nlw_model() const { return std::get<NlwModel>(model); }
  double m() const {
    return std::holds_alternative<NonlinearityModel>(model) ? nonlinearity().mass() : 0.0;
  }
  Eigen::Index n_components() const { return components.cols(); }

  /// Components stacked block by block (length N * ncomp).
  Eigen::VectorXd stacked() const {
    return Eigen::Map<const Eigen::VectorXd>(components.data(), components.size());
  }
};

struct NewtonOptions {
  int max_iter = 40;
  double tol = 1e-9;  // required final max-norm residual (relative to max(1, |profile|))
};

/// Reflection parities of each component of a profile (dirac: v even, u odd).
inline std::vector<int> profile_parities(Equation eq) {
  return eq == Equation::dirac1d ? std::vector<int>{1, -1} : std::vector<int>{1};
}

/// Discrete kinetic operators.
/// nls: -1/2 D2. nlw: -D2. dirac1d: [[0, D1], [-D1, 0]] = i sigma_2 d/dx, plus on
/// fd2 grids the Wilson term -(r h / 2) beta D2.
inline Eigen::MatrixXd kinetic_operator(Equation eq, const Grid1D& grid) {
  switch (eq) {
    case Equation::nls: return -0.5 * second_derivative_matrix(grid).entries;
    case Equation::nlw: return -second_derivative_matrix(grid).entries;
    case Equation::dirac1d: {
      const int N = grid.n_points;
      const Eigen::MatrixXd D1 = first_derivative_matrix(grid).entries;
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * N, 2 * N);
      K.topRightCorner(N, N) = D1;
      K.bottomLeftCorner(N, N) = -D1;
      if (grid.scheme == Scheme::fd2_wilson) {
        const Eigen::MatrixXd W = -0.5 * grid.wilson_r * grid.spacing() * second_derivative_matrix(grid).entries;
        K.topLeftCorner(N, N) += W;
        K.bottomRightCorner(N, N) -= W;
      }
      return K;
    }
  }
  return {};
}

namespace detail {

inline double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// First s > 0 with f(s) <= 0, given f > 0 just right of 0. Throws when f keeps its sign.
template <typename F>
double first_positive_root(F f, const char* what) {
  double lo = 1e-10;
  if (!(f(lo) > 0.0)) throw SolverError(std::string(what) + ": no sign change in shooting map", f(lo));
  double hi = lo;
  while (true) {
    hi = lo * 1.05;
    if (hi > 1e8) throw SolverError(std::string(what) + ": no sign change in shooting map", f(lo));
    if (f(hi) <= 0.0) break;
    lo = hi;
  }
  boost::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a)); };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

/// RK4 integration of a 2D autonomous system from x = 0, sampled at x = j h for
/// j = 0..N/2. Once the amplitude |y| drops below `cutoff` times its initial
/// value, or starts growing again in the tail, the samples continue as the
/// decaying linear mode `tail_dir * exp(-kappa x)` matched at that point.
template <typename Rhs>
std::vector<std::array<double, 2>> shoot(Rhs rhs, std::array<double, 2> y0, double h, int n_half,
                                         double kappa, std::array<double, 2> tail_dir,
                                         double cutoff = 1e-7) {
  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(n_half) + 1);
  const int sub = std::max(8, static_cast<int>(std::ceil(h / 0.004)));
  const double dx = h / sub;
  auto norm = [](const std::array<double, 2>& y) { return std::hypot(y[0], y[1]); };
  const double amp0 = norm(y0);
  std::array<double, 2> y = y0;
  out[0] = y;
  bool tail = false;
  double tail_x = 0.0, tail_c = 0.0;
  double prev_amp = amp0;
  for (int j = 1; j <= n_half; ++j) {
    if (!tail) {
      for (int s = 0; s < sub; ++s) {
        auto k1 = rhs(y);
        std::array<double, 2> t{y[0] + 0.5 * dx * k1[0], y[1] + 0.5 * dx * k1[1]};
        auto k2 = rhs(t);
        t = {y[0] + 0.5 * dx * k2[0], y[1] + 0.5 * dx * k2[1]};
        auto k3 = rhs(t);
        t = {y[0] + dx * k3[0], y[1] + dx * k3[1]};
        auto k4 = rhs(t);
        y[0] += dx / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
        y[1] += dx / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
      }
      const double amp = norm(y);
      const bool diverging = amp > prev_amp && amp < 1e-2 * amp0;
      if (amp < cutoff * amp0 || diverging || !std::isfinite(amp)) {
        tail = true;
        const auto& last = out[static_cast<std::size_t>(j - 1)];
        tail_x = (j - 1) * h;
        tail_c = last[0] / tail_dir[0];
      } else {
        out[static_cast<std::size_t>(j)] = y;
        prev_amp = amp;
        continue;
      }
    }
    const double e = tail_c * std::exp(-kappa * (j * h - tail_x));
    out[static_cast<std::size_t>(j)] = {tail_dir[0] * e, tail_dir[1] * e};
  }
  return out;
}

/// Fill a grid function from samples on x >= 0 using the given parity.
inline Eigen::VectorXd mirror_fill(const Grid1D& grid, const std::vector<double>& half, int parity) {
  const int N = grid.n_points;
  Eigen::VectorXd f(N);
  for (int j = 0; j < N; ++j) {
    const int k = j - N / 2;  // x_j = k h
    const double val = half[static_cast<std::size_t>(std::abs(k))];
    f(j) = (k < 0 && parity < 0) ? -val : val;
  }
  // node 0 sits at x = -L ~ +L; odd functions vanish there.
  if (parity < 0) f(0) = 0.0;
  return f;
}

/// Newton on F(y) = 0 restricted to the sector spanned by `basis`.
template <typename Residual, typename Jacobian>
int newton_polish(Eigen::VectorXd& y, const ParityBasis& basis, Residual residual, Jacobian jacobian,
                  const NewtonOptions& opts, double& final_residual, const char* what) {
  Eigen::VectorXd F = residual(y);
  double r = max_abs(F);
  const double scale = std::max(1.0, max_abs(y));
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (r <= 1e-13 * scale) break;
    const Eigen::MatrixXd Js = basis.restrict(jacobian(y));
    const Eigen::VectorXd step = basis.expand<double>(Js.partialPivLu().solve(-basis.project(F)));
    double t = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd Ft;
    double rt = 0.0;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      trial = y + t * step;
      Ft = residual(trial);
      rt = max_abs(Ft);
      if (std::isfinite(rt) && rt < r) break;
    }
    if (!(rt < r)) break;  // stagnation at round-off level
    const bool small_gain = rt > 0.5 * r;
    y = std::move(trial);
    F = std::move(Ft);
    r = rt;
    if (small_gain && r <= opts.tol * scale) break;
  }
  final_residual = r;
  if (!(r <= opts.tol * scale)) throw SolverError(std::string(what) + ": Newton did not converge", r);
  return it;
}

inline double tail_ratio(const Eigen::MatrixXd& comps) {
  const double peak = comps.cwiseAbs().maxCoeff();
  return peak > 0 ? comps.row(0).cwiseAbs().maxCoeff() / peak : 0.0;
}

inline void require_domain(const Grid1D& grid, double decay_rate, const char* what) {
  if (grid.half_width < kMinDecayLengths / decay_rate)
    throw PreconditionError(std::string(what) + ": domain too small, half-width " +
                            std::to_string(grid.half_width) + " < 12/decay_rate = " +
                            std::to_string(kMinDecayLengths / decay_rate));
}

}  // namespace detail

inline double nls_decay_rate(double m, double omega) { return std::sqrt(2.0 * (m - omega)); }
inline double dirac_decay_rate(double m, double omega) { return std::sqrt(m * m - omega * omega); }

/// Discrete residual -1/2 D2 phi + (g(phi^2) - omega) phi.
inline Eigen::VectorXd nls_residual(const Eigen::MatrixXd& K, const NonlinearityModel& model, double omega,
                                    const Eigen::VectorXd& phi) {
  Eigen::VectorXd F = K * phi;
  for (Eigen::Index j = 0; j < phi.size(); ++j) F(j) += (model.g(phi(j) * phi(j)) - omega) * phi(j);
  return F;
}

/// Discrete residual of (i sigma_2 d/dx - omega + g(v^2 - u^2) beta)(v, u).
inline Eigen::VectorXd dirac_residual(const Eigen::MatrixXd& K, const NonlinearityModel& model, double omega,
                                      const Eigen::VectorXd& vu) {
  const Eigen::Index N = vu.size() / 2;
  Eigen::VectorXd F = K * vu;
  for (Eigen::Index j = 0; j < N; ++j) {
    const double v = vu(j), u = vu(N + j);
    const double g = model.g(v * v - u * u);
    F(j) += (g - omega) * v;
    F(N + j) += (-g - omega) * u;
  }
  return F;
}

/// omega phi = -1/2 phi'' + g(phi^2) phi, phi > 0 even.
inline SolitaryWaveProfile solve_nls_profile(const NonlinearityModel& model, double omega, const Grid1D& grid,
                                             const NewtonOptions& opts = {}) {
  const double m = model.mass();
  if (!(m - omega > 0.0))
    throw PreconditionError("solve_nls_profile: omega must be below m (no solitary waves for omega >= m)");
  const double kappa = nls_decay_rate(m, omega);
  detail::require_domain(grid, kappa, "solve_nls_profile");

  const int N = grid.n_points;
  const double h = grid.spacing();
  std::vector<double> half(static_cast<std::size_t>(N / 2) + 1);
  if (model.family() == Family::soler_power) {
    // Exact: A sech^{1/k}(k kappa x) with A^{2k} = (k+1)(m - omega).
    const int k = model.power();
    const double A = std::pow((k + 1) * (m - omega), 0.5 / k);
    for (std::size_t j = 0; j < half.size(); ++j)
      half[j] = A * std::pow(1.0 / std::cosh(k * kappa * j * h), 1.0 / k);
  } else {
    // (phi')^2 = 2 (G(phi^2) - omega phi^2); amplitude where the right side vanishes.
    const double a0 = detail::first_positive_root(
        [&](double a) { return (model.G(a) - omega * a) / a; }, "solve_nls_profile");
    auto rhs = [&](const std::array<double, 2>& y) {
      return std::array<double, 2>{y[1], 2.0 * (model.g(y[0] * y[0]) - omega) * y[0]};
    };
    auto samples = detail::shoot(rhs, {std::sqrt(a0), 0.0}, h, N / 2, kappa, {1.0, -kappa});
    for (std::size_t j = 0; j < half.size(); ++j) half[j] = samples[j][0];
  }
  Eigen::VectorXd phi = detail::mirror_fill(grid, half, +1);

  const Eigen::MatrixXd K = kinetic_operator(Equation::nls, grid);
  const ParityBasis basis(grid, {1}, +1);
  auto residual = [&](const Eigen::VectorXd& p) { return nls_residual(K, model, omega, p); };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd J = K;
    for (int j = 0; j < N; ++j) {
      const double s = p(j) * p(j);
      J(j, j) += model.g(s) - omega + 2.0 * model.gprime(s) * s;
    }
    return J;
  };
  SolitaryWaveProfile out;
  out.newton_iterations = detail::newton_polish(phi, basis, residual, jacobian, opts, out.residual,
                                                "solve_nls_profile");
  out.equation = Equation::nls;
  out.omega = omega;
  out.model = model;
  out.grid = grid;
  out.components = phi;
  out.decay_rate = kappa;
  out.tail_ratio = detail::tail_ratio(out.components);
  return out;
}

/// (i sigma_2 d/dx - omega + g(v^2 - u^2) beta)(v, u) = 0 with v even, u odd, v(0) > 0.
inline SolitaryWaveProfile solve_dirac_profile_1d(const NonlinearityModel& model, double omega,
                                                  const Grid1D& grid, const NewtonOptions& opts = {}) {
  const double m = model.mass();
  if (!(omega > 0.0 && omega < m))
    throw PreconditionError("solve_dirac_profile_1d: omega must lie in (0, m)");
  const double kappa = dirac_decay_rate(m, omega);
  detail::require_domain(grid, kappa, "solve_dirac_profile_1d");

  const int N = grid.n_points;
  const double h = grid.spacing();
  // The orbit is homoclinic to 0 iff it lies on the zero level of
  // H(v, u) = omega (v^2 + u^2) - G(v^2 - u^2); at x = 0 (u = 0) this fixes v(0)^2.
  const double s0 = detail::first_positive_root(
      [&](double s) { return (model.G(s) - omega * s) / s; }, "solve_dirac_profile_1d");
  auto rhs = [&](const std::array<double, 2>& y) {
    const double g = model.g(y[0] * y[0] - y[1] * y[1]);
    return std::array<double, 2>{-(g + omega) * y[1], -(g - omega) * y[0]};
  };
  auto samples = detail::shoot(rhs, {std::sqrt(s0), 0.0}, h, N / 2, kappa, {1.0, kappa / (m + omega)});
  std::vector<double> hv(samples.size()), hu(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    hv[j] = samples[j][0];
    hu[j] = samples[j][1];
  }
  Eigen::VectorXd vu(2 * N);
  vu.head(N) = detail::mirror_fill(grid, hv, +1);
  vu.tail(N) = detail::mirror_fill(grid, hu, -1);

  const Eigen::MatrixXd K = kinetic_operator(Equation::dirac1d, grid);
  const ParityBasis basis(grid, {1, -1}, +1);
  auto residual = [&](const Eigen::VectorXd& y) { return dirac_residual(K, model, omega, y); };
  auto jacobian = [&](const Eigen::VectorXd& y) {
    Eigen::MatrixXd J = K;
    for (int j = 0; j < N; ++j) {
      const double v = y(j), u = y(N + j);
      const double rho = v * v - u * u;
      const double g = model.g(rho), gp = model.gprime(rho);
      J(j, j) += g - omega + 2.0 * gp * v * v;
      J(j, N + j) += -2.0 * gp * v * u;
      J(N + j, j) += -2.0 * gp * u * v;
      J(N + j, N + j) += -g - omega + 2.0 * gp * u * u;
    }
    return J;
  };
  SolitaryWaveProfile out;
  out.newton_iterations = detail::newton_polish(vu, basis, residual, jacobian, opts, out.residual,
                                                "solve_dirac_profile_1d");
  out.equation = Equation::dirac1d;
  out.omega = omega;
  out.model = model;
  out.grid = grid;
  out.components = Eigen::Map<Eigen::MatrixXd>(vu.data(), N, 2);
  out.decay_rate = kappa;
  out.tail_ratio = detail::tail_ratio(out.components);
  return out;
}

/// -theta'' + g(theta) = 0, theta even and positive.
inline SolitaryWaveProfile solve_nlw_stationary(const NlwModel& model, const Grid1D& grid,
                                                const NewtonOptions& opts = {}) {
  const double slope = model.gprime(0.0);
  if (!(slope > 0.0))
    throw PreconditionError("solve_nlw_stationary: g'(0) must be positive for a decaying solution");
  const double kappa = std::sqrt(slope);
  detail::require_domain(grid, kappa, "solve_nlw_stationary");
  // (theta')^2 / 2 = G(theta); the amplitude is the first positive zero of G.
  double theta0 = 0.0;
  try {
    theta0 = detail::first_positive_root([&](double t) { return model.G(t) / (t * t); },
                                         "solve_nlw_stationary");
  } catch (const SolverError& e) {
    throw SolverError("solve_nlw_stationary: no localized solution, shooting map has no sign change",
                      e.residual);
  }
  const int N = grid.n_points;
  auto rhs = [&](const std::array<double, 2>& y) { return std::array<double, 2>{y[1], model.g(y[0])}; };
  auto samples = detail::shoot(rhs, {theta0, 0.0}, grid.spacing(), N / 2, kappa, {1.0, -kappa});
  std::vector<double> half(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) half[j] = samples[j][0];
  Eigen::VectorXd theta = detail::mirror_fill(grid, half, +1);

  const Eigen::MatrixXd K = kinetic_operator(Equation::nlw, grid);
  const ParityBasis basis(grid, {1}, +1);
  auto residual = [&](const Eigen::VectorXd& t) {
    Eigen::VectorXd F = K * t;
    for (int j = 0; j < N; ++j) F(j) += model.g(t(j));
    return F;
  };
  auto jacobian = [&](const Eigen::VectorXd& t) {
    Eigen::MatrixXd J = K;
    for (int j = 0; j < N; ++j) J(j, j) += model.gprime(t(j));
    return J;
  };
  SolitaryWaveProfile out;
  out.newton_iterations = detail::newton_polish(theta, basis, residual, jacobian, opts, out.residual,
                                                "solve_nlw_stationary");
  out.equation = Equation::nlw;
  out.omega = 0.0;
  out.model = model;
  out.grid = grid;
  out.components = theta;
  out.decay_rate = kappa;
  out.tail_ratio = detail::tail_ratio(out.components);
  return out;
}

inline SolitaryWaveProfile solve_profile(Equation eq, const NonlinearityModel& model, double omega,
                                         const Grid1D& grid, const NewtonOptions& opts = {}) {
  switch (eq) {
    case Equation::nls: return solve_nls_profile(model, omega, grid, opts);
    case Equation::dirac1d: return solve_dirac_profile_1d(model, omega, grid, opts);
    case Equation::nlw: break;
  }
  throw PreconditionError("solve_profile: nlw profiles take an NlwModel, use solve_nlw_stationary");
}

/// Central omega-difference of the profile, (phi(omega + h) - phi(omega - h)) / 2h.
/// h_omega <= 0 selects the default 1e-4 (m - omega).
inline Eigen::MatrixXd domega_profile(Equation eq, const NonlinearityModel& model, double omega,
                                      const Grid1D& grid, double h_omega = 0.0) {
  if (h_omega <= 0.0) h_omega = 1e-4 * (model.mass() - omega);
  const auto plus = solve_profile(eq, model, omega + h_omega, grid);
  const auto minus = solve_profile(eq, model, omega - h_omega, grid);
  return (plus.components - minus.components) / (2.0 * h_omega);
}

/// Max-norm of the difference between a profile and its parity-reflected image.
inline double reflection_residual(const SolitaryWaveProfile& p) {
  const auto par = profile_parities(p.equation);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < p.n_components(); ++c)
    for (int j = 0; j < p.grid.n_points; ++j) {
      const double d = p.components(j, c) - par[static_cast<std::size_t>(c)] *
                                                 p.components(p.grid.mirror(j), c);
      worst = std::max(worst, std::abs(d));
    }
  return worst;
}

}  // namespace soliton
