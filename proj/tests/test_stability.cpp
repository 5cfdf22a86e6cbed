#include <gtest/gtest.h>

#include <cmath>

#include "soliton/stability.hpp"

using namespace soliton;

namespace {

const auto k1 = NonlinearityModel::soler_power(1);

double dirac_Q(double w) { return 2.0 * std::sqrt(1.0 - w * w) / w; }

SolitaryWaveProfile dirac(double w, int N = 1024, const NonlinearityModel& m = k1) {
  return solve_dirac_profile_1d(m, w, auto_grid(Equation::dirac1d, 1.0, w, N));
}

}  // namespace

TEST(Charge, ClosedForms) {
  EXPECT_NEAR(charge_Q(dirac(0.6)), 8.0 / 3.0, 1e-6);
  const auto p = solve_nls_profile(k1, 0.5, auto_grid(Equation::nls, 1.0, 0.5, 512));
  EXPECT_NEAR(charge_Q(p), 2.0, 1e-8);
  SolitaryWaveProfile zero = p;
  zero.components.setZero();
  EXPECT_EQ(charge_Q(zero), 0.0);
  EXPECT_NEAR(*charge_closed_form(Equation::nls, k1, 0.5), 2.0, 1e-14);
  EXPECT_NEAR(*charge_closed_form(Equation::dirac1d, k1, 0.8), 1.5, 1e-14);
  EXPECT_FALSE(charge_closed_form(Equation::dirac1d, NonlinearityModel::soler_power(2), 0.8).has_value());
  EXPECT_FALSE(charge_closed_form(Equation::nls, NonlinearityModel::polynomial({1, -1}), 0.8).has_value());
}

TEST(Energy, KineticTermTwoWays) {
  const auto p = dirac(0.7);
  const auto e = energy_parts(p);
  EXPECT_GT(e.T, 0.0);
  // soler k=1, n=1: T = int rho^2 / 2
  double half_rho2 = 0.0;
  for (int j = 0; j < p.grid.n_points; ++j) {
    const double rho = p.components(j, 0) * p.components(j, 0) - p.components(j, 1) * p.components(j, 1);
    half_rho2 += 0.5 * rho * rho * p.grid.spacing();
  }
  EXPECT_NEAR(e.T, half_rho2, 1e-5);
  EXPECT_LE(e.T_imag, 1e-8);
  SolitaryWaveProfile zero = p;
  zero.components.setZero();
  const auto z = energy_parts(zero);
  EXPECT_EQ(z.T, 0.0);
  EXPECT_EQ(z.V, 0.0);
}

TEST(Virial, IdentitiesHold) {
  for (double w : {0.5, 0.8}) {
    const auto p = dirac(w);
    const auto r = virial_check(p);
    EXPECT_LE(r.residual1, 1e-6) << w;
    EXPECT_LE(r.residual2, 1e-6) << w;
    // n = 1: V = w Q
    EXPECT_NEAR(energy_parts(p).V, w * charge_Q(p), 1e-6 * (w * charge_Q(p) + 1));
  }
  const auto q = solve_nls_profile(NonlinearityModel::soler_power(2), 0.6, auto_grid(Equation::nls, 1.0, 0.6, 512));
  EXPECT_LE(virial_check(q).residual1, 1e-6);
  EXPECT_LE(virial_check(q).residual2, 1e-6);
}

TEST(Virial, PerturbedProfileFails) {
  for (double w : {0.5, 0.8}) {
    auto p = dirac(w);
    const Eigen::VectorXd x = p.grid.nodes();
    p.components.col(0).array() += 0.01 * (-x.array().square()).exp();
    EXPECT_GT(virial_check(p).residual1, 1e-3) << w;
  }
}

TEST(ChargeCurve, DiracMatchesClosedForm) {
  const auto g = Grid1D::fourier(60.0, 1024);
  const auto curve = charge_curve(Equation::dirac1d, k1, {0.4, 0.6, 0.8}, g);
  for (const auto& pt : curve) {
    ASSERT_TRUE(pt.ok) << pt.error;
    EXPECT_NEAR(pt.Q, dirac_Q(pt.omega), 1e-6);
  }
}

TEST(ChargeCurve, NlsScalingLaws) {
  const auto g = Grid1D::fourier(45.0, 1024);
  const auto flat = charge_curve(Equation::nls, NonlinearityModel::soler_power(2), {0.3, 0.5, 0.7}, g);
  EXPECT_NEAR(flat[0].Q, flat[2].Q, 1e-6);
  const auto up = charge_curve(Equation::nls, NonlinearityModel::soler_power(3), {0.3, 0.5, 0.7}, g);
  EXPECT_LT(up[0].Q, up[1].Q);
  EXPECT_LT(up[1].Q, up[2].Q);
  EXPECT_NEAR(dQ_domega(flat, 0.5), 0.0, 1e-6);
  const auto down = charge_curve(Equation::nls, k1, {0.3, 0.5, 0.7}, g);
  EXPECT_LT(dQ_domega(down, 0.5), 0.0);
  EXPECT_THROW(dQ_domega(down, 0.3), PreconditionError);
  EXPECT_THROW(dQ_domega(down, 0.4), PreconditionError);
}

TEST(ChargeCurve, FailedRowsAreRecorded) {
  const auto curve = charge_curve(Equation::nls, k1, {0.5, 1.2}, Grid1D::fourier(40.0, 256));
  EXPECT_TRUE(curve[0].ok);
  EXPECT_FALSE(curve[1].ok);
  EXPECT_FALSE(curve[1].error.empty());
}

TEST(DQdOmega, DiracCubic) {
  const double w = 0.8;
  const auto g = Grid1D::fourier(60.0, 1024);
  const auto curve = charge_curve(Equation::dirac1d, k1, {w - 0.005, w, w + 0.005}, g);
  const double exact = -2.0 / (w * w * std::sqrt(1 - w * w));
  EXPECT_NEAR(dQ_domega(curve, w), exact, 1e-3);
  EXPECT_NEAR(local_dQ_domega(Equation::dirac1d, k1, w, g), exact, 1e-5);
}

TEST(VkVerdict, DeadBand) {
  EXPECT_EQ(vk_verdict(-1.0, 2.0), VkVerdict::vk_stable_sign);
  EXPECT_EQ(vk_verdict(1.0, 2.0), VkVerdict::vk_unstable_sign);
  EXPECT_EQ(vk_verdict(1e-7, 2.0), VkVerdict::critical);
  EXPECT_EQ(vk_verdict(-1e-7, 2.0, 1e-9), VkVerdict::vk_stable_sign);
}

TEST(Scan, DiracCubicIsStableEverywhere) {
  auto grid_for = [](double w) { return auto_grid(Equation::dirac1d, 1.0, w, 256); };
  const auto rows = bifurcation_scan(Equation::dirac1d, k1, {0.3, 0.5, 0.7, 0.9}, grid_for);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.ok) << r.notes;
    EXPECT_EQ(r.verdict, VkVerdict::vk_stable_sign) << r.omega;
    EXPECT_EQ(r.real_pair_count, 0) << r.omega;
    EXPECT_EQ(r.nullspace_dim, 4) << r.omega;
    EXPECT_LE(r.virial_residual1, 1e-6);
  }
}

TEST(Scan, NlsBothDirectionsAndThreads) {
  auto grid_for = [](double w) { return auto_grid(Equation::nls, 1.0, w, 256); };
  for (int k : {1, 3}) {
    const auto m = NonlinearityModel::soler_power(k);
    const auto serial = bifurcation_scan(Equation::nls, m, {0.6, 0.3, 0.45}, grid_for, {}, 1);
    const auto threaded = bifurcation_scan(Equation::nls, m, {0.3, 0.45, 0.6}, grid_for, {}, 3);
    EXPECT_TRUE(vk_exceptions(serial).empty());
    ASSERT_EQ(serial.size(), 3u);
    EXPECT_EQ(serial[0].omega, 0.3);
    for (std::size_t i = 0; i < serial.size(); ++i) {
      EXPECT_EQ(serial[i].Q, threaded[i].Q);
      EXPECT_EQ(serial[i].real_pair_count, threaded[i].real_pair_count);
      EXPECT_EQ(serial[i].real_pair_count, k == 3 ? 2 : 0);
    }
  }
}

TEST(Scan, BadRowIsFlaggedNotFatal) {
  const auto rows = bifurcation_scan(Equation::nls, k1, {0.5, 1.5}, Grid1D::fourier(40.0, 128));
  EXPECT_TRUE(rows[0].ok);
  EXPECT_FALSE(rows[1].ok);
  EXPECT_FALSE(rows[1].notes.empty());
}

TEST(Nullspace, DiracAccounting) {
  const auto p = dirac(0.8, 512);
  const auto acc = nullspace_accounting(p);
  EXPECT_EQ(acc.rank, 4);
  EXPECT_LE(acc.chain.kernel_phase, 1e-5);
  EXPECT_LE(acc.chain.kernel_translation, 1e-5);
  EXPECT_LE(acc.chain.chain_omega, 1e-5);
  EXPECT_LE(acc.chain.chain_boost, 1e-5);
}
