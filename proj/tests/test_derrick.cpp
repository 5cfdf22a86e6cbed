#include <gtest/gtest.h>

#include <cmath>

#include "soliton/derrick.hpp"

using namespace soliton;

TEST(Derrick, PoschlTellerDemo) {
  const auto d = derrick_instability(NlwModel::default_demo(), Grid1D::fourier(20.0, 512));
  EXPECT_NEAR(d.lambda_min, -3.0, 1e-6);
  EXPECT_NEAR(d.lambda_second, 0.0, 1e-6);
  EXPECT_NEAR(d.growth_rate, std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(d.block_lambda_plus, std::sqrt(3.0), 1e-6);
  EXPECT_NEAR(d.block_lambda_minus, -std::sqrt(3.0), 1e-6);
  EXPECT_LE(d.block_residual, 1e-8);
  EXPECT_EQ(d.ground_state_sign_changes, 0);
  EXPECT_NEAR(d.quadratic_form, d.lambda_min, 1e-8);
  EXPECT_LT(d.energy_second_variation, 0.0);
  EXPECT_GT(d.chi(d.chi.size() / 2), 0.0);
  EXPECT_GT(d.chi.minCoeff(), -1e-12);
}

TEST(Derrick, BlockEigenvaluesMatchGrowthRate) {
  const auto d = derrick_instability(NlwModel({0.0, 2.0, 0.0, -1.0}), Grid1D::fourier(20.0, 256));
  EXPECT_NEAR(d.block_lambda_plus, d.growth_rate, 1e-8);
  EXPECT_NEAR(d.block_lambda_minus, -d.growth_rate, 1e-8);
  // theta = 2 sech(sqrt 2 x); L = -d^2 + 2 - 12 sech^2(sqrt 2 x) has ground state -6
  EXPECT_NEAR(d.lambda_min, -6.0, 1e-6);
}

TEST(Derrick, SignChangeCounter) {
  Eigen::VectorXd v(6);
  v << 1, 2, -1, 1e-20, -2, 3;
  EXPECT_EQ(count_sign_changes(v), 2);
  EXPECT_EQ(count_sign_changes(Eigen::VectorXd::Ones(4)), 0);
}
