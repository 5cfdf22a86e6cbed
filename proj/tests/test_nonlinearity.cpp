#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "soliton/nonlinearity.hpp"

using namespace soliton;

namespace {

std::vector<double> s_grid() {
  std::vector<double> s;
  for (int i = 0; i <= 100; ++i) s.push_back(-2.0 + 4.0 * i / 100.0);
  return s;
}

void expect_fd_consistent(const NonlinearityModel& m) {
  const double h = 1e-5;
  for (double s : s_grid()) {
    const double dG = (m.G(s + h) - m.G(s - h)) / (2 * h);
    const double dK = (m.K(s + h) - m.K(s - h)) / (2 * h);
    EXPECT_LE(std::abs(dG - m.g(s)), 1e-8 * std::max(1.0, std::abs(m.g(s)))) << "s=" << s;
    EXPECT_LE(std::abs(dK - s * m.gprime(s)), 1e-8 * std::max(1.0, std::abs(s * m.gprime(s)))) << "s=" << s;
  }
}

}  // namespace

TEST(Nonlinearity, SolerValues) {
  const auto k1 = NonlinearityModel::soler_power(1);
  EXPECT_DOUBLE_EQ(k1.G(0.5), 0.375);
  EXPECT_DOUBLE_EQ(k1.g(0.0), 1.0);
  const auto k2 = NonlinearityModel::soler_power(2);
  EXPECT_NEAR(k2.K(1.0), -2.0 / 3.0, 1e-15);
  const auto heavy = NonlinearityModel::soler_power(3, 2.5);
  EXPECT_DOUBLE_EQ(heavy.g(0.0), 2.5);
  EXPECT_DOUBLE_EQ(heavy.mass(), 2.5);
}

TEST(Nonlinearity, SolerIsExact) {
  for (int k = 1; k <= 4; ++k) {
    const auto m = NonlinearityModel::soler_power(k, 1.5);
    for (double s : {-1.5, -0.25, 0.5, 0.75, 2.0}) {
      EXPECT_EQ(m.g(s), 1.5 - std::pow(s, k));
      EXPECT_EQ(m.gprime(s), -k * std::pow(s, k - 1));
    }
  }
}

TEST(Nonlinearity, Normalizations) {
  for (const auto& m : {NonlinearityModel::soler_power(2), NonlinearityModel::polynomial({1.0, -1.0, 0.1})}) {
    EXPECT_EQ(m.G(0.0), 0.0);
    EXPECT_EQ(m.K(0.0), 0.0);
  }
}

TEST(Nonlinearity, DerivativesByFiniteDifferences) {
  for (int k = 1; k <= 3; ++k) expect_fd_consistent(NonlinearityModel::soler_power(k));
  expect_fd_consistent(NonlinearityModel::polynomial({1.0, -1.0, 0.1}));
  expect_fd_consistent(NonlinearityModel::polynomial({0.7, 0.3, -0.2, 0.05}));
}

TEST(Nonlinearity, EvalDispatch) {
  const auto m = NonlinearityModel::polynomial({1.0, -1.0, 0.1});
  EXPECT_EQ(m.eval(Which::g, 0.3), m.g(0.3));
  EXPECT_EQ(m.eval(Which::gprime, 0.3), m.gprime(0.3));
  EXPECT_EQ(m.eval(Which::G, 0.3), m.G(0.3));
  EXPECT_EQ(m.eval(Which::K, 0.3), m.K(0.3));
}

TEST(Nonlinearity, RejectsBadParameters) {
  EXPECT_THROW(NonlinearityModel::soler_power(0), PreconditionError);
  EXPECT_THROW(NonlinearityModel::soler_power(1, -1.0), PreconditionError);
  EXPECT_THROW(NonlinearityModel::polynomial({0.0, 1.0}), PreconditionError);
  EXPECT_THROW(NonlinearityModel::polynomial({}), PreconditionError);
}

TEST(Nonlinearity, CustomNeedsExplicitQuadratureFlag) {
  CustomFunctions f;
  f.g = [](double s) { return 1.0 - std::sin(s); };
  f.gprime = [](double s) { return -std::cos(s); };
  f.G = [](double s) { return s + std::cos(s) - 1.0; };
  const auto strict = NonlinearityModel::custom(f);
  EXPECT_THROW(strict.K(0.5), ModelError);
  f.allow_quadrature_K = true;
  const auto lax = NonlinearityModel::custom(f);
  // K(s) = -int_0^s t cos t dt = -(s sin s + cos s - 1)
  for (double s : {-1.2, 0.5, 1.7}) EXPECT_NEAR(lax.K(s), -(s * std::sin(s) + std::cos(s) - 1.0), 1e-13);
  EXPECT_EQ(lax.mass(), 1.0);

  CustomFunctions missing;
  missing.g = f.g;
  EXPECT_THROW(NonlinearityModel::custom(missing), PreconditionError);
}

TEST(Nonlinearity, GsgCondition) {
  const auto k1 = NonlinearityModel::soler_power(1);
  const double half[] = {0.5};
  EXPECT_TRUE(check_gsg_condition(k1, half));
  // 2 G(0.5) - 0.5 g(0.5) = 0.75 - 0.25
  EXPECT_DOUBLE_EQ(2 * k1.G(0.5) - 0.5 * k1.g(0.5), 0.5);
  const double zero[] = {0.0};
  EXPECT_THROW(check_gsg_condition(k1, zero), PreconditionError);
  EXPECT_THROW(check_gsg_condition(k1, std::span<const double>{}), PreconditionError);
}

TEST(Nonlinearity, GsgViolationFoundByScan) {
  // Scan g = 1 + a s over a and s for a sample where the condition fails.
  bool found = false;
  double bad_a = 0, bad_s = 0;
  for (double a : {0.5, 1.0, 3.0, 10.0}) {
    const auto m = NonlinearityModel::polynomial({1.0, a});
    for (double s : s_grid()) {
      if (s == 0.0) continue;
      const double one[] = {s};
      if (!check_gsg_condition(m, one)) {
        found = true;
        bad_a = a;
        bad_s = s;
        break;
      }
    }
    if (found) break;
  }
  ASSERT_TRUE(found);
  // 2 G(s) - s g(s) = s for g = 1 + a s, so only negative samples violate it.
  EXPECT_LT(bad_s, 0.0);
  const auto m = NonlinearityModel::polynomial({1.0, bad_a});
  EXPECT_NEAR(2 * m.G(bad_s) - bad_s * m.g(bad_s), bad_s, 1e-14);
  const double pos[] = {0.25, 1.0, 2.0};
  EXPECT_TRUE(check_gsg_condition(m, pos));
}

TEST(Nonlinearity, NlwModel) {
  const auto d = NlwModel::default_demo();
  EXPECT_EQ(d.g(0.0), 0.0);
  EXPECT_DOUBLE_EQ(d.g(2.0), 2.0 - 8.0);
  EXPECT_DOUBLE_EQ(d.gprime(2.0), 1.0 - 12.0);
  EXPECT_DOUBLE_EQ(d.G(2.0), 2.0 - 4.0);
  EXPECT_THROW(NlwModel({1.0, 1.0}), PreconditionError);
}
