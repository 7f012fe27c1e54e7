#include "gpprior/oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace gpprior;

TEST(OracleCentralDifference, ExactForQuadratics) {
  const auto f = [](const Eigen::VectorXd& x) { return 3.0 * x(0) * x(0) - 2.0 * x(0) * x(1) + x(1); };
  Eigen::VectorXd x(2);
  x << 0.7, -1.3;
  const Eigen::VectorXd g = oracle::central_difference(f, x, 1e-4);
  EXPECT_NEAR(g(0), 6.0 * 0.7 + 2.0 * 1.3, 1e-8);
  EXPECT_NEAR(g(1), -2.0 * 0.7 + 1.0, 1e-8);
}

TEST(OracleRelativeError, Conventions) {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_EQ(oracle::relative_error(zero, zero), 0.0);
  EXPECT_DOUBLE_EQ(oracle::relative_error(zero, Eigen::MatrixXd::Ones(2, 2)), 1.0);
  Eigen::MatrixXd a(1, 2), b(1, 2);
  a << 3.0, 4.0;
  b << 3.0, 4.5;
  EXPECT_NEAR(oracle::relative_error(a, b), 0.5 / b.norm(), 1e-15);
}

TEST(OracleDenseSigma, PointwiseConstruction) {
  const std::vector<double> v = {2.0, 1.5};
  const auto theta = HyperParams::from_values(KernelSpec::se(), v, 0.4);
  const std::vector<double> x = {0.0, 1.0, 3.0};
  const Eigen::MatrixXd s = oracle::dense_sigma(KernelSpec::se(), theta, x, 1e-3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double d = x[i] - x[j];
      const double expected = 2.25 * std::exp(-d * d / 8.0) + (i == j ? 0.16 + 1e-3 : 0.0);
      EXPECT_NEAR(s(i, j), expected, 1e-14);
    }
  }
}

TEST(OracleDenseNlml, TwoPointClosedForm) {
  // Σ = [[a, b], [b, a]] has det a² − b² and a closed-form inverse.
  const std::vector<double> v = {1.0, 1.0};
  const auto theta = HyperParams::from_values(KernelSpec::se(), v, 0.5);
  const Dataset d{{0.0, 1.0}, {1.0, -0.5}};
  const double a = 1.25, b = std::exp(-0.5);
  const double det = a * a - b * b;
  const double quad = (a * 1.0 + a * 0.25 - 2.0 * b * (1.0 * -0.5)) / det;
  const double expected = 0.5 * quad + 0.5 * std::log(det) + std::log(2.0 * M_PI);
  EXPECT_NEAR(oracle::dense_nlml(KernelSpec::se(), theta, d), expected, 1e-12);
}
