#include "gpprior/errors.hpp"
#include "gpprior/gp_core.hpp"
#include "gpprior/oracle.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gpprior;
using gpprior::testing::all_families;
using gpprior::testing::random_dataset;
using gpprior::testing::random_theta;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

HyperParams se(double l, double sf, double noise) {
  const std::vector<double> v = {l, sf};
  return HyperParams::from_values(KernelSpec::se(), v, noise);
}

}  // namespace

TEST(Dataset, ValidateRejectsMalformedData) {
  Dataset d{{1.0, 2.0}, {1.0}};
  EXPECT_THROW(d.validate(), LengthMismatch);
  Dataset empty;
  EXPECT_THROW(empty.validate(), ConfigError);
  Dataset bad{{1.0, NAN}, {0.0, 0.0}};
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Nlml, SinglePointClosedForm) {
  // s_f² + σ_n² = 1, so Σ is the scalar 1 (up to the 1e−10 relative jitter).
  const auto theta = se(1.0, std::sqrt(0.5), std::sqrt(0.5));
  const Dataset zero{{0.0}, {0.0}};
  const Dataset one{{0.0}, {1.0}};
  EXPECT_NEAR(nlml(KernelSpec::se(), theta, zero).value, kHalfLog2Pi, 1e-9);
  EXPECT_NEAR(nlml(KernelSpec::se(), theta, zero).value, 0.91894, 1e-5);
  EXPECT_NEAR(nlml(KernelSpec::se(), theta, one).value, 0.5 + kHalfLog2Pi, 1e-9);
  EXPECT_NEAR(nlml(KernelSpec::se(), theta, one).value, 1.41894, 1e-5);
}

TEST(Nlml, ReportsTheJitterActuallyUsed) {
  const auto theta = se(1.0, 2.0, 0.1);
  const Dataset d{{0.0, 1.0, 2.5}, {0.3, -0.2, 1.0}};
  const auto report = nlml(KernelSpec::se(), theta, d);
  EXPECT_DOUBLE_EQ(report.jitter, 1e-10 * (4.0 + 0.01));
  EXPECT_EQ(report.gradient.size(), 3);
  EXPECT_EQ(nlml(KernelSpec::se(), theta, d, false).gradient.size(), 0);
  EXPECT_NEAR(report.value, oracle::dense_nlml(KernelSpec::se(), theta, d, report.jitter), 1e-12);
}

TEST(Nlml, GradientMatchesFiniteDifferences) {
  auto rng = make_rng(21);
  for (const auto& spec : all_families()) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto theta = random_theta(spec, rng);
      const auto data = random_dataset(5 + static_cast<std::size_t>(rep % 16), rng);
      const auto report = nlml(spec, theta, data);
      const Eigen::VectorXd fd = oracle::fd_nlml_gradient(spec, theta, data, report.jitter, 1e-6);
      EXPECT_LT(oracle::relative_error(report.gradient, fd), 1e-5) << spec.name() << " rep " << rep;
    }
  }
}

TEST(Nlml, AgreesWithDenseInverseOracle) {
  auto rng = make_rng(22);
  for (const auto& spec : all_families()) {
    for (int rep = 0; rep < 25; ++rep) {
      const auto theta = random_theta(spec, rng);
      const auto data = random_dataset(1 + static_cast<std::size_t>(rep % 8), rng);
      const auto report = nlml(spec, theta, data, false);
      const double dense = oracle::dense_nlml(spec, theta, data, report.jitter);
      EXPECT_NEAR(report.value, dense, 1e-10 * std::max(1.0, std::abs(dense))) << spec.name();
    }
  }
}

TEST(Nlml, ObjectiveMatchesFreeFunction) {
  auto rng = make_rng(23);
  const auto spec = KernelSpec::per();
  const auto theta = random_theta(spec, rng);
  const auto data = random_dataset(30, rng);
  const NlmlObjective objective(spec, data);
  const auto a = objective(theta.log_values);
  const auto b = nlml(spec, theta, data);
  EXPECT_DOUBLE_EQ(a.value, b.value);
  EXPECT_LT((a.gradient - b.gradient).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(objective(Eigen::VectorXd::Zero(2)), LayoutMismatch);
}

TEST(Predict, AgreesWithDenseInverseOracle) {
  auto rng = make_rng(24);
  for (const auto& spec : all_families()) {
    for (int rep = 0; rep < 25; ++rep) {
      const auto theta = random_theta(spec, rng);
      const auto train = random_dataset(1 + static_cast<std::size_t>(rep % 8), rng);
      const auto test_x = gpprior::testing::random_inputs(5, rng, -2.0, 12.0);
      const double jitter = nlml(spec, theta, train, false).jitter;
      const Prediction fast = predict(spec, theta, train, test_x);
      const Prediction dense = oracle::dense_predict(spec, theta, train, test_x, jitter);
      EXPECT_LT(oracle::relative_error(fast.means, dense.means), 1e-10) << spec.name();
      EXPECT_LT(oracle::relative_error(fast.variances, dense.variances), 1e-10) << spec.name();
    }
  }
}

TEST(Predict, NoiseFreeInterpolation) {
  const auto theta = se(1.5, 1.0, 0.0);
  const Dataset train{{0.0, 1.0, 2.0, 3.0}, {0.5, -0.3, 0.8, 0.1}};
  const std::vector<double> test = {1.0, 3.0};
  const Prediction p = predict(KernelSpec::se(), theta, train, test);
  EXPECT_NEAR(p.means(0), -0.3, 1e-8);
  EXPECT_NEAR(p.means(1), 0.1, 1e-8);
  EXPECT_LE(p.variances(0), 1e-8);
  EXPECT_LE(p.variances(1), 1e-8);
  EXPECT_GE(p.variances.minCoeff(), 0.0);
}

TEST(Predict, RevertsToPriorFarFromData) {
  const double l = 0.7, sf = 1.8;
  const auto theta = se(l, sf, 0.2);
  const Dataset train{{0.0, 0.5, 1.0}, {1.0, 2.0, -1.0}};
  const std::vector<double> test = {1.0 + 20.0 * l, -20.0 * l - 3.0};
  const Prediction p = predict(KernelSpec::se(), theta, train, test);
  for (Eigen::Index i = 0; i < 2; ++i) {
    EXPECT_NEAR(p.means(i), 0.0, 1e-6);
    EXPECT_NEAR(p.variances(i), sf * sf, 1e-6);
  }
}

TEST(Predict, VariancesNonNegative) {
  auto rng = make_rng(25);
  for (const auto& spec : all_families()) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto theta = random_theta(spec, rng);
      const auto train = random_dataset(20, rng);
      // predicting at the training inputs stresses cancellation
      const Prediction p = predict(spec, theta, train, train.inputs);
      EXPECT_GE(p.variances.minCoeff(), 0.0);
      EXPECT_GE(p.clamped, 0);
      EXPECT_LE(p.clamped, p.variances.size());
    }
  }
}

TEST(Cholesky, EscalatesJitterOnSingularMatrix) {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(4, 4);
  const Cholesky chol(ones);
  EXPECT_GE(chol.jitter(), 1e-10);
  EXPECT_LE(chol.jitter(), 1e-4);
  Eigen::MatrixXd shifted = ones;
  shifted.diagonal().array() += chol.jitter();
  const Eigen::MatrixXd& l = chol.lower();
  EXPECT_LT((l * l.transpose() - shifted).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Cholesky, FailureCarriesAttemptedJitter) {
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  try {
    Cholesky chol(indefinite);
    FAIL() << "expected NonPositiveDefinite";
  } catch (const NonPositiveDefinite& e) {
    const auto& j = e.attempted_jitter();
    ASSERT_EQ(j.size(), 7u);
    EXPECT_DOUBLE_EQ(j.front(), 1e-10);
    EXPECT_NEAR(j.back(), 1e-4, 1e-18);
  }
}

TEST(Cholesky, InverseAndLogDet) {
  auto rng = make_rng(26);
  const auto spec = KernelSpec::se();
  const auto theta = random_theta(spec, rng);
  const auto x = gpprior::testing::random_inputs(12, rng);
  Eigen::MatrixXd sigma = gram(spec, theta, x);
  sigma.diagonal().array() += theta.noise_std() * theta.noise_std();
  const Cholesky chol(sigma);
  Eigen::MatrixXd shifted = sigma;
  shifted.diagonal().array() += chol.jitter();
  const Eigen::MatrixXd inv = chol.inverse();
  EXPECT_LT((inv * shifted - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(chol.log_det(), std::log(shifted.determinant()), 1e-9);
}

TEST(SamplePrior, EmpiricalCovarianceMatchesKernel) {
  const auto spec = KernelSpec::se();
  const auto theta = se(5.0, 2.0, 0.1);
  const auto x = gpprior::testing::grid(20);
  const Eigen::MatrixXd k = gram(spec, theta, x);
  const int draws = 2000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(20, 20);
  for (int s = 0; s < draws; ++s) {
    const Eigen::VectorXd y = sample_prior(spec, theta, x, false, derive_seed(99, {static_cast<std::uint64_t>(s)}));
    acc += y * y.transpose();
  }
  acc /= draws;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double se = std::sqrt((k(i, i) * k(j, j) + k(i, j) * k(i, j)) / draws);
      EXPECT_LT(std::abs(acc(i, j) - k(i, j)), 5.0 * se) << i << "," << j;
    }
  }
}

TEST(SamplePrior, DeterministicPerSeed) {
  const auto x = gpprior::testing::grid(10);
  const auto theta = se(2.0, 1.0, 0.3);
  const auto a = sample_prior(KernelSpec::se(), theta, x, true, 5);
  const auto b = sample_prior(KernelSpec::se(), theta, x, true, 5);
  const auto c = sample_prior(KernelSpec::se(), theta, x, true, 6);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}
