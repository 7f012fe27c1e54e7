#include "gpprior/datagen.hpp"
#include "gpprior/errors.hpp"
#include "gpprior/optim.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace gpprior;

namespace {

Objective quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& center) {
  return [a, center](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const Eigen::VectorXd r = x - center;
    g = 2.0 * a * r;
    return r.dot(a * r);
  };
}

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
  g.resize(2);
  g(0) = -2.0 * a - 400.0 * x(0) * b;
  g(1) = 200.0 * b;
  return a * a + 100.0 * b * b;
}

RestartResult result_with(double nlml, RestartStatus status) {
  RestartResult r;
  r.nlml_opt = nlml;
  r.status = status;
  return r;
}

}  // namespace

TEST(CGConfig, Validation) {
  EXPECT_NO_THROW(CGConfig{}.validate());
  CGConfig c;
  c.wolfe_c1 = 0.5;
  c.wolfe_c2 = 0.4;
  EXPECT_THROW(c.validate(), ConfigError);
  CGConfig budget;
  budget.max_evals = 0;
  EXPECT_THROW(budget.validate(), ConfigError);
}

TEST(MinimizeCg, IsotropicQuadratic) {
  Eigen::VectorXd center(2);
  center << 3.0, -2.0;
  const auto r = minimize_cg(quadratic(Eigen::MatrixXd::Identity(2, 2), center), Eigen::VectorXd::Zero(2), {});
  EXPECT_EQ(r.status, RestartStatus::Converged);
  EXPECT_LT((r.theta_opt - center).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(r.evals, 10);
}

TEST(MinimizeCg, ConvexQuadraticWithinFiveDEvaluations) {
  auto rng = make_rng(31);
  for (int d = 2; d <= 10; ++d) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return gpprior::testing::uniform(rng, -1, 1); });
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd eig(d);
    for (int i = 0; i < d; ++i) eig(i) = 1.0 + i;
    const Eigen::MatrixXd a = q * eig.asDiagonal() * q.transpose();
    const Eigen::VectorXd center = Eigen::VectorXd::NullaryExpr(d, [&] { return gpprior::testing::uniform(rng, -2, 2); });
    CGConfig config;
    config.grad_tol = 1e-8 / std::sqrt(static_cast<double>(d));
    const auto r = minimize_cg(quadratic(a, center), Eigen::VectorXd::Zero(d), config);
    Eigen::VectorXd g;
    quadratic(a, center)(r.theta_opt, g);
    EXPECT_LT(g.norm(), 1e-8) << "d=" << d;
    EXPECT_LE(r.evals, 5 * d) << "d=" << d;
  }
}

TEST(MinimizeCg, Rosenbrock) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  CGConfig config;
  config.max_evals = 2000;
  config.grad_tol = 1e-9;
  const auto r = minimize_cg(rosenbrock, x0, config);
  EXPECT_NEAR(r.theta_opt(0), 1.0, 1e-4);
  EXPECT_NEAR(r.theta_opt(1), 1.0, 1e-4);
}

TEST(MinimizeCg, TraceIsMonotoneAndEndsAtTheOptimum) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  CGConfig config;
  config.max_evals = 300;
  const auto r = minimize_cg(rosenbrock, x0, config);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace.front().theta, x0);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i].value, r.trace[i - 1].value);
  EXPECT_EQ(r.trace.back().theta, r.theta_opt);
  Eigen::VectorXd g;
  EXPECT_EQ(rosenbrock(r.theta_opt, g), r.nlml_opt);
  EXPECT_LE(r.evals, config.max_evals);
}

TEST(MinimizeCg, BudgetExhausted) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  CGConfig config;
  config.max_evals = 5;
  const auto r = minimize_cg(rosenbrock, x0, config);
  EXPECT_EQ(r.status, RestartStatus::BudgetExhausted);
  EXPECT_LE(r.evals, 5);
  EXPECT_FALSE(r.failed());
}

TEST(MinimizeCg, NonFiniteStartFailsImmediately) {
  const Objective f = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Zero(1);
    return std::numeric_limits<double>::quiet_NaN();
  };
  const auto r = minimize_cg(f, Eigen::VectorXd::Zero(1), {});
  EXPECT_EQ(r.status, RestartStatus::NumericalFailure);
  EXPECT_TRUE(r.failed());
  EXPECT_EQ(r.evals, 1);
  const Objective throws = [](const Eigen::VectorXd&, Eigen::VectorXd&) -> double {
    throw NumericalError("boom");
  };
  EXPECT_EQ(minimize_cg(throws, Eigen::VectorXd::Zero(1), {}).status, RestartStatus::NumericalFailure);
}

TEST(MinimizeCg, InfeasibleRegionKeepsLastGoodIterate) {
  // (x − 3)², undefined beyond x = 1
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) -> double {
    if (x(0) > 1.0) throw NumericalError("outside the domain");
    g = Eigen::VectorXd::Constant(1, 2.0 * (x(0) - 3.0));
    return (x(0) - 3.0) * (x(0) - 3.0);
  };
  const auto r = minimize_cg(f, Eigen::VectorXd::Zero(1), {});
  EXPECT_LE(r.theta_opt(0), 1.0);
  EXPECT_GT(r.theta_opt(0), 0.9);
  EXPECT_TRUE(std::isfinite(r.nlml_opt));
  EXPECT_NE(r.status, RestartStatus::Converged);
}

TEST(SelectWinner, LowestFiniteValueWithTiesToLowestIndex) {
  std::vector<RestartResult> rs = {result_with(3.0, RestartStatus::Converged),
                                   result_with(1.0, RestartStatus::BudgetExhausted),
                                   result_with(1.0, RestartStatus::Converged),
                                   result_with(-5.0, RestartStatus::NumericalFailure)};
  EXPECT_EQ(select_winner(rs), 1u);
}

TEST(SelectWinner, AllFailed) {
  std::vector<RestartResult> rs = {result_with(1.0, RestartStatus::NumericalFailure),
                                   result_with(std::numeric_limits<double>::infinity(), RestartStatus::LineSearchFailed)};
  try {
    select_winner(rs);
    FAIL() << "expected AllRestartsFailed";
  } catch (const AllRestartsFailed& e) {
    ASSERT_EQ(e.statuses().size(), 2u);
    EXPECT_EQ(e.statuses()[0], "NumericalFailure");
    EXPECT_EQ(e.statuses()[1], "LineSearchFailed");
  }
}

namespace {

Dataset se_data(int n, std::uint64_t seed) {
  const std::vector<double> v = {5.0, 2.0};
  return gen_gp_series(KernelSpec::se(), v, n, 0.1, seed);
}

}  // namespace

TEST(MultiStart, SingleRestartWins) {
  const auto data = se_data(60, 1);
  const auto out = multi_start(KernelSpec::se(), data, PriorSpec{}, 1, CGConfig{}, 7);
  ASSERT_EQ(out.restarts.size(), 1u);
  EXPECT_EQ(out.winner_index, 0u);
}

TEST(MultiStart, WinnerMinimizesAndIsDeterministic) {
  const auto data = se_data(80, 2);
  const auto a = multi_start(KernelSpec::se(), data, PriorSpec{}, 4, CGConfig{}, 11);
  const auto b = multi_start(KernelSpec::se(), data, PriorSpec{}, 4, CGConfig{}, 11, 3);
  ASSERT_EQ(a.restarts.size(), 4u);
  for (const auto& r : a.restarts)
    if (!r.failed()) EXPECT_GE(r.nlml_opt, a.winner().nlml_opt);
  EXPECT_EQ(a.winner_index, b.winner_index);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.restarts[i].theta_opt, b.restarts[i].theta_opt);
    EXPECT_EQ(a.restarts[i].nlml_opt, b.restarts[i].nlml_opt);
  }
  // winner's reported nlml is the likelihood at its parameters
  EXPECT_NEAR(nlml_value(KernelSpec::se(), a.winner_params(), data), a.winner().nlml_opt, 1e-9);
}

TEST(MultiStart, RestartStreamsDoNotDependOnRestartCount) {
  const auto data = se_data(40, 3);
  const auto three = multi_start(KernelSpec::se(), data, PriorSpec{}, 3, CGConfig{}, 5);
  const auto five = multi_start(KernelSpec::se(), data, PriorSpec{}, 5, CGConfig{}, 5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(three.restarts[i].theta_init, five.restarts[i].theta_init);
}

TEST(MultiStart, RecoversSquaredExponentialParameters) {
  const auto data = se_data(400, 4);
  const auto tr = split(data, SplitKind::Interpolation).train;
  const auto out = multi_start(KernelSpec::se(), tr, PriorSpec{}, 10, CGConfig{}, 9);
  const auto theta = out.winner_params();
  EXPECT_NEAR(theta.value(0), 5.0, 1.0);
  EXPECT_NEAR(theta.value(1), 2.0, 0.6);
  EXPECT_NEAR(theta.noise_std(), 0.1, 0.02);
}

TEST(MultiStart, PeriodicStartsNearPeriodAndDoublePeriod) {
  const std::vector<double> v = {5.0, 7.0, 2.0};
  const auto data = gen_gp_series(KernelSpec::per(), v, 200, 0.1, 12);
  const auto spec = KernelSpec::per();
  auto start = [&](double p) {
    const std::vector<double> k = {4.0, p, 1.5};
    return HyperParams::from_values(spec, k, 0.2).log_values;
  };
  const auto out = multi_start_from(spec, data, {start(7.2), start(13.7)}, CGConfig{});
  ASSERT_EQ(out.restarts.size(), 2u);
  const double at0 = nlml_value(spec, HyperParams::from_log(spec, out.restarts[0].theta_opt), data);
  const double at1 = nlml_value(spec, HyperParams::from_log(spec, out.restarts[1].theta_opt), data);
  EXPECT_NEAR(at0, out.restarts[0].nlml_opt, 1e-9);
  EXPECT_NEAR(at1, out.restarts[1].nlml_opt, 1e-9);
  EXPECT_EQ(out.winner_index, at0 <= at1 ? 0u : 1u);
  // both optima describe the same periodic function, so the fitted periods
  // land on multiples of 7
  for (const auto& r : out.restarts) {
    const double p = std::exp(r.theta_opt(1));
    EXPECT_NEAR(p / 7.0, std::round(p / 7.0), 0.02) << p;
  }
}

TEST(MultiStart, AllRestartsFailedPropagates) {
  Dataset data{{1.0, 2.0, 3.0}, {0.0, 1.0, 0.5}};
  // Starting points with an overflowing amplitude make every restart infeasible.
  Eigen::VectorXd bad(3);
  bad << 0.0, 800.0, 0.0;
  EXPECT_THROW(multi_start_from(KernelSpec::se(), data, {bad, bad}, CGConfig{}), AllRestartsFailed);
}
