#include "gpprior/errors.hpp"
#include "gpprior/metrics.hpp"
#include "gpprior/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gpprior;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double sd = 1.0, double mu = 0.0) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(Rmse, Examples) {
  const std::vector<double> y = {0.3, -1.2, 2.0};
  EXPECT_EQ(rmse(y, y), 0.0);
  std::vector<double> shifted = y;
  for (auto& v : shifted) v += 0.75;
  EXPECT_NEAR(rmse(shifted, y), 0.75, 1e-15);
  EXPECT_NEAR(rmse(std::vector<double>{1, 2}, std::vector<double>{0, 0}), std::sqrt(2.5), 1e-15);
  EXPECT_NEAR(rmse(std::vector<double>{1, 2}, std::vector<double>{0, 0}), 1.58114, 1e-5);
  EXPECT_THROW(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), LengthMismatch);
}

TEST(Srmse, MeanPredictorIsExactlyOne) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto y = normals(80, seed, 3.0, 1.0);
    const std::vector<double> pred(y.size(), mean(y));
    EXPECT_NEAR(srmse(pred, y), 1.0, 1e-12);
  }
}

TEST(Srmse, DefinitionAndErrors) {
  const auto y = normals(50, 1);
  const auto p = normals(50, 2);
  EXPECT_DOUBLE_EQ(srmse(p, y), rmse(p, y) / std::sqrt(population_variance(y)));
  EXPECT_EQ(srmse(y, y), 0.0);
  const std::vector<double> constant(5, 2.0);
  EXPECT_THROW(srmse(std::vector<double>(5, 1.0), constant), DegenerateTargets);
}

TEST(Msll, NullModelIsExactlyZero) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto train = normals(320, seed, 2.0, -0.5);
    const auto test = normals(80, seed + 100, 2.0, -0.5);
    const std::vector<double> pred(test.size(), mean(train));
    const std::vector<double> var(test.size(), population_variance(train));
    EXPECT_NEAR(msll(pred, var, test, train), 0.0, 1e-12);
  }
}

TEST(Msll, HandExamples) {
  // null model N(0, 1) from the training outputs {−1, 1}
  const std::vector<double> train = {-1.0, 1.0};
  const std::vector<double> y = {1.0};
  EXPECT_NEAR(msll(std::vector<double>{0.0}, std::vector<double>{1.0}, y, train), 0.0, 1e-15);
  const double expected = 0.5 * std::log(0.5) + 0.5;
  EXPECT_NEAR(msll(std::vector<double>{0.0}, std::vector<double>{0.5}, y, train), expected, 1e-15);
  EXPECT_NEAR(msll(std::vector<double>{0.0}, std::vector<double>{0.5}, y, train), 0.15343, 1e-5);
  // ŷ = y with unit variance against a null at the same mean and variance
  EXPECT_NEAR(msll(std::vector<double>{1.0}, std::vector<double>{1.0}, y, std::vector<double>{0.0, 2.0}),
              0.0, 1e-15);
}

TEST(Msll, LocationInvariance) {
  const auto train = normals(100, 3);
  const auto test = normals(20, 4);
  const auto pred = normals(20, 5, 0.5);
  const std::vector<double> var(20, 0.7);
  const double base = msll(pred, var, test, train);
  for (double c : {-10.0, 3.5, 1e3}) {
    auto shift = [c](std::vector<double> v) {
      for (auto& x : v) x += c;
      return v;
    };
    EXPECT_NEAR(msll(shift(pred), var, shift(test), shift(train)), base, 1e-10) << c;
  }
}

TEST(Msll, ShrinkingErrorsNeverHurts) {
  const auto train = normals(100, 6);
  const auto test = normals(30, 7);
  const auto pred = normals(30, 8);
  const std::vector<double> var(30, 0.4);
  double previous = msll(pred, var, test, train);
  for (double f : {0.8, 0.5, 0.2, 0.0}) {
    std::vector<double> closer(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) closer[i] = test[i] + f * (pred[i] - test[i]);
    const double current = msll(closer, var, test, train);
    EXPECT_LE(current, previous + 1e-15);
    previous = current;
  }
}

TEST(Msll, Errors) {
  const std::vector<double> y = {1.0, 2.0};
  const std::vector<double> train = {0.0, 1.0};
  EXPECT_THROW(msll(y, std::vector<double>{1.0, 0.0}, y, train), NumericalError);
  EXPECT_THROW(msll(y, std::vector<double>{1.0}, y, train), LengthMismatch);
  EXPECT_THROW(msll(y, std::vector<double>{1.0, 1.0}, y, std::vector<double>{}), LengthMismatch);
}

TEST(Score, BundlesMetrics) {
  const auto train = normals(40, 9);
  const auto test = normals(10, 10);
  const auto pred = normals(10, 11);
  const std::vector<double> var(10, 1.3);
  const auto r = score(pred, var, test, train);
  EXPECT_EQ(r.m, 10);
  EXPECT_DOUBLE_EQ(r.rmse, rmse(pred, test));
  EXPECT_DOUBLE_EQ(r.srmse, srmse(pred, test));
  EXPECT_DOUBLE_EQ(r.msll, msll(pred, var, test, train));
}
