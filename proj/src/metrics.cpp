#include "gpprior/metrics.hpp"

#include "gpprior/errors.hpp"

#include <cmath>
#include <numbers>

namespace gpprior {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw LengthMismatch(std::string(what) + ": lengths differ (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  if (a == 0) throw LengthMismatch(std::string(what) + ": no test points");
}

}  // namespace

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_variance(std::span<const double> v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size());
}

double rmse(std::span<const double> predicted, std::span<const double> targets) {
  require_same_length(predicted.size(), targets.size(), "rmse");
  double s = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double e = predicted[i] - targets[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(targets.size()));
}

double srmse(std::span<const double> predicted, std::span<const double> targets) {
  require_same_length(predicted.size(), targets.size(), "srmse");
  const double sd = std::sqrt(population_variance(targets));
  if (!(sd > 0.0)) throw DegenerateTargets("srmse: test outputs are constant");
  return rmse(predicted, targets) / sd;
}

double log_loss(double y, double mean, double var) {
  const double r = y - mean;
  return 0.5 * std::log(2.0 * std::numbers::pi * var) + r * r / (2.0 * var);
}

double msll(std::span<const double> predicted, std::span<const double> variances,
            std::span<const double> targets, std::span<const double> train_outputs) {
  require_same_length(predicted.size(), targets.size(), "msll");
  require_same_length(variances.size(), targets.size(), "msll");
  if (train_outputs.empty()) throw LengthMismatch("msll: training outputs are empty");
  const double null_mean = mean(train_outputs);
  const double null_var = population_variance(train_outputs);
  if (!(null_var > 0.0)) throw DegenerateTargets("msll: training outputs are constant");
  double s = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(variances[i] > 0.0))
      throw NumericalError("msll: predictive variance must be positive, got " +
                           std::to_string(variances[i]));
    s += log_loss(targets[i], predicted[i], variances[i]) - log_loss(targets[i], null_mean, null_var);
  }
  return s / static_cast<double>(targets.size());
}

ScoreReport score(std::span<const double> predicted, std::span<const double> variances,
                  std::span<const double> targets, std::span<const double> train_outputs) {
  return {rmse(predicted, targets), srmse(predicted, targets),
          msll(predicted, variances, targets, train_outputs), static_cast<int>(targets.size())};
}

}  // namespace gpprior
