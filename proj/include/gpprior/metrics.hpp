#pragma once

#include <Eigen/Dense>

#include <span>

namespace gpprior {

struct ScoreReport {
  double rmse = 0.0;
  double srmse = 0.0;
  double msll = 0.0;
  int m = 0;
};

double rmse(std::span<const double> predicted, std::span<const double> targets);

// RMSE over the population standard deviation of the targets.
double srmse(std::span<const double> predicted, std::span<const double> targets);

// Mean Gaussian log loss minus that of a null model N(mean, var) fitted to
// the training outputs (population variance). Variances are in observation
// space, i.e. they already include the noise.
double msll(std::span<const double> predicted, std::span<const double> variances,
            std::span<const double> targets, std::span<const double> train_outputs);

// Gaussian negative log density of y under N(mean, var).
double log_loss(double y, double mean, double var);

double mean(std::span<const double> v);
double population_variance(std::span<const double> v);

ScoreReport score(std::span<const double> predicted, std::span<const double> variances,
                  std::span<const double> targets, std::span<const double> train_outputs);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace gpprior
