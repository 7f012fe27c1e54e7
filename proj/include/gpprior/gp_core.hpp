#pragma once

#include "gpprior/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace gpprior {

struct Dataset {
  std::vector<double> inputs;
  std::vector<double> outputs;

  std::size_t size() const noexcept { return inputs.size(); }
  // Throws unless lengths match, n >= 1 and every input is finite.
  void validate() const;
};

struct Prediction {
  Eigen::VectorXd means;
  // Latent-function variances; observation noise is added by the metrics caller.
  Eigen::VectorXd variances;
  // Number of slightly negative variances that were clamped to zero.
  int clamped = 0;
};

struct NlmlReport {
  double value = 0.0;
  Eigen::VectorXd gradient;  // empty when not requested
  double jitter = 0.0;       // diagonal jitter added to the factorized Σ
};

// Diagonal jitter schedule, relative to mean(diag Σ).
struct JitterPolicy {
  double initial = 1e-10;
  double max = 1e-4;
  double factor = 10.0;
};

// Lower Cholesky factor of Σ + jitter·I, jitter chosen by escalation.
class Cholesky {
public:
  explicit Cholesky(const Eigen::MatrixXd& sigma, const JitterPolicy& policy = {});

  const Eigen::MatrixXd& lower() const noexcept { return l_; }
  double jitter() const noexcept { return jitter_; }
  Eigen::Index n() const noexcept { return l_.rows(); }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // L⁻¹ B
  Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& b) const;
  Eigen::MatrixXd inverse() const;
  double log_det() const;

private:
  Eigen::MatrixXd l_;
  double jitter_ = 0.0;
};

double nlml_value(const KernelSpec& spec, const HyperParams& theta, const Dataset& data);
NlmlReport nlml(const KernelSpec& spec, const HyperParams& theta, const Dataset& data,
                bool with_gradient = true);

// Negative log marginal likelihood bound to one dataset. Caches the lag
// structure of the inputs so repeated evaluations during optimization only
// pay for the factorization.
class NlmlObjective {
public:
  NlmlObjective(KernelSpec spec, Dataset data, JitterPolicy policy = {});

  NlmlReport operator()(const Eigen::VectorXd& log_theta, bool with_gradient = true) const;

  const KernelSpec& spec() const noexcept { return spec_; }
  const Dataset& data() const noexcept { return data_; }

private:
  KernelSpec spec_;
  Dataset data_;
  JitterPolicy policy_;
  LagIndex lags_;
  Eigen::VectorXd y_;
};

Prediction predict(const KernelSpec& spec, const HyperParams& theta, const Dataset& train,
                   std::span<const double> test_inputs);

// y = L z (+ σ_n z') with L the Cholesky factor of K on `inputs`.
Eigen::VectorXd sample_prior(const KernelSpec& spec, const HyperParams& theta,
                             std::span<const double> inputs, bool noise, std::uint64_t seed);

}  // namespace gpprior
