#pragma once

// Reference implementations used to cross-check the production paths.
// Everything here is deliberately naive: Gram matrices are filled entry by
// entry through kernels::eval and Σ⁻¹ comes from a dense LU inverse.

#include "gpprior/gp_core.hpp"

#include <functional>

namespace gpprior::oracle {

// Σ = K + (σ_n² + jitter) I built pointwise.
Eigen::MatrixXd dense_sigma(const KernelSpec& spec, const HyperParams& theta,
                            const std::vector<double>& inputs, double jitter);

double dense_nlml(const KernelSpec& spec, const HyperParams& theta, const Dataset& data,
                  double jitter = 0.0);

Prediction dense_predict(const KernelSpec& spec, const HyperParams& theta, const Dataset& train,
                         const std::vector<double>& test_inputs, double jitter = 0.0);

// Central differences of f at x with step h in every coordinate.
Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6);

// Central-difference gradient of the dense nlml in log-parameter space.
Eigen::VectorXd fd_nlml_gradient(const KernelSpec& spec, const HyperParams& theta,
                                 const Dataset& data, double jitter = 0.0, double h = 1e-6);

// Central-difference ∂Σ/∂log θ_i of the pointwise Gram matrix.
Eigen::MatrixXd fd_gram_grad(const KernelSpec& spec, const HyperParams& theta,
                             const std::vector<double>& inputs, std::size_t param_index,
                             double h = 1e-6);

// ‖a − b‖ / max(‖a‖, ‖b‖) in the Frobenius norm; 0 when both are zero.
double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace gpprior::oracle
