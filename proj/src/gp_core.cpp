#include "gpprior/gp_core.hpp"

#include "gpprior/errors.hpp"
#include "gpprior/rng.hpp"

#include <cmath>
#include <numbers>

namespace gpprior {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2π)
constexpr double kClampFloor = -1e-8;

bool factor_lower(Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(a);
  return llt.info() == Eigen::Success;
}

const std::vector<double>& checked_inputs(const Dataset& data) {
  data.validate();
  return data.inputs;
}

}  // namespace

void Dataset::validate() const {
  if (inputs.size() != outputs.size())
    throw LengthMismatch("dataset has " + std::to_string(inputs.size()) + " inputs but " +
                         std::to_string(outputs.size()) + " outputs");
  if (inputs.empty()) throw ConfigError("dataset is empty");
  for (double x : inputs)
    if (!std::isfinite(x)) throw ConfigError("dataset contains a non-finite input");
}

Cholesky::Cholesky(const Eigen::MatrixXd& sigma, const JitterPolicy& policy) {
  if (!sigma.allFinite()) throw NumericalError("covariance matrix has non-finite entries");
  const double scale = sigma.diagonal().mean();
  std::vector<double> attempted;
  for (double rel = policy.initial; rel <= policy.max * (1.0 + 1e-9); rel *= policy.factor) {
    const double jitter = rel * scale;
    attempted.push_back(jitter);
    l_ = sigma;
    l_.diagonal().array() += jitter;
    if (factor_lower(l_)) {
      l_.triangularView<Eigen::StrictlyUpper>().setZero();
      jitter_ = jitter;
      return;
    }
  }
  throw NonPositiveDefinite(std::move(attempted));
}

Eigen::VectorXd Cholesky::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = l_.triangularView<Eigen::Lower>().solve(b);
  l_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

Eigen::MatrixXd Cholesky::solve_lower(const Eigen::MatrixXd& b) const {
  return l_.triangularView<Eigen::Lower>().solve(b);
}

Eigen::MatrixXd Cholesky::inverse() const {
  Eigen::MatrixXd l_inv = Eigen::MatrixXd::Identity(n(), n());
  l_.triangularView<Eigen::Lower>().solveInPlace(l_inv);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(n(), n());
  inv.selfadjointView<Eigen::Lower>().rankUpdate(l_inv.transpose());
  inv.triangularView<Eigen::StrictlyUpper>() = inv.transpose();
  return inv;
}

double Cholesky::log_det() const { return 2.0 * l_.diagonal().array().log().sum(); }

NlmlObjective::NlmlObjective(KernelSpec spec, Dataset data, JitterPolicy policy)
    : spec_(spec), data_(std::move(data)), policy_(policy), lags_(checked_inputs(data_)) {
  y_ = Eigen::Map<const Eigen::VectorXd>(data_.outputs.data(),
                                         static_cast<Eigen::Index>(data_.outputs.size()));
}

NlmlReport NlmlObjective::operator()(const Eigen::VectorXd& log_theta, bool with_gradient) const {
  if (static_cast<std::size_t>(log_theta.size()) != spec_.param_count())
    throw LayoutMismatch(spec_.param_count(), static_cast<std::size_t>(log_theta.size()));
  const Eigen::VectorXd values = log_theta.array().exp();
  const std::span<const double> kv(values.data(), spec_.kernel_param_count());
  const double noise_var = values(static_cast<Eigen::Index>(spec_.noise_index())) *
                           values(static_cast<Eigen::Index>(spec_.noise_index()));

  const Eigen::VectorXd k_lag = lags_.kernel_at_lags(spec_, kv);
  Eigen::MatrixXd sigma = lags_.expand(k_lag);
  sigma.diagonal().array() += noise_var;

  const Cholesky chol(sigma, policy_);
  const Eigen::VectorXd alpha = chol.solve(y_);
  const auto n = static_cast<double>(y_.size());

  NlmlReport report;
  report.jitter = chol.jitter();
  report.value = 0.5 * y_.dot(alpha) + 0.5 * chol.log_det() + 0.5 * n * kLog2Pi;
  if (!std::isfinite(report.value)) throw NumericalError("nlml is not finite");
  if (!with_gradient) return report;

  // ∂L/∂θ_i = ½ tr((Σ⁻¹ − ααᵀ) ∂Σ/∂θ_i); ∂Σ/∂θ_i is constant on each lag slot.
  Eigen::MatrixXd w = chol.inverse();
  w.noalias() -= alpha * alpha.transpose();
  const Eigen::VectorXd w_by_lag = lags_.aggregate(w);
  const Eigen::MatrixXd dk = lags_.kernel_grad_at_lags(spec_, kv);

  report.gradient.resize(log_theta.size());
  report.gradient.head(dk.cols()) = 0.5 * (dk.transpose() * w_by_lag);
  report.gradient(static_cast<Eigen::Index>(spec_.noise_index())) = w.trace() * noise_var;
  if (!report.gradient.allFinite()) throw NumericalError("nlml gradient is not finite");
  return report;
}

NlmlReport nlml(const KernelSpec& spec, const HyperParams& theta, const Dataset& data,
                bool with_gradient) {
  check_layout(spec, theta);
  return NlmlObjective(spec, data)(theta.log_values, with_gradient);
}

double nlml_value(const KernelSpec& spec, const HyperParams& theta, const Dataset& data) {
  return nlml(spec, theta, data, false).value;
}

Prediction predict(const KernelSpec& spec, const HyperParams& theta, const Dataset& train,
                   std::span<const double> test_inputs) {
  check_layout(spec, theta);
  train.validate();
  const double sn = theta.noise_std();
  Eigen::MatrixXd sigma = gram(spec, theta, train.inputs);
  sigma.diagonal().array() += sn * sn;
  const Cholesky chol(sigma);

  const Eigen::Map<const Eigen::VectorXd> y(train.outputs.data(),
                                            static_cast<Eigen::Index>(train.outputs.size()));
  const Eigen::VectorXd alpha = chol.solve(y);
  const Eigen::MatrixXd k_star = cross_gram(spec, theta, train.inputs, test_inputs);
  const Eigen::MatrixXd v = chol.solve_lower(k_star);
  const double prior_var = eval(spec, theta, 0.0, 0.0);

  Prediction out;
  out.means = k_star.transpose() * alpha;
  out.variances = (prior_var - v.colwise().squaredNorm().array()).matrix().transpose();
  for (Eigen::Index i = 0; i < out.variances.size(); ++i) {
    double& var = out.variances(i);
    if (var >= 0.0) continue;
    if (var < kClampFloor)
      throw NegativeVariance("predictive variance " + std::to_string(var) +
                             " is below the clamp floor; factorization is unreliable");
    var = 0.0;
    ++out.clamped;
  }
  return out;
}

Eigen::VectorXd sample_prior(const KernelSpec& spec, const HyperParams& theta,
                             std::span<const double> inputs, bool noise, std::uint64_t seed) {
  check_layout(spec, theta);
  const Cholesky chol(gram(spec, theta, inputs));
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
  Eigen::VectorXd y = chol.lower().triangularView<Eigen::Lower>() * z;
  if (noise) {
    const double sn = theta.noise_std();
    for (Eigen::Index i = 0; i < n; ++i) y(i) += sn * normal(rng);
  }
  return y;
}

}  // namespace gpprior
