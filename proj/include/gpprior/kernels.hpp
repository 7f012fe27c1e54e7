#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace gpprior {

enum class KernelFamily { SE, PER, LP, SM };

enum class Role { LengthScale, Amplitude, Period, SmWeight, SmMean, SmVariance, Noise };

// One slot of a hyperparameter vector. `index` is the mixture component for
// SM roles, 0/1 to tell the SE and PER length scales apart in LP, else 0.
struct ParamLabel {
  Role role;
  int index = 0;

  bool operator==(const ParamLabel&) const = default;
};

using Layout = std::vector<ParamLabel>;

std::string to_string(KernelFamily family);
KernelFamily family_from_string(const std::string& name);
std::string to_string(Role role);

// Column/field name for a slot, e.g. "length_scale", "period", "sm_mean_2".
std::string param_name(KernelFamily family, const ParamLabel& label);

class KernelSpec {
public:
  static KernelSpec se() { return KernelSpec(KernelFamily::SE, 1); }
  static KernelSpec per() { return KernelSpec(KernelFamily::PER, 1); }
  static KernelSpec lp() { return KernelSpec(KernelFamily::LP, 1); }
  static KernelSpec sm(int q);
  static KernelSpec make(KernelFamily family, int q = 1);

  KernelFamily family() const noexcept { return family_; }
  int q_components() const noexcept { return q_; }

  // Kernel parameters only (SE 2, PER 3, LP 4, SM 3Q).
  std::size_t kernel_param_count() const noexcept;
  // Kernel parameters followed by the single trailing noise slot.
  std::size_t param_count() const noexcept { return kernel_param_count() + 1; }
  std::size_t noise_index() const noexcept { return kernel_param_count(); }

  // SE [ℓ, s_f]; PER [ℓ, p, s_f]; LP [ℓ_se, ℓ_per, p, s_f];
  // SM [w_1, μ_1, ν_1, ..., w_Q, μ_Q, ν_Q]; then σ_n.
  Layout layout() const;
  std::string name() const;

  bool operator==(const KernelSpec&) const = default;

private:
  KernelSpec(KernelFamily family, int q) : family_(family), q_(q) {}
  KernelFamily family_;
  int q_;
};

// Hyperparameters in natural-log space, aligned with a layout.
struct HyperParams {
  Eigen::VectorXd log_values;
  Layout layout;

  std::size_t size() const noexcept { return static_cast<std::size_t>(log_values.size()); }
  double value(std::size_t i) const { return std::exp(log_values(static_cast<Eigen::Index>(i))); }
  Eigen::VectorXd values() const { return log_values.array().exp(); }
  double noise_std() const;

  // Kernel parameters then σ_n, all given on the original (positive) scale.
  static HyperParams from_values(const KernelSpec& spec, std::span<const double> kernel_values,
                                 double noise_std);
  static HyperParams from_log(const KernelSpec& spec, Eigen::VectorXd log_values);
};

// Throws LayoutMismatch unless theta's layout is the one spec produces.
void check_layout(const KernelSpec& spec, const HyperParams& theta);

// k(x, x') for the kernel part only (noise is added by gp_core).
double eval(const KernelSpec& spec, const HyperParams& theta, double x, double x_prime);

// Kernel value as a function of the lag d = x - x'. `values` holds the
// kernel parameters on the original scale.
double eval_lag(const KernelSpec& spec, std::span<const double> values, double d);

// ∂k(d)/∂log θ_i for every kernel parameter i, written into `out`.
void eval_lag_grad(const KernelSpec& spec, std::span<const double> values, double d,
                   std::span<double> out);

Eigen::MatrixXd gram(const KernelSpec& spec, const HyperParams& theta,
                     std::span<const double> inputs);

// K(A, B) with rows indexed by `a` and columns by `b`.
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const HyperParams& theta,
                           std::span<const double> a, std::span<const double> b);

// ∂Σ/∂log θ_i with Σ = K + σ_n² I.
Eigen::MatrixXd gram_grad(const KernelSpec& spec, const HyperParams& theta,
                          std::span<const double> inputs, std::size_t param_index);

// Distinct |x_i - x_j| values of an input set plus a map from each matrix
// entry to its lag slot. On a regular grid there are O(n) distinct lags, so
// Gram matrices and likelihood gradients are evaluated once per lag.
class LagIndex {
public:
  explicit LagIndex(std::span<const double> inputs);

  std::size_t n() const noexcept { return static_cast<std::size_t>(slots_.rows()); }
  const std::vector<double>& lags() const noexcept { return lags_; }
  const Eigen::MatrixXi& slots() const noexcept { return slots_; }

  // Kernel values at every distinct lag.
  Eigen::VectorXd kernel_at_lags(const KernelSpec& spec, std::span<const double> values) const;
  // (distinct lags) × (kernel params) matrix of log-parameter derivatives.
  Eigen::MatrixXd kernel_grad_at_lags(const KernelSpec& spec, std::span<const double> values) const;

  Eigen::MatrixXd expand(const Eigen::VectorXd& per_lag) const;
  // Sums the entries of a symmetric n×n matrix by lag slot.
  Eigen::VectorXd aggregate(const Eigen::MatrixXd& m) const;

private:
  std::vector<double> lags_;
  Eigen::MatrixXi slots_;
};

}  // namespace gpprior
