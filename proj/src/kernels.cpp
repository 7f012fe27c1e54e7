#include "gpprior/kernels.hpp"

#include "gpprior/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gpprior {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SE: return "SE";
    case KernelFamily::PER: return "PER";
    case KernelFamily::LP: return "LP";
    case KernelFamily::SM: return "SM";
  }
  return "?";
}

KernelFamily family_from_string(const std::string& name) {
  if (name == "SE") return KernelFamily::SE;
  if (name == "PER") return KernelFamily::PER;
  if (name == "LP") return KernelFamily::LP;
  if (name == "SM") return KernelFamily::SM;
  throw ConfigError("unknown kernel family '" + name + "' (expected SE, PER, LP or SM)");
}

std::string to_string(Role role) {
  switch (role) {
    case Role::LengthScale: return "length_scale";
    case Role::Amplitude: return "amplitude";
    case Role::Period: return "period";
    case Role::SmWeight: return "sm_weight";
    case Role::SmMean: return "sm_mean";
    case Role::SmVariance: return "sm_variance";
    case Role::Noise: return "noise";
  }
  return "?";
}

std::string param_name(KernelFamily family, const ParamLabel& label) {
  switch (label.role) {
    case Role::SmWeight:
    case Role::SmMean:
    case Role::SmVariance:
      return to_string(label.role) + "_" + std::to_string(label.index + 1);
    case Role::LengthScale:
      if (family == KernelFamily::LP) return label.index == 0 ? "length_scale_se" : "length_scale_per";
      return "length_scale";
    default:
      return to_string(label.role);
  }
}

KernelSpec KernelSpec::sm(int q) {
  if (q < 1) throw ConfigError("SM kernel needs q_components >= 1, got " + std::to_string(q));
  return KernelSpec(KernelFamily::SM, q);
}

KernelSpec KernelSpec::make(KernelFamily family, int q) {
  return family == KernelFamily::SM ? sm(q) : KernelSpec(family, 1);
}

std::size_t KernelSpec::kernel_param_count() const noexcept {
  switch (family_) {
    case KernelFamily::SE: return 2;
    case KernelFamily::PER: return 3;
    case KernelFamily::LP: return 4;
    case KernelFamily::SM: return 3 * static_cast<std::size_t>(q_);
  }
  return 0;
}

Layout KernelSpec::layout() const {
  Layout out;
  switch (family_) {
    case KernelFamily::SE:
      out = {{Role::LengthScale, 0}, {Role::Amplitude, 0}};
      break;
    case KernelFamily::PER:
      out = {{Role::LengthScale, 0}, {Role::Period, 0}, {Role::Amplitude, 0}};
      break;
    case KernelFamily::LP:
      out = {{Role::LengthScale, 0}, {Role::LengthScale, 1}, {Role::Period, 0}, {Role::Amplitude, 0}};
      break;
    case KernelFamily::SM:
      for (int q = 0; q < q_; ++q) {
        out.push_back({Role::SmWeight, q});
        out.push_back({Role::SmMean, q});
        out.push_back({Role::SmVariance, q});
      }
      break;
  }
  out.push_back({Role::Noise, 0});
  return out;
}

std::string KernelSpec::name() const {
  return family_ == KernelFamily::SM ? "SM(" + std::to_string(q_) + ")" : to_string(family_);
}

double HyperParams::noise_std() const {
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i].role == Role::Noise) return value(i);
  throw ConfigError("hyperparameter vector has no noise entry");
}

HyperParams HyperParams::from_values(const KernelSpec& spec, std::span<const double> kernel_values,
                                     double noise_std) {
  if (kernel_values.size() != spec.kernel_param_count())
    throw LayoutMismatch(spec.kernel_param_count(), kernel_values.size());
  Eigen::VectorXd logs(static_cast<Eigen::Index>(spec.param_count()));
  for (std::size_t i = 0; i < kernel_values.size(); ++i)
    logs(static_cast<Eigen::Index>(i)) = std::log(kernel_values[i]);
  logs(static_cast<Eigen::Index>(spec.noise_index())) = std::log(noise_std);
  return {std::move(logs), spec.layout()};
}

HyperParams HyperParams::from_log(const KernelSpec& spec, Eigen::VectorXd log_values) {
  if (static_cast<std::size_t>(log_values.size()) != spec.param_count())
    throw LayoutMismatch(spec.param_count(), static_cast<std::size_t>(log_values.size()));
  return {std::move(log_values), spec.layout()};
}

void check_layout(const KernelSpec& spec, const HyperParams& theta) {
  const auto expected = spec.param_count();
  if (theta.size() != expected || theta.layout.size() != expected)
    throw LayoutMismatch(expected, theta.size());
  if (theta.layout != spec.layout())
    throw ConfigError("hyperparameter roles do not match the " + spec.name() + " layout");
}

double eval_lag(const KernelSpec& spec, std::span<const double> v, double d) {
  switch (spec.family()) {
    case KernelFamily::SE: {
      const double l = v[0], sf = v[1];
      return sf * sf * std::exp(-d * d / (2.0 * l * l));
    }
    case KernelFamily::PER: {
      const double l = v[0], p = v[1], sf = v[2];
      const double s = std::sin(kPi * d / p);
      return sf * sf * std::exp(-2.0 * s * s / (l * l));
    }
    case KernelFamily::LP: {
      const double lse = v[0], lper = v[1], p = v[2], sf = v[3];
      const double s = std::sin(kPi * d / p);
      return sf * sf * std::exp(-d * d / (2.0 * lse * lse) - 2.0 * s * s / (lper * lper));
    }
    case KernelFamily::SM: {
      double k = 0.0;
      for (int q = 0; q < spec.q_components(); ++q) {
        const double w = v[3 * q], mu = v[3 * q + 1], nu = v[3 * q + 2];
        k += w * std::exp(-2.0 * kPi * kPi * d * d * nu) * std::cos(2.0 * kPi * d * mu);
      }
      return k;
    }
  }
  return 0.0;
}

void eval_lag_grad(const KernelSpec& spec, std::span<const double> v, double d,
                   std::span<double> out) {
  switch (spec.family()) {
    case KernelFamily::SE: {
      const double l = v[0];
      const double k = eval_lag(spec, v, d);
      out[0] = k * d * d / (l * l);
      out[1] = 2.0 * k;
      return;
    }
    case KernelFamily::PER: {
      const double l = v[0], p = v[1];
      const double k = eval_lag(spec, v, d);
      const double s = std::sin(kPi * d / p);
      out[0] = k * 4.0 * s * s / (l * l);
      out[1] = k * 2.0 * kPi * d * std::sin(2.0 * kPi * d / p) / (l * l * p);
      out[2] = 2.0 * k;
      return;
    }
    case KernelFamily::LP: {
      const double lse = v[0], lper = v[1], p = v[2];
      const double k = eval_lag(spec, v, d);
      const double s = std::sin(kPi * d / p);
      out[0] = k * d * d / (lse * lse);
      out[1] = k * 4.0 * s * s / (lper * lper);
      out[2] = k * 2.0 * kPi * d * std::sin(2.0 * kPi * d / p) / (lper * lper * p);
      out[3] = 2.0 * k;
      return;
    }
    case KernelFamily::SM: {
      for (int q = 0; q < spec.q_components(); ++q) {
        const double w = v[3 * q], mu = v[3 * q + 1], nu = v[3 * q + 2];
        const double e = std::exp(-2.0 * kPi * kPi * d * d * nu);
        const double arg = 2.0 * kPi * d * mu;
        const double kq = w * e * std::cos(arg);
        out[3 * q] = kq;
        out[3 * q + 1] = -w * e * std::sin(arg) * arg;
        out[3 * q + 2] = -2.0 * kPi * kPi * d * d * nu * kq;
      }
      return;
    }
  }
}

namespace {

std::vector<double> kernel_values(const KernelSpec& spec, const HyperParams& theta) {
  check_layout(spec, theta);
  std::vector<double> v(spec.kernel_param_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = theta.value(i);
  return v;
}

}  // namespace

double eval(const KernelSpec& spec, const HyperParams& theta, double x, double x_prime) {
  const auto v = kernel_values(spec, theta);
  return eval_lag(spec, v, x - x_prime);
}

Eigen::MatrixXd gram(const KernelSpec& spec, const HyperParams& theta,
                     std::span<const double> inputs) {
  const auto v = kernel_values(spec, theta);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = eval_lag(spec, v, 0.0);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      k(i, j) = eval_lag(spec, v, inputs[i] - inputs[j]);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const HyperParams& theta,
                           std::span<const double> a, std::span<const double> b) {
  const auto v = kernel_values(spec, theta);
  Eigen::MatrixXd k(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index j = 0; j < k.cols(); ++j)
    for (Eigen::Index i = 0; i < k.rows(); ++i) k(i, j) = eval_lag(spec, v, a[i] - b[j]);
  return k;
}

Eigen::MatrixXd gram_grad(const KernelSpec& spec, const HyperParams& theta,
                          std::span<const double> inputs, std::size_t param_index) {
  const auto v = kernel_values(spec, theta);
  const auto n = static_cast<Eigen::Index>(inputs.size());
  if (param_index >= spec.param_count()) throw IndexOutOfRange(param_index, spec.param_count());
  if (param_index == spec.noise_index()) {
    const double sn = theta.noise_std();
    return Eigen::MatrixXd::Identity(n, n) * (2.0 * sn * sn);
  }
  std::vector<double> g(spec.kernel_param_count());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    eval_lag_grad(spec, v, 0.0, g);
    out(j, j) = g[param_index];
    for (Eigen::Index i = j + 1; i < n; ++i) {
      eval_lag_grad(spec, v, inputs[i] - inputs[j], g);
      out(i, j) = g[param_index];
      out(j, i) = out(i, j);
    }
  }
  return out;
}

LagIndex::LagIndex(std::span<const double> inputs) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  lags_.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j; i < n; ++i) lags_.push_back(std::abs(inputs[i] - inputs[j]));
  std::sort(lags_.begin(), lags_.end());
  lags_.erase(std::unique(lags_.begin(), lags_.end()), lags_.end());

  slots_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double d = std::abs(inputs[i] - inputs[j]);
      const auto it = std::lower_bound(lags_.begin(), lags_.end(), d);
      slots_(i, j) = static_cast<int>(it - lags_.begin());
      slots_(j, i) = slots_(i, j);
    }
  }
}

Eigen::VectorXd LagIndex::kernel_at_lags(const KernelSpec& spec, std::span<const double> values) const {
  Eigen::VectorXd k(static_cast<Eigen::Index>(lags_.size()));
  for (std::size_t l = 0; l < lags_.size(); ++l)
    k(static_cast<Eigen::Index>(l)) = eval_lag(spec, values, lags_[l]);
  return k;
}

Eigen::MatrixXd LagIndex::kernel_grad_at_lags(const KernelSpec& spec,
                                              std::span<const double> values) const {
  const auto p = spec.kernel_param_count();
  Eigen::MatrixXd g(static_cast<Eigen::Index>(lags_.size()), static_cast<Eigen::Index>(p));
  std::vector<double> row(p);
  for (std::size_t l = 0; l < lags_.size(); ++l) {
    eval_lag_grad(spec, values, lags_[l], row);
    for (std::size_t i = 0; i < p; ++i)
      g(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i)) = row[i];
  }
  return g;
}

Eigen::MatrixXd LagIndex::expand(const Eigen::VectorXd& per_lag) const {
  const auto n = slots_.rows();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = per_lag(slots_(i, j));
  return m;
}

Eigen::VectorXd LagIndex::aggregate(const Eigen::MatrixXd& m) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lags_.size()));
  const auto n = slots_.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(slots_(i, j)) += m(i, j);
  return out;
}

}  // namespace gpprior
