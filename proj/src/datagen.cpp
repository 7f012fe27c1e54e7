#include "gpprior/datagen.hpp"

#include "gpprior/errors.hpp"
#include "gpprior/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gpprior {

void ARMAConfig::validate() const {
  if (ar.empty()) throw ConfigError("ARMA config needs at least one AR coefficient");
  if (start_values.size() != ar.size())
    throw ConfigError("ARMA config needs one start value per AR coefficient");
  if (!(innovation_std >= 0.0)) throw ConfigError("ARMA innovation_std must be >= 0");
  if (length < 3 || static_cast<std::size_t>(length) <= ar.size())
    throw ConfigError("ARMA length must be >= 3 and exceed the AR order");
  if (burn_in < 0) throw ConfigError("ARMA burn_in must be >= 0");
  const double modulus = ar_min_root_modulus(ar);
  if (!(modulus > 1.0))
    throw NonStationary("AR polynomial has a root of modulus " + std::to_string(modulus) +
                        " (must be > 1)");
}

double ar_min_root_modulus(std::span<const double> ar) {
  // Roots of 1 − Σ φ_i z^i are reciprocals of the companion-matrix eigenvalues.
  const auto p = static_cast<Eigen::Index>(ar.size());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = ar[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd eig = companion.eigenvalues();
  double largest = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) largest = std::max(largest, std::abs(eig(i)));
  return largest == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / largest;
}

std::string to_string(SplitKind kind) {
  return kind == SplitKind::Interpolation ? "interpolation" : "extrapolation";
}

SplitKind split_from_string(const std::string& name) {
  if (name == "interpolation") return SplitKind::Interpolation;
  if (name == "extrapolation") return SplitKind::Extrapolation;
  throw ConfigError("unknown split '" + name + "' (expected interpolation or extrapolation)");
}

Dataset gen_gp_series(const KernelSpec& spec, std::span<const double> kernel_values, int n,
                      double noise_std, std::uint64_t seed) {
  if (n < 1) throw ConfigError("series length must be >= 1");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
  const bool noisy = noise_std > 0.0;
  const auto theta = HyperParams::from_values(spec, kernel_values, noisy ? noise_std : 1.0);
  Dataset data;
  for (int i = 1; i <= n; ++i) data.inputs.push_back(static_cast<double>(i));
  const Eigen::VectorXd y = sample_prior(spec, theta, data.inputs, noisy, seed);
  data.outputs.assign(y.data(), y.data() + y.size());
  return data;
}

namespace {

Dataset run_arma(const ARMAConfig& config, std::span<const double> eps) {
  const auto p = config.ar.size();
  const auto total = static_cast<std::size_t>(config.burn_in + config.length);
  std::vector<double> y(total, 0.0);
  for (std::size_t t = 0; t < p; ++t) y[t] = config.start_values[t];
  for (std::size_t t = p; t < total; ++t) {
    double v = eps[t];
    for (std::size_t i = 0; i < p; ++i) v += config.ar[i] * y[t - 1 - i];
    for (std::size_t j = 0; j < config.ma.size() && j < t; ++j) v += config.ma[j] * eps[t - 1 - j];
    y[t] = v;
  }
  Dataset data;
  for (int i = 1; i <= config.length; ++i) data.inputs.push_back(static_cast<double>(i));
  data.outputs.assign(y.end() - config.length, y.end());
  return data;
}

}  // namespace

Dataset gen_arma(const ARMAConfig& config, std::uint64_t seed) {
  config.validate();
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, config.innovation_std);
  const auto total = static_cast<std::size_t>(config.burn_in + config.length);
  std::vector<double> eps(total, 0.0);
  for (std::size_t t = config.ar.size(); t < total; ++t) eps[t] = normal(rng);
  return run_arma(config, eps);
}

Dataset gen_arma_with_innovations(const ARMAConfig& config, std::span<const double> innovations) {
  config.validate();
  const auto total = static_cast<std::size_t>(config.burn_in + config.length);
  if (innovations.size() != total)
    throw LengthMismatch("expected " + std::to_string(total) + " innovations, got " +
                         std::to_string(innovations.size()));
  std::vector<double> eps(innovations.begin(), innovations.end());
  for (std::size_t t = 0; t < config.ar.size(); ++t) eps[t] = 0.0;
  return run_arma(config, eps);
}

SplitSpec make_split(std::size_t n, SplitKind kind) {
  SplitSpec s{kind, {}, {}};
  if (kind == SplitKind::Interpolation) {
    for (std::size_t i = 0; i < n; ++i) (i % 5 == 0 ? s.test_indices : s.train_indices).push_back(i);
  } else {
    const std::size_t n_train = n * 4 / 5;
    for (std::size_t i = 0; i < n; ++i) (i < n_train ? s.train_indices : s.test_indices).push_back(i);
  }
  return s;
}

SplitData split(const Dataset& data, SplitKind kind) {
  data.validate();
  SplitData out{{}, {}, make_split(data.size(), kind)};
  for (auto i : out.spec.train_indices) {
    out.train.inputs.push_back(data.inputs[i]);
    out.train.outputs.push_back(data.outputs[i]);
  }
  for (auto i : out.spec.test_indices) {
    out.test.inputs.push_back(data.inputs[i]);
    out.test.outputs.push_back(data.outputs[i]);
  }
  return out;
}

std::vector<double> psi_weights(const ARMAConfig& config, int count) {
  std::vector<double> psi(static_cast<std::size_t>(std::max(count, 0)), 0.0);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    double v = j == 0 ? 1.0 : (j <= config.ma.size() ? config.ma[j - 1] : 0.0);
    for (std::size_t i = 1; i <= std::min(j, config.ar.size()); ++i) v += config.ar[i - 1] * psi[j - i];
    psi[j] = v;
  }
  return psi;
}

std::vector<double> filter_innovations(const ARMAConfig& config, std::span<const double> history) {
  const auto p = config.ar.size();
  std::vector<double> eps(history.size(), 0.0);
  for (std::size_t t = p; t < history.size(); ++t) {
    double v = history[t];
    for (std::size_t i = 0; i < p; ++i) v -= config.ar[i] * history[t - 1 - i];
    for (std::size_t j = 0; j < config.ma.size() && j < t; ++j) v -= config.ma[j] * eps[t - 1 - j];
    eps[t] = v;
  }
  return eps;
}

Prediction arma_forecast(const ARMAConfig& config, std::span<const double> history, int horizon) {
  config.validate();
  const auto p = config.ar.size();
  if (history.size() < std::max<std::size_t>(2, p)) throw ConfigError("ARMA history too short");
  if (horizon < 1) throw ConfigError("forecast horizon must be >= 1");

  const std::vector<double> eps = filter_innovations(config, history);
  const auto t_end = history.size();
  std::vector<double> y(history.begin(), history.end());
  std::vector<double> e(eps);
  Prediction out;
  out.means.resize(horizon);
  out.variances.resize(horizon);
  const std::vector<double> psi = psi_weights(config, horizon);
  double cumulative = 0.0;
  for (int h = 0; h < horizon; ++h) {
    const std::size_t t = t_end + static_cast<std::size_t>(h);
    double v = 0.0;
    for (std::size_t i = 0; i < p; ++i) v += config.ar[i] * y[t - 1 - i];
    for (std::size_t j = 0; j < config.ma.size() && j < t; ++j) v += config.ma[j] * e[t - 1 - j];
    y.push_back(v);
    e.push_back(0.0);  // future innovations at their mean
    cumulative += psi[static_cast<std::size_t>(h)] * psi[static_cast<std::size_t>(h)];
    out.means(h) = v;
    out.variances(h) = config.innovation_std * config.innovation_std * cumulative;
  }
  return out;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  out << "x,y\n";
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", data.inputs[i], data.outputs[i]);
    out << buf;
  }
  if (!out) throw IoError(path, "write failed");
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line) || line != "x,y") throw IoError(path, "missing 'x,y' header");
  Dataset data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path, "malformed row '" + line + "'");
    try {
      data.inputs.push_back(std::stod(line.substr(0, comma)));
      data.outputs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw IoError(path, "malformed row '" + line + "'");
    }
  }
  return data;
}

}  // namespace gpprior
