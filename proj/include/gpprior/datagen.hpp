#pragma once

#include "gpprior/gp_core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gpprior {

// y_t = Σ φ_i y_{t−i} + ε_t + Σ ψ_j ε_{t−j}, ε_t ~ N(0, innovation_std²).
struct ARMAConfig {
  std::vector<double> ar = {0.8, -0.45};
  std::vector<double> ma = {-0.5};
  double innovation_std = 1.0;
  std::vector<double> start_values = {1.0, 1.0};
  int length = 400;
  int burn_in = 0;  // extra leading samples simulated and discarded

  // Throws NonStationary unless every root of 1 − φ1 z − ... − φp z^p lies
  // outside the unit circle; ConfigError for malformed fields.
  void validate() const;
  bool operator==(const ARMAConfig&) const = default;
};

// Smallest modulus among the roots of the AR polynomial.
double ar_min_root_modulus(std::span<const double> ar);

enum class SplitKind { Interpolation, Extrapolation };

std::string to_string(SplitKind kind);
SplitKind split_from_string(const std::string& name);

// Zero-based positions into the full dataset.
struct SplitSpec {
  SplitKind kind;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

struct SplitData {
  Dataset train;
  Dataset test;
  SplitSpec spec;
};

// Inputs x_i = i (i = 1..n), outputs a zero-mean GP draw plus N(0, noise_std²).
// `kernel_values` are the kernel parameters on the original scale.
Dataset gen_gp_series(const KernelSpec& spec, std::span<const double> kernel_values, int n,
                      double noise_std, std::uint64_t seed);

Dataset gen_arma(const ARMAConfig& config, std::uint64_t seed);
// Same recursion with caller-supplied innovations ε_1..ε_n; ε_t for t within
// the start values is ignored (treated as zero).
Dataset gen_arma_with_innovations(const ARMAConfig& config, std::span<const double> innovations);

// Interpolation: every position ≡ 0 (mod 5) is a test point (x = 1, 6, 11, ...).
// Extrapolation: the first 80% train, the rest test.
SplitSpec make_split(std::size_t n, SplitKind kind);
SplitData split(const Dataset& data, SplitKind kind);

// ψ-weights of the MA(∞) representation, ψ_0 = 1.
std::vector<double> psi_weights(const ARMAConfig& config, int count);

// Innovations ε_t recovered from a series with zero initial conditions.
std::vector<double> filter_innovations(const ARMAConfig& config, std::span<const double> history);

// h-step forecasts (h = 1..horizon) from the true model. The returned
// variances are observation-space forecast variances.
Prediction arma_forecast(const ARMAConfig& config, std::span<const double> history, int horizon);

void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

}  // namespace gpprior
