#pragma once

#include "gpprior/kernels.hpp"
#include "gpprior/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gpprior {

// Initialization priors for restart starting values.
//   P1  θ ~ U(0, 1)               P6  log(π/θ) ~ U(−5, 5)
//   P2  log θ ~ U(−1, 1)          P7  θ ~ U(0, Nyq)
//   P3  log θ ~ U(−10, 10)        P8  1/θ ~ N⁺(MaxI, MaxI/4)
//   P4  θ ~ N(0, 1)               P9  π/θ ~ U(π/MaxI, π·Nyq)
//   P5  π/θ ~ U(0, 1)
// P5, P6, P7 and P9 describe periods and only apply to period-like roles.
enum class PriorId { P1 = 1, P2, P3, P4, P5, P6, P7, P8, P9 };

std::string to_string(PriorId id);
PriorId prior_from_string(const std::string& label);

struct DataStats {
  double nyq = 0.0;           // 1 / (2 · largest gap between sorted distinct inputs)
  double max_interval = 0.0;  // max(x) − min(x)
};

DataStats compute_stats(std::span<const double> inputs);

struct TruncNormalSettings {
  double mean_factor = 1.0;   // mean = mean_factor · MaxI
  double std_factor = 0.25;   // std = std_factor · MaxI

  bool operator==(const TruncNormalSettings&) const = default;
};

struct PriorAssignment {
  enum class Kind { Draw, Constant };

  Kind kind = Kind::Draw;
  PriorId prior = PriorId::P1;
  // Draw √θ from the prior and store its square (used for SM variances).
  bool square = false;
  double constant = 1.0;

  static PriorAssignment draw(PriorId id) { return {Kind::Draw, id, false, 1.0}; }
  static PriorAssignment squared(PriorId id) { return {Kind::Draw, id, true, 1.0}; }
  static PriorAssignment fixed(double value) { return {Kind::Constant, PriorId::P1, false, value}; }

  bool operator==(const PriorAssignment&) const = default;
};

struct PriorSpec {
  // Roles without an entry are drawn from P1.
  std::map<Role, PriorAssignment> by_role;
  std::optional<std::string> ps_label;
  TruncNormalSettings p8;

  PriorAssignment assignment(Role role) const;
  bool operator==(const PriorSpec&) const = default;
};

// Throws InvalidPriorAssignment for P4 on positive roles, period-only priors
// on other roles, or a data-derived prior whose support is empty.
void validate(const PriorSpec& prior, const Layout& layout, const DataStats& stats);

// One draw on the original scale.
double draw_value(PriorId id, const DataStats& stats, const TruncNormalSettings& p8, Rng& rng);

HyperParams draw_initial(const PriorSpec& prior, const KernelSpec& spec, const DataStats& stats,
                         std::uint64_t seed);

// PSab: μ_q from prior a, √ν_q from prior b.
PriorSpec resolve_ps_combo(const std::string& label);
const std::vector<std::string>& ps_labels();

}  // namespace gpprior
