#include "gpprior/priors.hpp"

#include "gpprior/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gpprior {

namespace {

constexpr double kPi = std::numbers::pi;

// Uniform on the open interval (0, 1).
double open_unit(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v = 0.0;
  while (v == 0.0) v = u(rng);
  return v;
}

double open_uniform(double lo, double hi, Rng& rng) { return lo + (hi - lo) * open_unit(rng); }

bool period_only(PriorId id) {
  return id == PriorId::P5 || id == PriorId::P6 || id == PriorId::P7 || id == PriorId::P9;
}

bool period_like(Role role) { return role == Role::Period || role == Role::SmMean; }

}  // namespace

std::string to_string(PriorId id) { return "P" + std::to_string(static_cast<int>(id)); }

PriorId prior_from_string(const std::string& label) {
  if (label.size() == 2 && label[0] == 'P' && label[1] >= '1' && label[1] <= '9')
    return static_cast<PriorId>(label[1] - '0');
  throw UnknownPriorLabel("unknown prior '" + label + "' (expected P1 ... P9)");
}

DataStats compute_stats(std::span<const double> inputs) {
  std::vector<double> x(inputs.begin(), inputs.end());
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  if (x.size() < 2) throw DegenerateInputs("need at least two distinct input locations");
  double max_gap = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) max_gap = std::max(max_gap, x[i] - x[i - 1]);
  return {1.0 / (2.0 * max_gap), x.back() - x.front()};
}

PriorAssignment PriorSpec::assignment(Role role) const {
  const auto it = by_role.find(role);
  return it == by_role.end() ? PriorAssignment::draw(PriorId::P1) : it->second;
}

void validate(const PriorSpec& prior, const Layout& layout, const DataStats& stats) {
  for (const auto& label : layout) {
    const auto a = prior.assignment(label.role);
    if (a.kind == PriorAssignment::Kind::Constant) {
      if (!(a.constant > 0.0) || !std::isfinite(a.constant))
        throw InvalidPriorAssignment("constant initial value for " + to_string(label.role) +
                                     " must be positive");
      continue;
    }
    if (a.prior == PriorId::P4)
      throw InvalidPriorAssignment("P4 (standard normal) cannot initialize the positive parameter " +
                                   to_string(label.role));
    if (period_only(a.prior) && !period_like(label.role))
      throw InvalidPriorAssignment(to_string(a.prior) + " only applies to period-like roles, not " +
                                   to_string(label.role));
    if (a.prior == PriorId::P7 && !(stats.nyq > 0.0))
      throw InvalidPriorAssignment("P7 needs a positive Nyquist frequency");
    if (a.prior == PriorId::P8 && !(stats.max_interval > 0.0 && prior.p8.mean_factor > 0.0 &&
                                    prior.p8.std_factor > 0.0))
      throw InvalidPriorAssignment("P8 needs a positive input range and positive settings");
    if (a.prior == PriorId::P9 && !(1.0 / stats.max_interval < stats.nyq))
      throw InvalidPriorAssignment("P9 support (1/Nyq, MaxI) is empty for these inputs");
  }
}

double draw_value(PriorId id, const DataStats& stats, const TruncNormalSettings& p8, Rng& rng) {
  switch (id) {
    case PriorId::P1: return open_unit(rng);
    case PriorId::P2: return std::exp(open_uniform(-1.0, 1.0, rng));
    case PriorId::P3: return std::exp(open_uniform(-10.0, 10.0, rng));
    case PriorId::P4: return std::normal_distribution<double>(0.0, 1.0)(rng);
    case PriorId::P5: return kPi / open_unit(rng);
    case PriorId::P6: return kPi / std::exp(open_uniform(-5.0, 5.0, rng));
    case PriorId::P7: return stats.nyq * open_unit(rng);
    case PriorId::P8: {
      std::normal_distribution<double> tn(p8.mean_factor * stats.max_interval,
                                          p8.std_factor * stats.max_interval);
      double inv = 0.0;
      while (!(inv > 0.0)) inv = tn(rng);
      return 1.0 / inv;
    }
    case PriorId::P9:
      return kPi / open_uniform(kPi / stats.max_interval, kPi * stats.nyq, rng);
  }
  return 0.0;
}

HyperParams draw_initial(const PriorSpec& prior, const KernelSpec& spec, const DataStats& stats,
                         std::uint64_t seed) {
  const Layout layout = spec.layout();
  validate(prior, layout, stats);
  auto rng = make_rng(seed);
  Eigen::VectorXd logs(static_cast<Eigen::Index>(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto a = prior.assignment(layout[i].role);
    double v = a.constant;
    if (a.kind == PriorAssignment::Kind::Draw) {
      v = draw_value(a.prior, stats, prior.p8, rng);
      if (a.square) v *= v;
    }
    logs(static_cast<Eigen::Index>(i)) = std::log(v);
  }
  return {std::move(logs), layout};
}

const std::vector<std::string>& ps_labels() {
  static const std::vector<std::string> labels = {"PS51", "PS61", "PS71", "PS91",
                                                  "PS58", "PS68", "PS78", "PS98"};
  return labels;
}

PriorSpec resolve_ps_combo(const std::string& label) {
  const auto& valid = ps_labels();
  if (std::find(valid.begin(), valid.end(), label) == valid.end()) {
    std::string list;
    for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
    throw UnknownPriorLabel("unknown prior combination '" + label + "' (valid: " + list + ")");
  }
  PriorSpec spec;
  spec.ps_label = label;
  spec.by_role[Role::SmMean] = PriorAssignment::draw(static_cast<PriorId>(label[2] - '0'));
  spec.by_role[Role::SmVariance] = PriorAssignment::squared(static_cast<PriorId>(label[3] - '0'));
  return spec;
}

}  // namespace gpprior
