#include "gpprior/optim.hpp"

#include "gpprior/errors.hpp"
#include "gpprior/parallel.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace gpprior {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Largest first trial move in any log-parameter; the line search may extend it.
constexpr double kMaxInitialMove = 5.0;

struct Point {
  double alpha = 0.0;
  double f = kInf;
  double slope = 0.0;  // directional derivative φ'(α)
  Eigen::VectorXd x;
  Eigen::VectorXd g;

  bool finite() const { return std::isfinite(f) && std::isfinite(slope); }
};

// Minimizer of the cubic matching value and slope at both ends; NaN when
// the fit is degenerate.
double cubic_minimizer(const Point& a, const Point& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (!(disc >= 0.0)) return std::nan("");
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  return b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
}

class Minimizer {
public:
  Minimizer(const Objective& objective, const CGConfig& config)
      : objective_(objective), config_(config) {}

  int evals() const { return evals_; }
  bool budget_left() const { return evals_ < config_.max_evals; }

  Point evaluate(const Eigen::VectorXd& x) {
    Point p;
    p.x = x;
    p.g = Eigen::VectorXd::Zero(x.size());
    ++evals_;
    try {
      p.f = objective_(x, p.g);
      if (!p.g.allFinite()) p.f = kInf;
    } catch (const NumericalError&) {
      p.f = kInf;
    }
    return p;
  }

  enum class SearchResult { Accepted, Failed, Infeasible, OutOfBudget };

  // Strong-Wolfe line search from `start` along `dir`. On Accepted (or a
  // sufficient-decrease fallback under OutOfBudget/Failed) `out` holds the step.
  SearchResult line_search(const Point& start, const Eigen::VectorXd& dir, double alpha0,
                           Point& out) {
    const double f0 = start.f;
    const double s0 = start.slope;
    const double c1 = config_.wolfe_c1, c2 = config_.wolfe_c2;
    auto at = [&](double alpha) {
      Point p = evaluate(start.x + alpha * dir);
      p.alpha = alpha;
      p.slope = p.finite() ? p.g.dot(dir) : 0.0;
      return p;
    };
    auto sufficient = [&](const Point& p) { return p.f <= f0 + c1 * p.alpha * s0; };
    auto curvature = [&](const Point& p) { return std::abs(p.slope) <= -c2 * s0; };

    Point prev = start;
    prev.alpha = 0.0;
    double alpha = alpha0;
    double alpha_cap = kInf;  // smallest step known to be infeasible
    bool any_finite = false;
    std::optional<Point> lo, hi;

    for (int step = 0; step < config_.max_linesearch_steps; ++step) {
      if (!budget_left()) return fallback(prev, out, SearchResult::OutOfBudget);
      Point p = at(alpha);
      if (!p.finite()) {
        alpha_cap = alpha;
        alpha = prev.alpha + 0.5 * (alpha - prev.alpha);
        continue;
      }
      any_finite = true;
      if (!sufficient(p) || (step > 0 && p.f >= prev.f)) {
        lo = prev;
        hi = p;
        break;
      }
      if (curvature(p)) {
        out = std::move(p);
        return SearchResult::Accepted;
      }
      if (p.slope >= 0.0) {
        lo = p;
        hi = prev;
        break;
      }
      double next = cubic_minimizer(prev, p);
      const double upper = std::min(10.0 * p.alpha, alpha_cap);
      if (!std::isfinite(next) || next < 1.1 * p.alpha || next > upper)
        next = std::min(4.0 * p.alpha, 0.5 * (p.alpha + upper));
      prev = std::move(p);
      alpha = next;
    }
    if (!lo) {
      if (!any_finite && prev.alpha == 0.0) return SearchResult::Infeasible;
      return fallback(prev, out, SearchResult::Failed);
    }

    // zoom: lo satisfies sufficient decrease with the lower value, and the
    // minimizer lies between lo and hi.
    for (int step = 0; step < config_.max_linesearch_steps; ++step) {
      if (!budget_left()) return fallback(*lo, out, SearchResult::OutOfBudget);
      const double a = lo->alpha, b = hi->alpha;
      const double width = std::abs(b - a);
      if (width <= 1e-14 * std::max(1.0, std::abs(a))) break;
      double trial = hi->finite() ? cubic_minimizer(*lo, *hi) : std::nan("");
      const double lower_bound = std::min(a, b) + 0.01 * width;
      const double upper_bound = std::max(a, b) - 0.01 * width;
      if (!std::isfinite(trial) || trial < lower_bound || trial > upper_bound) trial = 0.5 * (a + b);
      Point p = at(trial);
      if (!p.finite()) {
        hi = std::move(p);
        continue;
      }
      if (!sufficient(p) || p.f >= lo->f) {
        hi = std::move(p);
        continue;
      }
      if (curvature(p)) {
        out = std::move(p);
        return SearchResult::Accepted;
      }
      if (p.slope * (hi->alpha - lo->alpha) >= 0.0) hi = lo;
      lo = std::move(p);
    }
    return fallback(*lo, out, SearchResult::Failed);
  }

private:
  // A step that only satisfies sufficient decrease still makes progress.
  static SearchResult fallback(const Point& best, Point& out, SearchResult why) {
    if (best.alpha > 0.0) {
      out = best;
      return SearchResult::Accepted;
    }
    return why;
  }

  const Objective& objective_;
  const CGConfig& config_;
  int evals_ = 0;
};

}  // namespace

void CGConfig::validate() const {
  if (max_evals < 1) throw ConfigError("optimizer max_evals must be >= 1");
  if (!(grad_tol > 0.0)) throw ConfigError("optimizer grad_tol must be positive");
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0))
    throw ConfigError("optimizer needs 0 < wolfe_c1 < wolfe_c2 < 1");
  if (max_linesearch_steps < 1) throw ConfigError("optimizer max_linesearch_steps must be >= 1");
}

std::string to_string(RestartStatus status) {
  switch (status) {
    case RestartStatus::Converged: return "Converged";
    case RestartStatus::BudgetExhausted: return "BudgetExhausted";
    case RestartStatus::LineSearchFailed: return "LineSearchFailed";
    case RestartStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

bool RestartResult::failed() const noexcept {
  return status == RestartStatus::NumericalFailure || !std::isfinite(nlml_opt);
}

RestartResult minimize_cg(const Objective& objective, const Eigen::VectorXd& theta0,
                          const CGConfig& config) {
  config.validate();
  Minimizer m(objective, config);
  RestartResult result;
  result.theta_init = theta0;
  result.theta_opt = theta0;

  Point cur = m.evaluate(theta0);
  result.nlml_opt = cur.f;
  if (!std::isfinite(cur.f)) {
    result.status = RestartStatus::NumericalFailure;
    result.evals = m.evals();
    return result;
  }
  result.trace.push_back({cur.x, cur.f});

  Eigen::VectorXd dir = -cur.g;
  double prev_step = 0.0, prev_slope = 0.0;
  bool first = true;

  while (true) {
    if (cur.g.lpNorm<Eigen::Infinity>() < config.grad_tol) {
      result.status = RestartStatus::Converged;
      break;
    }
    if (!m.budget_left()) {
      result.status = RestartStatus::BudgetExhausted;
      break;
    }
    cur.slope = cur.g.dot(dir);
    bool steepest = false;
    if (!(cur.slope < 0.0)) {
      dir = -cur.g;
      cur.slope = -cur.g.squaredNorm();
      steepest = true;
    }
    double alpha0 = first ? std::min(1.0, 1.0 / cur.g.lpNorm<Eigen::Infinity>())
                          : prev_step * prev_slope / cur.slope;
    if (!std::isfinite(alpha0) || alpha0 <= 0.0) alpha0 = 1.0;
    alpha0 = std::min(alpha0, kMaxInitialMove / dir.lpNorm<Eigen::Infinity>());

    Point next;
    auto outcome = m.line_search(cur, dir, alpha0, next);
    if (outcome != Minimizer::SearchResult::Accepted && !steepest &&
        outcome != Minimizer::SearchResult::OutOfBudget) {
      // retry once along the gradient before giving up
      dir = -cur.g;
      cur.slope = -cur.g.squaredNorm();
      steepest = true;
      outcome = m.line_search(cur, dir, std::min(1.0, 1.0 / cur.g.lpNorm<Eigen::Infinity>()), next);
    }
    if (outcome == Minimizer::SearchResult::OutOfBudget) {
      result.status = RestartStatus::BudgetExhausted;
      break;
    }
    if (outcome == Minimizer::SearchResult::Infeasible) {
      result.status = RestartStatus::NumericalFailure;
      break;
    }
    if (outcome == Minimizer::SearchResult::Failed || !(next.f < cur.f)) {
      result.status = RestartStatus::LineSearchFailed;
      break;
    }

    const double beta =
        std::max(0.0, next.g.dot(next.g - cur.g) / cur.g.squaredNorm());
    prev_step = next.alpha;
    prev_slope = cur.slope;
    dir = -next.g + beta * dir;
    cur = std::move(next);
    result.trace.push_back({cur.x, cur.f});
    result.theta_opt = cur.x;
    result.nlml_opt = cur.f;
    first = false;
  }
  result.evals = m.evals();
  return result;
}

Objective make_objective(const NlmlObjective& nlml) {
  return [&nlml](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    auto report = nlml(x, true);
    grad = std::move(report.gradient);
    return report.value;
  };
}

std::size_t select_winner(const std::vector<RestartResult>& restarts) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < restarts.size(); ++i) {
    if (restarts[i].failed()) continue;
    if (!best || restarts[i].nlml_opt < restarts[*best].nlml_opt) best = i;
  }
  if (!best) {
    std::vector<std::string> statuses;
    for (const auto& r : restarts) statuses.push_back(to_string(r.status));
    throw AllRestartsFailed(std::move(statuses));
  }
  return *best;
}

MultiStartOutcome multi_start_from(const KernelSpec& spec, const Dataset& data,
                                   const std::vector<Eigen::VectorXd>& starts,
                                   const CGConfig& config, int jobs) {
  config.validate();
  const NlmlObjective nlml(spec, data);
  const Objective objective = make_objective(nlml);
  MultiStartOutcome outcome{spec, std::vector<RestartResult>(starts.size()), 0};
  parallel_for(starts.size(), jobs, [&](std::size_t i) {
    outcome.restarts[i] = minimize_cg(objective, starts[i], config);
  });
  outcome.winner_index = select_winner(outcome.restarts);
  return outcome;
}

MultiStartOutcome multi_start(const KernelSpec& spec, const Dataset& data, const PriorSpec& prior,
                              int n_restarts, const CGConfig& config, std::uint64_t seed,
                              int jobs) {
  if (n_restarts < 1) throw ConfigError("n_restarts must be >= 1");
  const DataStats stats = compute_stats(data.inputs);
  std::vector<Eigen::VectorXd> starts;
  starts.reserve(static_cast<std::size_t>(n_restarts));
  for (int i = 0; i < n_restarts; ++i)
    starts.push_back(
        draw_initial(prior, spec, stats, derive_seed(seed, {static_cast<std::uint64_t>(i)})).log_values);
  return multi_start_from(spec, data, starts, config, jobs);
}

}  // namespace gpprior
