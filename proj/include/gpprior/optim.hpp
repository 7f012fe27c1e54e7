#pragma once

#include "gpprior/gp_core.hpp"
#include "gpprior/priors.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gpprior {

struct CGConfig {
  int max_evals = 100;       // value+gradient evaluations per restart, line search included
  double grad_tol = 1e-6;    // stop when ‖∇‖∞ < grad_tol
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.1;
  int max_linesearch_steps = 20;

  void validate() const;
  bool operator==(const CGConfig&) const = default;
};

enum class RestartStatus { Converged, BudgetExhausted, LineSearchFailed, NumericalFailure };

std::string to_string(RestartStatus status);

struct TracePoint {
  Eigen::VectorXd theta;
  double value;
};

struct RestartResult {
  Eigen::VectorXd theta_init;
  Eigen::VectorXd theta_opt;
  double nlml_opt = 0.0;
  std::vector<TracePoint> trace;  // every accepted iterate, starting point first
  RestartStatus status = RestartStatus::NumericalFailure;
  int evals = 0;

  bool failed() const noexcept;
};

// Returns f(x) and writes ∇f(x) into grad. Throwing gpprior::NumericalError
// or returning a non-finite value marks the point as infeasible.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Polak–Ribière+ nonlinear conjugate gradient with a strong-Wolfe line search.
RestartResult minimize_cg(const Objective& objective, const Eigen::VectorXd& theta0,
                          const CGConfig& config);

struct MultiStartOutcome {
  KernelSpec spec;
  std::vector<RestartResult> restarts;
  std::size_t winner_index = 0;

  const RestartResult& winner() const { return restarts.at(winner_index); }
  HyperParams winner_params() const { return HyperParams::from_log(spec, winner().theta_opt); }
};

Objective make_objective(const NlmlObjective& nlml);

// Lowest finite nlml among non-failed restarts; ties go to the lowest index.
// Throws AllRestartsFailed when nothing qualifies.
std::size_t select_winner(const std::vector<RestartResult>& restarts);

// Runs one restart per starting point (given in log space).
MultiStartOutcome multi_start_from(const KernelSpec& spec, const Dataset& data,
                                   const std::vector<Eigen::VectorXd>& starts,
                                   const CGConfig& config, int jobs = 1);

// Restart i starts from draw_initial(prior, ..., derive_seed(seed, {i})).
MultiStartOutcome multi_start(const KernelSpec& spec, const Dataset& data, const PriorSpec& prior,
                              int n_restarts, const CGConfig& config, std::uint64_t seed,
                              int jobs = 1);

}  // namespace gpprior
