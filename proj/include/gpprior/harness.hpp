#pragma once

#include "gpprior/datagen.hpp"
#include "gpprior/kernels.hpp"
#include "gpprior/optim.hpp"
#include "gpprior/priors.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gpprior {

enum class ExperimentId { SeRecovery, PerSensitivity, ArmaLp, ArmaSm };

std::string to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::SeRecovery;
  KernelSpec kernel = KernelSpec::se();
  std::vector<double> theta_act;            // kernel parameters of the generating GP
  std::vector<std::string> priors;          // P1..P9, or PS labels for SM
  int n_restarts = 10;
  int repetitions = 20;
  std::vector<SplitKind> splits;
  std::uint64_t seed = 20170901;
  int n_points = 400;
  double noise_std = 0.1;                   // observation noise of generated GP data
  ARMAConfig arma;
  CGConfig optimizer;
  TruncNormalSettings p8;
  std::string output_dir = "gpprior_out";
  bool write_traces = true;
  bool write_data = false;

  // Every field at its default for the given experiment.
  static ExperimentConfig defaults(ExperimentId id);
  bool uses_arma() const noexcept;
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// JSON config documents. Missing fields take the experiment's defaults, so
// {"experiment": "se_recovery"} is a complete config.
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// Prior assignment used for `label` in this experiment. SE: the label covers
// ℓ and s_f; PER/LP: the period; SM: a PS label, with constant weights.
PriorSpec prior_for(const ExperimentConfig& config, const std::string& label,
                    const Dataset& train);

// std(train_outputs) / q for every component (population std).
std::vector<double> sm_weight_init(std::span<const double> train_outputs, int q);

inline constexpr const char* kBaselineLabel = "arma_true";

struct RunRecord {
  int repetition = 0;
  std::string prior;
  SplitKind split = SplitKind::Interpolation;
  bool failed = false;
  std::string failure;
  std::vector<std::string> param_names;
  std::vector<double> theta_final;  // original scale
  double nlml_final = 0.0;
  double srmse = 0.0;
  double msll = 0.0;
  std::optional<MultiStartOutcome> outcome;  // empty for the ARMA baseline

  bool baseline() const { return prior == kBaselineLabel; }
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n − 1)
};

Summary summarize(std::span<const double> values);

struct GroupReport {
  std::string prior;
  SplitKind split = SplitKind::Interpolation;
  int count = 0;   // repetitions included in the aggregates
  int failed = 0;  // repetitions excluded after AllRestartsFailed
  std::vector<std::string> param_names;
  std::vector<Summary> params;
  Summary nlml;
  Summary srmse;
  Summary msll;

  std::optional<Summary> param(const std::string& name) const;
};

struct ReportTable {
  std::string experiment;
  std::vector<double> theta_act;
  std::vector<GroupReport> groups;

  const GroupReport& group(const std::string& prior, SplitKind split) const;
};

struct ExperimentResult {
  ReportTable table;
  std::vector<RunRecord> runs;
};

struct RunOptions {
  int jobs = 1;
  bool write_outputs = true;
  // Restrict to one repetition (used by `gpprior trace`).
  std::optional<int> only_repetition;
};

// Data for repetition r of the experiment (full series, before splitting).
Dataset generate_repetition_data(const ExperimentConfig& config, int repetition);

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

ReportTable aggregate(const ExperimentConfig& config, const std::vector<RunRecord>& runs);

// CSV with columns restart,step,log_<param>...,nlml,is_final.
void emit_trace(const MultiStartOutcome& outcome, const std::string& path);

void write_runs_csv(const ExperimentConfig& config, const std::vector<RunRecord>& runs,
                    const std::string& path);
void write_report_json(const ReportTable& table, const std::string& path);
void write_report_csv(const ReportTable& table, const std::string& path);

// "%.17g"
std::string format_double(double v);

}  // namespace gpprior
