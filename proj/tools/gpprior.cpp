#include "gpprior/allocator.hpp"
#include "gpprior/errors.hpp"
#include "gpprior/harness.hpp"
#include "gpprior/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using namespace gpprior;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  int jobs = 1;
};

struct TraceArgs {
  std::string config;
  std::string out;
  int repetition = 0;
  int jobs = 1;
};

struct OracleArgs {
  std::string input = "-";
  std::size_t param_index = 0;
  double step = 1e-6;
};

void print_table(const ReportTable& table) {
  std::printf("%-10s %-14s %5s %6s %12s %12s %12s\n", "prior", "split", "n", "failed", "nlml",
              "srmse", "msll");
  for (const auto& g : table.groups) {
    std::printf("%-10s %-14s %5d %6d %12.4f %12.4f %12.4f\n", g.prior.c_str(),
                to_string(g.split).c_str(), g.count, g.failed, g.nlml.mean, g.srmse.mean,
                g.msll.mean);
    for (std::size_t i = 0; i < g.param_names.size(); ++i)
      std::printf("    %-20s mean %.6g  sd %.6g\n", g.param_names[i].c_str(), g.params[i].mean,
                  g.params[i].sd);
  }
}

int cmd_run(const RunArgs& args) {
  ExperimentConfig config = load_config(args.config);
  if (!args.out.empty()) config.output_dir = args.out;
  if (args.seed) config.seed = *args.seed;
  if (args.reps) config.repetitions = *args.reps;
  RunOptions options;
  options.jobs = args.jobs;
  const ExperimentResult result = run_experiment(config, options);
  std::printf("experiment %s, %d repetitions, seed %llu\n", to_string(config.experiment).c_str(),
              config.repetitions, static_cast<unsigned long long>(config.seed));
  print_table(result.table);
  std::printf("wrote %s\n", config.output_dir.c_str());
  return 0;
}

int cmd_trace(const TraceArgs& args) {
  ExperimentConfig config = load_config(args.config);
  if (!args.out.empty()) config.output_dir = args.out;
  RunOptions options;
  options.jobs = args.jobs;
  options.write_outputs = false;
  options.only_repetition = args.repetition;
  const ExperimentResult result = run_experiment(config, options);
  const std::filesystem::path dir = std::filesystem::path(config.output_dir) / "traces";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
  for (const auto& rec : result.runs) {
    if (!rec.outcome) continue;
    const auto path = dir / (rec.prior + "_" + to_string(rec.split) + "_rep" +
                             std::to_string(rec.repetition) + ".csv");
    emit_trace(*rec.outcome, path.string());
    std::printf("%s\n", path.string().c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// oracle subcommands read one JSON document:
//   {"kernel": {"family": "SE", "q": 1}, "theta": [...kernel values, noise],
//    "x": [...], "y": [...], "test_x": [...], "jitter": 0}
// `theta` is on the original scale.

struct OracleInput {
  KernelSpec spec = KernelSpec::se();
  HyperParams theta;
  Dataset data;
  std::vector<double> test_x;
  std::optional<double> jitter;
};

OracleInput read_oracle_input(const std::string& source) {
  std::string text;
  if (source == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(source);
    if (!in) throw IoError(source, "cannot open oracle input");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  OracleInput input;
  try {
    const json j = json::parse(text);
    const json& k = j.at("kernel");
    input.spec = KernelSpec::make(family_from_string(k.at("family").get<std::string>()),
                                  k.value("q", 1));
    auto theta = j.at("theta").get<std::vector<double>>();
    if (theta.size() != input.spec.param_count())
      throw LayoutMismatch(input.spec.param_count(), theta.size());
    for (double v : theta)
      if (!(v > 0.0)) throw ConfigError("theta values must be positive");
    const double noise = theta.back();
    theta.pop_back();
    input.theta = HyperParams::from_values(input.spec, theta, noise);
    input.data.inputs = j.at("x").get<std::vector<double>>();
    input.data.outputs = j.value("y", std::vector<double>(input.data.inputs.size(), 0.0));
    input.test_x = j.value("test_x", std::vector<double>{});
    if (j.contains("jitter")) input.jitter = j.at("jitter").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid oracle input: ") + e.what());
  }
  input.data.validate();
  return input;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

int cmd_oracle_nlml(const OracleArgs& args) {
  const OracleInput in = read_oracle_input(args.input);
  const NlmlReport fast = nlml(in.spec, in.theta, in.data, false);
  const double jitter = in.jitter.value_or(fast.jitter);
  const double dense = oracle::dense_nlml(in.spec, in.theta, in.data, jitter);
  const json out = {{"nlml", fast.value},
                    {"jitter", fast.jitter},
                    {"dense_nlml", dense},
                    {"dense_jitter", jitter},
                    {"abs_diff", std::abs(fast.value - dense)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_oracle_predict(const OracleArgs& args) {
  const OracleInput in = read_oracle_input(args.input);
  const Prediction fast = predict(in.spec, in.theta, in.data, in.test_x);
  const double jitter = in.jitter.value_or(nlml(in.spec, in.theta, in.data, false).jitter);
  const Prediction dense = oracle::dense_predict(in.spec, in.theta, in.data, in.test_x, jitter);
  const json out = {{"means", to_vector(fast.means)},
                    {"variances", to_vector(fast.variances)},
                    {"dense_means", to_vector(dense.means)},
                    {"dense_variances", to_vector(dense.variances)},
                    {"mean_relative_error", oracle::relative_error(fast.means, dense.means)},
                    {"variance_relative_error", oracle::relative_error(fast.variances, dense.variances)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_oracle_gradient(const OracleArgs& args) {
  const OracleInput in = read_oracle_input(args.input);
  const NlmlReport fast = nlml(in.spec, in.theta, in.data, true);
  const double jitter = in.jitter.value_or(fast.jitter);
  const Eigen::VectorXd fd = oracle::fd_nlml_gradient(in.spec, in.theta, in.data, jitter, args.step);
  const json out = {{"gradient", to_vector(fast.gradient)},
                    {"fd_gradient", to_vector(fd)},
                    {"relative_error", oracle::relative_error(fast.gradient, fd)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_oracle_gram_grad(const OracleArgs& args) {
  const OracleInput in = read_oracle_input(args.input);
  const Eigen::MatrixXd analytic = gram_grad(in.spec, in.theta, in.data.inputs, args.param_index);
  const Eigen::MatrixXd fd =
      oracle::fd_gram_grad(in.spec, in.theta, in.data.inputs, args.param_index, args.step);
  const json out = {{"param", param_name(in.spec.family(), in.spec.layout().at(args.param_index))},
                    {"relative_error", oracle::relative_error(analytic, fd)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  gpprior::tune_allocator();
  CLI::App app{"Gaussian-process hyperparameter initialization experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write runs.csv, report.json and traces");
  run->add_option("--config", run_args.config, "JSON config file")->required();
  run->add_option("--out", run_args.out, "Output directory (overrides the config)");
  run->add_option("--seed", run_args.seed, "Master seed (overrides the config)");
  run->add_option("--reps", run_args.reps, "Repetitions (overrides the config)")->check(CLI::PositiveNumber);
  run->add_option("--jobs", run_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

  TraceArgs trace_args;
  auto* trace = app.add_subcommand("trace", "Write optimization traces for one repetition");
  trace->add_option("--config", trace_args.config, "JSON config file")->required();
  trace->add_option("--repetition", trace_args.repetition, "Repetition index (0-based)")->required();
  trace->add_option("--out", trace_args.out, "Output directory (overrides the config)");
  trace->add_option("--jobs", trace_args.jobs, "Worker threads")->check(CLI::PositiveNumber);

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Small-n reference computations");
  oracle_cmd->require_subcommand(1);
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", oracle_args.input, "JSON input file, '-' for stdin");
    return sub;
  };
  auto* o_nlml = add_input(oracle_cmd->add_subcommand("nlml", "Cholesky vs dense-inverse nlml"));
  auto* o_predict = add_input(oracle_cmd->add_subcommand("predict", "Cholesky vs dense-inverse prediction"));
  auto* o_grad = add_input(oracle_cmd->add_subcommand("gradient", "Analytic vs finite-difference nlml gradient"));
  o_grad->add_option("--step", oracle_args.step, "Finite-difference step in log space");
  auto* o_gram = add_input(oracle_cmd->add_subcommand("gram-grad", "Analytic vs finite-difference Gram derivative"));
  o_gram->add_option("--param", oracle_args.param_index, "Parameter index");
  o_gram->add_option("--step", oracle_args.step, "Finite-difference step in log space");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) return guarded([&] { return cmd_run(run_args); });
  if (*trace) return guarded([&] { return cmd_trace(trace_args); });
  if (*o_nlml) return guarded([&] { return cmd_oracle_nlml(oracle_args); });
  if (*o_predict) return guarded([&] { return cmd_oracle_predict(oracle_args); });
  if (*o_grad) return guarded([&] { return cmd_oracle_gradient(oracle_args); });
  if (*o_gram) return guarded([&] { return cmd_oracle_gram_grad(oracle_args); });
  return kExitConfig;
}
