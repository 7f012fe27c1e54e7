#include "gpprior/harness.hpp"

#include "gpprior/errors.hpp"
#include "gpprior/metrics.hpp"
#include "gpprior/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace gpprior {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_gp_experiment(ExperimentId id) {
  return id == ExperimentId::SeRecovery || id == ExperimentId::PerSensitivity;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory: " + ec.message());
}

std::vector<std::string> param_names_for(const KernelSpec& spec) {
  std::vector<std::string> names;
  for (const auto& label : spec.layout()) names.push_back(param_name(spec.family(), label));
  return names;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::SeRecovery: return "se_recovery";
    case ExperimentId::PerSensitivity: return "per_sensitivity";
    case ExperimentId::ArmaLp: return "arma_lp";
    case ExperimentId::ArmaSm: return "arma_sm";
  }
  return "?";
}

ExperimentId experiment_from_string(const std::string& name) {
  for (auto id : {ExperimentId::SeRecovery, ExperimentId::PerSensitivity, ExperimentId::ArmaLp,
                  ExperimentId::ArmaSm})
    if (to_string(id) == name) return id;
  throw ConfigError("unknown experiment '" + name +
                    "' (expected se_recovery, per_sensitivity, arma_lp or arma_sm)");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentId id) {
  ExperimentConfig c;
  c.experiment = id;
  c.output_dir = "gpprior_out/" + to_string(id);
  const std::vector<std::string> period_priors = {"P1", "P5", "P6", "P7", "P9"};
  switch (id) {
    case ExperimentId::SeRecovery:
      c.kernel = KernelSpec::se();
      c.theta_act = {5.0, 2.0};
      c.priors = {"P1"};
      c.splits = {SplitKind::Interpolation, SplitKind::Extrapolation};
      break;
    case ExperimentId::PerSensitivity:
      c.kernel = KernelSpec::per();
      c.theta_act = {5.0, 7.0, 2.0};
      c.priors = period_priors;
      c.splits = {SplitKind::Interpolation, SplitKind::Extrapolation};
      break;
    case ExperimentId::ArmaLp:
      c.kernel = KernelSpec::lp();
      c.priors = period_priors;
      c.splits = {SplitKind::Extrapolation};
      break;
    case ExperimentId::ArmaSm:
      c.kernel = KernelSpec::sm(4);
      c.priors = ps_labels();
      c.splits = {SplitKind::Extrapolation};
      break;
  }
  return c;
}

bool ExperimentConfig::uses_arma() const noexcept { return !is_gp_experiment(experiment); }

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (n_restarts < 1) throw ConfigError("n_restarts must be >= 1");
  if (n_points < 10) throw ConfigError("n_points must be >= 10");
  if (splits.empty()) throw ConfigError("at least one split is required");
  if (priors.empty()) throw ConfigError("at least one prior is required");
  if (std::set<std::string>(priors.begin(), priors.end()).size() != priors.size())
    throw ConfigError("prior labels must be unique");
  if (std::set<SplitKind>(splits.begin(), splits.end()).size() != splits.size())
    throw ConfigError("split kinds must be unique");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
  if (!(p8.mean_factor > 0.0 && p8.std_factor > 0.0)) throw ConfigError("p8 factors must be positive");
  optimizer.validate();
  if (uses_arma()) {
    ARMAConfig a = arma;
    a.length = n_points;
    a.validate();
  } else {
    if (theta_act.size() != kernel.kernel_param_count())
      throw ConfigError("theta_act needs " + std::to_string(kernel.kernel_param_count()) +
                        " values for the " + kernel.name() + " kernel");
    for (double v : theta_act)
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("theta_act values must be positive");
  }

  // Check every prior against the layout on a nominal training set.
  for (auto kind : splits) {
    const SplitSpec s = make_split(static_cast<std::size_t>(n_points), kind);
    Dataset nominal;
    for (auto i : s.train_indices) {
      nominal.inputs.push_back(static_cast<double>(i + 1));
      nominal.outputs.push_back(i % 2 ? 1.0 : -1.0);
    }
    const DataStats stats = compute_stats(nominal.inputs);
    for (const auto& label : priors) gpprior::validate(prior_for(*this, label, nominal), kernel.layout(), stats);
  }
}

std::vector<double> sm_weight_init(std::span<const double> train_outputs, int q) {
  if (q < 1) throw ConfigError("q must be >= 1");
  if (train_outputs.empty()) throw ConfigError("sm_weight_init needs training outputs");
  const double sd = std::sqrt(population_variance(train_outputs));
  if (!(sd > 0.0)) throw DegenerateTargets("sm_weight_init: training outputs are constant");
  return std::vector<double>(static_cast<std::size_t>(q), sd / q);
}

PriorSpec prior_for(const ExperimentConfig& config, const std::string& label,
                    const Dataset& train) {
  PriorSpec prior;
  if (config.kernel.family() == KernelFamily::SM) {
    prior = resolve_ps_combo(label);
    prior.by_role[Role::SmWeight] =
        PriorAssignment::fixed(sm_weight_init(train.outputs, config.kernel.q_components()).front());
  } else {
    const PriorId id = prior_from_string(label);
    if (config.kernel.family() == KernelFamily::SE) {
      prior.by_role[Role::LengthScale] = PriorAssignment::draw(id);
      prior.by_role[Role::Amplitude] = PriorAssignment::draw(id);
    } else {
      prior.by_role[Role::Period] = PriorAssignment::draw(id);
    }
  }
  prior.p8 = config.p8;
  return prior;
}

// ---------------------------------------------------------------------------
// config (de)serialization

namespace {

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["kernel"] = {{"family", to_string(c.kernel.family())}, {"q", c.kernel.q_components()}};
  j["theta_act"] = c.theta_act;
  j["priors"] = c.priors;
  j["n_restarts"] = c.n_restarts;
  j["repetitions"] = c.repetitions;
  json splits = json::array();
  for (auto s : c.splits) splits.push_back(to_string(s));
  j["splits"] = splits;
  j["seed"] = c.seed;
  j["n_points"] = c.n_points;
  j["noise_std"] = c.noise_std;
  j["arma"] = {{"ar", c.arma.ar},
               {"ma", c.arma.ma},
               {"innovation_std", c.arma.innovation_std},
               {"start_values", c.arma.start_values},
               {"burn_in", c.arma.burn_in}};
  j["optimizer"] = {{"max_evals", c.optimizer.max_evals},
                    {"grad_tol", c.optimizer.grad_tol},
                    {"wolfe_c1", c.optimizer.wolfe_c1},
                    {"wolfe_c2", c.optimizer.wolfe_c2},
                    {"max_linesearch_steps", c.optimizer.max_linesearch_steps}};
  j["p8"] = {{"mean_factor", c.p8.mean_factor}, {"std_factor", c.p8.std_factor}};
  j["output_dir"] = c.output_dir;
  j["write_traces"] = c.write_traces;
  j["write_data"] = c.write_data;
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

ExperimentConfig from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"experiment", "kernel", "theta_act", "priors", "n_restarts", "repetitions",
                  "splits", "seed", "n_points", "noise_std", "arma", "optimizer", "p8",
                  "output_dir", "write_traces", "write_data"},
                 "config");
  if (!j.contains("experiment")) throw ConfigError("config needs an 'experiment' field");
  ExperimentConfig c = ExperimentConfig::defaults(experiment_from_string(j.at("experiment").get<std::string>()));
  if (j.contains("kernel")) {
    const json& k = j.at("kernel");
    reject_unknown(k, {"family", "q"}, "kernel");
    const auto family = k.contains("family") ? family_from_string(k.at("family").get<std::string>())
                                             : c.kernel.family();
    const int q = k.contains("q") ? k.at("q").get<int>() : c.kernel.q_components();
    c.kernel = KernelSpec::make(family, q);
  }
  read(j, "theta_act", c.theta_act);
  read(j, "priors", c.priors);
  read(j, "n_restarts", c.n_restarts);
  read(j, "repetitions", c.repetitions);
  if (j.contains("splits")) {
    c.splits.clear();
    for (const auto& s : j.at("splits")) c.splits.push_back(split_from_string(s.get<std::string>()));
  }
  read(j, "seed", c.seed);
  read(j, "n_points", c.n_points);
  read(j, "noise_std", c.noise_std);
  if (j.contains("arma")) {
    const json& a = j.at("arma");
    reject_unknown(a, {"ar", "ma", "innovation_std", "start_values", "burn_in"}, "arma");
    read(a, "ar", c.arma.ar);
    read(a, "ma", c.arma.ma);
    read(a, "innovation_std", c.arma.innovation_std);
    read(a, "start_values", c.arma.start_values);
    read(a, "burn_in", c.arma.burn_in);
  }
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    reject_unknown(o, {"max_evals", "grad_tol", "wolfe_c1", "wolfe_c2", "max_linesearch_steps"},
                   "optimizer");
    read(o, "max_evals", c.optimizer.max_evals);
    read(o, "grad_tol", c.optimizer.grad_tol);
    read(o, "wolfe_c1", c.optimizer.wolfe_c1);
    read(o, "wolfe_c2", c.optimizer.wolfe_c2);
    read(o, "max_linesearch_steps", c.optimizer.max_linesearch_steps);
  }
  if (j.contains("p8")) {
    const json& p = j.at("p8");
    reject_unknown(p, {"mean_factor", "std_factor"}, "p8");
    read(p, "mean_factor", c.p8.mean_factor);
    read(p, "std_factor", c.p8.std_factor);
  }
  read(j, "output_dir", c.output_dir);
  read(j, "write_traces", c.write_traces);
  read(j, "write_data", c.write_data);
  c.arma.length = c.n_points;
  return c;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& config) { return to_json(config).dump(2); }

ExperimentConfig parse_config(const std::string& json_text) {
  try {
    return from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// running

Dataset generate_repetition_data(const ExperimentConfig& config, int repetition) {
  const auto seed = derive_seed(config.seed, {0xda7aULL, static_cast<std::uint64_t>(repetition)});
  if (config.uses_arma()) {
    ARMAConfig a = config.arma;
    a.length = config.n_points;
    return gen_arma(a, seed);
  }
  return gen_gp_series(config.kernel, config.theta_act, config.n_points, config.noise_std, seed);
}

namespace {

RunRecord fit_one(const ExperimentConfig& config, const Dataset& data, int repetition,
                  const std::string& label, SplitKind kind) {
  RunRecord rec;
  rec.repetition = repetition;
  rec.prior = label;
  rec.split = kind;
  rec.param_names = param_names_for(config.kernel);
  const SplitData sd = split(data, kind);
  try {
    const PriorSpec prior = prior_for(config, label, sd.train);
    const auto seed = derive_seed(config.seed, {static_cast<std::uint64_t>(repetition), fnv1a(label),
                                                static_cast<std::uint64_t>(kind)});
    MultiStartOutcome outcome =
        multi_start(config.kernel, sd.train, prior, config.n_restarts, config.optimizer, seed);
    const HyperParams theta = outcome.winner_params();
    const Prediction pred = predict(config.kernel, theta, sd.train, sd.test.inputs);
    const double noise_var = theta.noise_std() * theta.noise_std();
    const Eigen::VectorXd obs_var = pred.variances.array() + noise_var;
    const Eigen::VectorXd values = theta.values();
    rec.theta_final.assign(values.data(), values.data() + values.size());
    rec.nlml_final = outcome.winner().nlml_opt;
    rec.srmse = srmse(as_span(pred.means), sd.test.outputs);
    rec.msll = msll(as_span(pred.means), as_span(obs_var), sd.test.outputs, sd.train.outputs);
    rec.outcome = std::move(outcome);
  } catch (const NumericalError& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  return rec;
}

RunRecord baseline_one(const ExperimentConfig& config, const Dataset& data, int repetition,
                       SplitKind kind) {
  RunRecord rec;
  rec.repetition = repetition;
  rec.prior = kBaselineLabel;
  rec.split = kind;
  const SplitData sd = split(data, kind);
  ARMAConfig a = config.arma;
  a.length = config.n_points;
  try {
    const Prediction pred = arma_forecast(a, sd.train.outputs, static_cast<int>(sd.test.size()));
    rec.nlml_final = kNaN;
    rec.srmse = srmse(as_span(pred.means), sd.test.outputs);
    rec.msll = msll(as_span(pred.means), as_span(pred.variances), sd.test.outputs, sd.train.outputs);
  } catch (const NumericalError& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  return rec;
}

std::string trace_file_name(const RunRecord& rec) {
  return rec.prior + "_" + to_string(rec.split) + "_rep" + std::to_string(rec.repetition) + ".csv";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  std::vector<int> reps;
  if (options.only_repetition) {
    if (*options.only_repetition < 0 || *options.only_repetition >= config.repetitions)
      throw ConfigError("repetition index out of range");
    reps.push_back(*options.only_repetition);
  } else {
    for (int r = 0; r < config.repetitions; ++r) reps.push_back(r);
  }

  std::vector<Dataset> data(reps.size());
  parallel_for(reps.size(), options.jobs,
               [&](std::size_t i) { data[i] = generate_repetition_data(config, reps[i]); });

  struct Task {
    std::size_t rep_slot;
    std::string prior;
    SplitKind split;
  };
  std::vector<Task> tasks;
  for (const auto& label : config.priors)
    for (auto kind : config.splits)
      for (std::size_t i = 0; i < reps.size(); ++i) tasks.push_back({i, label, kind});

  ExperimentResult result;
  result.runs.resize(tasks.size());
  parallel_for(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    result.runs[t] = fit_one(config, data[task.rep_slot], reps[task.rep_slot], task.prior, task.split);
  });

  if (config.uses_arma()) {
    for (auto kind : config.splits) {
      if (kind != SplitKind::Extrapolation) continue;
      for (std::size_t i = 0; i < reps.size(); ++i)
        result.runs.push_back(baseline_one(config, data[i], reps[i], kind));
    }
  }
  result.table = aggregate(config, result.runs);

  if (options.write_outputs) {
    const std::filesystem::path out(config.output_dir);
    ensure_dir(out);
    write_runs_csv(config, result.runs, (out / "runs.csv").string());
    write_report_json(result.table, (out / "report.json").string());
    write_report_csv(result.table, (out / "report.csv").string());
    if (config.write_traces) {
      ensure_dir(out / "traces");
      for (const auto& rec : result.runs)
        if (rec.outcome) emit_trace(*rec.outcome, (out / "traces" / trace_file_name(rec)).string());
    }
    if (config.write_data) {
      ensure_dir(out / "data");
      for (std::size_t i = 0; i < reps.size(); ++i)
        write_dataset_csv(data[i], (out / "data" / ("rep" + std::to_string(reps[i]) + ".csv")).string());
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// aggregation

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return {kNaN, kNaN};
  s.mean = mean(values);
  if (values.size() > 1) {
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::optional<Summary> GroupReport::param(const std::string& name) const {
  for (std::size_t i = 0; i < param_names.size(); ++i)
    if (param_names[i] == name) return params[i];
  return std::nullopt;
}

const GroupReport& ReportTable::group(const std::string& prior, SplitKind split) const {
  for (const auto& g : groups)
    if (g.prior == prior && g.split == split) return g;
  throw ConfigError("report has no group for prior " + prior + " / " + to_string(split));
}

ReportTable aggregate(const ExperimentConfig& config, const std::vector<RunRecord>& runs) {
  ReportTable table;
  table.experiment = to_string(config.experiment);
  table.theta_act = config.theta_act;

  std::vector<std::string> labels = config.priors;
  if (config.uses_arma()) labels.push_back(kBaselineLabel);
  for (const auto& label : labels) {
    for (auto kind : config.splits) {
      GroupReport g;
      g.prior = label;
      g.split = kind;
      std::vector<std::vector<double>> params;
      std::vector<double> nlml, sr, ms;
      bool seen = false;
      for (const auto& rec : runs) {
        if (rec.prior != label || rec.split != kind) continue;
        seen = true;
        if (rec.failed) {
          ++g.failed;
          continue;
        }
        ++g.count;
        if (g.param_names.empty()) {
          g.param_names = rec.param_names;
          params.resize(rec.param_names.size());
        }
        for (std::size_t i = 0; i < rec.theta_final.size(); ++i) params[i].push_back(rec.theta_final[i]);
        nlml.push_back(rec.nlml_final);
        sr.push_back(rec.srmse);
        ms.push_back(rec.msll);
      }
      if (!seen) continue;
      for (const auto& p : params) g.params.push_back(summarize(p));
      g.nlml = summarize(nlml);
      g.srmse = summarize(sr);
      g.msll = summarize(ms);
      table.groups.push_back(std::move(g));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// writers

void emit_trace(const MultiStartOutcome& outcome, const std::string& path) {
  if (outcome.restarts.empty()) throw ConfigError("emit_trace: outcome has no restarts");
  auto out = open_for_write(path);
  out << "restart,step";
  for (const auto& name : param_names_for(outcome.spec)) out << ",log_" << name;
  out << ",nlml,is_final\n";
  for (std::size_t r = 0; r < outcome.restarts.size(); ++r) {
    const auto& trace = outcome.restarts[r].trace;
    for (std::size_t s = 0; s < trace.size(); ++s) {
      out << r << ',' << s;
      for (Eigen::Index i = 0; i < trace[s].theta.size(); ++i) out << ',' << format_double(trace[s].theta(i));
      out << ',' << format_double(trace[s].value) << ',' << (s + 1 == trace.size() ? 1 : 0) << '\n';
    }
  }
  finish_write(out, path);
}

void write_runs_csv(const ExperimentConfig& config, const std::vector<RunRecord>& runs,
                    const std::string& path) {
  auto out = open_for_write(path);
  const std::string experiment = to_string(config.experiment);
  out << "experiment,prior,split,repetition,param_role,param_value,nlml,srmse,msll\n";
  const std::string nan = format_double(kNaN);
  for (const auto& rec : runs) {
    const std::string head =
        experiment + ',' + rec.prior + ',' + to_string(rec.split) + ',' + std::to_string(rec.repetition) + ',';
    if (rec.failed) {
      out << head << "failed," << nan << ',' << nan << ',' << nan << ',' << nan << '\n';
      continue;
    }
    const std::string tail =
        format_double(rec.nlml_final) + ',' + format_double(rec.srmse) + ',' + format_double(rec.msll) + '\n';
    if (rec.theta_final.empty()) {
      out << head << "none," << nan << ',' << tail;
      continue;
    }
    for (std::size_t i = 0; i < rec.theta_final.size(); ++i)
      out << head << rec.param_names[i] << ',' << format_double(rec.theta_final[i]) << ',' << tail;
  }
  finish_write(out, path);
}

namespace {

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

}  // namespace

void write_report_json(const ReportTable& table, const std::string& path) {
  json by_prior = json::object();
  for (const auto& g : table.groups) {
    json params = json::object();
    for (std::size_t i = 0; i < g.param_names.size(); ++i) params[g.param_names[i]] = summary_json(g.params[i]);
    by_prior[g.prior][to_string(g.split)] = {
        {"theta_act", table.theta_act},
        {"repetitions", g.count},
        {"failed", g.failed},
        {"dispersion", "sample standard deviation"},
        {"params", params},
        {"nlml", summary_json(g.nlml)},
        {"srmse", summary_json(g.srmse)},
        {"msll", summary_json(g.msll)},
    };
  }
  json doc = {{table.experiment, by_prior}};
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
  finish_write(out, path);
}

void write_report_csv(const ReportTable& table, const std::string& path) {
  auto out = open_for_write(path);
  out << "experiment,prior,split,quantity,mean,sd,count,failed\n";
  for (const auto& g : table.groups) {
    auto row = [&](const std::string& quantity, const Summary& s) {
      out << table.experiment << ',' << g.prior << ',' << to_string(g.split) << ',' << quantity << ','
          << format_double(s.mean) << ',' << format_double(s.sd) << ',' << g.count << ',' << g.failed
          << '\n';
    };
    for (std::size_t i = 0; i < g.param_names.size(); ++i) row(g.param_names[i], g.params[i]);
    row("nlml", g.nlml);
    row("srmse", g.srmse);
    row("msll", g.msll);
  }
  finish_write(out, path);
}

}  // namespace gpprior
