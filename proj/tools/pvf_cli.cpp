// pvf: intervention efficiency, perturbation-based model selection and the
// experiment harness from the command line.

#include "pvf/config.hpp"
#include "pvf/data.hpp"
#include "pvf/error.hpp"
#include "pvf/experiments.hpp"
#include "pvf/io.hpp"
#include "pvf/metrics.hpp"
#include "pvf/models.hpp"
#include "pvf/oracle.hpp"
#include "pvf/selection.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace pvf;

namespace {

struct Common {
  std::string config;
  int jobs = 1;
  std::string out;
  std::optional<std::uint64_t> seed;
};

Config load_config(const Common& common, bool required) {
  if (common.config.empty()) {
    require(!required, "this command needs --config (or PVF_CONFIG)");
    return Config::parse("");
  }
  require(fs::exists(common.config), "config file not found: " + common.config);
  return Config::load(common.config);
}

fs::path config_dir(const Common& common) {
  return common.config.empty() ? fs::path{} : fs::path(common.config).parent_path();
}

fs::path output_dir(const Common& common) {
  const fs::path dir = common.out.empty() ? fs::path("out") : fs::path(common.out);
  fs::create_directories(dir);
  return dir;
}

template <class Writer>
void write_output(const fs::path& path, Writer&& writer) {
  std::ostringstream text;
  writer(text);
  write_file_atomic(path, text.str());
}

void write_plots(const fs::path& dir, const std::map<std::string, std::string>& plots) {
  for (const auto& [name, svg] : plots) write_file_atomic(dir / name, svg);
}

Dataset read_labeled_csv(const std::string& path, const std::string& target) {
  require(!path.empty(), "dataset path is empty");
  require(fs::exists(path), "dataset not found: " + path);
  CsvOptions options;
  options.target = target;
  return drop_and_impute(ingest_csv(path, options));
}

// ---- ie ----

struct IeArgs {
  std::optional<std::int64_t> tp, fp, fn, tn;
  std::optional<double> gamma;
  std::string predictions;
};

ConfusionCounts counts_from_predictions(const std::string& path) {
  require(fs::exists(path), "predictions file not found: " + path);
  std::istringstream in(read_file(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "predictions file is empty");
  const auto header = split_csv_line(line);
  const auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), "predictions file needs a '" + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t label = find("label"), prediction = find("prediction");
  std::vector<int> y, yhat;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    require(fields.size() == header.size(), "predictions row has the wrong number of fields");
    for (const auto index : {label, prediction}) {
      const auto value = trim(fields[index]);
      require(value == "0" || value == "1", "labels and predictions must be 0 or 1");
    }
    y.push_back(trim(fields[label]) == "1");
    yhat.push_back(trim(fields[prediction]) == "1");
  }
  return confusion(std::span<const int>(yhat), std::span<const int>(y));
}

int run_ie(const Common& common, const IeArgs& args) {
  const Config config = load_config(common, false);
  std::optional<double> gamma = args.gamma;
  if (!gamma && config.has("ie")) {
    config.section("ie").require_known({"gamma"});
    if (config.section("ie").has("gamma")) gamma = config.section("ie").get_double("gamma", 0);
  }
  require(gamma.has_value(), "--gamma is required");
  ConfusionCounts counts;
  if (!args.predictions.empty()) {
    require(!args.tp && !args.fp && !args.fn && !args.tn, "give either --predictions or the four counts");
    counts = counts_from_predictions(args.predictions);
  } else {
    require(args.tp && args.fp && args.fn && args.tn, "--tp, --fp, --fn and --tn are all required");
    require(*args.tp >= 0 && *args.fp >= 0 && *args.fn >= 0 && *args.tn >= 0, "counts must be non-negative");
    counts = {*args.tp, *args.fp, *args.tn, *args.fn};
  }
  std::cout << format_double(score(counts, MetricSpec::ie(*gamma))) << '\n';
  return 0;
}

// ---- oracle ----

int run_oracle_command(const Common& common, std::int64_t trials) {
  const Config config = load_config(common, false);
  const auto& section = config.section("oracle");
  section.require_known({"trials", "seed"});
  if (trials <= 0) trials = section.get_int("trials", 100000);
  const auto seed = common.seed.value_or(static_cast<std::uint64_t>(section.get_int("seed", 1)));
  const auto rows = run_oracle(oracle_grid(), trials, seed, common.jobs);
  const fs::path dir = output_dir(common);
  write_output(dir / "oracle.csv", [&](std::ostream& out) { write_oracle_csv(out, rows); });
  double worst = 0;
  int within = 0;
  for (const auto& row : rows) {
    worst = std::max(worst, row.z);
    within += row.z <= 3;
  }
  std::cout << "specs " << rows.size() << ", within 3 SE " << within << ", max |delta|/SE " << format_double(worst)
            << '\n';
  return 0;
}

// ---- select ----

struct SelectArgs {
  std::string train, val, target, pool, models, metric, aggregator;
  std::optional<double> sigma, xi, lambda;
  std::optional<int> k, m_sets, candidates;
};

int run_select(const Common& common, const SelectArgs& args) {
  const Config config = load_config(common, false);
  const auto& section = config.section("select");
  section.require_known({"train", "val", "target", "pool", "models", "candidates", "metric", "aggregator"});
  const std::string target = !args.target.empty() ? args.target : section.get_string("target", "label");
  const std::string val_path = !args.val.empty() ? args.val : section.get_string("val", "");
  const Dataset val = read_labeled_csv(val_path, target);

  CandidatePool pool;
  const std::string models = !args.models.empty() ? args.models : section.get_string("models", "");
  const std::string train_path = !args.train.empty() ? args.train : section.get_string("train", "");
  const std::string kind = !args.pool.empty() ? args.pool : section.get_string("pool", "logistic");
  const auto seed = common.seed.value_or(1);
  if (!models.empty()) {
    require(fs::exists(models), "models file not found: " + models);
    // A model starts on an unindented line; indented lines continue it.
    std::istringstream in(read_file(models));
    std::string line, text;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      if (line.front() != ' ' && !text.empty()) {
        pool.push_back(parse_model(text));
        text.clear();
      }
      text += line + '\n';
    }
    if (!text.empty()) pool.push_back(parse_model(text));
    require(!pool.empty(), "models file holds no models");
  } else {
    const Dataset train = read_labeled_csv(train_path, target);
    if (kind == "logistic") {
      pool = logistic_pair_pool(train, seed, std::min<Index>(5, train.cols()));
    } else if (kind == "trees") {
      const int count = args.candidates.value_or(static_cast<int>(section.get_int("candidates", 100)));
      pool = tree_subsample_pool(train, count, 0.7, seed);
    } else {
      throw ValidationError("pool must be 'logistic' or 'trees'");
    }
  }

  PVFConfig pvf;
  pvf.perturbation = PerturbationConfig::from_config(config.section("perturbation"));
  if (args.sigma) pvf.perturbation.sigma = *args.sigma;
  if (args.xi) pvf.perturbation.xi = *args.xi;
  if (args.lambda) pvf.perturbation.lambda = *args.lambda;
  if (args.k) pvf.perturbation.replicas = *args.k;
  if (args.m_sets) pvf.perturbation.sets = *args.m_sets;
  if (common.seed) pvf.perturbation.seed = *common.seed;
  if (pvf.perturbation.perturb_features.empty()) {
    for (Index f = 0; f < val.cols(); ++f) pvf.perturbation.perturb_features.push_back(f);
  }
  pvf.metric = parse_metric(!args.metric.empty() ? args.metric : section.get_string("metric", "f1"));
  pvf.aggregator =
      parse_aggregator(!args.aggregator.empty() ? args.aggregator : section.get_string("aggregator", "quantile:0.25"));

  const SelectionResult chosen = pvf_select(pool, val, pvf, common.jobs);
  const SelectionResult trad = traditional_select(pool, val, pvf.metric);
  const fs::path dir = output_dir(common);
  write_output(dir / "pvf_selection.csv", [&](std::ostream& out) { write_selection_csv(out, chosen, pool); });
  write_output(dir / "trad_selection.csv", [&](std::ostream& out) { write_selection_csv(out, trad, pool); });
  write_output(dir / "pool.txt", [&](std::ostream& out) {
    for (const auto& model : pool) {
      const std::string text = model->serialize();
      out << text << (text.ends_with('\n') ? "" : "\n");
    }
  });
  std::cout << "pvf " << chosen.chosen << ' ' << pool[static_cast<std::size_t>(chosen.chosen)]->descriptor()
            << (chosen.tie ? " (tie)" : "") << '\n'
            << "traditional " << trad.chosen << ' ' << pool[static_cast<std::size_t>(trad.chosen)]->descriptor()
            << (trad.tie ? " (tie)" : "") << '\n';
  return 0;
}

// ---- synth ----

struct GridOverrides {
  std::vector<double> sigmas;
  std::vector<double> gammas;
  std::optional<std::int64_t> reps;
};

int run_synth(const Common& common, const GridOverrides& grid) {
  const Config config = load_config(common, false);
  SweepConfig sweep = SweepConfig::from_config(config);
  if (common.seed) sweep.seed = *common.seed;
  if (grid.reps) sweep.reps = *grid.reps;
  if (!grid.sigmas.empty()) sweep.sigmas = grid.sigmas;
  if (!grid.gammas.empty()) sweep.gammas = grid.gammas;
  sweep.validate();

  const auto results = run_sweep(sweep, common.jobs);
  const auto summary = summarize_sweep(results);
  const auto points = sensitivity_report(results);
  const fs::path dir = output_dir(common);
  write_output(dir / "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, results); });
  write_output(dir / "sweep_summary.csv", [&](std::ostream& out) { write_sweep_summary_csv(out, summary); });
  write_output(dir / "sensitivity.csv", [&](std::ostream& out) { write_sensitivity_csv(out, points); });
  write_output(dir / "sensitivity_trend.csv", [&](std::ostream& out) { write_trend_csv(out, trend_checks(points)); });
  write_plots(dir, sensitivity_plots(points));
  for (const auto& s : summary) {
    std::cout << s.track << ": d > 0 in " << s.positive << " of " << s.configs << " configs ("
              << format_double(s.percent_positive) << "%)\n";
  }
  return 0;
}

// ---- real ----

int run_real(const Common& common, const GridOverrides& grid, const std::string& data) {
  const Config config = load_config(common, false);
  RealConfig real = RealConfig::from_config(config, config_dir(common));
  if (!data.empty()) real.data = data;
  if (common.seed) real.seed = *common.seed;
  if (!grid.sigmas.empty()) real.sigmas = grid.sigmas;
  if (!grid.gammas.empty()) {
    real.metrics.clear();
    for (const double g : grid.gammas) real.metrics.push_back(MetricSpec::ie(g));
  }
  real.validate();
  require(fs::exists(real.data), "dataset not found: " + real.data.string());

  const Dataset dataset = load_real_dataset(real);
  const auto outcomes = run_real_protocol(dataset, real, common.jobs);
  const auto summary = summarize_real(outcomes);
  const fs::path dir = output_dir(common);
  write_output(dir / "real.csv", [&](std::ostream& out) { write_real_csv(out, outcomes); });
  write_output(dir / "real_summary.csv", [&](std::ostream& out) { write_real_summary_csv(out, summary); });
  write_plots(dir, real_plots(summary));
  std::cout << "dataset " << dataset.rows() << " x " << dataset.cols() << ", " << dataset.positives()
            << " positives\n";
  for (const auto& s : summary) {
    std::cout << to_string(s.metric) << " sigma=" << format_double(s.sigma) << ": pvf " << s.pvf_wins << ", tie "
              << s.ties << ", traditional " << s.trad_wins << '\n';
  }
  return 0;
}

// ---- report ----

int run_report(const Common& common, const std::string& sweep, const std::string& sensitivity,
               const std::string& real_summary) {
  require(!sweep.empty() || !sensitivity.empty() || !real_summary.empty(),
          "report needs --sweep, --sensitivity or --real-summary");
  const fs::path dir = output_dir(common);
  std::size_t written = 0;
  auto open = [](const std::string& path) {
    require(fs::exists(path), "input not found: " + path);
    return std::istringstream(read_file(path));
  };
  if (!sweep.empty() || !sensitivity.empty()) {
    std::vector<SensitivityPoint> points;
    if (!sensitivity.empty()) {
      auto in = open(sensitivity);
      points = read_sensitivity_csv(in);
    } else {
      auto in = open(sweep);
      points = sensitivity_report(read_sweep_csv(in));
      write_output(dir / "sensitivity.csv", [&](std::ostream& out) { write_sensitivity_csv(out, points); });
    }
    const auto plots = sensitivity_plots(points);
    write_plots(dir, plots);
    written += plots.size();
  }
  if (!real_summary.empty()) {
    auto in = open(real_summary);
    const auto plots = real_plots(read_real_summary_csv(in));
    write_plots(dir, plots);
    written += plots.size();
  }
  std::cout << "wrote " << written << " plots to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intervention efficiency and perturbation-based model selection"};
  app.require_subcommand(1);
  Common common;
  if (const char* env = std::getenv("PVF_CONFIG")) common.config = env;

  const auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", common.config, "Config file (default: $PVF_CONFIG)");
    sub->add_option("--jobs", common.jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "Master seed, overrides the config");
    if (with_out) sub->add_option("--out", common.out, "Output directory (default: out)");
  };

  IeArgs ie;
  auto* ie_cmd = app.add_subcommand("ie", "Intervention efficiency from confusion counts or predictions");
  add_common(ie_cmd, false);
  ie_cmd->add_option("--tp", ie.tp, "True positives");
  ie_cmd->add_option("--fp", ie.fp, "False positives");
  ie_cmd->add_option("--fn", ie.fn, "False negatives");
  ie_cmd->add_option("--tn", ie.tn, "True negatives");
  ie_cmd->add_option("--gamma", ie.gamma, "Intervention capacity in (0, 1]");
  ie_cmd->add_option("--predictions", ie.predictions, "CSV with 'label' and 'prediction' columns");

  std::int64_t trials = 0;
  auto* oracle_cmd = app.add_subcommand("oracle", "Check the IE formula against a Monte Carlo policy simulation");
  add_common(oracle_cmd, true);
  oracle_cmd->add_option("--trials", trials, "Trials per population (default: 100000)");

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("select", "Pick a model with PVF and with the plain validation score");
  add_common(select_cmd, true);
  select_cmd->add_option("--train", select.train, "Training CSV (used to build the pool)");
  select_cmd->add_option("--val", select.val, "Validation CSV");
  select_cmd->add_option("--target", select.target, "Label column (default: label)");
  select_cmd->add_option("--pool", select.pool, "Candidate pool to train: logistic or trees");
  select_cmd->add_option("--models", select.models, "File of serialized models (pool.txt format)");
  select_cmd->add_option("--candidates", select.candidates, "Number of trees for --pool trees");
  select_cmd->add_option("--metric", select.metric, "ie:<gamma>, f1 or accuracy");
  select_cmd->add_option("--aggregator", select.aggregator, "quantile:<q>, mean or median");
  select_cmd->add_option("--sigma", select.sigma, "Numeric noise standard deviation");
  select_cmd->add_option("--xi", select.xi, "Category change probability");
  select_cmd->add_option("--lambda", select.lambda, "Ordinal distance decay");
  select_cmd->add_option("--k", select.k, "Replicas per validation row");
  select_cmd->add_option("--m-sets", select.m_sets, "Number of perturbed sets");

  GridOverrides grid;
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic sweep: sweep.csv, sensitivity.csv and plots");
  add_common(synth_cmd, true);
  synth_cmd->add_option("--reps", grid.reps, "Repetitions per configuration")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--sigma", grid.sigmas, "Sigma grid override (repeatable)");
  synth_cmd->add_option("--gamma", grid.gammas, "Gamma grid override (repeatable)");

  std::string real_data;
  auto* real_cmd = app.add_subcommand("real", "Real-data protocol: real.csv, real_summary.csv and plots");
  add_common(real_cmd, true);
  real_cmd->add_option("--data", real_data, "Dataset CSV, overrides real.data");
  real_cmd->add_option("--sigma", grid.sigmas, "Sigma grid override (repeatable)");
  real_cmd->add_option("--gamma", grid.gammas, "Evaluate IE at these gammas only (repeatable)");

  std::string sweep_csv, sensitivity_csv, real_summary_csv;
  auto* report_cmd = app.add_subcommand("report", "Redraw SVG plots from result CSVs");
  report_cmd->add_option("--sweep", sweep_csv, "sweep.csv");
  report_cmd->add_option("--sensitivity", sensitivity_csv, "sensitivity.csv");
  report_cmd->add_option("--real-summary", real_summary_csv, "real_summary.csv");
  report_cmd->add_option("--out", common.out, "Output directory (default: out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ie_cmd) return run_ie(common, ie);
    if (*oracle_cmd) return run_oracle_command(common, trials);
    if (*select_cmd) return run_select(common, select);
    if (*synth_cmd) return run_synth(common, grid);
    if (*real_cmd) return run_real(common, grid, real_data);
    if (*report_cmd) return run_report(common, sweep_csv, sensitivity_csv, real_summary_csv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
