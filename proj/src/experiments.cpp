#include "pvf/experiments.hpp"

#include "pvf/config.hpp"
#include "pvf/error.hpp"
#include "pvf/io.hpp"
#include "pvf/parallel.hpp"
#include "pvf/plot.hpp"
#include "pvf/rng.hpp"
#include "pvf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace pvf {

namespace {

std::vector<Index> to_indices(const std::vector<std::int64_t>& values) {
  return {values.begin(), values.end()};
}

std::vector<std::int64_t> to_ints(const std::vector<Index>& values) {
  return {values.begin(), values.end()};
}

std::vector<Index> all_columns(Index cols) {
  std::vector<Index> out(static_cast<std::size_t>(cols));
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

void read_pvf_section(const Config& config, Aggregator& aggregator, int& replicas, int& sets) {
  const auto& section = config.section("pvf");
  section.require_known({"aggregator", "k", "m_sets"});
  aggregator = parse_aggregator(section.get_string("aggregator", to_string(aggregator)));
  replicas = static_cast<int>(section.get_int("k", replicas));
  sets = static_cast<int>(section.get_int("m_sets", sets));
}

// Header-indexed CSV rows for reading our own outputs back.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), "missing column: " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

Table read_table(std::istream& in) {
  Table table;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty CSV");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() == table.header.size(), "CSV row has the wrong number of fields");
    table.rows.push_back(std::move(fields));
  }
  return table;
}

double field_double(const std::string& text) {
  double value = 0;
  require(parse_double(text, value), "not a number: " + text);
  return value;
}

Index field_index(const std::string& text) {
  const double value = field_double(text);
  require(value == std::floor(value), "not an integer: " + text);
  return static_cast<Index>(value);
}

Band parse_band(const std::string& text) {
  if (text == "low") return Band::low;
  if (text == "moderate") return Band::moderate;
  if (text == "high") return Band::high;
  throw ValidationError("unknown band: " + text);
}

bool is_ie(const MetricSpec& metric) { return metric.kind == MetricSpec::Kind::intervention_efficiency; }

}  // namespace

void SweepConfig::validate() const {
  require(!sizes.empty() && !mus.empty() && !sigmas.empty() && !gammas.empty(), "sweep grids must be nonempty");
  for (const Index n : sizes) require(n >= 10, "synthetic size must be at least 10");
  for (const double mu : mus) require(std::isfinite(mu) && mu >= 0, "mu must be finite and >= 0");
  for (const double s : sigmas) require(std::isfinite(s) && s >= 0, "sigma must be finite and >= 0");
  for (const double g : gammas) MetricSpec::ie(g).validate();
  require(reps >= 1, "reps must be at least 1");
  require(replicas >= 1 && sets >= 1, "k and m_sets must be at least 1");
  require(train_frac > 0 && train_frac < 1, "train_frac must lie in (0, 1)");
  require(smote_k >= 1, "smote_k must be at least 1");
  require(max_retries >= 0, "max_retries must be >= 0");
}

SweepConfig SweepConfig::from_config(const Config& config) {
  SweepConfig out;
  const auto& s = config.section("sweep");
  s.require_known({"sizes", "mus", "sigmas", "gammas", "reps", "seed", "train_frac", "smote_k",
                   "accuracy_above_mu", "max_retries", "shuffle_candidates"});
  out.sizes = to_indices(s.get_ints("sizes", to_ints(out.sizes)));
  out.mus = s.get_doubles("mus", out.mus);
  out.sigmas = s.get_doubles("sigmas", out.sigmas);
  out.gammas = s.get_doubles("gammas", out.gammas);
  out.reps = s.get_int("reps", out.reps);
  out.seed = static_cast<std::uint64_t>(s.get_int("seed", static_cast<std::int64_t>(out.seed)));
  out.train_frac = s.get_double("train_frac", out.train_frac);
  out.smote_k = static_cast<int>(s.get_int("smote_k", out.smote_k));
  out.accuracy_above_mu = s.get_double("accuracy_above_mu", out.accuracy_above_mu);
  out.max_retries = static_cast<int>(s.get_int("max_retries", out.max_retries));
  out.shuffle_candidates = s.get_bool("shuffle_candidates", out.shuffle_candidates);
  read_pvf_section(config, out.aggregator, out.replicas, out.sets);
  out.validate();
  return out;
}

std::vector<Track> synthetic_tracks(const SweepConfig& config, double mu) {
  std::vector<Track> tracks;
  for (const double gamma : config.gammas) {
    const auto metric = MetricSpec::ie(gamma);
    tracks.push_back({to_string(metric), metric});
  }
  tracks.push_back({kStandardTrack, mu <= config.accuracy_above_mu ? MetricSpec::f1() : MetricSpec::accuracy()});
  return tracks;
}

std::uint64_t rep_seed(const SweepConfig& config, Index n, double mu, Index rep) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(std::llround(mu * 1e6)),
                     static_cast<std::uint64_t>(rep));
}

std::vector<RepResult> run_synthetic_rep(Index n, double mu, const std::vector<double>& sigmas,
                                         std::uint64_t seed, const SweepConfig& config) {
  const Dataset data = gen_synthetic({n, mu, derive_seed(seed, 0)});
  Split split;
  int retries = 0;
  for (;; ++retries) {
    split = stratified_split(data, config.train_frac, derive_seed(seed, 1, static_cast<std::uint64_t>(retries)));
    if (split.train.positives() > 0 && split.val.positives() > 0) break;
    if (retries >= config.max_retries) throw std::runtime_error("no usable split after retries");
  }
  const auto scaled = standard_scale(split.train, {split.val});
  const Dataset& train = scaled[0];
  const Dataset& val = scaled[1];
  CandidatePool pool = logistic_pair_pool(train, derive_seed(seed, 2), 5, {}, config.smote_k);
  const auto tracks = synthetic_tracks(config, mu);

  // Pairs come out lexicographically, so (x1, x2) is candidate 0 and would win
  // every lowest-index tie. A seeded permutation keeps ties neutral.
  Index truth = 0;
  if (config.shuffle_candidates) {
    std::vector<Index> order(pool.size());
    std::iota(order.begin(), order.end(), Index{0});
    Stream rng(derive_seed(seed, 4));
    shuffle(std::span<Index>(order), rng);
    CandidatePool permuted;
    for (const Index i : order) permuted.push_back(pool[static_cast<std::size_t>(i)]);
    pool = std::move(permuted);
    truth = static_cast<Index>(std::find(order.begin(), order.end(), Index{0}) - order.begin());
  }

  const CountsGrid plain = validation_counts(pool, val);
  std::vector<bool> trad_correct;
  for (const auto& track : tracks) {
    trad_correct.push_back(select_from_scores(plain.scores(track.metric), Aggregator::quantile(0.25)).chosen ==
                           truth);
  }

  std::vector<RepResult> out;
  for (const double sigma : sigmas) {
    PerturbationConfig perturbation;
    perturbation.sigma = sigma;
    perturbation.perturb_features = all_columns(val.cols());
    perturbation.replicas = config.replicas;
    perturbation.sets = config.sets;
    perturbation.seed = derive_seed(seed, 3);
    const CountsGrid grid = perturbed_counts(pool, val, perturbation);
    RepResult result;
    result.retries = retries;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      const bool pvf_correct = select_from_scores(grid.scores(tracks[t].metric), config.aggregator).chosen == truth;
      result.outcomes.push_back({tracks[t].name, tracks[t].metric, pvf_correct, trad_correct[t]});
    }
    out.push_back(std::move(result));
  }
  return out;
}

RepResult run_synthetic_rep(Index n, double mu, double sigma, std::uint64_t seed, const SweepConfig& config) {
  return run_synthetic_rep(n, mu, std::vector<double>{sigma}, seed, config).front();
}

std::vector<ConfigResult> run_sweep(const SweepConfig& config, int jobs) {
  config.validate();
  struct Unit {
    Index n;
    double mu;
    Index rep;
  };
  std::vector<Unit> units;
  for (const Index n : config.sizes) {
    for (const double mu : config.mus) {
      for (Index rep = 0; rep < config.reps; ++rep) units.push_back({n, mu, rep});
    }
  }
  std::vector<std::vector<RepResult>> reps(units.size());
  parallel_for(static_cast<Index>(units.size()), jobs, [&](Index i) {
    const Unit& u = units[static_cast<std::size_t>(i)];
    reps[static_cast<std::size_t>(i)] =
        run_synthetic_rep(u.n, u.mu, config.sigmas, rep_seed(config, u.n, u.mu, u.rep), config);
  });

  std::vector<ConfigResult> out;
  std::size_t base = 0;
  for (const Index n : config.sizes) {
    for (const double mu : config.mus) {
      const auto tracks = synthetic_tracks(config, mu);
      for (std::size_t s = 0; s < config.sigmas.size(); ++s) {
        for (std::size_t t = 0; t < tracks.size(); ++t) {
          ConfigResult r;
          r.n = n;
          r.mu = mu;
          r.sigma = config.sigmas[s];
          r.track = tracks[t].name;
          r.metric = tracks[t].metric;
          r.reps = config.reps;
          std::vector<double> diffs;
          for (Index rep = 0; rep < config.reps; ++rep) {
            const RepResult& rr = reps[base + static_cast<std::size_t>(rep)][s];
            const TrackOutcome& o = rr.outcomes[t];
            r.c_pvf += o.pvf_correct;
            r.c_trad += o.trad_correct;
            r.pvf_only += o.pvf_correct && !o.trad_correct;
            r.trad_only += o.trad_correct && !o.pvf_correct;
            r.retries += rr.retries;
            diffs.push_back(static_cast<double>(o.pvf_correct) - static_cast<double>(o.trad_correct));
          }
          r.mcnemar_p = mcnemar_exact_p(r.pvf_only, r.trad_only);
          r.paired_t_p = diffs.size() >= 2 ? paired_t_p(diffs) : 1.0;  // one rep: no spread to test
          out.push_back(std::move(r));
        }
      }
      base += static_cast<std::size_t>(config.reps);
    }
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<ConfigResult>& results) {
  out << "n,mu,sigma,track,metric,reps,c_pvf,c_trad,d,pvf_only,trad_only,mcnemar_p,paired_t_p,retries\n";
  for (const auto& r : results) {
    out << r.n << ',' << format_double(r.mu) << ',' << format_double(r.sigma) << ',' << r.track << ','
        << to_string(r.metric) << ',' << r.reps << ',' << r.c_pvf << ',' << r.c_trad << ',' << r.d() << ','
        << r.pvf_only << ',' << r.trad_only << ',' << format_double(r.mcnemar_p) << ','
        << format_double(r.paired_t_p) << ',' << r.retries << '\n';
  }
}

std::vector<ConfigResult> read_sweep_csv(std::istream& in) {
  const Table table = read_table(in);
  const auto n = table.column("n"), mu = table.column("mu"), sigma = table.column("sigma"),
             track = table.column("track"), metric = table.column("metric"), reps = table.column("reps"),
             c_pvf = table.column("c_pvf"), c_trad = table.column("c_trad"), pvf_only = table.column("pvf_only"),
             trad_only = table.column("trad_only"), mc = table.column("mcnemar_p"), tp = table.column("paired_t_p"),
             retries = table.column("retries");
  std::vector<ConfigResult> out;
  for (const auto& row : table.rows) {
    ConfigResult r;
    r.n = field_index(row[n]);
    r.mu = field_double(row[mu]);
    r.sigma = field_double(row[sigma]);
    r.track = row[track];
    r.metric = parse_metric(row[metric]);
    r.reps = field_index(row[reps]);
    r.c_pvf = field_index(row[c_pvf]);
    r.c_trad = field_index(row[c_trad]);
    r.pvf_only = field_index(row[pvf_only]);
    r.trad_only = field_index(row[trad_only]);
    r.mcnemar_p = field_double(row[mc]);
    r.paired_t_p = field_double(row[tp]);
    r.retries = field_index(row[retries]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrackSummary> summarize_sweep(const std::vector<ConfigResult>& results) {
  std::vector<TrackSummary> out;
  for (const auto& r : results) {
    auto it = std::find_if(out.begin(), out.end(), [&](const TrackSummary& s) { return s.track == r.track; });
    if (it == out.end()) {
      out.push_back({r.track});
      it = out.end() - 1;
    }
    ++it->configs;
    it->positive += r.d() > 0;
    it->negative += r.d() < 0;
  }
  for (auto& s : out) s.percent_positive = 100.0 * static_cast<double>(s.positive) / static_cast<double>(s.configs);
  return out;
}

void write_sweep_summary_csv(std::ostream& out, const std::vector<TrackSummary>& summary) {
  out << "track,configs,positive,negative,percent_positive\n";
  for (const auto& s : summary) {
    out << s.track << ',' << s.configs << ',' << s.positive << ',' << s.negative << ','
        << format_double(s.percent_positive) << '\n';
  }
}

Band separability_band(double mu) {
  if (mu <= 1.0) return Band::low;
  if (mu <= 2.0) return Band::moderate;
  return Band::high;
}

std::string to_string(Band band) {
  switch (band) {
    case Band::low: return "low";
    case Band::moderate: return "moderate";
    case Band::high: return "high";
  }
  return "unknown";
}

std::vector<SensitivityPoint> sensitivity_report(const std::vector<ConfigResult>& results) {
  std::vector<std::string> track_order;
  for (const auto& r : results) {
    if (std::find(track_order.begin(), track_order.end(), r.track) == track_order.end()) {
      track_order.push_back(r.track);
    }
  }
  using Key = std::tuple<Index, int, std::size_t, double>;
  std::map<Key, std::pair<double, Index>> sums;
  for (const auto& r : results) {
    const auto t = static_cast<std::size_t>(std::find(track_order.begin(), track_order.end(), r.track) -
                                            track_order.begin());
    auto& cell = sums[{r.n, static_cast<int>(separability_band(r.mu)), t, r.sigma}];
    cell.first += static_cast<double>(r.d());
    ++cell.second;
  }
  std::vector<SensitivityPoint> out;
  for (const auto& [key, cell] : sums) {
    const auto& [n, band, t, sigma] = key;
    out.push_back({n, static_cast<Band>(band), track_order[t], sigma, cell.first / static_cast<double>(cell.second),
                   cell.second});
  }
  return out;
}

void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityPoint>& points) {
  out << "n,band,track,sigma,mean_d,configs\n";
  for (const auto& p : points) {
    out << p.n << ',' << to_string(p.band) << ',' << p.track << ',' << format_double(p.sigma) << ','
        << format_double(p.mean_d) << ',' << p.configs << '\n';
  }
}

std::vector<SensitivityPoint> read_sensitivity_csv(std::istream& in) {
  const Table table = read_table(in);
  const auto n = table.column("n"), band = table.column("band"), track = table.column("track"),
             sigma = table.column("sigma"), mean_d = table.column("mean_d"), configs = table.column("configs");
  std::vector<SensitivityPoint> out;
  for (const auto& row : table.rows) {
    out.push_back({field_index(row[n]), parse_band(row[band]), row[track], field_double(row[sigma]),
                   field_double(row[mean_d]), field_index(row[configs])});
  }
  return out;
}

std::vector<TrendCheck> trend_checks(const std::vector<SensitivityPoint>& points) {
  std::vector<TrendCheck> out;
  for (std::size_t i = 0; i < points.size();) {
    std::size_t j = i;
    bool monotone = true;
    while (j + 1 < points.size() && points[j + 1].n == points[i].n && points[j + 1].band == points[i].band &&
           points[j + 1].track == points[i].track) {
      monotone = monotone && points[j + 1].mean_d >= points[j].mean_d;
      ++j;
    }
    out.push_back({points[i].n, points[i].band, points[i].track, monotone});
    i = j + 1;
  }
  return out;
}

void write_trend_csv(std::ostream& out, const std::vector<TrendCheck>& checks) {
  out << "n,band,track,non_decreasing\n";
  for (const auto& c : checks) {
    out << c.n << ',' << to_string(c.band) << ',' << c.track << ',' << (c.non_decreasing ? "true" : "false") << '\n';
  }
}

std::map<std::string, std::string> sensitivity_plots(const std::vector<SensitivityPoint>& points) {
  std::map<std::pair<Index, int>, std::vector<Series>> curves;
  for (const auto& p : points) {
    auto& series = curves[{p.n, static_cast<int>(p.band)}];
    if (series.empty() || series.back().label != p.track) series.push_back({p.track, {}, {}});
    series.back().x.push_back(p.sigma > 0 ? p.sigma : 1e-12);
    series.back().y.push_back(p.mean_d);
  }
  std::map<std::string, std::string> out;
  for (const auto& [key, series] : curves) {
    const std::string band = to_string(static_cast<Band>(key.second));
    const std::string name = "sensitivity_n" + std::to_string(key.first) + "_" + band + ".svg";
    out[name] = line_chart_svg("n = " + std::to_string(key.first) + ", " + band + " separability", "sigma",
                               "mean d (PVF - traditional)", series, true);
  }
  return out;
}

void RealConfig::validate() const {
  require(subset_size >= folds && folds >= 2, "need folds >= 2 and subset_size >= folds");
  require(candidates >= 1, "candidates must be at least 1");
  require(subsample_frac > 0 && subsample_frac <= 1, "subsample_frac must lie in (0, 1]");
  require(!sigmas.empty() && !metrics.empty(), "sigma and metric lists must be nonempty");
  for (const double s : sigmas) require(std::isfinite(s) && s >= 0, "sigma must be finite and >= 0");
  for (const auto& m : metrics) m.validate();
  require(xi >= 0 && xi <= 1, "xi must lie in [0, 1]");
  require(lambda >= 0, "lambda must be >= 0");
  require(replicas >= 1 && sets >= 1, "k and m_sets must be at least 1");
  require(tree.max_depth >= 0, "max_depth must be >= 0");
}

RealConfig RealConfig::from_config(const Config& config, const std::filesystem::path& base_dir) {
  RealConfig out;
  const auto& s = config.section("real");
  s.require_known({"data", "target", "positive_label", "missing_tokens", "nominal", "ordinal", "exclude", "binary_as_nominal",
                   "drop_threshold", "neighbors", "subset_size", "folds", "candidates", "subsample_frac",
                   "max_depth", "sigmas", "metrics", "xi", "lambda", "seed"});
  out.data = s.get_string("data", "");
  if (!out.data.empty() && out.data.is_relative() && !std::filesystem::exists(out.data) && !base_dir.empty()) {
    out.data = base_dir / out.data;
  }
  out.csv.target = s.get_string("target", "");
  out.csv.positive_label = s.get_string("positive_label", out.csv.positive_label);
  out.csv.missing_tokens = s.get_strings("missing_tokens", out.csv.missing_tokens);
  out.csv.nominal = s.get_strings("nominal", out.csv.nominal);
  out.csv.ordinal = s.get_strings("ordinal", out.csv.ordinal);
  out.csv.exclude = s.get_strings("exclude", out.csv.exclude);
  out.csv.binary_as_nominal = s.get_bool("binary_as_nominal", out.csv.binary_as_nominal);
  out.impute.drop_threshold = s.get_double("drop_threshold", out.impute.drop_threshold);
  out.impute.neighbors = static_cast<int>(s.get_int("neighbors", out.impute.neighbors));
  out.subset_size = s.get_int("subset_size", out.subset_size);
  out.folds = static_cast<int>(s.get_int("folds", out.folds));
  out.candidates = static_cast<int>(s.get_int("candidates", out.candidates));
  out.subsample_frac = s.get_double("subsample_frac", out.subsample_frac);
  out.tree.max_depth = static_cast<int>(s.get_int("max_depth", out.tree.max_depth));
  out.sigmas = s.get_doubles("sigmas", out.sigmas);
  if (s.has("metrics")) {
    out.metrics.clear();
    for (const auto& text : s.get_strings("metrics", {})) out.metrics.push_back(parse_metric(text));
  }
  out.xi = s.get_double("xi", out.xi);
  out.lambda = s.get_double("lambda", out.lambda);
  out.seed = static_cast<std::uint64_t>(s.get_int("seed", static_cast<std::int64_t>(out.seed)));
  read_pvf_section(config, out.aggregator, out.replicas, out.sets);
  out.validate();
  return out;
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::pvf_win: return "pvf_win";
    case Outcome::trad_win: return "trad_win";
    case Outcome::tie: return "tie";
    case Outcome::invalid: return "invalid";
  }
  return "unknown";
}

Dataset load_real_dataset(const RealConfig& config) {
  require(!config.data.empty(), "real.data is not set");
  require(!config.csv.target.empty(), "real.target is not set");
  return drop_and_impute(ingest_csv(config.data, config.csv), config.impute);
}

std::vector<FoldOutcome> run_real_protocol(const Dataset& data, const RealConfig& config, int jobs) {
  config.validate();
  data.validate();
  const Partition partition = partition_subsets(data.rows(), config.subset_size, derive_seed(config.seed, 0));
  require(!partition.subsets.empty(), "dataset is smaller than one subset");
  const auto subset_count = static_cast<Index>(partition.subsets.size());

  std::vector<Dataset> subsets, externals;
  std::vector<std::vector<std::vector<Index>>> folds;
  for (Index s = 0; s < subset_count; ++s) {
    subsets.push_back(data.take(partition.subsets[static_cast<std::size_t>(s)]));
    externals.push_back(data.take(partition.complement(static_cast<std::size_t>(s), data.rows())));
    folds.push_back(stratified_folds(subsets.back().y, config.folds,
                                     derive_seed(config.seed, 1, static_cast<std::uint64_t>(s))));
  }

  const Index units = subset_count * config.folds;
  std::vector<std::vector<FoldOutcome>> per_unit(static_cast<std::size_t>(units));
  parallel_for(units, jobs, [&](Index u) {
    const Index s = u / config.folds;
    const Index f = u % config.folds;
    const auto& sub = subsets[static_cast<std::size_t>(s)];
    const auto& fold_rows = folds[static_cast<std::size_t>(s)];
    std::vector<Index> train_rows;
    for (Index g = 0; g < config.folds; ++g) {
      if (g == f) continue;
      const auto& rows = fold_rows[static_cast<std::size_t>(g)];
      train_rows.insert(train_rows.end(), rows.begin(), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    const auto scaled = standard_scale(sub.take(train_rows),
                                       {sub.take(fold_rows[static_cast<std::size_t>(f)]),
                                        externals[static_cast<std::size_t>(s)]});
    const Dataset& train = scaled[0];
    const Dataset& val = scaled[1];
    const Dataset& external = scaled[2];
    const auto useed = [&](std::uint64_t tag) {
      return derive_seed(config.seed, tag, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(f));
    };
    const auto pool = tree_subsample_pool(train, config.candidates, config.subsample_frac, useed(2), config.tree);
    const CountsGrid plain = validation_counts(pool, val);
    const CountsGrid outside = validation_counts(pool, external);
    std::vector<CountsGrid> perturbed;
    for (const double sigma : config.sigmas) {
      PerturbationConfig perturbation;
      perturbation.sigma = sigma;
      perturbation.xi = config.xi;
      perturbation.lambda = config.lambda;
      perturbation.perturb_features = all_columns(val.cols());
      perturbation.replicas = config.replicas;
      perturbation.sets = config.sets;
      perturbation.seed = useed(3);
      perturbed.push_back(perturbed_counts(pool, val, perturbation));
    }

    auto& out = per_unit[static_cast<std::size_t>(u)];
    for (const auto& metric : config.metrics) {
      const bool valid = !is_ie(metric) || (val.positives() > 0 && external.positives() > 0);
      if (!valid) {
        for (const double sigma : config.sigmas) {
          out.push_back({s, f, metric, sigma, -1, -1, NAN, NAN, Outcome::invalid});
        }
        continue;
      }
      const Eigen::MatrixXd external_scores = outside.scores(metric);
      const Index trad = select_from_scores(plain.scores(metric), Aggregator::quantile(0.25)).chosen;
      for (std::size_t k = 0; k < config.sigmas.size(); ++k) {
        const Index chosen = select_from_scores(perturbed[k].scores(metric), config.aggregator).chosen;
        FoldOutcome o{s, f, metric, config.sigmas[k], trad, chosen, external_scores(trad, 0),
                      external_scores(chosen, 0), Outcome::tie};
        const double diff = o.pvf_external - o.trad_external;
        if (diff > kTieTolerance) o.outcome = Outcome::pvf_win;
        if (diff < -kTieTolerance) o.outcome = Outcome::trad_win;
        out.push_back(o);
      }
    }
  });

  std::vector<FoldOutcome> out;
  for (auto& unit : per_unit) out.insert(out.end(), unit.begin(), unit.end());
  return out;
}

void write_real_csv(std::ostream& out, const std::vector<FoldOutcome>& outcomes) {
  out << "subset,fold,metric,sigma,trad_choice,pvf_choice,trad_external,pvf_external,outcome\n";
  for (const auto& o : outcomes) {
    const bool valid = o.outcome != Outcome::invalid;
    out << o.subset << ',' << o.fold << ',' << to_string(o.metric) << ',' << format_double(o.sigma) << ','
        << (valid ? std::to_string(o.trad_choice) : "na") << ',' << (valid ? std::to_string(o.pvf_choice) : "na")
        << ',' << (valid ? format_double(o.trad_external) : "na") << ','
        << (valid ? format_double(o.pvf_external) : "na") << ',' << to_string(o.outcome) << '\n';
  }
}

std::vector<RealSummary> summarize_real(const std::vector<FoldOutcome>& outcomes) {
  std::vector<RealSummary> out;
  for (const auto& o : outcomes) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const RealSummary& r) { return r.metric == o.metric && r.sigma == o.sigma; });
    if (it == out.end()) {
      out.push_back({o.metric, o.sigma});
      it = out.end() - 1;
    }
    switch (o.outcome) {
      case Outcome::pvf_win: ++it->pvf_wins; break;
      case Outcome::trad_win: ++it->trad_wins; break;
      case Outcome::tie: ++it->ties; break;
      case Outcome::invalid: ++it->invalid; break;
    }
  }
  return out;
}

void write_real_summary_csv(std::ostream& out, const std::vector<RealSummary>& summary) {
  out << "metric,sigma,pvf_wins,trad_wins,ties,invalid,valid,pvf_rate,trad_rate\n";
  for (const auto& r : summary) {
    out << to_string(r.metric) << ',' << format_double(r.sigma) << ',' << r.pvf_wins << ',' << r.trad_wins << ','
        << r.ties << ',' << r.invalid << ',' << r.valid() << ',' << format_double(r.pvf_rate()) << ','
        << format_double(r.trad_rate()) << '\n';
  }
}

std::vector<RealSummary> read_real_summary_csv(std::istream& in) {
  const Table table = read_table(in);
  const auto metric = table.column("metric"), sigma = table.column("sigma"), pw = table.column("pvf_wins"),
             tw = table.column("trad_wins"), ties = table.column("ties"), invalid = table.column("invalid");
  std::vector<RealSummary> out;
  for (const auto& row : table.rows) {
    out.push_back({parse_metric(row[metric]), field_double(row[sigma]), field_index(row[pw]), field_index(row[tw]),
                   field_index(row[ties]), field_index(row[invalid])});
  }
  return out;
}

std::map<std::string, std::string> real_plots(const std::vector<RealSummary>& summary) {
  std::map<std::string, std::vector<BarGroup>> groups;
  std::vector<std::string> order;
  for (const auto& r : summary) {
    const std::string name = to_string(r.metric);
    if (!groups.contains(name)) order.push_back(name);
    const double valid = r.valid() ? static_cast<double>(r.valid()) : 1.0;
    groups[name].push_back({format_double(r.sigma),
                            {100.0 * static_cast<double>(r.pvf_wins) / valid,
                             100.0 * static_cast<double>(r.ties) / valid,
                             100.0 * static_cast<double>(r.trad_wins) / valid}});
  }
  std::map<std::string, std::string> out;
  for (const auto& name : order) {
    std::string file = "real_" + name + ".svg";
    std::replace(file.begin(), file.end(), ':', '_');
    out[file] = bar_chart_svg("Outcomes by sigma, " + name, "% of folds", {"PVF wins", "ties", "traditional wins"},
                              groups[name]);
  }
  return out;
}

}  // namespace pvf
