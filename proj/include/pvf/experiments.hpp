#pragma once

#include "pvf/data.hpp"
#include "pvf/dataset.hpp"
#include "pvf/metrics.hpp"
#include "pvf/models.hpp"
#include "pvf/selection.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pvf {

class Config;

/// Name of the synthetic track that scores with F1 at low separability and
/// accuracy above the switch point.
inline constexpr const char* kStandardTrack = "f1_accuracy";

struct SweepConfig {
  std::vector<Index> sizes{50, 100};
  std::vector<double> mus{0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9, 2.1, 2.3, 2.5, 2.7, 2.9};
  std::vector<double> sigmas{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<double> gammas{0.1, 0.3, 0.5, 0.7, 0.9};
  Index reps = 300;
  std::uint64_t seed = 20240917;
  Aggregator aggregator = Aggregator::quantile(0.25);
  int replicas = 7;
  int sets = 100;
  double train_frac = 0.7;
  int smote_k = 5;
  /// The standard track uses F1 while mu <= this value, accuracy above it.
  double accuracy_above_mu = 2.5;
  int max_retries = 10;
  /// Present the ten pair models in a seeded random order each repetition, so
  /// the lowest-index tie-break does not favour the true pair.
  bool shuffle_candidates = true;

  void validate() const;
  /// Reads `[sweep]` (grids, reps, seed, train_frac, smote_k, accuracy_above_mu,
  /// max_retries, shuffle_candidates) and `[pvf]` (aggregator, k, m_sets).
  static SweepConfig from_config(const Config& config);
};

struct Track {
  std::string name;
  MetricSpec metric;
};

/// IE at every gamma of the grid, then the standard track for this mu.
std::vector<Track> synthetic_tracks(const SweepConfig& config, double mu);

struct TrackOutcome {
  std::string track;
  MetricSpec metric;
  bool pvf_correct = false;
  bool trad_correct = false;
};

struct RepResult {
  std::vector<TrackOutcome> outcomes;  // same order as synthetic_tracks
  int retries = 0;
};

/// Seed of repetition `rep` of the (n, mu) family. Shared by every sigma so
/// comparisons across sigma are paired on the same data.
std::uint64_t rep_seed(const SweepConfig& config, Index n, double mu, Index rep);

/// One repetition for each sigma on a single dataset, split and candidate pool.
/// A split whose train or validation part lacks positives is redrawn with a
/// derived seed, at most config.max_retries times.
std::vector<RepResult> run_synthetic_rep(Index n, double mu, const std::vector<double>& sigmas,
                                         std::uint64_t seed, const SweepConfig& config);
RepResult run_synthetic_rep(Index n, double mu, double sigma, std::uint64_t seed, const SweepConfig& config);

struct ConfigResult {
  Index n = 0;
  double mu = 0;
  double sigma = 0;
  std::string track;
  MetricSpec metric;
  Index reps = 0;
  Index c_pvf = 0;
  Index c_trad = 0;
  Index pvf_only = 0;
  Index trad_only = 0;
  Index retries = 0;
  double mcnemar_p = 1;
  double paired_t_p = 1;

  Index d() const { return c_pvf - c_trad; }
};

/// Results ordered by n, mu, sigma, then track. Identical for every `jobs`.
std::vector<ConfigResult> run_sweep(const SweepConfig& config, int jobs = 1);
void write_sweep_csv(std::ostream& out, const std::vector<ConfigResult>& results);
std::vector<ConfigResult> read_sweep_csv(std::istream& in);

struct TrackSummary {
  std::string track;
  Index configs = 0;
  Index positive = 0;  // configs with d > 0
  Index negative = 0;
  double percent_positive = 0;
};

std::vector<TrackSummary> summarize_sweep(const std::vector<ConfigResult>& results);
void write_sweep_summary_csv(std::ostream& out, const std::vector<TrackSummary>& summary);

enum class Band { low, moderate, high };
/// low: mu <= 1.0, moderate: 1.0 < mu <= 2.0, high: mu > 2.0.
Band separability_band(double mu);
std::string to_string(Band band);

struct SensitivityPoint {
  Index n = 0;
  Band band = Band::low;
  std::string track;
  double sigma = 0;
  double mean_d = 0;
  Index configs = 0;
};

/// Mean d per (n, band, track, sigma), sigma ascending within each curve.
std::vector<SensitivityPoint> sensitivity_report(const std::vector<ConfigResult>& results);
void write_sensitivity_csv(std::ostream& out, const std::vector<SensitivityPoint>& points);
std::vector<SensitivityPoint> read_sensitivity_csv(std::istream& in);

struct TrendCheck {
  Index n = 0;
  Band band = Band::low;
  std::string track;
  bool non_decreasing = false;
};

/// Whether each curve's mean d never drops as sigma grows.
std::vector<TrendCheck> trend_checks(const std::vector<SensitivityPoint>& points);
void write_trend_csv(std::ostream& out, const std::vector<TrendCheck>& checks);

/// One SVG per (n, band): a line per track against log sigma. Keys are file names.
std::map<std::string, std::string> sensitivity_plots(const std::vector<SensitivityPoint>& points);

struct RealConfig {
  std::filesystem::path data;
  CsvOptions csv;
  ImputeOptions impute;
  Index subset_size = 100;
  int folds = 5;
  int candidates = 100;
  double subsample_frac = 0.7;
  TreeOptions tree;
  std::vector<double> sigmas{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 0.2, 0.3, 0.4, 0.5};
  std::vector<MetricSpec> metrics{MetricSpec::ie(0.1), MetricSpec::ie(0.3), MetricSpec::ie(0.5),
                                  MetricSpec::ie(0.7), MetricSpec::ie(0.9), MetricSpec::f1()};
  double xi = 0.1;
  double lambda = 0.1;
  int replicas = 7;
  int sets = 100;
  Aggregator aggregator = Aggregator::quantile(0.25);
  std::uint64_t seed = 20240917;

  void validate() const;
  /// Reads `[real]` and `[pvf]`. A relative data path that does not exist from
  /// the working directory is resolved against `base_dir`.
  static RealConfig from_config(const Config& config, const std::filesystem::path& base_dir = {});
};

enum class Outcome { pvf_win, trad_win, tie, invalid };
std::string to_string(Outcome outcome);

struct FoldOutcome {
  Index subset = 0;
  Index fold = 0;
  MetricSpec metric;
  double sigma = 0;
  Index trad_choice = 0;
  Index pvf_choice = 0;
  double trad_external = 0;
  double pvf_external = 0;
  Outcome outcome = Outcome::tie;
};

/// Ingests and imputes config.data. Scaling happens per fold inside the protocol.
Dataset load_real_dataset(const RealConfig& config);

/// Outcomes ordered by subset, fold, metric, then sigma. A metric that cannot
/// be scored (IE without positives in validation or external test) is invalid.
std::vector<FoldOutcome> run_real_protocol(const Dataset& data, const RealConfig& config, int jobs = 1);
void write_real_csv(std::ostream& out, const std::vector<FoldOutcome>& outcomes);

struct RealSummary {
  MetricSpec metric;
  double sigma = 0;
  Index pvf_wins = 0;
  Index trad_wins = 0;
  Index ties = 0;
  Index invalid = 0;

  Index valid() const { return pvf_wins + trad_wins + ties; }
  double pvf_rate() const { return valid() ? static_cast<double>(pvf_wins) / static_cast<double>(valid()) : 0; }
  double trad_rate() const { return valid() ? static_cast<double>(trad_wins) / static_cast<double>(valid()) : 0; }
};

std::vector<RealSummary> summarize_real(const std::vector<FoldOutcome>& outcomes);
void write_real_summary_csv(std::ostream& out, const std::vector<RealSummary>& summary);
std::vector<RealSummary> read_real_summary_csv(std::istream& in);
/// One grouped bar chart per metric (win/tie/loss percentages by sigma).
std::map<std::string, std::string> real_plots(const std::vector<RealSummary>& summary);

}  // namespace pvf
