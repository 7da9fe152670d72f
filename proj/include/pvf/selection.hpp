#pragma once

#include "pvf/dataset.hpp"
#include "pvf/metrics.hpp"
#include "pvf/perturbation.hpp"
#include "pvf/predictor.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pvf {

struct Aggregator {
  enum class Kind { quantile, mean, median };

  Kind kind = Kind::quantile;
  double q = 0.25;

  static Aggregator quantile(double q);
  static Aggregator mean() { return {Kind::mean, 0.0}; }
  static Aggregator median() { return {Kind::median, 0.5}; }

  bool operator==(const Aggregator&) const = default;
};

/// Accepts "quantile:<q>", "mean", "median".
Aggregator parse_aggregator(std::string_view text);
std::string to_string(const Aggregator& aggregator);

/// Quantiles interpolate linearly between order statistics (R type 7). The
/// mean is accumulated relative to the first score, so equal scores aggregate
/// to exactly that score.
double aggregate(std::span<const double> scores, const Aggregator& aggregator);

/// Scores that tie with the best within this tolerance count as a tie.
inline constexpr double kTieTolerance = 1e-12;

struct SelectionResult {
  Index chosen = 0;
  Eigen::MatrixXd scores;      // candidates x sets (one column for the traditional method)
  Eigen::VectorXd aggregated;  // one entry per candidate
  bool tie = false;

  bool operator==(const SelectionResult& other) const;
};

/// Lowest-index candidate among those within kTieTolerance of the maximum.
SelectionResult select_from_scores(Eigen::MatrixXd scores, const Aggregator& aggregator);

/// Confusion counts for every (candidate, set) pair.
struct CountsGrid {
  Index candidates = 0;
  Index sets = 0;
  std::vector<ConfusionCounts> cells;  // candidate-major

  const ConfusionCounts& at(Index candidate, Index set) const {
    return cells[static_cast<std::size_t>(candidate * sets + set)];
  }
  ConfusionCounts& at(Index candidate, Index set) {
    return cells[static_cast<std::size_t>(candidate * sets + set)];
  }

  Eigen::MatrixXd scores(const MetricSpec& metric) const;
};

/// Counts on the unperturbed set (one column).
CountsGrid validation_counts(const CandidatePool& pool, const Dataset& val);

/// Builds each perturbed set once and evaluates every candidate on it.
CountsGrid perturbed_counts(const CandidatePool& pool, const Dataset& val,
                            const PerturbationConfig& perturbation, int jobs = 1);

struct PVFConfig {
  PerturbationConfig perturbation;
  Aggregator aggregator = Aggregator::quantile(0.25);
  MetricSpec metric = MetricSpec::f1();
};

SelectionResult pvf_select(const CandidatePool& pool, const Dataset& val, const PVFConfig& config,
                           int jobs = 1);

SelectionResult traditional_select(const CandidatePool& pool, const Dataset& val, const MetricSpec& metric);

/// One row per candidate: id, descriptor, score_1..score_M, aggregate, chosen.
void write_selection_csv(std::ostream& out, const SelectionResult& result, const CandidatePool& pool);

}  // namespace pvf
