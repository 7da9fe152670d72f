#include "pvf/selection.hpp"

#include "pvf/error.hpp"
#include "pvf/io.hpp"
#include "pvf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace pvf {

Aggregator Aggregator::quantile(double q) {
  require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
  return {Kind::quantile, q};
}

Aggregator parse_aggregator(std::string_view text) {
  text = trim(text);
  if (text == "mean") return Aggregator::mean();
  if (text == "median") return Aggregator::median();
  if (text.starts_with("quantile:")) {
    double q = 0;
    require(parse_double(text.substr(9), q), "bad quantile level in '" + std::string(text) + "'");
    return Aggregator::quantile(q);
  }
  throw ValidationError("unknown aggregator '" + std::string(text) + "' (expected quantile:<q>, mean, median)");
}

std::string to_string(const Aggregator& aggregator) {
  switch (aggregator.kind) {
    case Aggregator::Kind::quantile:
      return "quantile:" + format_double(aggregator.q);
    case Aggregator::Kind::mean:
      return "mean";
    case Aggregator::Kind::median:
      return "median";
  }
  return {};
}

double aggregate(std::span<const double> scores, const Aggregator& aggregator) {
  require(!scores.empty(), "cannot aggregate an empty score vector");
  if (aggregator.kind == Aggregator::Kind::mean) {
    double offset = 0.0;
    for (const double s : scores) offset += s - scores.front();
    return scores.front() + offset / static_cast<double>(scores.size());
  }
  const double q = aggregator.kind == Aggregator::Kind::median ? 0.5 : aggregator.q;
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

bool SelectionResult::operator==(const SelectionResult& other) const {
  return chosen == other.chosen && tie == other.tie && scores.rows() == other.scores.rows() &&
         scores.cols() == other.scores.cols() && scores == other.scores &&
         aggregated.size() == other.aggregated.size() && aggregated == other.aggregated;
}

SelectionResult select_from_scores(Eigen::MatrixXd scores, const Aggregator& aggregator) {
  require(scores.rows() >= 1, "no candidates to select from");
  require(scores.cols() >= 1, "no scores per candidate");
  SelectionResult result;
  result.aggregated.resize(scores.rows());
  for (Index c = 0; c < scores.rows(); ++c) {
    const Eigen::RowVectorXd row = scores.row(c);
    result.aggregated(c) = aggregate(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), aggregator);
  }
  const double best = result.aggregated.maxCoeff();
  Index leaders = 0;
  result.chosen = -1;
  for (Index c = 0; c < scores.rows(); ++c) {
    if (result.aggregated(c) >= best - kTieTolerance) {
      if (result.chosen < 0) result.chosen = c;
      ++leaders;
    }
  }
  result.tie = leaders >= 2;
  result.scores = std::move(scores);
  return result;
}

Eigen::MatrixXd CountsGrid::scores(const MetricSpec& metric) const {
  Eigen::MatrixXd out(candidates, sets);
  for (Index c = 0; c < candidates; ++c) {
    for (Index m = 0; m < sets; ++m) out(c, m) = score(at(c, m), metric);
  }
  return out;
}

CountsGrid validation_counts(const CandidatePool& pool, const Dataset& val) {
  require(!pool.empty(), "no candidates to select from");
  require(val.rows() > 0, "validation set is empty");
  CountsGrid grid{static_cast<Index>(pool.size()), 1, std::vector<ConfusionCounts>(pool.size())};
  for (std::size_t c = 0; c < pool.size(); ++c) grid.cells[c] = confusion(pool[c]->predict(val.x), val.y);
  return grid;
}

CountsGrid perturbed_counts(const CandidatePool& pool, const Dataset& val,
                            const PerturbationConfig& perturbation, int jobs) {
  require(!pool.empty(), "no candidates to select from");
  perturbation.validate();
  const auto candidates = static_cast<Index>(pool.size());
  CountsGrid grid{candidates, perturbation.sets,
                  std::vector<ConfusionCounts>(static_cast<std::size_t>(candidates * perturbation.sets))};
  parallel_for(perturbation.sets, jobs, [&](Index m) {
    const Dataset set = build_perturbed_set(val, perturbation, static_cast<std::uint64_t>(m));
    for (Index c = 0; c < candidates; ++c) {
      grid.at(c, m) = confusion(pool[static_cast<std::size_t>(c)]->predict(set.x), set.y);
    }
  });
  return grid;
}

SelectionResult pvf_select(const CandidatePool& pool, const Dataset& val, const PVFConfig& config,
                           int jobs) {
  config.metric.validate();
  if (config.metric.kind == MetricSpec::Kind::intervention_efficiency && val.positives() == 0) {
    throw NoPositivesError();
  }
  const CountsGrid grid = perturbed_counts(pool, val, config.perturbation, jobs);
  return select_from_scores(grid.scores(config.metric), config.aggregator);
}

SelectionResult traditional_select(const CandidatePool& pool, const Dataset& val, const MetricSpec& metric) {
  metric.validate();
  return select_from_scores(validation_counts(pool, val).scores(metric), Aggregator::quantile(0.25));
}

void write_selection_csv(std::ostream& out, const SelectionResult& result, const CandidatePool& pool) {
  require(static_cast<Index>(pool.size()) == result.scores.rows(), "pool does not match selection result");
  out << "id,descriptor";
  for (Index m = 0; m < result.scores.cols(); ++m) out << ",score_" << (m + 1);
  out << ",aggregate,chosen\n";
  for (Index c = 0; c < result.scores.rows(); ++c) {
    out << c << ',' << pool[static_cast<std::size_t>(c)]->descriptor();
    for (Index m = 0; m < result.scores.cols(); ++m) out << ',' << format_double(result.scores(c, m));
    out << ',' << format_double(result.aggregated(c)) << ',' << (c == result.chosen ? 1 : 0) << '\n';
  }
}

}  // namespace pvf
