#pragma once

#include "pvf/dataset.hpp"
#include "pvf/predictor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pvf {

/// Confusion matrix cells; the sufficient statistic for every metric here.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t n() const { return tp + fp + tn + fn; }
  std::int64_t positives() const { return tp + fn; }
  std::int64_t flagged() const { return tp + fp; }
  double prevalence() const { return static_cast<double>(positives()) / static_cast<double>(n()); }
  double flagged_fraction() const { return static_cast<double>(flagged()) / static_cast<double>(n()); }

  ConfusionCounts& operator+=(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels);
ConfusionCounts confusion(const Eigen::VectorXi& predictions, const Eigen::VectorXi& labels);

// Zero when the denominator is zero.
double precision(const ConfusionCounts& counts);
double recall(const ConfusionCounts& counts);
double f1(const ConfusionCounts& counts);
double accuracy(const ConfusionCounts& counts);

/// Rates feeding the closed form. `share` is s = min(gamma, flagged fraction).
struct IEInputs {
  double precision = 0;
  double recall = 0;
  double prevalence = 0;
  double gamma = 0;
  double share = 0;
};

/// From population rates. The flagged fraction is prevalence * recall / precision,
/// or zero when precision is zero (nobody flagged).
IEInputs ie_inputs(double precision, double recall, double prevalence, double gamma);

/// From counts on the evaluation set itself. A model that flags people but hits
/// no positive has precision zero; its share comes from the flagged count.
IEInputs ie_inputs(const ConfusionCounts& counts, double gamma);

/// Intervention Efficiency from rates:
///   [s p + (gamma - s)(pi - s p)/(1 - s)] / (gamma pi),  s = min(gamma, pi r / p).
/// Evaluated per regime so the anchors come out exact: p/pi when the budget
/// is exhausted on flagged cases (s = gamma), otherwise
///   1 + s (p - pi)(1 - gamma) / ((1 - s) gamma pi).
double ie_ratio(const IEInputs& inputs);

/// Intervention Efficiency as expected captured positives, model-guided over
/// uniform, with a fractional budget c = gamma * n:
///   c' = min(c, flagged),  T = c' p + (c - c')(alpha - c' p)/(n - c'),  T_uniform = c alpha / n.
double ie_counting(const ConfusionCounts& counts, double gamma);

struct MetricSpec {
  enum class Kind { intervention_efficiency, f1, accuracy };

  Kind kind = Kind::f1;
  double gamma = 0;

  static MetricSpec ie(double gamma);
  static MetricSpec f1() { return {Kind::f1, 0}; }
  static MetricSpec accuracy() { return {Kind::accuracy, 0}; }

  void validate() const;
  bool operator==(const MetricSpec&) const = default;
};

/// Accepts "ie:<gamma>", "f1", "accuracy".
MetricSpec parse_metric(std::string_view text);
std::string to_string(const MetricSpec& spec);

double score(const ConfusionCounts& counts, const MetricSpec& spec);

/// Predicts on the dataset and scores the predictions. IE uses the prevalence
/// of `data` itself.
double evaluate(const Predictor& model, const Dataset& data, const MetricSpec& spec);

}  // namespace pvf
