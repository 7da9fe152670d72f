#include "pvf/metrics.hpp"

#include "pvf/error.hpp"
#include "pvf/io.hpp"

#include <algorithm>
#include <cmath>

namespace pvf {

namespace {

void check_gamma(double gamma) {
  require(gamma > 0.0 && gamma <= 1.0, "capacity gamma must lie in (0, 1]");
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels) {
  require(predictions.size() == labels.size(), "predictions and labels differ in length");
  require(!labels.empty(), "confusion counts need at least one sample");
  ConfusionCounts counts;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = predictions[i] != 0;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++counts.tp;
    else if (predicted) ++counts.fp;
    else if (actual) ++counts.fn;
    else ++counts.tn;
  }
  return counts;
}

ConfusionCounts confusion(const Eigen::VectorXi& predictions, const Eigen::VectorXi& labels) {
  return confusion(std::span<const int>(predictions.data(), static_cast<std::size_t>(predictions.size())),
                   std::span<const int>(labels.data(), static_cast<std::size_t>(labels.size())));
}

double precision(const ConfusionCounts& c) {
  return c.flagged() == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.flagged());
}

double recall(const ConfusionCounts& c) {
  return c.positives() == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.positives());
}

double f1(const ConfusionCounts& c) {
  const double p = precision(c);
  const double r = recall(c);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double accuracy(const ConfusionCounts& c) {
  require(c.n() > 0, "accuracy of an empty set");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.n());
}

IEInputs ie_inputs(double p, double r, double prevalence, double gamma) {
  check_gamma(gamma);
  if (!(prevalence > 0.0)) throw NoPositivesError();
  require(p >= 0.0 && p <= 1.0 && r >= 0.0 && r <= 1.0 && prevalence <= 1.0, "rates must lie in [0, 1]");
  const double flagged = p > 0.0 ? prevalence * r / p : 0.0;
  return {p, r, prevalence, gamma, std::min(gamma, flagged)};
}

IEInputs ie_inputs(const ConfusionCounts& counts, double gamma) {
  require(counts.n() > 0, "IE of an empty set");
  check_gamma(gamma);
  const double p = precision(counts);
  const double r = recall(counts);
  const double prevalence = counts.prevalence();
  const double flagged = p > 0.0 ? prevalence * r / p : counts.flagged_fraction();
  return {p, r, prevalence, gamma, std::min(gamma, flagged)};
}

double ie_ratio(const IEInputs& in) {
  check_gamma(in.gamma);
  if (!(in.prevalence > 0.0)) throw NoPositivesError();
  require(in.prevalence <= 1.0 && in.precision >= 0.0 && in.precision <= 1.0,
          "rates must lie in [0, 1]");
  const double s = in.share;
  require(s >= 0.0 && s <= in.gamma, "share must lie in [0, gamma]");
  if (s == in.gamma) return in.precision / in.prevalence;
  // s < gamma <= 1 here, so 1 - s > 0.
  return 1.0 + s * (in.precision - in.prevalence) * (1.0 - in.gamma) /
                   ((1.0 - s) * in.gamma * in.prevalence);
}

double ie_counting(const ConfusionCounts& counts, double gamma) {
  check_gamma(gamma);
  require(counts.n() > 0, "IE of an empty set");
  if (counts.positives() == 0) throw NoPositivesError();
  const auto beta = static_cast<double>(counts.n());
  const auto alpha = static_cast<double>(counts.positives());
  const auto flagged = static_cast<double>(counts.flagged());
  if (counts.flagged() == 0) return 1.0;
  const double budget = gamma * beta;
  const double p = static_cast<double>(counts.tp) / flagged;
  const double guided = std::min(budget, flagged);
  double captured = guided * p;
  if (beta > guided) captured += (budget - guided) * (alpha - guided * p) / (beta - guided);
  return captured / (budget * alpha / beta);
}

MetricSpec MetricSpec::ie(double gamma) {
  check_gamma(gamma);
  return {Kind::intervention_efficiency, gamma};
}

void MetricSpec::validate() const {
  if (kind == Kind::intervention_efficiency) check_gamma(gamma);
}

MetricSpec parse_metric(std::string_view text) {
  text = trim(text);
  if (text == "f1") return MetricSpec::f1();
  if (text == "accuracy") return MetricSpec::accuracy();
  if (text.starts_with("ie:")) {
    double gamma = 0;
    require(parse_double(text.substr(3), gamma), "bad capacity in metric '" + std::string(text) + "'");
    return MetricSpec::ie(gamma);
  }
  throw ValidationError("unknown metric '" + std::string(text) + "' (expected ie:<gamma>, f1, accuracy)");
}

std::string to_string(const MetricSpec& spec) {
  switch (spec.kind) {
    case MetricSpec::Kind::intervention_efficiency:
      return "ie:" + format_double(spec.gamma);
    case MetricSpec::Kind::f1:
      return "f1";
    case MetricSpec::Kind::accuracy:
      return "accuracy";
  }
  return {};
}

double score(const ConfusionCounts& counts, const MetricSpec& spec) {
  switch (spec.kind) {
    case MetricSpec::Kind::intervention_efficiency:
      return ie_ratio(ie_inputs(counts, spec.gamma));
    case MetricSpec::Kind::f1:
      return f1(counts);
    case MetricSpec::Kind::accuracy:
      return accuracy(counts);
  }
  return 0.0;
}

double evaluate(const Predictor& model, const Dataset& data, const MetricSpec& spec) {
  require(data.rows() > 0, "evaluation set is empty");
  return score(confusion(model.predict(data.x), data.y), spec);
}

}  // namespace pvf
