#include "pvf/stats.hpp"

#include "pvf/error.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

namespace pvf {

double mcnemar_exact_p(std::int64_t b, std::int64_t c) {
  require(b >= 0 && c >= 0, "discordant counts must be non-negative");
  const std::int64_t n = b + c;
  if (n == 0) return 1.0;
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), 0.5);
  const double tail = boost::math::cdf(dist, static_cast<double>(std::min(b, c)));
  return std::min(1.0, 2.0 * tail);
}

double sign_test_greater_p(std::int64_t wins, std::int64_t losses) {
  require(wins >= 0 && losses >= 0, "sign-test counts must be non-negative");
  const std::int64_t n = wins + losses;
  if (n == 0) return 1.0;
  if (wins == 0) return 1.0;
  const boost::math::binomial_distribution<double> dist(static_cast<double>(n), 0.5);
  // P(X >= wins)
  return boost::math::cdf(boost::math::complement(dist, static_cast<double>(wins - 1)));
}

double sample_mean(std::span<const double> values) {
  require(!values.empty(), "mean of an empty sample");
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  require(values.size() >= 2, "standard deviation needs two values");
  const double mean = sample_mean(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double paired_t_p(std::span<const double> differences) {
  require(differences.size() >= 2, "paired t-test needs two pairs");
  const double mean = sample_mean(differences);
  const double sd = sample_sd(differences);
  if (sd == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double dof = static_cast<double>(differences.size() - 1);
  const double t = mean / (sd / std::sqrt(static_cast<double>(differences.size())));
  const boost::math::students_t_distribution<double> dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

}  // namespace pvf
