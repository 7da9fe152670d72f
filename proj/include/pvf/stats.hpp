#pragma once

#include <cstdint>
#include <span>

namespace pvf {

/// Exact two-sided McNemar test on discordant counts (b, c): binomial(b + c, 1/2).
/// Returns 1 when there are no discordant pairs.
double mcnemar_exact_p(std::int64_t b, std::int64_t c);

/// One-sided sign test, H1: wins are more likely than losses. Ties excluded.
double sign_test_greater_p(std::int64_t wins, std::int64_t losses);

/// Two-sided paired t-test on per-pair differences. With zero spread the
/// p-value is 1 for a zero mean and 0 otherwise.
double paired_t_p(std::span<const double> differences);

double sample_mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> values);

}  // namespace pvf
