#include "pvf/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace pvf;

namespace {

double binomial_pmf(int n, int k) {
  double log_p = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0);
  return std::exp(log_p);
}

}  // namespace

TEST(McNemar, MatchesDirectBinomialSum) {
  for (int b = 0; b <= 15; ++b) {
    for (int c = 0; c <= 15; ++c) {
      const int n = b + c;
      if (n == 0) {
        EXPECT_EQ(mcnemar_exact_p(b, c), 1.0);
        continue;
      }
      double tail = 0;
      for (int k = 0; k <= std::min(b, c); ++k) tail += binomial_pmf(n, k);
      EXPECT_NEAR(mcnemar_exact_p(b, c), std::min(1.0, 2 * tail), 1e-12);
    }
  }
}

TEST(SignTest, UpperTail) {
  EXPECT_NEAR(sign_test_greater_p(10, 0), std::pow(0.5, 10), 1e-15);
  EXPECT_EQ(sign_test_greater_p(0, 0), 1.0);
  double tail = 0;
  for (int k = 30; k <= 40; ++k) tail += binomial_pmf(40, k);
  EXPECT_NEAR(sign_test_greater_p(30, 10), tail, 1e-12);
}

TEST(PairedT, KnownValue) {
  // mean 0.5, sd 1, n 16 -> t = 2, 15 df, two-sided p = 0.063945...
  std::vector<double> d;
  for (int i = 0; i < 8; ++i) {
    d.push_back(0.5 + std::sqrt(15.0 / 16.0));
    d.push_back(0.5 - std::sqrt(15.0 / 16.0));
  }
  EXPECT_NEAR(sample_mean(d), 0.5, 1e-12);
  EXPECT_NEAR(sample_sd(d), 1.0, 1e-12);
  EXPECT_NEAR(paired_t_p(d), 0.06394, 1e-4);
}

TEST(PairedT, DegenerateSpread) {
  const std::vector<double> zeros(10, 0.0), ones(10, 1.0);
  EXPECT_EQ(paired_t_p(zeros), 1.0);
  EXPECT_EQ(paired_t_p(ones), 0.0);
}
