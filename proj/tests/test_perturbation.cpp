#include "pvf/config.hpp"
#include "pvf/error.hpp"
#include "pvf/metrics.hpp"
#include "pvf/perturbation.hpp"
#include "pvf/rng.hpp"
#include "test_support.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace pvf;

namespace {

constexpr int kDraws = 100000;

// Pearson chi-square goodness of fit; returns the upper-tail p-value.
double chi_square_p(const std::vector<long>& observed, const std::vector<double>& probabilities) {
  double stat = 0;
  long total = 0;
  for (const long o : observed) total += o;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (probabilities[i] == 0) {
      EXPECT_EQ(observed[i], 0);
      continue;
    }
    const double expected = probabilities[i] * static_cast<double>(total);
    stat += (static_cast<double>(observed[i]) - expected) * (static_cast<double>(observed[i]) - expected) / expected;
    ++cells;
  }
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(cells - 1), stat));
}

Dataset mixed_dataset() {
  Eigen::MatrixXd x(6, 3);
  x << 0.5, 0, 1,  //
      -1.2, 1, 2,  //
      2.0, 2, 3,   //
      0.1, 0, 1,   //
      0.3, 1, 3,   //
      -0.7, 2, 2;
  Dataset d;
  d.x = x;
  d.y = (Eigen::VectorXi(6) << 1, 0, 0, 1, 0, 0).finished();
  d.schema = {FeatureSpec::numeric("a"), FeatureSpec::nominal("b", {0, 1, 2}), FeatureSpec::ordinal("c", {1, 2, 3})};
  return d;
}

}  // namespace

TEST(PerturbNumeric, ZeroSigmaIsIdentity) {
  Stream rng(1);
  EXPECT_EQ(perturb_numeric(1.3, 0.0, rng), 1.3);
}

TEST(PerturbNumeric, MeanAndVariance) {
  Stream rng(2);
  double sum = 0, squares = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double v = perturb_numeric(0.0, 0.1, rng);
    sum += v;
    squares += v * v;
  }
  const double mean = sum / kDraws;
  const double variance = squares / kDraws - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.001);
  EXPECT_NEAR(variance, 0.01, 0.001);
}

TEST(PerturbNominal, ZeroXiKeepsCategory) {
  Stream rng(3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(perturb_nominal(2, 4, 0.0, rng), 2u);
}

TEST(PerturbNominal, ForcedFlipWithTwoCategories) {
  Stream rng(4);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(perturb_nominal(0, 2, 1.0, rng), 1u);
}

TEST(PerturbNominal, AlternativesAreUniform) {
  Stream rng(5);
  std::vector<long> seen(3, 0);
  for (int i = 0; i < kDraws; ++i) ++seen[perturb_nominal(0, 3, 0.1, rng)];
  EXPECT_NEAR(seen[1] / double(kDraws), 0.05, 0.003);
  EXPECT_NEAR(seen[2] / double(kDraws), 0.05, 0.003);
  EXPECT_GT(chi_square_p(seen, {0.9, 0.05, 0.05}), 0.001);
}

TEST(PerturbOrdinal, ZeroXiKeepsLevel) {
  Stream rng(6);
  const auto spec = FeatureSpec::ordinal("o", {1, 2, 3, 4});
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(perturb_ordinal(1, spec, 0.0, 0.5, rng), 1u);
}

TEST(PerturbOrdinal, ZeroLambdaIsUniformOverAlternatives) {
  Stream rng(7);
  const auto spec = FeatureSpec::ordinal("o", {1, 2, 3, 4});
  std::vector<long> seen(4, 0);
  for (int i = 0; i < kDraws; ++i) ++seen[perturb_ordinal(0, spec, 0.3, 0.0, rng)];
  for (int a = 1; a < 4; ++a) EXPECT_NEAR(seen[static_cast<std::size_t>(a)] / double(kDraws), 0.1, 0.004);
  EXPECT_GT(chi_square_p(seen, {0.7, 0.1, 0.1, 0.1}), 0.001);
}

TEST(PerturbOrdinal, DistanceDecayMassFunction) {
  Stream rng(8);
  const auto spec = FeatureSpec::ordinal("o", {1, 2, 3});
  std::vector<long> seen(3, 0);
  for (int i = 0; i < kDraws; ++i) ++seen[perturb_ordinal(0, spec, 0.1, 0.1, rng)];
  const double z = std::exp(-0.1) + std::exp(-0.2);
  EXPECT_GT(chi_square_p(seen, {0.9, 0.1 * std::exp(-0.1) / z, 0.1 * std::exp(-0.2) / z}), 0.001);
}

TEST(PerturbOrdinal, CustomDistanceMatrix) {
  Stream rng(9);
  auto spec = FeatureSpec::ordinal("o", {1, 2, 3});
  spec.distance = (Eigen::MatrixXd(3, 3) << 0, 1, 4, 1, 0, 1, 4, 1, 0).finished();
  std::vector<long> seen(3, 0);
  for (int i = 0; i < kDraws; ++i) ++seen[perturb_ordinal(0, spec, 0.5, 0.8, rng)];
  const double z = std::exp(-0.8) + std::exp(-3.2);
  EXPECT_GT(chi_square_p(seen, {0.5, 0.5 * std::exp(-0.8) / z, 0.5 * std::exp(-3.2) / z}), 0.001);
}

TEST(BuildPerturbedSet, ZeroControlsRepeatRows) {
  const auto val = mixed_dataset();
  PerturbationConfig cfg;
  cfg.perturb_features = {0, 1, 2};
  cfg.replicas = 3;
  const auto out = build_perturbed_set(val, cfg, 0);
  ASSERT_EQ(out.rows(), 18);
  for (Index i = 0; i < val.rows(); ++i) {
    for (Index j = 0; j < 3; ++j) {
      EXPECT_EQ(out.x.row(i * 3 + j), val.x.row(i));
      EXPECT_EQ(out.y(i * 3 + j), val.y(i));
    }
  }
}

TEST(BuildPerturbedSet, LabelsTiledAndCategoriesValid) {
  const auto val = mixed_dataset();
  PerturbationConfig cfg;
  cfg.sigma = 0.3;
  cfg.xi = 0.5;
  cfg.lambda = 0.2;
  cfg.perturb_features = {0, 1, 2};
  cfg.replicas = 7;
  cfg.seed = 42;
  for (std::uint64_t m = 0; m < 20; ++m) {
    const auto out = build_perturbed_set(val, cfg, m);
    ASSERT_EQ(out.rows(), 42);
    EXPECT_EQ(out.positives(), 7 * val.positives());
    for (Index i = 0; i < out.rows(); ++i) EXPECT_EQ(out.y(i), val.y(i / 7));
    EXPECT_NO_THROW(out.validate());
  }
}

TEST(BuildPerturbedSet, SizeForHundredRows) {
  const auto val = fixtures::random_dataset(100, 5, 3);
  PerturbationConfig cfg;
  cfg.sigma = 0.1;
  cfg.perturb_features = {0, 1, 2, 3, 4};
  EXPECT_EQ(build_perturbed_set(val, cfg, 0).rows(), 700);
}

TEST(BuildPerturbedSet, UnlistedFeaturesAreCopied) {
  const auto val = mixed_dataset();
  PerturbationConfig cfg;
  cfg.sigma = 1.0;
  cfg.xi = 1.0;
  cfg.perturb_features = {0};
  cfg.replicas = 2;
  const auto out = build_perturbed_set(val, cfg, 3);
  for (Index i = 0; i < out.rows(); ++i) {
    EXPECT_EQ(out.x(i, 1), val.x(i / 2, 1));
    EXPECT_EQ(out.x(i, 2), val.x(i / 2, 2));
  }
}

TEST(BuildPerturbedSet, ReproducibleAndDistinctAcrossSets) {
  const auto val = fixtures::random_dataset(30, 4, 9);
  PerturbationConfig cfg;
  cfg.sigma = 0.2;
  cfg.perturb_features = {0, 1, 2, 3};
  cfg.seed = 5;
  const auto a = build_perturbed_set(val, cfg, 4);
  const auto b = build_perturbed_set(val, cfg, 4);
  const auto c = build_perturbed_set(val, cfg, 5);
  EXPECT_EQ(a.x, b.x);
  EXPECT_NE(a.x, c.x);
  // Noise in different sets should be uncorrelated.
  std::vector<double> noise_a, noise_c;
  for (Index i = 0; i < a.rows(); ++i) {
    noise_a.push_back(a.x(i, 0) - val.x(i / 7, 0));
    noise_c.push_back(c.x(i, 0) - val.x(i / 7, 0));
  }
  double sab = 0, saa = 0, scc = 0;
  for (std::size_t i = 0; i < noise_a.size(); ++i) {
    sab += noise_a[i] * noise_c[i];
    saa += noise_a[i] * noise_a[i];
    scc += noise_c[i] * noise_c[i];
  }
  EXPECT_LT(std::abs(sab / std::sqrt(saa * scc)), 4.0 / std::sqrt(static_cast<double>(noise_a.size())));
}

TEST(BuildPerturbedSet, ZeroControlsPreserveEveryMetric) {
  const auto val = fixtures::random_dataset(40, 3, 12);
  PerturbationConfig cfg;
  cfg.perturb_features = {0, 1, 2};
  cfg.replicas = 7;
  const auto out = build_perturbed_set(val, cfg, 0);
  for (const double threshold : {-1.0, 0.0, 0.4, 1.5}) {
    const fixtures::ThresholdPredictor model(1, threshold);
    for (const auto& spec : {MetricSpec::f1(), MetricSpec::accuracy(), MetricSpec::ie(0.1), MetricSpec::ie(0.6)}) {
      EXPECT_EQ(evaluate(model, out, spec), evaluate(model, val, spec));
    }
  }
}

TEST(PerturbationConfig, ValidationAndRoundTrip) {
  PerturbationConfig cfg;
  cfg.sigma = 0.25;
  cfg.xi = 0.1;
  cfg.lambda = 0.3;
  cfg.perturb_features = {0, 2, 4};
  cfg.replicas = 5;
  cfg.sets = 60;
  cfg.seed = 1234567;
  const auto parsed = PerturbationConfig::from_config(Config::parse(cfg.to_config()).section("perturbation"));
  EXPECT_EQ(parsed, cfg);

  PerturbationConfig bad;
  bad.sigma = -1;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = {};
  bad.xi = 1.5;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = {};
  bad.replicas = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}
