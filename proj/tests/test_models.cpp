#include "pvf/error.hpp"
#include "pvf/models.hpp"
#include "pvf/rng.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace pvf;

namespace {

// Independent penalized log-likelihood: plain loops, log1p form.
double reference_objective(const Dataset& d, FeaturePair pair, const Eigen::Vector3d& w, double l2) {
  double total = 0;
  for (Index i = 0; i < d.rows(); ++i) {
    const double z = w(0) + w(1) * d.x(i, pair.first) + w(2) * d.x(i, pair.second);
    const double log_p = z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
    const double log_q = z >= 0 ? -z - std::log1p(std::exp(-z)) : -std::log1p(std::exp(z));
    total -= d.y(i) ? log_p : log_q;
  }
  return total + 0.5 * l2 * (w(1) * w(1) + w(2) * w(2));
}

double train_accuracy(const Predictor& model, const Dataset& d) {
  return (model.predict(d.x).array() == d.y.array()).cast<double>().mean();
}

}  // namespace

TEST(Logistic, SeparableDataFitsPerfectly) {
  Eigen::MatrixXd x(8, 2);
  Eigen::VectorXi y(8);
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = i < 4 ? -1.0 - i : 1.0 + i;
    x(i, 1) = 0.1 * i;
    y(i) = i >= 4;
  }
  const auto d = fixtures::make_dataset(x, y);
  EXPECT_EQ(train_accuracy(train_logistic(d, {0, 1}), d), 1.0);
}

TEST(Logistic, ShuffledLabelsGiveChanceAccuracy) {
  Stream rng(3);
  Eigen::MatrixXd x(400, 2);
  Eigen::VectorXi y(400);
  for (Index i = 0; i < 400; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y(i) = static_cast<int>(rng.below(2));
  }
  const auto all = fixtures::make_dataset(x, y);
  std::vector<Index> first(200), second(200);
  for (Index i = 0; i < 200; ++i) {
    first[static_cast<std::size_t>(i)] = i;
    second[static_cast<std::size_t>(i)] = 200 + i;
  }
  const auto model = train_logistic(all.take(first), {0, 1});
  EXPECT_NEAR(train_accuracy(model, all.take(second)), 0.5, 0.1);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = fixtures::random_dataset(40, 3, seed, 1.5);
    const FeaturePair pair{0, 2};
    const auto model = train_logistic(d, pair);
    const auto design = pair_design(d.x, pair);
    Stream rng(seed + 50);
    for (const Eigen::Vector3d& w : {model.weights(), Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal())}) {
      const Eigen::Vector3d g = logistic_gradient(design, d.y, w, 1.0);
      for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d up = w, down = w;
        up(j) += 1e-5;
        down(j) -= 1e-5;
        const double fd = (logistic_objective(design, d.y, up, 1.0) - logistic_objective(design, d.y, down, 1.0)) / 2e-5;
        EXPECT_LE(std::abs(fd - g(j)), 1e-4);
      }
    }
    EXPECT_TRUE(model.converged());
    EXPECT_LT(logistic_gradient(design, d.y, model.weights(), 1.0).norm(), 1e-5);
  }
}

TEST(Logistic, ObjectiveMatchesReference) {
  const auto d = fixtures::random_dataset(30, 2, 4);
  const Eigen::Vector3d w(0.3, -1.2, 2.5);
  EXPECT_NEAR(logistic_objective(pair_design(d.x, {0, 1}), d.y, w, 1.0), reference_objective(d, {0, 1}, w, 1.0),
              1e-10);
}

TEST(Logistic, BoundaryRoughlyInvariantToFeatureScale) {
  const auto d = fixtures::random_dataset(300, 2, 6, 2.0);
  Dataset scaled = d;
  scaled.x *= 3.0;
  const auto a = train_logistic(d, {0, 1});
  const auto b = train_logistic(scaled, {0, 1});
  Eigen::MatrixXd grid(101 * 101, 2);
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) grid.row(i * 101 + j) << -3 + 0.06 * i, -3 + 0.06 * j;
  }
  const Eigen::VectorXi pa = a.predict(grid), pb = b.predict(grid * 3.0);
  EXPECT_LE((pa.array() != pb.array()).cast<double>().mean(), 0.01);
}

TEST(Logistic, SerializeRoundTrip) {
  const auto d = fixtures::random_dataset(30, 4, 7);
  const auto model = train_logistic(d, {1, 3});
  const auto parsed = parse_model(model.serialize());
  EXPECT_EQ(parsed->serialize(), model.serialize());
  EXPECT_EQ(parsed->predict(d.x), model.predict(d.x));
  EXPECT_EQ(model.descriptor(), "logistic(x2:x4)");
}

TEST(Tree, PureInputIsOneLeaf) {
  auto d = fixtures::random_dataset(20, 3, 8);
  d.y.setOnes();
  const auto tree = train_tree(d);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.nodes()[0].label, 1);
}

TEST(Tree, SolvesXorAtDepthTwo) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  const auto d = fixtures::make_dataset(x, (Eigen::VectorXi(4) << 0, 1, 1, 0).finished());
  const auto tree = train_tree(d);
  EXPECT_EQ(tree.depth(), 2);
  EXPECT_EQ(train_accuracy(tree, d), 1.0);
}

TEST(Tree, RejectsMatrixWithoutSplitColumn) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  const auto tree = train_tree(fixtures::make_dataset(x, (Eigen::VectorXi(4) << 0, 1, 1, 0).finished()));
  EXPECT_THROW(tree.predict(Eigen::MatrixXd::Zero(3, 1)), ValidationError);
}

TEST(Tree, DepthNeverExceedsLimit) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = fixtures::random_dataset(120, 6, seed, 0.3);
    EXPECT_LE(train_tree(d).depth(), 4);
    TreeOptions shallow;
    shallow.max_depth = 2;
    EXPECT_LE(train_tree(d, shallow).depth(), 2);
  }
}

TEST(Tree, InvariantToMonotoneTransformOnTrainingRows) {
  const auto d = fixtures::random_dataset(80, 3, 9);
  Dataset t = d;
  t.x.col(1) = d.x.col(1).array().exp();
  EXPECT_EQ(train_tree(d).predict(d.x), train_tree(t).predict(t.x));
}

TEST(Tree, SerializeRoundTrip) {
  const auto d = fixtures::random_dataset(60, 4, 10);
  const auto tree = train_tree(d, {}, "7");
  const auto parsed = parse_model(tree.serialize());
  EXPECT_EQ(parsed->serialize(), tree.serialize());
  EXPECT_EQ(parsed->predict(d.x), tree.predict(d.x));
  EXPECT_EQ(tree.descriptor(), "tree-7");
}

TEST(Smote, BalancedInputUnchanged) {
  auto d = fixtures::random_dataset(10, 2, 11);
  d.y << 1, 0, 1, 0, 1, 0, 1, 0, 1, 0;
  const auto out = smote_balance(d, 5, 1);
  EXPECT_EQ(out.x, d.x);
  EXPECT_EQ(out.y, d.y);
}

TEST(Smote, LoneMinorityIsDuplicated) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(8, 2);
  Eigen::VectorXi y = Eigen::VectorXi::Zero(8);
  y(3) = 1;
  const auto out = smote_balance(fixtures::make_dataset(x, y), 5, 2);
  ASSERT_EQ(out.rows(), 14);
  EXPECT_EQ(out.positives(), 7);
  for (Index i = 0; i < out.rows(); ++i) {
    if (out.y(i)) {
      EXPECT_EQ(out.x.row(i), x.row(3));
    }
  }
}

TEST(Smote, SyntheticPointsLieOnSegment) {
  Eigen::MatrixXd x(8, 2);
  x << 0, 0, 1, 1, 5, 5, 6, 5, 7, 4, 5, 6, 8, 8, 9, 5;
  Eigen::VectorXi y = Eigen::VectorXi::Zero(8);
  y(0) = y(1) = 1;
  const auto out = smote_balance(fixtures::make_dataset(x, y), 5, 3);
  EXPECT_EQ(out.positives(), 6);
  for (Index i = 8; i < out.rows(); ++i) {
    EXPECT_EQ(out.y(i), 1);
    EXPECT_NEAR(out.x(i, 0), out.x(i, 1), 1e-15);
    EXPECT_GE(out.x(i, 0), 0.0);
    EXPECT_LE(out.x(i, 0), 1.0);
  }
}

TEST(Smote, ExactBalanceOnRandomData) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = fixtures::random_dataset(30 + static_cast<Index>(seed), 4, seed, -1.0);
    const auto out = smote_balance(d, 5, seed);
    EXPECT_EQ(2 * out.positives(), out.rows());
    EXPECT_EQ(out.x.topRows(d.rows()), d.x);
  }
}

TEST(Pools, LogisticPairsInLexicographicOrder) {
  const auto d = fixtures::random_dataset(40, 5, 12);
  const auto pool = logistic_pair_pool(d, 1);
  ASSERT_EQ(pool.size(), 10u);
  const std::vector<std::string> expected{"logistic(x1:x2)", "logistic(x1:x3)", "logistic(x1:x4)", "logistic(x1:x5)",
                                          "logistic(x2:x3)", "logistic(x2:x4)", "logistic(x2:x5)", "logistic(x3:x4)",
                                          "logistic(x3:x5)", "logistic(x4:x5)"};
  for (std::size_t i = 0; i < pool.size(); ++i) EXPECT_EQ(pool[i]->descriptor(), expected[i]);
}

TEST(Pools, LogisticCandidatesShareBalancedData) {
  const auto d = fixtures::random_dataset(40, 5, 13, -1.0);
  const auto balanced = smote_balance(d, 5, 4);
  const auto pool = logistic_pair_pool(d, 4);
  const auto* first = dynamic_cast<const LogisticModel*>(pool[4].get());
  ASSERT_NE(first, nullptr);
  EXPECT_EQ(first->weights(), train_logistic(balanced, first->pair()).weights());
}

TEST(Pools, TreeSubsamples) {
  const auto d = fixtures::random_dataset(100, 5, 14, 0.5);
  const auto pool = tree_subsample_pool(d, 100, 0.7, 3);
  ASSERT_EQ(pool.size(), 100u);
  std::set<std::string> distinct;
  for (const auto& t : pool) distinct.insert(t->serialize().substr(t->serialize().find('\n')));
  EXPECT_GE(distinct.size(), 2u);

  const auto one = fixtures::random_dataset(1, 2, 15);
  const auto single = tree_subsample_pool(one, 1, 1.0, 1);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0]->predict(one.x)(0), one.y(0));
}

TEST(ParseModel, RejectsGarbage) {
  EXPECT_THROW(parse_model("forest 1 2 3"), ValidationError);
  EXPECT_THROW(parse_model("logistic pair=0 weights=1"), ValidationError);
}
