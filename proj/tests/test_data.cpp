#include "pvf/data.hpp"
#include "pvf/error.hpp"
#include "pvf/io.hpp"
#include "pvf/metrics.hpp"
#include "pvf/models.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

using namespace pvf;

namespace {

RawTable parse(const std::string& text, CsvOptions options) {
  std::istringstream in(text);
  return parse_csv(in, options);
}

CsvOptions target(const std::string& name) {
  CsvOptions options;
  options.target = name;
  return options;
}

std::filesystem::path source_path(const std::string& relative) {
  return std::filesystem::path(PVF_SOURCE_DIR) / relative;
}

}  // namespace

TEST(Synthetic, ClassCounts) {
  const auto d = gen_synthetic({50, 2.5, 1});
  EXPECT_EQ(d.rows(), 50);
  EXPECT_EQ(d.cols(), 5);
  EXPECT_EQ(d.positives(), 10);
  for (Index i = 0; i < 40; ++i) EXPECT_EQ(d.y(i), 0);
  EXPECT_THROW(gen_synthetic({9, 1.0, 1}), ValidationError);
  EXPECT_THROW(gen_synthetic({50, -1.0, 1}), ValidationError);
}

TEST(Synthetic, Deterministic) {
  const auto a = gen_synthetic({100, 1.3, 42}), b = gen_synthetic({100, 1.3, 42});
  EXPECT_EQ(a.x, b.x);
  EXPECT_NE(a.x, gen_synthetic({100, 1.3, 43}).x);
}

TEST(Synthetic, ClassMeansConverge) {
  const double mu = 1.7;
  const auto d = gen_synthetic({20000, mu, 3});
  Eigen::RowVectorXd neg = Eigen::RowVectorXd::Zero(5), pos = Eigen::RowVectorXd::Zero(5);
  for (Index i = 0; i < d.rows(); ++i) (d.y(i) ? pos : neg) += d.x.row(i);
  neg /= 16000.0;
  pos /= 4000.0;
  const double tol_neg = 3 / std::sqrt(16000.0), tol_pos = 3 / std::sqrt(4000.0);
  EXPECT_NEAR(neg(0), 0, tol_neg);
  EXPECT_NEAR(neg(1), 0, tol_neg);
  EXPECT_NEAR(pos(0), mu, tol_pos);
  EXPECT_NEAR(pos(1), mu, tol_pos);
  for (int j = 2; j < 5; ++j) EXPECT_NEAR(pos(j), 0, tol_pos);
}

TEST(Synthetic, NoSignalGivesMajorityAccuracy) {
  const auto train = gen_synthetic({400, 0.0, 4}), test = gen_synthetic({400, 0.0, 5});
  const auto model = train_logistic(train, {0, 1});
  const double acc = (model.predict(test.x).array() == test.y.array()).cast<double>().mean();
  EXPECT_NEAR(acc, 0.8, 0.1);
}

TEST(Synthetic, HighSeparationIsLearnable) {
  std::vector<double> scores;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = gen_synthetic({100, 2.9, seed});
    const auto split = stratified_split(d, 0.7, seed + 1000);
    const auto model = train_logistic(split.train, {0, 1});
    scores.push_back(evaluate(model, split.val, MetricSpec::f1()));
  }
  std::nth_element(scores.begin(), scores.begin() + 50, scores.end());
  EXPECT_GE(scores[50], 0.8);
}

TEST(StratifiedSplit, RoundingRule) {
  const auto split = stratified_split(gen_synthetic({50, 1.0, 1}), 0.7, 9);
  EXPECT_EQ(split.val.positives(), 3);
  EXPECT_EQ(split.val.rows() - split.val.positives(), 12);
  EXPECT_EQ(split.train.rows(), 35);
  EXPECT_FALSE(split.degenerate);
}

TEST(StratifiedSplit, ErrorsAndReproducibility) {
  const auto d = gen_synthetic({50, 1.0, 1});
  EXPECT_THROW(stratified_split(d, 1.0, 1), ValidationError);
  const auto a = stratified_split(d, 0.7, 5), b = stratified_split(d, 0.7, 5);
  EXPECT_EQ(a.train.x, b.train.x);
  EXPECT_EQ(a.val.x, b.val.x);
}

TEST(StratifiedSplit, LonePositiveGoesToTrain) {
  auto d = fixtures::random_dataset(20, 2, 3);
  d.y.setZero();
  d.y(7) = 1;
  const auto split = stratified_split(d, 0.7, 1);
  EXPECT_TRUE(split.degenerate);
  EXPECT_EQ(split.train.positives(), 1);
  EXPECT_EQ(split.val.positives(), 0);
}

TEST(StratifiedFolds, PartitionAndBalance) {
  const auto d = gen_synthetic({100, 1.0, 2});
  const auto folds = stratified_folds(d.y, 5, 8);
  ASSERT_EQ(folds.size(), 5u);
  std::set<Index> seen;
  for (const auto& fold : folds) {
    EXPECT_EQ(fold.size(), 20u);
    Index pos = 0;
    for (const Index i : fold) {
      EXPECT_TRUE(seen.insert(i).second);
      pos += d.y(i);
    }
    EXPECT_EQ(pos, 4);
    EXPECT_TRUE(std::is_sorted(fold.begin(), fold.end()));
  }
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Csv, MissingFractions) {
  const auto t = parse("a,b,y\n1,?,0\n2,3,1\n4,5,0\n", target("y"));
  EXPECT_EQ(t.values.rows(), 3);
  EXPECT_DOUBLE_EQ(t.missing_fraction[1], 1.0 / 3.0);
  EXPECT_EQ(t.missing_fraction[0], 0.0);
  EXPECT_TRUE(std::isnan(t.values(0, 1)));
  EXPECT_EQ(t.target, (Eigen::VectorXi(3) << 0, 1, 0).finished());
}

TEST(Csv, NoMissingTokens) {
  const auto t = parse("a,b,y\n1,2,1\n3,4,0\n", target("y"));
  for (const double f : t.missing_fraction) EXPECT_EQ(f, 0.0);
}

TEST(Csv, Errors) {
  EXPECT_THROW(parse("a,b,y\n1,2,1\n", target("z")), ValidationError);
  EXPECT_THROW(parse("a,b,y\n1,2\n", target("y")), ValidationError);
  EXPECT_THROW(parse("a,b,y\n1,2,?\n", target("y")), ValidationError);
  CsvOptions excluded = target("y");
  excluded.exclude = {"nope"};
  EXPECT_THROW(parse("a,b,y\n1,2,1\n", excluded), ValidationError);
}

TEST(Csv, SchemaOverridesAndTextCategories) {
  CsvOptions options = target("y");
  options.ordinal = {"grade"};
  options.exclude = {"other"};
  options.binary_as_nominal = true;
  const auto t = parse("grade,color,flag,other,y\n1,red,0,9,1\n3,blue,1,9,0\n2,red,1,9,0\n", options);
  ASSERT_EQ(t.schema.size(), 3u);
  EXPECT_EQ(t.schema[0].kind, FeatureKind::ordinal);
  EXPECT_EQ(t.schema[0].levels, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(t.schema[1].kind, FeatureKind::nominal);
  EXPECT_EQ(t.values(0, 1), 1.0);  // blue = 0, red = 1
  EXPECT_EQ(t.schema[2].kind, FeatureKind::nominal);
}

TEST(Csv, BreastCancerFile) {
  CsvOptions options = target("malignant");
  const auto t = ingest_csv(source_path("data/breast_cancer.csv"), options);
  EXPECT_EQ(t.values.rows(), 569);
  EXPECT_EQ(t.values.cols(), 30);
  EXPECT_EQ(t.target.sum(), 212);
}

TEST(Impute, DropsSparseColumnsAndFillsGaps) {
  const auto t = parse(
      "a,b,c,y\n"
      "1,?,5,0\n"
      "2,?,?,1\n"
      "3,7,5,0\n"
      "4,?,5,1\n"
      "5,?,5,0\n"
      "6,?,5,1\n"
      "7,?,5,0\n",
      target("y"));
  const auto d = drop_and_impute(t);
  ASSERT_EQ(d.cols(), 2);
  EXPECT_EQ(d.schema[0].name, "a");
  EXPECT_EQ(d.schema[1].name, "c");
  EXPECT_EQ(d.x(1, 1), 5.0);  // every neighbour has c = 5
  EXPECT_EQ(d.x(1, 0), 2.0);
}

TEST(Impute, NoMissingIsUnchanged) {
  const auto t = parse("a,b,y\n1,2,1\n3,4,0\n5,7,1\n", target("y"));
  const auto d = drop_and_impute(t);
  EXPECT_EQ(d.x, t.values);
  EXPECT_EQ(d.y, t.target);
}

TEST(Impute, ObservedEntriesNeverChange) {
  Stream rng(4);
  std::ostringstream csv;
  csv << "a,b,c,d,y\n";
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (rng.uniform() < 0.15) csv << "?";
      else csv << format_double(std::round(rng.normal() * 100) / 100);
      csv << ',';
    }
    csv << (i % 3 == 0) << '\n';
  }
  const auto t = parse(csv.str(), target("y"));
  const auto d = drop_and_impute(t);
  ASSERT_EQ(d.rows(), t.values.rows());
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = 0; j < d.cols(); ++j) {
      if (!std::isnan(t.values(i, j))) {
        EXPECT_EQ(d.x(i, j), t.values(i, j));
      }
    }
  }
  EXPECT_TRUE(d.x.allFinite());
}

TEST(Impute, RemovesRowsWithoutObservedFeatures) {
  const auto t = parse("a,b,y\n1,2,1\n?,?,0\n3,4,0\n5,6,1\n", target("y"));
  const auto d = drop_and_impute(t);
  EXPECT_EQ(d.rows(), 3);
}

TEST(Impute, NeedsCompleteCases) {
  const auto t = parse("a,b,y\n1,?,1\n?,2,0\n3,?,0\n", target("y"));
  ImputeOptions options;
  options.drop_threshold = 0.9;
  EXPECT_THROW(drop_and_impute(t, options), ValidationError);
}

TEST(Impute, CervicalShape) {
  const char* env = std::getenv("PVF_CERVICAL_CSV");
  const auto path = env ? std::filesystem::path(env) : source_path("data/risk_factors_cervical_cancer.csv");
  if (!std::filesystem::exists(path)) GTEST_SKIP() << "cervical file not present: " << path;
  CsvOptions options = target("Schiller");
  options.exclude = {"Hinselmann", "Citology", "Biopsy"};
  options.binary_as_nominal = true;
  const auto d = drop_and_impute(ingest_csv(path, options));
  EXPECT_EQ(d.rows(), 668);
  EXPECT_EQ(d.cols(), 34);
}

TEST(Scaling, TrainStatistics) {
  const auto d = fixtures::random_dataset(50, 3, 5);
  const auto scaled = standard_scale(d);
  for (Index j = 0; j < 3; ++j) {
    const auto col = scaled[0].x.col(j).array();
    EXPECT_NEAR(col.mean(), 0, 1e-12);
    EXPECT_NEAR(std::sqrt((col - col.mean()).square().mean()), 1, 1e-12);
  }
}

TEST(Scaling, ConstantColumnBecomesZero) {
  auto d = fixtures::random_dataset(10, 2, 6);
  d.x.col(1).setConstant(3.5);
  EXPECT_TRUE(standard_scale(d)[0].x.col(1).isZero(0));
}

TEST(Scaling, OthersUseTrainStatistics) {
  Eigen::MatrixXd tx(2, 1), vx(2, 1);
  tx << 0, 2;
  vx << 4, 6;
  const auto train = fixtures::make_dataset(tx, (Eigen::VectorXi(2) << 0, 1).finished());
  const auto val = fixtures::make_dataset(vx, (Eigen::VectorXi(2) << 0, 1).finished());
  const auto out = standard_scale(train, {val});
  EXPECT_EQ(out[1].x(0, 0), 3.0);
  EXPECT_EQ(out[1].x(1, 0), 5.0);
}

TEST(Scaling, CategoricalColumnsPassThrough) {
  auto d = fixtures::random_dataset(10, 2, 7);
  d.x.col(1) << 0, 1, 2, 0, 1, 2, 0, 1, 2, 0;
  d.schema[1] = FeatureSpec::nominal("c", {0, 1, 2});
  EXPECT_EQ(standard_scale(d)[0].x.col(1), d.x.col(1));
}

TEST(Partition, BreastAndCervicalSizes) {
  const auto p = partition_subsets(569, 100, 1);
  ASSERT_EQ(p.subsets.size(), 5u);
  EXPECT_EQ(p.remainder.size(), 69u);
  EXPECT_EQ(p.complement(0, 569).size(), 469u);
  EXPECT_EQ(partition_subsets(668, 100, 1).subsets.size(), 6u);
}

TEST(Partition, DisjointAndComplete) {
  const auto p = partition_subsets(569, 100, 2);
  std::set<Index> seen;
  for (const auto& s : p.subsets) {
    for (const Index i : s) EXPECT_TRUE(seen.insert(i).second);
  }
  for (const Index i : p.remainder) EXPECT_TRUE(seen.insert(i).second);
  EXPECT_EQ(seen.size(), 569u);
  const auto comp = p.complement(2, 569);
  for (const Index i : p.subsets[2]) EXPECT_FALSE(std::binary_search(comp.begin(), comp.end(), i));
}

TEST(DatasetCsv, HeaderAndRoundTrip) {
  const auto d = gen_synthetic({10, 1.0, 3});
  std::ostringstream out;
  write_dataset_csv(out, d);
  const auto t = parse(out.str(), target("label"));
  EXPECT_EQ(t.values, d.x);
  EXPECT_EQ(t.target, d.y);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "x1,x2,x3,x4,x5,label");
}
