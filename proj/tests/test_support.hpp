#pragma once

#include "pvf/dataset.hpp"
#include "pvf/predictor.hpp"
#include "pvf/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>

namespace pvf::fixtures {

/// Predicts 1 when column `col` exceeds `threshold`.
class ThresholdPredictor final : public Predictor {
 public:
  ThresholdPredictor(Index col, double threshold) : col_(col), threshold_(threshold) {}
  Eigen::VectorXi predict(const Eigen::MatrixXd& x) const override {
    return (x.col(col_).array() > threshold_).cast<int>();
  }
  std::string descriptor() const override { return "threshold"; }
  std::string serialize() const override { return "threshold"; }

 private:
  Index col_;
  double threshold_;
};

/// Ignores features; returns a fixed prediction per row.
class FixedPredictor final : public Predictor {
 public:
  explicit FixedPredictor(Eigen::VectorXi out) : out_(std::move(out)) {}
  Eigen::VectorXi predict(const Eigen::MatrixXd& x) const override {
    return x.rows() == out_.size() ? out_ : Eigen::VectorXi::Zero(x.rows());
  }
  std::string descriptor() const override { return "fixed"; }
  std::string serialize() const override { return "fixed"; }

 private:
  Eigen::VectorXi out_;
};

inline Dataset make_dataset(Eigen::MatrixXd x, Eigen::VectorXi y) {
  Dataset d;
  d.schema = numeric_schema(x.cols());
  d.x = std::move(x);
  d.y = std::move(y);
  return d;
}

/// Gaussian features with labels drawn from a logistic link on column 0.
inline Dataset random_dataset(Index rows, Index cols, std::uint64_t seed, double signal = 1.0) {
  Stream rng(seed);
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXi y(rows);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) x(i, j) = rng.normal();
    y(i) = rng.uniform() < 1.0 / (1.0 + std::exp(-signal * x(i, 0))) ? 1 : 0;
  }
  y(0) = 1;
  y(1) = 0;
  return make_dataset(std::move(x), std::move(y));
}

}  // namespace pvf::fixtures
