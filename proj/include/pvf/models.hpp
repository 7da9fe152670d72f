#pragma once

#include "pvf/dataset.hpp"
#include "pvf/predictor.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pvf {

using FeaturePair = std::pair<Index, Index>;

/// Logistic regression on two columns; predicts 1 iff sigmoid(w . [1, xi, xj]) >= 0.5.
class LogisticModel final : public Predictor {
 public:
  LogisticModel(FeaturePair pair, const Eigen::Vector3d& weights, bool converged = true,
                int iterations = 0);

  Eigen::VectorXi predict(const Eigen::MatrixXd& x) const override;
  std::string descriptor() const override;
  std::string serialize() const override;

  const FeaturePair& pair() const { return pair_; }
  const Eigen::Vector3d& weights() const { return weights_; }
  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }

 private:
  FeaturePair pair_;
  Eigen::Vector3d weights_;
  bool converged_;
  int iterations_;
};

struct LogisticOptions {
  double l2 = 1.0;  // penalty 0.5 * l2 * |coefficients|^2, intercept unpenalized
  double tolerance = 1e-6;
  int max_iterations = 200;
};

/// [1, x_i, x_j] for every row.
Eigen::MatrixXd pair_design(const Eigen::MatrixXd& x, FeaturePair pair);

double logistic_objective(const Eigen::MatrixXd& design, const Eigen::VectorXi& y,
                          const Eigen::Vector3d& weights, double l2);
Eigen::Vector3d logistic_gradient(const Eigen::MatrixXd& design, const Eigen::VectorXi& y,
                                  const Eigen::Vector3d& weights, double l2);

/// Damped Newton (IRLS) from zero weights. Hitting the iteration cap is not an
/// error; the best iterate is returned with converged() == false.
LogisticModel train_logistic(const Dataset& train, FeaturePair pair, const LogisticOptions& options = {});

/// Axis-aligned binary tree; a row goes left when x[feature] <= threshold.
class TreeModel final : public Predictor {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = 0;
    bool operator==(const Node&) const = default;
  };

  TreeModel(std::vector<Node> nodes, std::string id);

  Eigen::VectorXi predict(const Eigen::MatrixXd& x) const override;
  std::string descriptor() const override;
  std::string serialize() const override;

  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

 private:
  std::vector<Node> nodes_;
  std::string id_;
  int max_feature_ = -1;
};

struct TreeOptions {
  int max_depth = 4;
  Index min_samples_split = 2;
};

/// Greedy Gini splitting at midpoints of sorted unique values. Equal gains go to
/// the lowest feature index, then the lowest threshold. Impure nodes may split
/// with zero gain. Leaves predict the majority class, 0 on a tie.
TreeModel train_tree(const Dataset& train, const TreeOptions& options = {}, std::string id = "0");

/// Oversamples the minority class to the majority count with convex
/// combinations of minority nearest neighbours (k' = min(k, minority - 1)).
/// A lone minority sample is duplicated instead. Synthetic rows are appended.
Dataset smote_balance(const Dataset& train, int k_neighbors, std::uint64_t seed);

/// One logistic candidate per unordered pair of the first `n_features`
/// columns, in lexicographic order, all trained on the same SMOTE-balanced data.
CandidatePool logistic_pair_pool(const Dataset& train, std::uint64_t seed, Index n_features = 5,
                                 const LogisticOptions& options = {}, int smote_k = 5);

/// `count` trees, each on its own uniform subsample (without replacement) of
/// round(frac * n) rows.
CandidatePool tree_subsample_pool(const Dataset& train, int count, double frac, std::uint64_t seed,
                                  const TreeOptions& options = {});

/// Inverse of Predictor::serialize for the models above.
std::shared_ptr<const Predictor> parse_model(const std::string& text);

}  // namespace pvf
