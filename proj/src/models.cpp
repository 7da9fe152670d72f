#include "pvf/models.hpp"

#include "pvf/error.hpp"
#include "pvf/io.hpp"
#include "pvf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace pvf {

// ---------------------------------------------------------------- logistic

LogisticModel::LogisticModel(FeaturePair pair, const Eigen::Vector3d& weights, bool converged,
                             int iterations)
    : pair_(pair), weights_(weights), converged_(converged), iterations_(iterations) {
  require(weights.allFinite(), "logistic weights must be finite");
}

Eigen::VectorXi LogisticModel::predict(const Eigen::MatrixXd& x) const {
  require(pair_.first < x.cols() && pair_.second < x.cols(), "feature pair outside the matrix");
  const Eigen::ArrayXd z = weights_(0) + weights_(1) * x.col(pair_.first).array() +
                           weights_(2) * x.col(pair_.second).array();
  return (z >= 0.0).cast<int>();
}

std::string LogisticModel::descriptor() const {
  return "logistic(x" + std::to_string(pair_.first + 1) + ":x" + std::to_string(pair_.second + 1) + ")";
}

std::string LogisticModel::serialize() const {
  std::ostringstream out;
  out << "logistic pair=" << pair_.first << ',' << pair_.second << " weights=" << format_double(weights_(0))
      << ',' << format_double(weights_(1)) << ',' << format_double(weights_(2))
      << " threshold=0.5 converged=" << (converged_ ? 1 : 0) << " iterations=" << iterations_ << '\n';
  return out.str();
}

Eigen::MatrixXd pair_design(const Eigen::MatrixXd& x, FeaturePair pair) {
  Eigen::MatrixXd design(x.rows(), 3);
  design.col(0).setOnes();
  design.col(1) = x.col(pair.first);
  design.col(2) = x.col(pair.second);
  return design;
}

namespace {

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return z.unaryExpr([](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); });
}

Eigen::Vector3d penalty_mask(double l2) { return Eigen::Vector3d(0.0, l2, l2); }

}  // namespace

double logistic_objective(const Eigen::MatrixXd& design, const Eigen::VectorXi& y,
                          const Eigen::Vector3d& weights, double l2) {
  const Eigen::VectorXd z = design * weights;
  double loss = 0.0;
  for (Index i = 0; i < z.size(); ++i) loss += softplus(z(i)) - y(i) * z(i);
  return loss + 0.5 * l2 * weights.tail<2>().squaredNorm();
}

Eigen::Vector3d logistic_gradient(const Eigen::MatrixXd& design, const Eigen::VectorXi& y,
                                  const Eigen::Vector3d& weights, double l2) {
  const Eigen::VectorXd residual = sigmoid(design * weights) - y.cast<double>();
  return design.transpose() * residual + penalty_mask(l2).cwiseProduct(weights);
}

LogisticModel train_logistic(const Dataset& train, FeaturePair pair, const LogisticOptions& options) {
  require(pair.first != pair.second, "feature pair needs two distinct columns");
  require(pair.first >= 0 && pair.second >= 0 && pair.first < train.cols() && pair.second < train.cols(),
          "feature pair outside the dataset");
  const Index positives = train.positives();
  require(positives > 0 && positives < train.rows(), "logistic training needs both classes");

  const Eigen::MatrixXd design = pair_design(train.x, pair);
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  double objective = logistic_objective(design, train.y, w, options.l2);
  int iteration = 0;
  bool converged = false;
  for (; iteration < options.max_iterations; ++iteration) {
    const Eigen::Vector3d grad = logistic_gradient(design, train.y, w, options.l2);
    if (grad.norm() <= options.tolerance) {
      converged = true;
      break;
    }
    const Eigen::VectorXd p = sigmoid(design * w);
    const Eigen::VectorXd curvature = (p.array() * (1.0 - p.array())).matrix();
    Eigen::Matrix3d hessian = design.transpose() * curvature.asDiagonal() * design;
    hessian.diagonal() += penalty_mask(options.l2);
    Eigen::Vector3d step = hessian.ldlt().solve(grad);
    if (!step.allFinite() || step.dot(grad) <= 0.0) step = grad;
    // Backtrack until the objective decreases.
    double scale = 1.0;
    Eigen::Vector3d candidate = w - step;
    double next = logistic_objective(design, train.y, candidate, options.l2);
    while (!(next <= objective) && scale > 1e-10) {
      scale *= 0.5;
      candidate = w - scale * step;
      next = logistic_objective(design, train.y, candidate, options.l2);
    }
    if (!(next <= objective)) break;
    w = candidate;
    objective = next;
  }
  if (!converged) converged = logistic_gradient(design, train.y, w, options.l2).norm() <= options.tolerance;
  return LogisticModel(pair, w, converged, iteration);
}

// ---------------------------------------------------------------- trees

TreeModel::TreeModel(std::vector<Node> nodes, std::string id) : nodes_(std::move(nodes)), id_(std::move(id)) {
  require(!nodes_.empty(), "a tree needs at least one node");
  for (const auto& node : nodes_) {
    if (node.feature < 0) continue;
    const auto size = static_cast<int>(nodes_.size());
    require(node.left > 0 && node.left < size && node.right > 0 && node.right < size,
            "tree node has an invalid child");
    max_feature_ = std::max(max_feature_, node.feature);
  }
}

Eigen::VectorXi TreeModel::predict(const Eigen::MatrixXd& x) const {
  require(max_feature_ < x.cols(), "tree splits on a column outside the matrix");
  Eigen::VectorXi out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    const Node* node = &nodes_.front();
    while (node->feature >= 0) {
      node = &nodes_[static_cast<std::size_t>(x(i, node->feature) <= node->threshold ? node->left : node->right)];
    }
    out(i) = node->label;
  }
  return out;
}

std::string TreeModel::descriptor() const { return "tree-" + id_; }

std::string TreeModel::serialize() const {
  std::ostringstream out;
  out << "tree id=" << id_ << " nodes=" << nodes_.size() << " depth=" << depth() << '\n';
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.feature < 0) {
      out << "  " << i << " leaf label=" << node.label << '\n';
    } else {
      out << "  " << i << " split feature=" << node.feature << " threshold=" << format_double(node.threshold)
          << " left=" << node.left << " right=" << node.right << " label=" << node.label << '\n';
    }
  }
  return out.str();
}

int TreeModel::depth() const {
  std::function<int(int)> walk = [&](int index) -> int {
    const auto& node = nodes_[static_cast<std::size_t>(index)];
    if (node.feature < 0) return 0;
    return 1 + std::max(walk(node.left), walk(node.right));
  };
  return walk(0);
}

namespace {

struct TreeBuilder {
  const Dataset& data;
  const TreeOptions& options;
  std::vector<TreeModel::Node> nodes;

  static double gini(Index negatives, Index positives) {
    const auto n = static_cast<double>(negatives + positives);
    if (n == 0) return 0.0;
    const double p = static_cast<double>(positives) / n;
    return 2.0 * p * (1.0 - p);
  }

  int build(std::vector<Index> rows, int depth) {
    const auto index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    Index positives = 0;
    for (const Index r : rows) positives += data.y(r);
    const auto n = static_cast<Index>(rows.size());
    nodes[static_cast<std::size_t>(index)].label = positives * 2 > n ? 1 : 0;
    if (depth >= options.max_depth || n < options.min_samples_split || positives == 0 || positives == n) {
      return index;
    }

    const double parent = gini(n - positives, positives);
    double best_gain = -1.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<Index> order = rows;
    for (Index f = 0; f < data.cols(); ++f) {
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return data.x(a, f) < data.x(b, f); });
      Index left_pos = 0;
      for (Index i = 0; i + 1 < n; ++i) {
        left_pos += data.y(order[static_cast<std::size_t>(i)]);
        const double lo = data.x(order[static_cast<std::size_t>(i)], f);
        const double hi = data.x(order[static_cast<std::size_t>(i + 1)], f);
        if (!(lo < hi)) continue;
        const Index left_n = i + 1;
        const Index right_n = n - left_n;
        const Index right_pos = positives - left_pos;
        const double child = (static_cast<double>(left_n) * gini(left_n - left_pos, left_pos) +
                              static_cast<double>(right_n) * gini(right_n - right_pos, right_pos)) /
                             static_cast<double>(n);
        const double gain = parent - child;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return index;

    std::vector<Index> left;
    std::vector<Index> right;
    for (const Index r : rows) (data.x(r, best_feature) <= best_threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int left_index = build(std::move(left), depth + 1);
    const int right_index = build(std::move(right), depth + 1);
    auto& node = nodes[static_cast<std::size_t>(index)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left_index;
    node.right = right_index;
    return index;
  }
};

}  // namespace

TreeModel train_tree(const Dataset& train, const TreeOptions& options, std::string id) {
  require(train.rows() > 0, "cannot train a tree on an empty set");
  require(options.max_depth >= 0, "max_depth must be non-negative");
  TreeBuilder builder{train, options, {}};
  std::vector<Index> rows(static_cast<std::size_t>(train.rows()));
  std::iota(rows.begin(), rows.end(), Index{0});
  builder.build(std::move(rows), 0);
  return TreeModel(std::move(builder.nodes), std::move(id));
}

// ---------------------------------------------------------------- SMOTE

Dataset smote_balance(const Dataset& train, int k_neighbors, std::uint64_t seed) {
  require(k_neighbors >= 1, "SMOTE needs k >= 1");
  const Index positives = train.positives();
  const Index negatives = train.rows() - positives;
  if (positives == negatives) return train;
  const int minority_label = positives < negatives ? 1 : 0;
  const Index minority = std::min(positives, negatives);
  const Index majority = std::max(positives, negatives);
  require(minority > 0, "SMOTE needs at least one minority sample");

  std::vector<Index> members;
  for (Index i = 0; i < train.rows(); ++i) {
    if (train.y(i) == minority_label) members.push_back(i);
  }
  const Index needed = majority - minority;
  Dataset out;
  out.schema = train.schema;
  out.provenance = train.provenance + "+smote";
  out.x.resize(train.rows() + needed, train.cols());
  out.y.resize(train.rows() + needed);
  out.x.topRows(train.rows()) = train.x;
  out.y.head(train.rows()) = train.y;
  out.y.tail(needed).setConstant(minority_label);

  if (minority < 2) {
    for (Index s = 0; s < needed; ++s) out.x.row(train.rows() + s) = train.x.row(members.front());
    return out;
  }

  const auto k = static_cast<std::size_t>(std::min<Index>(k_neighbors, minority - 1));
  std::vector<std::vector<Index>> neighbours(members.size());
  for (std::size_t a = 0; a < members.size(); ++a) {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t b = 0; b < members.size(); ++b) {
      if (a == b) continue;
      ranked.emplace_back((train.x.row(members[a]) - train.x.row(members[b])).squaredNorm(), b);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    for (std::size_t q = 0; q < k; ++q) neighbours[a].push_back(members[ranked[q].second]);
  }

  for (Index s = 0; s < needed; ++s) {
    Stream rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const auto base = static_cast<std::size_t>(rng.below(members.size()));
    const Index neighbour = neighbours[base][static_cast<std::size_t>(rng.below(k))];
    const double u = rng.uniform();
    const Index row = train.rows() + s;
    const auto origin = train.x.row(members[base]);
    const auto other = train.x.row(neighbour);
    for (Index j = 0; j < train.cols(); ++j) {
      out.x(row, j) = train.schema[static_cast<std::size_t>(j)].categorical()
                          ? (u < 0.5 ? origin(j) : other(j))
                          : origin(j) + u * (other(j) - origin(j));
    }
  }
  return out;
}

// ---------------------------------------------------------------- pools

CandidatePool logistic_pair_pool(const Dataset& train, std::uint64_t seed, Index n_features,
                                 const LogisticOptions& options, int smote_k) {
  require(n_features >= 2 && n_features <= train.cols(), "pair pool needs 2 <= n_features <= columns");
  const Dataset balanced = smote_balance(train, smote_k, seed);
  CandidatePool pool;
  for (Index i = 0; i < n_features; ++i) {
    for (Index j = i + 1; j < n_features; ++j) {
      pool.push_back(std::make_shared<LogisticModel>(train_logistic(balanced, {i, j}, options)));
    }
  }
  return pool;
}

CandidatePool tree_subsample_pool(const Dataset& train, int count, double frac, std::uint64_t seed,
                                  const TreeOptions& options) {
  require(count >= 1, "pool needs at least one candidate");
  require(frac > 0.0 && frac <= 1.0, "subsample fraction must lie in (0, 1]");
  require(train.rows() > 0, "cannot build a pool from an empty set");
  const Index n = train.rows();
  const Index size = std::clamp<Index>(std::llround(frac * static_cast<double>(n)), 1, n);
  CandidatePool pool;
  for (int c = 0; c < count; ++c) {
    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    Stream rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    // Partial Fisher-Yates: the first `size` slots are a uniform subsample.
    for (Index i = 0; i < size; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
    }
    rows.resize(static_cast<std::size_t>(size));
    std::sort(rows.begin(), rows.end());
    pool.push_back(std::make_shared<TreeModel>(train_tree(train.take(rows), options, std::to_string(c))));
  }
  return pool;
}

// ---------------------------------------------------------------- parsing

namespace {

std::string field(const std::string& line, const std::string& key) {
  const auto at = line.find(" " + key + "=");
  require(at != std::string::npos, "serialized model lacks '" + key + "'");
  const auto start = at + key.size() + 2;
  const auto end = line.find(' ', start);
  return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
}

double number(const std::string& text) {
  double value = 0;
  require(parse_double(text, value), "bad number '" + text + "' in serialized model");
  return value;
}

}  // namespace

std::shared_ptr<const Predictor> parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  std::getline(in, header);
  header = " " + header;
  if (header.starts_with(" logistic ")) {
    const auto pair = split_csv_line(field(header, "pair"));
    const auto w = split_csv_line(field(header, "weights"));
    require(pair.size() == 2 && w.size() == 3, "malformed logistic model");
    return std::make_shared<LogisticModel>(
        FeaturePair{static_cast<Index>(number(pair[0])), static_cast<Index>(number(pair[1]))},
        Eigen::Vector3d(number(w[0]), number(w[1]), number(w[2])), field(header, "converged") == "1",
        static_cast<int>(number(field(header, "iterations"))));
  }
  if (header.starts_with(" tree ")) {
    const auto count = static_cast<std::size_t>(number(field(header, "nodes")));
    std::vector<TreeModel::Node> nodes(count);
    std::string line;
    for (std::size_t i = 0; i < count; ++i) {
      require(static_cast<bool>(std::getline(in, line)), "truncated tree model");
      line = " " + std::string(trim(line));
      TreeModel::Node node;
      node.label = static_cast<int>(number(field(line, "label")));
      if (line.find(" split ") != std::string::npos) {
        node.feature = static_cast<int>(number(field(line, "feature")));
        node.threshold = number(field(line, "threshold"));
        node.left = static_cast<int>(number(field(line, "left")));
        node.right = static_cast<int>(number(field(line, "right")));
      }
      nodes[i] = node;
    }
    return std::make_shared<TreeModel>(std::move(nodes), field(header, "id"));
  }
  throw ValidationError("unknown serialized model kind");
}

}  // namespace pvf
