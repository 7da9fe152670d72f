#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pvf {

using Index = Eigen::Index;

enum class FeatureKind { numeric, nominal, ordinal };

/// Column descriptor. Categorical columns store their value as one of
/// `levels` (a category code for nominal, an ordered level for ordinal).
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<double> levels;
  /// Optional ordinal distance between level ranks; empty means |rank difference|.
  Eigen::MatrixXd distance;

  static FeatureSpec numeric(std::string name);
  static FeatureSpec nominal(std::string name, std::vector<double> categories);
  static FeatureSpec ordinal(std::string name, std::vector<double> levels);

  bool categorical() const { return kind != FeatureKind::numeric; }
  std::optional<std::size_t> rank_of(double value) const;
  double level_distance(std::size_t from, std::size_t to) const;

  bool operator==(const FeatureSpec&) const;
};

using FeatureSchema = std::vector<FeatureSpec>;

/// All-numeric schema with names x1..xp.
FeatureSchema numeric_schema(Index columns);

/// Feature matrix, binary labels and column schema.
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  FeatureSchema schema;
  std::string provenance;

  Index rows() const { return x.rows(); }
  Index cols() const { return x.cols(); }
  Index positives() const { return y.sum(); }

  /// Throws ValidationError on shape, label or category violations.
  void validate() const;

  /// Rows picked by `indices`, in that order.
  Dataset take(std::span<const Index> indices) const;
};

}  // namespace pvf
