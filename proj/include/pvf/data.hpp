#pragma once

#include "pvf/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pvf {

/// Two Gaussian clusters in (x1, x2), centred at (0, 0) for negatives and
/// (mu, mu) for positives, plus three class-independent N(0, 1) columns.
struct SyntheticSpec {
  Index n = 50;
  double mu = 2.5;
  std::uint64_t seed = 0;
};

/// round(0.8 n) negatives first, then positives.
Dataset gen_synthetic(const SyntheticSpec& spec);

struct Split {
  Dataset train;
  Dataset val;
  /// Set when some class was too small to reach both sides.
  bool degenerate = false;
};

/// Per-class split with round-half-even train counts. A class with two or more
/// members always lands on both sides.
Split stratified_split(const Dataset& data, double train_frac, std::uint64_t seed);

/// Row indices of `folds` stratified folds (dealt round-robin per class after a
/// seeded shuffle). Each fold is sorted.
std::vector<std::vector<Index>> stratified_folds(const Eigen::VectorXi& labels, int folds,
                                                 std::uint64_t seed);

/// Parsed CSV: features with NaN for missing entries, plus the binary target.
struct RawTable {
  Eigen::MatrixXd values;
  Eigen::VectorXi target;
  FeatureSchema schema;
  std::vector<double> missing_fraction;
  std::string target_name;
};

struct CsvOptions {
  std::string target;
  /// Target value that counts as positive; numeric targets also accept 1/0.
  std::string positive_label = "1";
  std::vector<std::string> missing_tokens{"?", ""};
  /// Columns forced to nominal / ordinal (ordinal levels sorted numerically).
  std::vector<std::string> nominal;
  std::vector<std::string> ordinal;
  /// Columns left out of the feature matrix entirely.
  std::vector<std::string> exclude;
  /// Treat every column whose observed values are exactly {0, 1} as nominal.
  bool binary_as_nominal = false;
};

RawTable parse_csv(std::istream& in, const CsvOptions& options);
RawTable ingest_csv(const std::filesystem::path& path, const CsvOptions& options);

struct ImputeOptions {
  double drop_threshold = 0.5;
  int neighbors = 5;
};

/// Drops columns with missing fraction above the threshold and rows with no
/// observed feature, then fills each gap from the k nearest complete cases
/// (mean for numeric, mode for categorical). Distances use standardized
/// observed dimensions, rescaled by sqrt(p / observed).
Dataset drop_and_impute(const RawTable& table, const ImputeOptions& options = {});

/// Per-column standardization fitted on training data. Categorical columns and
/// zero-variance columns are left unscaled (the latter are still centred).
struct Scaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static Scaler fit(const Dataset& train);
  Dataset apply(const Dataset& data) const;
};

/// Fits on `train`, then transforms `train` followed by each of `others`.
std::vector<Dataset> standard_scale(const Dataset& train, const std::vector<Dataset>& others = {});

struct Partition {
  std::vector<std::vector<Index>> subsets;
  std::vector<Index> remainder;

  /// Everything outside subset `s`, sorted.
  std::vector<Index> complement(std::size_t s, Index total) const;
};

/// floor(n / size) disjoint subsets after a seeded shuffle; each subset sorted.
Partition partition_subsets(Index rows, Index subset_size, std::uint64_t seed);

/// Header row of feature names plus "label"; shortest round-trip numbers.
void write_dataset_csv(std::ostream& out, const Dataset& data);

}  // namespace pvf
