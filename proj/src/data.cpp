#include "pvf/data.hpp"

#include "pvf/error.hpp"
#include "pvf/io.hpp"
#include "pvf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace pvf {

// ---------------------------------------------------------------- schema

FeatureSpec FeatureSpec::numeric(std::string name) {
  return {std::move(name), FeatureKind::numeric, {}, {}};
}

FeatureSpec FeatureSpec::nominal(std::string name, std::vector<double> categories) {
  return {std::move(name), FeatureKind::nominal, std::move(categories), {}};
}

FeatureSpec FeatureSpec::ordinal(std::string name, std::vector<double> levels) {
  return {std::move(name), FeatureKind::ordinal, std::move(levels), {}};
}

std::optional<std::size_t> FeatureSpec::rank_of(double value) const {
  const auto it = std::find(levels.begin(), levels.end(), value);
  if (it == levels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - levels.begin());
}

double FeatureSpec::level_distance(std::size_t from, std::size_t to) const {
  if (distance.size() > 0) return distance(static_cast<Index>(from), static_cast<Index>(to));
  return from > to ? static_cast<double>(from - to) : static_cast<double>(to - from);
}

bool FeatureSpec::operator==(const FeatureSpec& other) const {
  if (name != other.name || kind != other.kind || levels != other.levels) return false;
  if (distance.rows() != other.distance.rows() || distance.cols() != other.distance.cols()) return false;
  return distance == other.distance;
}

FeatureSchema numeric_schema(Index columns) {
  FeatureSchema schema;
  for (Index j = 0; j < columns; ++j) schema.push_back(FeatureSpec::numeric("x" + std::to_string(j + 1)));
  return schema;
}

void Dataset::validate() const {
  require(y.size() == x.rows(), "label count does not match row count");
  require(static_cast<Index>(schema.size()) == x.cols(), "schema arity does not match columns");
  for (Index i = 0; i < y.size(); ++i) require(y(i) == 0 || y(i) == 1, "labels must be 0 or 1");
  require(x.allFinite(), "dataset contains missing or non-finite values");
  for (Index j = 0; j < x.cols(); ++j) {
    const auto& spec = schema[static_cast<std::size_t>(j)];
    if (!spec.categorical()) continue;
    for (Index i = 0; i < x.rows(); ++i) {
      require(spec.rank_of(x(i, j)).has_value(),
              "value outside declared levels in column '" + spec.name + "'");
    }
  }
}

Dataset Dataset::take(std::span<const Index> indices) const {
  Dataset out;
  out.x.resize(static_cast<Index>(indices.size()), x.cols());
  out.y.resize(static_cast<Index>(indices.size()));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.x.row(static_cast<Index>(r)) = x.row(indices[r]);
    out.y(static_cast<Index>(r)) = y(indices[r]);
  }
  out.schema = schema;
  out.provenance = provenance;
  return out;
}

// ---------------------------------------------------------------- synthetic

Dataset gen_synthetic(const SyntheticSpec& spec) {
  require(spec.n >= 10, "synthetic data needs n >= 10");
  require(spec.mu >= 0.0, "separation mu must be non-negative");
  const auto negatives = static_cast<Index>(std::llround(0.8 * static_cast<double>(spec.n)));
  Dataset data;
  data.x.resize(spec.n, 5);
  data.y.resize(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    Stream rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
    const bool positive = i >= negatives;
    for (Index j = 0; j < 5; ++j) data.x(i, j) = rng.normal();
    if (positive) {
      data.x(i, 0) += spec.mu;
      data.x(i, 1) += spec.mu;
    }
    data.y(i) = positive ? 1 : 0;
  }
  data.schema = numeric_schema(5);
  data.provenance = "synthetic";
  return data;
}

// ---------------------------------------------------------------- splitting

namespace {

std::vector<Index> rows_of_class(const Eigen::VectorXi& labels, int label) {
  std::vector<Index> rows;
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels(i) == label) rows.push_back(i);
  }
  return rows;
}

// Round half to even, treating values within 1e-9 of a half as exact halves
// so that e.g. 0.7 * 25 rounds like 17.5.
Index round_half_even(double value) {
  const double halves = std::round(value * 2.0);
  if (std::abs(value * 2.0 - halves) < 1e-9) value = halves / 2.0;
  return static_cast<Index>(std::nearbyint(value));
}

}  // namespace

Split stratified_split(const Dataset& data, double train_frac, std::uint64_t seed) {
  require(train_frac > 0.0, "train fraction must be positive");
  require(train_frac < 1.0, "train fraction of 1 leaves the validation split empty");
  Split split;
  std::vector<Index> train_rows;
  std::vector<Index> val_rows;
  for (int label = 0; label <= 1; ++label) {
    auto rows = rows_of_class(data.y, label);
    if (rows.empty()) continue;
    Stream rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    shuffle(std::span(rows), rng);
    const auto size = static_cast<Index>(rows.size());
    Index n_train = round_half_even(train_frac * static_cast<double>(size));
    if (size >= 2) {
      n_train = std::clamp<Index>(n_train, 1, size - 1);
    } else {
      n_train = 1;
      split.degenerate = true;
    }
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + n_train);
    val_rows.insert(val_rows.end(), rows.begin() + n_train, rows.end());
  }
  require(!val_rows.empty(), "validation split is empty");
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(val_rows.begin(), val_rows.end());
  split.train = data.take(train_rows);
  split.val = data.take(val_rows);
  return split;
}

std::vector<std::vector<Index>> stratified_folds(const Eigen::VectorXi& labels, int folds,
                                                 std::uint64_t seed) {
  require(folds >= 2, "need at least two folds");
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  std::size_t position = 0;
  for (int label = 0; label <= 1; ++label) {
    auto rows = rows_of_class(labels, label);
    Stream rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    shuffle(std::span(rows), rng);
    for (const Index row : rows) out[position++ % out.size()].push_back(row);
  }
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

// ---------------------------------------------------------------- CSV ingestion

RawTable parse_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "CSV input is empty");
  std::vector<std::string> header;
  for (auto& name : split_csv_line(line)) header.emplace_back(trim(name));
  const auto target_it = std::find(header.begin(), header.end(), options.target);
  require(target_it != header.end(), "target column '" + options.target + "' not found");
  const auto target_col = static_cast<std::size_t>(target_it - header.begin());

  std::vector<std::vector<std::string>> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() == header.size(),
            "unparseable row at line " + std::to_string(line_no) + ": expected " +
                std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    for (auto& field : fields) field = std::string(trim(field));
    records.push_back(std::move(fields));
  }
  require(!records.empty(), "CSV has no data rows");

  const std::set<std::string> missing(options.missing_tokens.begin(), options.missing_tokens.end());
  const auto rows = static_cast<Index>(records.size());
  auto listed = [](const std::vector<std::string>& names, const std::string& name) {
    return std::find(names.begin(), names.end(), name) != names.end();
  };
  for (const auto& name : options.exclude) {
    require(listed(header, name), "excluded column '" + name + "' not found");
    require(name != options.target, "the target column cannot be excluded");
  }
  const auto feature_count = static_cast<Index>(header.size() - 1 - options.exclude.size());

  RawTable table;
  table.target_name = options.target;
  table.values.resize(rows, feature_count);
  table.target.resize(rows);

  double positive_value = 0;
  const bool numeric_positive = parse_double(options.positive_label, positive_value);
  for (Index i = 0; i < rows; ++i) {
    const auto& token = records[static_cast<std::size_t>(i)][target_col];
    require(!missing.contains(token), "missing target in data row " + std::to_string(i + 1));
    double value = 0;
    const bool positive = token == options.positive_label ||
                          (numeric_positive && parse_double(token, value) && value == positive_value);
    table.target(i) = positive ? 1 : 0;
  }

  Index column = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == target_col || listed(options.exclude, header[c])) continue;
    const std::string& name = header[c];
    bool numeric = true;
    Index missing_count = 0;
    for (const auto& record : records) {
      double value = 0;
      if (missing.contains(record[c])) ++missing_count;
      else if (!parse_double(record[c], value)) numeric = false;
    }
    FeatureSpec spec = FeatureSpec::numeric(name);
    if (numeric) {
      std::set<double> observed;
      for (Index i = 0; i < rows; ++i) {
        const auto& token = records[static_cast<std::size_t>(i)][c];
        double value = NAN;
        if (!missing.contains(token)) parse_double(token, value);
        table.values(i, column) = value;
        if (!std::isnan(value)) observed.insert(value);
      }
      std::vector<double> levels(observed.begin(), observed.end());
      if (listed(options.ordinal, name)) spec = FeatureSpec::ordinal(name, levels);
      else if (listed(options.nominal, name)) spec = FeatureSpec::nominal(name, levels);
      else if (options.binary_as_nominal && levels == std::vector<double>{0.0, 1.0})
        spec = FeatureSpec::nominal(name, levels);
    } else {
      // Text categories become codes 0..K-1 in sorted order.
      std::map<std::string, double> codes;
      for (const auto& record : records) {
        if (!missing.contains(record[c])) codes.emplace(record[c], 0.0);
      }
      double next = 0;
      for (auto& [token, code] : codes) code = next++;
      std::vector<double> levels;
      for (const auto& entry : codes) levels.push_back(entry.second);
      for (Index i = 0; i < rows; ++i) {
        const auto& token = records[static_cast<std::size_t>(i)][c];
        table.values(i, column) = missing.contains(token) ? NAN : codes.at(token);
      }
      spec = listed(options.ordinal, name) ? FeatureSpec::ordinal(name, levels)
                                           : FeatureSpec::nominal(name, levels);
    }
    table.schema.push_back(std::move(spec));
    table.missing_fraction.push_back(static_cast<double>(missing_count) / static_cast<double>(rows));
    ++column;
  }
  return table;
}

RawTable ingest_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return parse_csv(in, options);
}

// ---------------------------------------------------------------- imputation

namespace {

double shifted_mean(const std::vector<double>& values) {
  double offset = 0;
  for (const double v : values) offset += v - values.front();
  return values.front() + offset / static_cast<double>(values.size());
}

double lowest_mode(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double best = values.front();
  std::size_t best_run = 0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    if (j - i > best_run) {
      best_run = j - i;
      best = values[i];
    }
    i = j;
  }
  return best;
}

}  // namespace

Dataset drop_and_impute(const RawTable& table, const ImputeOptions& options) {
  require(options.neighbors >= 1, "imputation needs at least one neighbour");
  std::vector<Index> columns;
  for (std::size_t j = 0; j < table.missing_fraction.size(); ++j) {
    if (table.missing_fraction[j] <= options.drop_threshold) columns.push_back(static_cast<Index>(j));
  }
  require(!columns.empty(), "every column exceeds the missing-value threshold");

  std::vector<Index> rows;
  for (Index i = 0; i < table.values.rows(); ++i) {
    bool any = false;
    for (const Index j : columns) any = any || !std::isnan(table.values(i, j));
    if (any) rows.push_back(i);
  }
  require(!rows.empty(), "no row has an observed feature");

  const auto n = static_cast<Index>(rows.size());
  const auto p = static_cast<Index>(columns.size());
  Dataset out;
  out.x.resize(n, p);
  out.y.resize(n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < p; ++c) out.x(r, c) = table.values(rows[static_cast<std::size_t>(r)], columns[static_cast<std::size_t>(c)]);
    out.y(r) = table.target(rows[static_cast<std::size_t>(r)]);
  }
  for (const Index j : columns) out.schema.push_back(table.schema[static_cast<std::size_t>(j)]);
  out.provenance = "csv:" + table.target_name;

  std::vector<Index> complete;
  std::vector<Index> incomplete;
  for (Index r = 0; r < n; ++r) (out.x.row(r).array().isNaN().any() ? incomplete : complete).push_back(r);
  if (incomplete.empty()) return out;
  require(!complete.empty(), "no complete cases to seed nearest-neighbour imputation");

  Eigen::RowVectorXd mean(p);
  Eigen::RowVectorXd sd(p);
  for (Index c = 0; c < p; ++c) {
    double sum = 0, sum_sq = 0;
    Index count = 0;
    for (Index r = 0; r < n; ++r) {
      const double v = out.x(r, c);
      if (std::isnan(v)) continue;
      sum += v;
      ++count;
    }
    mean(c) = sum / static_cast<double>(count);
    for (Index r = 0; r < n; ++r) {
      const double v = out.x(r, c);
      if (!std::isnan(v)) sum_sq += (v - mean(c)) * (v - mean(c));
    }
    const double s = std::sqrt(sum_sq / static_cast<double>(count));
    sd(c) = s > 0 ? s : 1.0;
  }

  const Eigen::MatrixXd observed = out.x;  // neighbours always read original values
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(options.neighbors), complete.size());
  std::vector<std::pair<double, Index>> ranked(complete.size());
  for (const Index r : incomplete) {
    Index seen = 0;
    for (Index c = 0; c < p; ++c) seen += std::isnan(observed(r, c)) ? 0 : 1;
    const double rescale = static_cast<double>(p) / static_cast<double>(seen);
    for (std::size_t q = 0; q < complete.size(); ++q) {
      const Index other = complete[q];
      double d2 = 0;
      for (Index c = 0; c < p; ++c) {
        if (std::isnan(observed(r, c))) continue;
        const double diff = (observed(r, c) - observed(other, c)) / sd(c);
        d2 += diff * diff;
      }
      ranked[q] = {std::sqrt(d2 * rescale), other};
    }
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
    for (Index c = 0; c < p; ++c) {
      if (!std::isnan(observed(r, c))) continue;
      std::vector<double> donors;
      for (std::size_t q = 0; q < k; ++q) donors.push_back(observed(ranked[q].second, c));
      out.x(r, c) = out.schema[static_cast<std::size_t>(c)].categorical() ? lowest_mode(donors)
                                                                          : shifted_mean(donors);
    }
  }
  return out;
}

// ---------------------------------------------------------------- scaling

Scaler Scaler::fit(const Dataset& train) {
  require(train.rows() > 0, "cannot fit a scaler on an empty set");
  const Index p = train.cols();
  Scaler scaler{Eigen::RowVectorXd::Zero(p), Eigen::RowVectorXd::Ones(p)};
  for (Index j = 0; j < p; ++j) {
    if (train.schema[static_cast<std::size_t>(j)].categorical()) continue;
    const double mean = train.x.col(j).mean();
    const double sd = std::sqrt((train.x.col(j).array() - mean).square().mean());
    scaler.mean(j) = mean;
    scaler.scale(j) = sd > 0 ? sd : 1.0;
  }
  return scaler;
}

Dataset Scaler::apply(const Dataset& data) const {
  require(data.cols() == mean.size(), "scaler fitted on a different column count");
  Dataset out = data;
  out.x = (data.x.rowwise() - mean).array().rowwise() / scale.array();
  return out;
}

std::vector<Dataset> standard_scale(const Dataset& train, const std::vector<Dataset>& others) {
  const Scaler scaler = Scaler::fit(train);
  std::vector<Dataset> out{scaler.apply(train)};
  for (const auto& other : others) out.push_back(scaler.apply(other));
  return out;
}

// ---------------------------------------------------------------- subsets

std::vector<Index> Partition::complement(std::size_t s, Index total) const {
  std::vector<bool> inside(static_cast<std::size_t>(total), false);
  for (const Index row : subsets.at(s)) inside[static_cast<std::size_t>(row)] = true;
  std::vector<Index> out;
  for (Index i = 0; i < total; ++i) {
    if (!inside[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

Partition partition_subsets(Index rows, Index subset_size, std::uint64_t seed) {
  require(subset_size >= 1, "subset size must be positive");
  require(rows >= subset_size, "fewer rows than one subset");
  std::vector<Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Index{0});
  Stream rng(seed);
  shuffle(std::span(order), rng);
  Partition partition;
  const Index count = rows / subset_size;
  for (Index s = 0; s < count; ++s) {
    std::vector<Index> subset(order.begin() + s * subset_size, order.begin() + (s + 1) * subset_size);
    std::sort(subset.begin(), subset.end());
    partition.subsets.push_back(std::move(subset));
  }
  partition.remainder.assign(order.begin() + count * subset_size, order.end());
  std::sort(partition.remainder.begin(), partition.remainder.end());
  return partition;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (const auto& spec : data.schema) out << spec.name << ',';
  out << "label\n";
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) out << format_double(data.x(i, j)) << ',';
    out << data.y(i) << '\n';
  }
}

}  // namespace pvf
