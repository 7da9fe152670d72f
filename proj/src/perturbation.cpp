#include "pvf/perturbation.hpp"

#include "pvf/config.hpp"
#include "pvf/error.hpp"
#include "pvf/io.hpp"

#include <cmath>
#include <sstream>

namespace pvf {

void PerturbationConfig::validate() const {
  require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be a finite non-negative number");
  require(xi >= 0.0 && xi <= 1.0, "xi must lie in [0, 1]");
  require(lambda >= 0.0 && std::isfinite(lambda), "lambda must be a finite non-negative number");
  require(replicas >= 1, "k (replicas) must be at least 1");
  require(sets >= 1, "m_sets must be at least 1");
  for (const Index f : perturb_features) require(f >= 0, "perturbed feature index must be non-negative");
}

PerturbationConfig PerturbationConfig::from_config(const ConfigSection& section) {
  section.require_known({"sigma", "xi", "lambda", "perturb_features", "k", "m_sets", "seed"});
  PerturbationConfig config;
  config.sigma = section.get_double("sigma", config.sigma);
  config.xi = section.get_double("xi", config.xi);
  config.lambda = section.get_double("lambda", config.lambda);
  for (const auto f : section.get_ints("perturb_features", {})) config.perturb_features.push_back(static_cast<Index>(f));
  config.replicas = static_cast<int>(section.get_int("k", config.replicas));
  config.sets = static_cast<int>(section.get_int("m_sets", config.sets));
  config.seed = static_cast<std::uint64_t>(section.get_int("seed", 0));
  config.validate();
  return config;
}

std::string PerturbationConfig::to_config() const {
  std::ostringstream out;
  out << "[perturbation]\n"
      << "sigma = " << format_double(sigma) << '\n'
      << "xi = " << format_double(xi) << '\n'
      << "lambda = " << format_double(lambda) << '\n'
      << "perturb_features = [";
  for (std::size_t i = 0; i < perturb_features.size(); ++i) out << (i ? ", " : "") << perturb_features[i];
  out << "]\n"
      << "k = " << replicas << '\n'
      << "m_sets = " << sets << '\n'
      << "seed = " << seed << '\n';
  return out.str();
}

double perturb_numeric(double x, double sigma, Stream& rng) {
  if (sigma == 0.0) return x;
  return x + sigma * rng.normal();
}

std::size_t perturb_nominal(std::size_t category, std::size_t count, double xi, Stream& rng) {
  require(category < count, "category outside the declared set");
  if (xi == 0.0) return category;
  require(count >= 2, "cannot change a nominal feature with fewer than two categories");
  if (rng.uniform() >= xi) return category;
  const auto pick = static_cast<std::size_t>(rng.below(count - 1));
  return pick < category ? pick : pick + 1;
}

std::size_t perturb_ordinal(std::size_t rank, const FeatureSpec& spec, double xi, double lambda,
                            Stream& rng) {
  const std::size_t count = spec.levels.size();
  require(rank < count, "level outside the declared order");
  if (xi == 0.0) return rank;
  require(count >= 2, "cannot change an ordinal feature with a single level");
  if (rng.uniform() >= xi) return rank;
  double total = 0.0;
  for (std::size_t a = 0; a < count; ++a) {
    if (a != rank) total += std::exp(-lambda * spec.level_distance(rank, a));
  }
  const double target = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last = rank;
  for (std::size_t a = 0; a < count; ++a) {
    if (a == rank) continue;
    cumulative += std::exp(-lambda * spec.level_distance(rank, a));
    last = a;
    if (target < cumulative) return a;
  }
  return last;
}

Dataset build_perturbed_set(const Dataset& val, const PerturbationConfig& config,
                            std::uint64_t set_index) {
  config.validate();
  require(val.rows() > 0, "validation set is empty");
  require(static_cast<Index>(val.schema.size()) == val.cols(), "schema does not cover every column");
  for (const Index f : config.perturb_features) {
    require(f < val.cols(), "perturbed feature index out of range");
  }

  const Index n = val.rows();
  const Index k = config.replicas;
  Dataset out;
  out.x.resize(n * k, val.cols());
  out.y.resize(n * k);
  out.schema = val.schema;
  out.provenance = val.provenance + "+perturbed";

  const std::uint64_t set_key = derive_seed(config.seed, set_index);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) {
      const Index row = i * k + j;
      out.x.row(row) = val.x.row(i);
      out.y(row) = val.y(i);
      const std::uint64_t row_key = derive_seed(set_key, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      for (const Index f : config.perturb_features) {
        Stream rng(derive_seed(row_key, static_cast<std::uint64_t>(f)));
        const auto& spec = val.schema[static_cast<std::size_t>(f)];
        double& cell = out.x(row, f);
        switch (spec.kind) {
          case FeatureKind::numeric:
            cell = perturb_numeric(cell, config.sigma, rng);
            break;
          case FeatureKind::nominal:
          case FeatureKind::ordinal: {
            const auto rank = spec.rank_of(cell);
            require(rank.has_value(), "value outside declared levels in column '" + spec.name + "'");
            const std::size_t moved = spec.kind == FeatureKind::nominal
                                          ? perturb_nominal(*rank, spec.levels.size(), config.xi, rng)
                                          : perturb_ordinal(*rank, spec, config.xi, config.lambda, rng);
            cell = spec.levels[moved];
            break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace pvf
