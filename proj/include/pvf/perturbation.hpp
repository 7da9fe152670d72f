#pragma once

#include "pvf/dataset.hpp"
#include "pvf/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pvf {

class ConfigSection;

/// Controls for building perturbed validation sets.
struct PerturbationConfig {
  double sigma = 0.0;   // numeric noise standard deviation
  double xi = 0.0;      // change probability for nominal and ordinal columns
  double lambda = 0.0;  // ordinal distance decay
  std::vector<Index> perturb_features;  // columns to perturb; others are copied
  int replicas = 7;                     // k
  int sets = 100;                       // M
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const PerturbationConfig&) const = default;

  /// Reads keys sigma, xi, lambda, perturb_features, k, m_sets, seed.
  static PerturbationConfig from_config(const ConfigSection& section);
  /// Emits a `[perturbation]` section that from_config reads back.
  std::string to_config() const;
};

/// x + N(0, sigma^2); exactly x when sigma is zero.
double perturb_numeric(double x, double sigma, Stream& rng);

/// Keeps `category` with probability 1 - xi, else moves uniformly to one of the
/// other categories. Categories are indices in [0, count).
std::size_t perturb_nominal(std::size_t category, std::size_t count, double xi, Stream& rng);

/// Keeps `rank` with probability 1 - xi, else moves to a != rank with
/// probability proportional to exp(-lambda * d(rank, a)).
std::size_t perturb_ordinal(std::size_t rank, const FeatureSpec& spec, double xi, double lambda,
                            Stream& rng);

/// Perturbed set number `set_index`: k consecutive replicas of every row of
/// `val`, labels copied. The stream for (set, row, replica, feature) derives
/// from the config seed alone.
Dataset build_perturbed_set(const Dataset& val, const PerturbationConfig& config,
                            std::uint64_t set_index);

}  // namespace pvf
