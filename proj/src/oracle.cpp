#include "pvf/oracle.hpp"

#include "pvf/error.hpp"
#include "pvf/io.hpp"
#include "pvf/metrics.hpp"
#include "pvf/parallel.hpp"
#include "pvf/rng.hpp"

#include <cmath>
#include <ostream>

namespace pvf {

namespace {

/// Draws `draws` people without replacement from a pool holding `positives`
/// of `pool`; returns how many positives were drawn.
std::int64_t draw_positives(std::int64_t pool, std::int64_t positives, std::int64_t draws,
                            Stream& rng) {
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < draws; ++i) {
    if (rng.below(static_cast<std::uint64_t>(pool)) < static_cast<std::uint64_t>(positives)) {
      ++hits;
      --positives;
    }
    --pool;
  }
  return hits;
}

struct ShardSums {
  std::int64_t sum = 0;
  // Exact integer moments keep the total independent of summation order.
  __int128 sum_squares = 0;
};

template <class Trial>
McEstimate run_trials(std::int64_t trials, std::uint64_t seed, int jobs, Trial&& trial) {
  require(trials >= 1, "need at least one trial");
  const std::int64_t shards = (trials + kOracleShardTrials - 1) / kOracleShardTrials;
  std::vector<ShardSums> sums(static_cast<std::size_t>(shards));
  parallel_for(shards, jobs, [&](Index shard) {
    Stream rng(derive_seed(seed, static_cast<std::uint64_t>(shard)));
    const std::int64_t begin = shard * kOracleShardTrials;
    const std::int64_t end = std::min(trials, begin + kOracleShardTrials);
    ShardSums local;
    for (std::int64_t t = begin; t < end; ++t) {
      const std::int64_t captured = trial(rng);
      local.sum += captured;
      local.sum_squares += static_cast<__int128>(captured) * captured;
    }
    sums[static_cast<std::size_t>(shard)] = local;
  });
  std::int64_t total = 0;
  __int128 total_squares = 0;
  for (const auto& s : sums) {
    total += s.sum;
    total_squares += s.sum_squares;
  }
  const auto count = static_cast<double>(trials);
  const double mean = static_cast<double>(total) / count;
  double variance = 0.0;
  if (trials > 1) {
    // n * sum(x^2) - (sum x)^2 is exact in 128-bit integers.
    const __int128 numerator = static_cast<__int128>(trials) * total_squares -
                               static_cast<__int128>(total) * total;
    variance = static_cast<double>(numerator) / (count * (count - 1.0));
  }
  return {mean, std::sqrt(std::max(0.0, variance) / count)};
}

}  // namespace

void PopulationSpec::validate() const {
  require(population >= 1, "population must be positive");
  require(positives >= 1 && positives <= population, "positives must lie in [1, population]");
  require(flagged >= 0 && flagged <= population, "flagged must lie in [0, population]");
  require(flagged_positives >= 0 && flagged_positives <= std::min(positives, flagged),
          "flagged positives must lie in [0, min(positives, flagged)]");
  require(flagged - flagged_positives <= population - positives,
          "more flagged negatives than negatives");
  require(budget >= 0 && budget <= population, "budget must lie in [0, population]");
}

McEstimate simulate_policy(const PopulationSpec& spec, std::int64_t trials, std::uint64_t seed,
                           int jobs) {
  spec.validate();
  const std::int64_t guided = std::min(spec.budget, spec.flagged);
  const std::int64_t remaining = spec.budget - guided;
  return run_trials(trials, seed, jobs, [&](Stream& rng) {
    std::int64_t captured = draw_positives(spec.flagged, spec.flagged_positives, guided, rng);
    if (remaining > 0) {
      // remaining > 0 implies every flagged person was treated.
      captured += draw_positives(spec.population - spec.flagged,
                                 spec.positives - spec.flagged_positives, remaining, rng);
    }
    return captured;
  });
}

McEstimate simulate_uniform(const PopulationSpec& spec, std::int64_t trials, std::uint64_t seed,
                            int jobs) {
  spec.validate();
  return run_trials(trials, seed, jobs, [&](Stream& rng) {
    return draw_positives(spec.population, spec.positives, spec.budget, rng);
  });
}

McEstimate mc_ie(const PopulationSpec& spec, std::int64_t trials, std::uint64_t seed, int jobs) {
  spec.validate();
  if (spec.positives == 0) throw NoPositivesError();
  require(spec.budget >= 1, "IE needs a positive budget");
  const McEstimate captured = simulate_policy(spec, trials, seed, jobs);
  const double uniform = static_cast<double>(spec.budget) * static_cast<double>(spec.positives) /
                         static_cast<double>(spec.population);
  return {captured.mean / uniform, captured.standard_error / uniform};
}

std::vector<PopulationSpec> oracle_grid() {
  std::vector<PopulationSpec> specs;
  for (const std::int64_t population : {100, 400}) {
    for (const double prevalence : {0.1, 0.3}) {
      const auto positives = static_cast<std::int64_t>(std::llround(prevalence * population));
      for (const double flagged_rate : {0.0, 0.15, 0.4}) {
        const auto flagged = static_cast<std::int64_t>(std::llround(flagged_rate * population));
        // Precision 0.25 / 0.75 of the flagged, capped by what is feasible.
        for (const double hit_rate : {0.25, 0.75}) {
          if (flagged == 0 && hit_rate > 0.25) continue;
          auto hits = static_cast<std::int64_t>(std::llround(hit_rate * flagged));
          hits = std::min(hits, positives);
          hits = std::max(hits, flagged - (population - positives));
          for (const double gamma : {0.05, 0.2, 0.5, 0.9}) {
            const auto budget = static_cast<std::int64_t>(std::llround(gamma * population));
            specs.push_back({population, positives, flagged, hits, budget});
          }
        }
      }
    }
  }
  return specs;
}

std::vector<OracleRow> run_oracle(const std::vector<PopulationSpec>& specs, std::int64_t trials,
                                  std::uint64_t seed, int jobs) {
  std::vector<OracleRow> rows(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const ConfusionCounts counts{spec.flagged_positives, spec.flagged - spec.flagged_positives,
                                 spec.population - spec.flagged - (spec.positives - spec.flagged_positives),
                                 spec.positives - spec.flagged_positives};
    OracleRow row{spec, ie_counting(counts, spec.gamma()), mc_ie(spec, trials, derive_seed(seed, i), jobs), 0.0};
    const double gap = std::abs(row.formula - row.simulated.mean);
    row.z = row.simulated.standard_error > 0 ? gap / row.simulated.standard_error
            : (gap <= 1e-12 ? 0.0 : INFINITY);
    rows[i] = row;
  }
  return rows;
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows) {
  out << "population,positives,flagged,flagged_positives,budget,gamma,formula_ie,mc_ie,se,abs_delta_over_se\n";
  for (const auto& row : rows) {
    const auto& s = row.spec;
    out << s.population << ',' << s.positives << ',' << s.flagged << ',' << s.flagged_positives << ','
        << s.budget << ',' << format_double(s.gamma()) << ',' << format_double(row.formula) << ','
        << format_double(row.simulated.mean) << ',' << format_double(row.simulated.standard_error) << ','
        << format_double(row.z) << '\n';
  }
}

}  // namespace pvf
