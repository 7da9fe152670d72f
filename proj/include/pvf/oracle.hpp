#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace pvf {

/// Explicit finite population for the two-stage intervention simulation.
struct PopulationSpec {
  std::int64_t population = 0;     // beta
  std::int64_t positives = 0;      // alpha
  std::int64_t flagged = 0;        // model-flagged individuals
  std::int64_t flagged_positives = 0;
  std::int64_t budget = 0;         // c

  void validate() const;
  double gamma() const { return static_cast<double>(budget) / static_cast<double>(population); }
};

struct McEstimate {
  double mean = 0;
  double standard_error = 0;
};

/// Trials run in fixed-size shards whose streams derive from (seed, shard), so
/// the estimate does not depend on `jobs`.
inline constexpr std::int64_t kOracleShardTrials = 1 << 14;

/// Stage 1 intervenes on min(c, flagged) flagged individuals drawn uniformly;
/// stage 2 spends the rest of the budget uniformly, without replacement, on the
/// people not yet treated. Returns captured positives per trial.
McEstimate simulate_policy(const PopulationSpec& spec, std::int64_t trials, std::uint64_t seed,
                           int jobs = 1);

/// c individuals drawn uniformly without replacement from the whole population.
McEstimate simulate_uniform(const PopulationSpec& spec, std::int64_t trials, std::uint64_t seed,
                            int jobs = 1);

/// simulate_policy divided by the exact uniform expectation c * alpha / beta.
McEstimate mc_ie(const PopulationSpec& spec, std::int64_t trials, std::uint64_t seed, int jobs = 1);

struct OracleRow {
  PopulationSpec spec;
  double formula = 0;
  McEstimate simulated;
  double z = 0;  // |formula - simulated| / SE; zero when both agree exactly
};

/// Specs spanning both regimes with integral budgets.
std::vector<PopulationSpec> oracle_grid();

std::vector<OracleRow> run_oracle(const std::vector<PopulationSpec>& specs, std::int64_t trials,
                                  std::uint64_t seed, int jobs = 1);

void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows);

}  // namespace pvf
