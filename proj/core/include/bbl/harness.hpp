#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bbl/instances.hpp"
#include "bbl/strategies.hpp"

namespace bbl {

// Regret accounting for one episode. Regret is always measured against the
// true objective and its recorded maximum, never against noisy observations.
struct RegretReport {
  double simple_regret = 0.0;      // gap of the final query
  double cumulative_regret = 0.0;  // summed gaps over all rounds
  std::vector<double> instantaneous;
  std::string instance_description;
  std::string strategy_description;
  std::uint64_t seed = 0;
  // Rounds where the raw gap was negative (grid-approximate maxima only)
  // and got clamped to zero.
  std::int64_t clamped_rounds = 0;
};

struct EpisodeResult {
  Trace trace;
  RegretReport report;
};

// Raised when a strategy emits a query outside [0,1]^d; carries the round
// and the offending point.
class DomainViolationError : public std::runtime_error {
 public:
  DomainViolationError(std::int64_t t, std::vector<double> x);
  std::int64_t round() const { return t_; }
  const std::vector<double>& point() const { return x_; }

 private:
  std::int64_t t_;
  std::vector<double> x_;
};

// Runs the full query/observe loop. The seed fixes everything: the strategy
// stream is substream 1 and the noise stream substream 2 of RngStream(seed).
// (Instance factories that randomize use substream 3 by convention.)
EpisodeResult run_episode(Strategy& strategy, const ObjectiveInstance& instance,
                          std::int64_t T, std::uint64_t seed);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // in ln-ln coordinates
  double r_squared = 0.0;
};

// Ordinary least squares on (ln T, ln value). Requires >= 2 points, all
// values positive.
LogLogFit fit_loglog(std::span<const std::pair<double, double>> points);

enum class RegretKind { Simple, Cumulative };

// Aggregated sweep outcome: per-horizon means of the chosen regret over
// reps (mean first, log second), the log-log fit over horizons with
// positive mean, and the comparison against a target exponent.
struct RateFit {
  std::vector<std::int64_t> horizons;  // ascending; only those in the fit
  std::vector<double> mean_regret;
  std::vector<double> stderr_regret;
  std::vector<std::int64_t> excluded_horizons;  // zero mean regret
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double target_exponent = 0.0;
  double tolerance = 0.0;
  bool within_tolerance = false;
};

// One CSV row per episode.
struct EpisodeRow {
  std::string experiment;
  std::string strategy;
  std::string instance;
  std::int64_t T = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double simple_regret = 0.0;
  double cumulative_regret = 0.0;
};

using StrategyFactory = std::function<std::unique_ptr<Strategy>(std::int64_t T)>;
using InstanceFactory = std::function<ObjectiveInstance(std::int64_t T, int rep)>;

struct SweepOptions {
  std::vector<std::int64_t> horizons;
  int reps = 1;
  std::uint64_t base_seed = 0;
  RegretKind regret = RegretKind::Simple;
  double target_exponent = 0.0;
  double tolerance = 0.1;
  int threads = 1;
  std::string experiment = "sweep";
};

struct SweepResult {
  RateFit fit;
  std::vector<EpisodeRow> rows;        // ordered by (horizon index, rep)
  std::int64_t clamped_rounds = 0;     // total across episodes
};

// Runs reps episodes per horizon with episode seed mix_seed(base, T, rep).
// Seeds are keyed by values, so results are invariant to horizon order and
// identical under any thread count; episodes run in parallel when
// options.threads > 1 and merge by slot.
SweepResult sweep_rates(const StrategyFactory& strategy_factory,
                        const InstanceFactory& instance_factory,
                        const SweepOptions& options);

struct LowerBoundOutcome {
  int level = 0;                 // choose_j_noiseless(T, d)
  double observed_regret = 0.0;  // forced simple regret = family peak
  double theoretical_floor = 0.0;
  double ratio = 0.0;            // observed / floor
  std::uint64_t min_untouched = 0;  // across reps
};

// Plays the strategy against the answer-zero oracle. The forced regret is
// the family peak regardless of play; the floor is
// L phi* 2^{(d+1)(1/p - sigma/d)} T^{1/p - sigma/d} (the probability factor
// dropped), so ratio >= 1 certifies the construction.
LowerBoundOutcome lower_bound_game(const StrategyFactory& strategy_factory,
                                   std::int64_t T, const BesovParams& bp,
                                   const FatherWavelet& wavelet, int reps,
                                   std::uint64_t base_seed);

struct PhaseDiagramRow {
  double sigma = 0.0;
  double inv_p = 0.0;
  bool feasible = false;
  double alpha = 0.0;               // (s) / (2s + d), s = sigma - d/p
  double noiseless_exponent = 0.0;  // sigma/d - 1/p; simple-regret decay
  double crossover_exponent = 0.0;  // 1/p - sigma/d; noise level where the
                                    // noisy rate starts to dominate
};

std::vector<PhaseDiagramRow> phase_diagram(int dim, std::span<const double> sigmas,
                                           std::span<const double> inv_ps);

// Serialization helpers shared by the CLI and the tests. CSV columns are
// fixed; floats print with 17 significant digits.
std::string episodes_csv(std::span<const EpisodeRow> rows);
std::string rate_fit_json(const RateFit& fit);
std::string phase_diagram_csv(std::span<const PhaseDiagramRow> rows);

}  // namespace bbl
