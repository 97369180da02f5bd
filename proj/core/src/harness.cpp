#include "bbl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace bbl {

namespace {

std::string point_to_string(const std::vector<double>& x) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? " " : "") << format_double(x[i]);
  out << ")";
  return out.str();
}

}  // namespace

DomainViolationError::DomainViolationError(std::int64_t t, std::vector<double> x)
    : std::runtime_error("strategy emitted a query outside [0,1]^d at round " +
                         std::to_string(t) + ": " + point_to_string(x)),
      t_(t),
      x_(std::move(x)) {}

EpisodeResult run_episode(Strategy& strategy, const ObjectiveInstance& instance,
                          std::int64_t T, std::uint64_t seed) {
  if (T < 1) throw std::invalid_argument("run_episode: T must be >= 1");
  if (strategy.dim() != instance.dim)
    throw std::invalid_argument("run_episode: strategy and instance dimensions differ");
  if (strategy.requires_noiseless() && instance.noise.noisy())
    throw std::invalid_argument("run_episode: " + strategy.name() +
                                " requires noiseless observations");

  const RngStream root(seed);
  RngStream strategy_rng = root.substream(1);
  RngStream noise_rng = root.substream(2);

  EpisodeResult out;
  out.trace.seed = seed;
  out.trace.instance_description = instance.description;
  out.trace.strategy_description = strategy.description();
  out.trace.entries.reserve(static_cast<std::size_t>(T));
  out.report.seed = seed;
  out.report.instance_description = instance.description;
  out.report.strategy_description = strategy.description();
  out.report.instantaneous.reserve(static_cast<std::size_t>(T));

  double cumulative = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    std::vector<double> x = strategy.next_query(out.trace, strategy_rng);
    bool in_domain = static_cast<int>(x.size()) == instance.dim;
    for (std::size_t i = 0; in_domain && i < x.size(); ++i)
      in_domain = x[i] >= 0.0 && x[i] <= 1.0;
    if (!in_domain) throw DomainViolationError(t, std::move(x));

    const double f = instance.objective(x);
    double y = f;
    if (instance.noise.kind == NoiseModel::Kind::Gaussian)
      y += instance.noise.eta * noise_rng.next_normal();

    double gap = instance.max_value - f;
    if (gap < 0.0) {
      // Possible only for grid-approximate maxima; clamp and count.
      ++out.report.clamped_rounds;
      gap = 0.0;
    }
    cumulative += gap;
    out.report.instantaneous.push_back(gap);
    out.trace.entries.push_back(TraceEntry{t, std::move(x), y});
  }
  out.report.cumulative_regret = cumulative;
  out.report.simple_regret = out.report.instantaneous.back();
  return out;
}

LogLogFit fit_loglog(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_loglog: need at least 2 points");
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [t, v] : points) {
    if (!(t > 0.0) || !(v > 0.0))
      throw std::invalid_argument("fit_loglog: points must be positive");
    xs.push_back(std::log(t));
    ys.push_back(std::log(v));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_loglog: all abscissae equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;  // constant data, exactly fitted by slope 0
  } else {
    double ssr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ssr += e * e;
    }
    fit.r_squared = std::clamp(1.0 - ssr / syy, 0.0, 1.0);
  }
  return fit;
}

SweepResult sweep_rates(const StrategyFactory& strategy_factory,
                        const InstanceFactory& instance_factory,
                        const SweepOptions& options) {
  if (options.horizons.empty())
    throw std::invalid_argument("sweep_rates: need at least one horizon");
  if (options.reps < 1) throw std::invalid_argument("sweep_rates: reps must be >= 1");

  std::vector<std::int64_t> horizons = options.horizons;
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());

  const std::size_t n_tasks = horizons.size() * static_cast<std::size_t>(options.reps);
  std::vector<EpisodeRow> rows(n_tasks);
  std::vector<std::int64_t> clamps(n_tasks, 0);

  // Episode seeds are a function of (base_seed, T, rep) only; any execution
  // order or thread assignment produces the same rows.
  auto run_task = [&](std::size_t task) {
    const std::size_t hi = task / static_cast<std::size_t>(options.reps);
    const int rep = static_cast<int>(task % static_cast<std::size_t>(options.reps));
    const std::int64_t T = horizons[hi];
    const std::uint64_t seed =
        mix_seed(options.base_seed, static_cast<std::uint64_t>(T),
                 static_cast<std::uint64_t>(rep));
    const ObjectiveInstance instance = instance_factory(T, rep);
    const std::unique_ptr<Strategy> strategy = strategy_factory(T);
    const EpisodeResult episode = run_episode(*strategy, instance, T, seed);
    rows[task] = EpisodeRow{options.experiment,
                            strategy->name(),
                            instance.description,
                            T,
                            rep,
                            seed,
                            episode.report.simple_regret,
                            episode.report.cumulative_regret};
    clamps[task] = episode.report.clamped_rounds;
  };

  const int threads = std::max(1, std::min<int>(options.threads,
                                                static_cast<int>(n_tasks)));
  if (threads == 1) {
    for (std::size_t task = 0; task < n_tasks; ++task) run_task(task);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t task = next.fetch_add(1); task < n_tasks;
             task = next.fetch_add(1))
          run_task(task);
      });
    for (auto& th : pool) th.join();
  }

  SweepResult result;
  result.rows = std::move(rows);
  for (std::int64_t c : clamps) result.clamped_rounds += c;

  RateFit& fit = result.fit;
  fit.target_exponent = options.target_exponent;
  fit.tolerance = options.tolerance;
  std::vector<std::pair<double, double>> fit_points;
  for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
    double sum = 0.0, sum2 = 0.0;
    for (int rep = 0; rep < options.reps; ++rep) {
      const EpisodeRow& row =
          result.rows[hi * static_cast<std::size_t>(options.reps) +
                      static_cast<std::size_t>(rep)];
      const double v = options.regret == RegretKind::Simple ? row.simple_regret
                                                            : row.cumulative_regret;
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(options.reps);
    const double mean = sum / n;
    double se = 0.0;
    if (options.reps > 1) {
      const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
      se = std::sqrt(var / n);
    }
    if (mean > 0.0) {
      fit.horizons.push_back(horizons[hi]);
      fit.mean_regret.push_back(mean);
      fit.stderr_regret.push_back(se);
      fit_points.emplace_back(static_cast<double>(horizons[hi]), mean);
    } else {
      fit.excluded_horizons.push_back(horizons[hi]);
    }
  }
  if (fit_points.size() < 2)
    throw std::runtime_error("sweep_rates: fewer than 2 horizons with positive mean regret");
  const LogLogFit ll = fit_loglog(fit_points);
  fit.slope = ll.slope;
  fit.intercept = ll.intercept;
  fit.r_squared = ll.r_squared;
  fit.within_tolerance = std::fabs(fit.slope - fit.target_exponent) <= fit.tolerance;
  return result;
}

LowerBoundOutcome lower_bound_game(const StrategyFactory& strategy_factory,
                                   std::int64_t T, const BesovParams& bp,
                                   const FatherWavelet& wavelet, int reps,
                                   std::uint64_t base_seed) {
  if (reps < 1) throw std::invalid_argument("lower_bound_game: reps must be >= 1");
  const int level = choose_j_noiseless(T, bp.dim);

  LowerBoundOutcome outcome;
  outcome.level = level;
  outcome.min_untouched = std::numeric_limits<std::uint64_t>::max();
  for (int rep = 0; rep < reps; ++rep) {
    AdversarialOracle oracle(level, bp, wavelet);
    const std::unique_ptr<Strategy> strategy = strategy_factory(T);
    if (strategy->dim() != bp.dim)
      throw std::invalid_argument("lower_bound_game: strategy dimension mismatch");
    const std::uint64_t seed = mix_seed(base_seed, static_cast<std::uint64_t>(T),
                                        static_cast<std::uint64_t>(rep));
    RngStream strategy_rng = RngStream(seed).substream(1);
    Trace trace;
    trace.seed = seed;
    for (std::int64_t t = 1; t <= T; ++t) {
      std::vector<double> x = strategy->next_query(trace, strategy_rng);
      bool in_domain = true;
      for (std::size_t i = 0; in_domain && i < x.size(); ++i)
        in_domain = x[i] >= 0.0 && x[i] <= 1.0;
      if (!in_domain) throw DomainViolationError(t, std::move(x));
      const double y = oracle.observe(x);
      trace.entries.push_back(TraceEntry{t, std::move(x), y});
    }
    const AdversarialOracle::Outcome finalized = oracle.finalize(T);
    outcome.observed_regret = finalized.simple_regret;
    outcome.min_untouched = std::min(outcome.min_untouched, oracle.untouched_count());
  }

  const double d = bp.dim;
  const double exponent = 1.0 / bp.p - bp.sigma / d;
  outcome.theoretical_floor = bp.L * wavelet.peak_value *
                              std::exp2((d + 1.0) * exponent) *
                              std::pow(static_cast<double>(T), exponent);
  outcome.ratio = outcome.observed_regret / outcome.theoretical_floor;
  return outcome;
}

std::vector<PhaseDiagramRow> phase_diagram(int dim, std::span<const double> sigmas,
                                           std::span<const double> inv_ps) {
  if (dim < 1) throw std::invalid_argument("phase_diagram: dim must be >= 1");
  std::vector<PhaseDiagramRow> rows;
  rows.reserve(sigmas.size() * inv_ps.size());
  for (double sigma : sigmas) {
    for (double inv_p : inv_ps) {
      PhaseDiagramRow row;
      row.sigma = sigma;
      row.inv_p = inv_p;
      const double s = sigma - dim * inv_p;  // smoothness after embedding
      row.feasible = s > 0.0;
      if (row.feasible) row.alpha = s / (2.0 * s + dim);
      row.noiseless_exponent = sigma / dim - inv_p;
      row.crossover_exponent = inv_p - sigma / dim;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string episodes_csv(std::span<const EpisodeRow> rows) {
  std::ostringstream out;
  out << "experiment,strategy,instance,T,rep,seed,simple_regret,cumulative_regret\n";
  for (const EpisodeRow& r : rows)
    out << r.experiment << "," << r.strategy << "," << r.instance << "," << r.T
        << "," << r.rep << "," << r.seed << "," << format_double(r.simple_regret)
        << "," << format_double(r.cumulative_regret) << "\n";
  return out.str();
}

std::string rate_fit_json(const RateFit& fit) {
  std::ostringstream out;
  auto list_int = [&](const std::vector<std::int64_t>& v) {
    out << "[";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    out << "]";
  };
  auto list_real = [&](const std::vector<double>& v) {
    out << "[";
    for (std::size_t i = 0; i < v.size(); ++i)
      out << (i ? ", " : "") << format_double(v[i]);
    out << "]";
  };
  out << "{\n  \"horizons\": ";
  list_int(fit.horizons);
  out << ",\n  \"mean_regret\": ";
  list_real(fit.mean_regret);
  out << ",\n  \"stderr_regret\": ";
  list_real(fit.stderr_regret);
  out << ",\n  \"excluded_horizons\": ";
  list_int(fit.excluded_horizons);
  out << ",\n  \"slope\": " << format_double(fit.slope);
  out << ",\n  \"intercept\": " << format_double(fit.intercept);
  out << ",\n  \"r_squared\": " << format_double(fit.r_squared);
  out << ",\n  \"target_exponent\": " << format_double(fit.target_exponent);
  out << ",\n  \"tolerance\": " << format_double(fit.tolerance);
  out << ",\n  \"within_tolerance\": " << (fit.within_tolerance ? "true" : "false");
  out << "\n}\n";
  return out.str();
}

std::string phase_diagram_csv(std::span<const PhaseDiagramRow> rows) {
  std::ostringstream out;
  out << "sigma,inv_p,alpha,noiseless_exponent,crossover_exponent\n";
  for (const PhaseDiagramRow& r : rows) {
    out << format_double(r.sigma) << "," << format_double(r.inv_p) << ",";
    if (r.feasible)
      out << format_double(r.alpha);
    else
      out << "infeasible";
    out << "," << format_double(r.noiseless_exponent) << ","
        << format_double(r.crossover_exponent) << "\n";
  }
  return out.str();
}

}  // namespace bbl
