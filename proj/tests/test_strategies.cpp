#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "bbl/besov.hpp"
#include "bbl/harness.hpp"
#include "bbl/instances.hpp"
#include "bbl/rng.hpp"
#include "bbl/strategies.hpp"
#include "bbl/wavelet.hpp"
#include "test_util.hpp"

using bbl::RngStream;
using bbl::Strategy;
using bbl::Trace;
using bbl::TraceEntry;

namespace {

bbl::ObjectiveInstance tent(double apex, double s = 1.0, double L = 1.0,
                            double height = 1.0) {
  bbl::InstanceSpec spec;
  spec.kind = "tent-peak";
  spec.dim = 1;
  spec.tent_s = s;
  spec.tent_L = L;
  spec.height = height;
  spec.apex = {apex};
  return bbl::make_instance(spec, 0);
}

bbl::ObjectiveInstance theta_member(int level, std::vector<std::int64_t> lambda) {
  bbl::InstanceSpec spec;
  spec.kind = "theta-member";
  spec.bp.sigma = 1.0;
  spec.bp.p = 2.0;
  spec.bp.q = 2.0;
  spec.bp.L = 1.0;
  spec.bp.dim = static_cast<int>(lambda.size());
  spec.wavelet = bbl::WaveletKind::Haar;
  spec.level = level;
  spec.lambda = std::move(lambda);
  return bbl::make_instance(spec, 0);
}

// Drives a strategy against a raw objective with exact observations.
Trace drive(Strategy& strategy, const std::function<double(double)>& f,
            std::int64_t T, std::uint64_t seed) {
  Trace trace;
  RngStream rng = RngStream(seed).substream(1);
  for (std::int64_t t = 1; t <= T; ++t) {
    TraceEntry e;
    e.t = t;
    e.x = strategy.next_query(trace, rng);
    REQUIRE(e.x.size() == 1);
    REQUIRE(e.x[0] >= 0.0);
    REQUIRE(e.x[0] <= 1.0);
    e.y = f(e.x[0]);
    trace.entries.push_back(std::move(e));
  }
  return trace;
}

}  // namespace

TEST_CASE("random search replays and ignores observations") {
  auto s1 = bbl::make_random_search(1);
  auto s2 = bbl::make_random_search(1);
  Trace empty;
  RngStream r1(5), r2(5);
  for (int t = 0; t < 3; ++t)
    CHECK(s1->next_query(empty, r1) == s2->next_query(empty, r2));

  // Same stream state, traces differing only in observed values.
  Trace zeros, spiked;
  for (int t = 1; t <= 5; ++t) {
    TraceEntry e;
    e.t = t;
    e.x = {0.5};
    e.y = 0.0;
    zeros.entries.push_back(e);
    e.y = 17.0;
    spiked.entries.push_back(e);
  }
  RngStream r3(9), r4(9);
  CHECK(s1->next_query(zeros, r3) == s2->next_query(spiked, r4));
}

TEST_CASE("random search queries are uniform") {
  auto s = bbl::make_random_search(1);
  Trace empty;
  RngStream rng(31);
  std::vector<double> xs(100000);
  for (double& x : xs) x = s->next_query(empty, rng)[0];
  CHECK(bbl_test::ks_uniform(xs) < 0.01);
}

TEST_CASE("grid explore-commit lands next to a tent apex") {
  const auto inst = tent(0.5);
  const std::int64_t T = 65;  // 64 lattice points, spacing 1/64
  auto s = bbl::make_grid_explore_commit(1, T, false);
  const auto result = bbl::run_episode(*s, inst, T, 11);
  const double spacing = 1.0 / 64.0;
  CHECK(result.report.simple_regret <= spacing + 1e-12);
  const double committed = result.trace.entries.back().x[0];
  CHECK(std::abs(committed - 0.5) <= spacing);
}

TEST_CASE("grid explore-commit finds a cell wider than the lattice spacing") {
  const auto inst = theta_member(3, {5});  // cell width 1/8 > 1/64
  auto s = bbl::make_grid_explore_commit(1, 65, false);
  const auto result = bbl::run_episode(*s, inst, 65, 11);
  CHECK(result.report.simple_regret == 0.0);
}

TEST_CASE("grid explore-commit on a flat objective has zero regret") {
  bbl::ObjectiveInstance flat;
  flat.objective = [](std::span<const double>) { return 0.0; };
  flat.dim = 1;
  flat.max_value = 0.0;
  flat.max_location = {0.0};
  flat.description = "flat";
  auto s = bbl::make_grid_explore_commit(1, 32, false);
  const auto result = bbl::run_episode(*s, flat, 32, 1);
  CHECK(result.report.simple_regret == 0.0);
  CHECK(result.report.cumulative_regret == 0.0);
}

TEST_CASE("noisy grid explore-commit averages repeat visits") {
  // Two-cell needle: peak 2^{-1/2} in cell 2, noise well below the gap.
  bbl::InstanceSpec spec;
  spec.kind = "theta-member";
  spec.bp.sigma = 1.0;
  spec.bp.p = 2.0;
  spec.bp.q = 2.0;
  spec.bp.L = 1.0;
  spec.bp.dim = 1;
  spec.level = 1;
  spec.lambda = {2};
  spec.noise = bbl::NoiseModel::gaussian(0.05);
  const auto inst = bbl::make_instance(spec, 0);

  const std::int64_t T = 200;
  auto s = bbl::make_grid_explore_commit(1, T, true);
  const auto result = bbl::run_episode(*s, inst, T, 3);
  // Repeat counts: ceil(ln 200) = 6 visits per lattice point.
  std::map<double, int> visits;
  for (std::size_t i = 0; i + 1 < result.trace.entries.size(); ++i)
    visits[result.trace.entries[i].x[0]] += 1;
  int max_visits = 0;
  for (const auto& [x, n] : visits) max_visits = std::max(max_visits, n);
  CHECK(max_visits >= 6);
  CHECK(result.report.simple_regret == 0.0);  // committed inside the peak cell
}

TEST_CASE("doo on a flat objective expands deterministically") {
  auto a = bbl::make_doo(1, 1.0, 1.0);
  auto b = bbl::make_doo(1, 1.0, 1.0);
  const auto flat = [](double) { return 0.0; };
  const Trace ta = drive(*a, flat, 63, 1);
  const Trace tb = drive(*b, flat, 63, 2);  // seed must not matter
  REQUIRE(ta.entries.size() == tb.entries.size());
  for (std::size_t i = 0; i < ta.entries.size(); ++i)
    CHECK(ta.entries[i].x == tb.entries[i].x);
  CHECK(a->requires_noiseless());
}

TEST_CASE("doo two-dimensional children come in batches of four") {
  auto s = bbl::make_doo(2, 1.0, 1.0);
  Trace trace;
  RngStream rng(1);
  std::set<std::vector<double>> seen;
  for (int t = 1; t <= 21; ++t) {
    TraceEntry e;
    e.t = t;
    e.x = s->next_query(trace, rng);
    REQUIRE(e.x.size() == 2);
    CHECK(seen.insert(e.x).second);  // no repeats on a flat objective
    e.y = 0.0;
    trace.entries.push_back(std::move(e));
  }
  // Root + 5 completed expansions of 4 children each.
  CHECK(trace.entries.front().x == std::vector<double>{0.5, 0.5});
}

TEST_CASE("doo hones in on a tent apex") {
  auto s = bbl::make_doo(1, 1.0, 1.0);
  const auto inst = tent(0.3);
  const std::int64_t T = 1024;
  const auto result = bbl::run_episode(*s, inst, T, 1);
  double best_gap = bbl::kInf;
  for (double g : result.report.instantaneous) best_gap = std::min(best_gap, g);
  CHECK(best_gap <= 10.0 * 1.0 / static_cast<double>(T));
}

// Independent replay of the expansion bookkeeping: recompute every leaf's
// optimistic bound from the trace, verify the strategy expanded the
// highest-bound leaf (FIFO on ties) and queried the two child centers, and
// dense-grid-check that each expanded bound dominates the true cell max.
TEST_CASE("doo bounds are valid and expansion order matches a replay") {
  const double s_doo = 0.5;
  bbl::BesovParams bp;
  bp.sigma = 1.5;
  bp.p = 2.0;
  bp.q = 2.0;
  bp.L = 1.0;
  bp.dim = 1;

  for (int fn = 0; fn < 30; ++fn) {
    const bbl::CoefficientFunction f =
        bbl::sample_besov_ball(bp, 3, 0.7, 9000 + fn, bbl::WaveletKind::SmoothBump);
    const int grid_n = 2048;
    std::vector<double> grid(grid_n + 1);
    for (int i = 0; i <= grid_n; ++i) {
      const double x = static_cast<double>(i) / grid_n;
      grid[i] = f.eval(std::span<const double>(&x, 1));
    }
    // Grid estimate of the C^s seminorm, inflated for off-grid pairs.
    double seminorm = 0.0;
    for (int i = 0; i <= grid_n; i += 4)
      for (int k = i + 1; k <= grid_n; k += 4)
        seminorm = std::max(seminorm,
                            std::abs(grid[i] - grid[k]) /
                                std::pow((k - i) / static_cast<double>(grid_n), s_doo));
    const double L_doo = 1.5 * seminorm + 1e-9;

    auto strategy = bbl::make_doo(1, s_doo, L_doo);
    const Trace trace = drive(
        *strategy, [&](double x) { return f.eval(std::span<const double>(&x, 1)); },
        63, 1);

    struct Leaf {
      double lo, hi, b;
      std::int64_t order;
    };
    std::vector<Leaf> leaves;
    std::int64_t order = 0;
    auto bound = [&](double lo, double hi, double y) {
      return y + L_doo * std::pow(0.5 * (hi - lo), s_doo);
    };
    auto cell_max = [&](double lo, double hi) {
      double m = -bbl::kInf;
      const int a = static_cast<int>(std::ceil(lo * grid_n));
      const int b = static_cast<int>(std::floor(hi * grid_n));
      for (int i = a; i <= std::min(b, grid_n); ++i) m = std::max(m, grid[i]);
      return m;
    };

    REQUIRE(trace.entries[0].x[0] == 0.5);
    leaves.push_back({0.0, 1.0, bound(0.0, 1.0, trace.entries[0].y), order++});
    std::size_t t = 1;
    while (t + 1 < trace.entries.size()) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < leaves.size(); ++i) {
        if (leaves[i].b > leaves[best].b ||
            (leaves[i].b == leaves[best].b && leaves[i].order < leaves[best].order))
          best = i;
      }
      const Leaf parent = leaves[best];
      leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(best));
      // Bound validity for the cell being expanded.
      CHECK(parent.b >= cell_max(parent.lo, parent.hi) - 1e-9);
      const double mid = 0.5 * (parent.lo + parent.hi);
      const double child_lo[2] = {parent.lo, mid};
      const double child_hi[2] = {mid, parent.hi};
      for (int c = 0; c < 2 && t < trace.entries.size(); ++c, ++t) {
        const double center = 0.5 * (child_lo[c] + child_hi[c]);
        CHECK(trace.entries[t].x[0] == doctest::Approx(center).epsilon(1e-14));
        leaves.push_back({child_lo[c], child_hi[c],
                          bound(child_lo[c], child_hi[c], trace.entries[t].y),
                          order++});
      }
    }
  }
}

TEST_CASE("ucb arm count follows the discretization formula") {
  // T = 2^14, s=1, d=1: ceil((T / ln T)^{1/3}) = 12 arms.
  const std::int64_t T = 16384;
  auto s = bbl::make_ucb_discretization(1, 1.0, 0.1, T);
  const auto inst = tent(0.37);
  const auto result = bbl::run_episode(*s, inst, 2048, 5);  // truncated run is fine
  std::set<double> arms;
  for (const auto& e : result.trace.entries) arms.insert(e.x[0]);
  CHECK(arms.size() == 12);
}

TEST_CASE("single-arm ucb pays the fixed gap every round") {
  const auto inst = tent(0.3);
  const std::int64_t T = 50;
  auto s = bbl::make_ucb_discretization(1, 1.0, 0.1, T, 1);
  const auto result = bbl::run_episode(*s, inst, T, 2);
  // Only arm: the center 0.5, gap = f(0.3) - f(0.5) = 0.2.
  CHECK(result.report.cumulative_regret ==
        doctest::Approx(50.0 * 0.2).epsilon(1e-12));
}

TEST_CASE("ucb refuses horizons smaller than the arm count") {
  CHECK_THROWS_AS(bbl::make_ucb_discretization(1, 1.0, 0.1, 5, 10),
                  std::invalid_argument);
}

TEST_CASE("ucb with zero gaps accrues zero regret") {
  bbl::ObjectiveInstance flat;
  flat.objective = [](std::span<const double>) { return 0.25; };
  flat.dim = 1;
  flat.max_value = 0.25;
  flat.max_location = {0.5};
  flat.noise = bbl::NoiseModel::gaussian(0.3);
  flat.description = "flat";
  auto s = bbl::make_ucb_discretization(1, 1.0, 0.3, 256);
  const auto result = bbl::run_episode(*s, flat, 256, 7);
  CHECK(result.report.cumulative_regret == 0.0);
}

TEST_CASE("ucb cumulative regret tracks the discretization exponent") {
  // Noisy tent objective; randomized apex per rep so lattice alignment does
  // not bias the fit. Target (s+d)/(2s+d) = 2/3 at s=1, d=1.
  bbl::SweepOptions opt;
  opt.horizons = {256, 512, 1024, 2048, 4096, 8192, 16384};
  opt.reps = 20;
  opt.base_seed = 2026;
  opt.regret = bbl::RegretKind::Cumulative;
  opt.target_exponent = 2.0 / 3.0;
  opt.tolerance = 0.10;
  opt.threads = 4;
  const double eta = 0.1;
  const auto result = bbl::sweep_rates(
      [&](std::int64_t T) { return bbl::make_ucb_discretization(1, 1.0, eta, T); },
      [&](std::int64_t T, int rep) {
        bbl::InstanceSpec spec;
        spec.kind = "tent-peak";
        spec.dim = 1;
        spec.tent_s = 1.0;
        spec.tent_L = 1.0;
        spec.height = 1.0;
        bbl::RngStream rng =
            bbl::RngStream(bbl::mix_seed(opt.base_seed, static_cast<std::uint64_t>(T),
                                         static_cast<std::uint64_t>(rep)))
                .substream(3);
        spec.apex = {0.15 + 0.7 * rng.next_uniform()};
        spec.noise = bbl::NoiseModel::gaussian(eta);
        return bbl::make_instance(spec, 0);
      },
      opt);
  INFO("fitted slope ", result.fit.slope, " r2 ", result.fit.r_squared);
  CHECK(result.fit.within_tolerance);
}

TEST_CASE("final-round replay picks an earlier query") {
  const std::int64_t T = 32;
  auto s = bbl::make_simple_from_cumulative(bbl::make_random_search(1), T);
  const auto inst = tent(0.6);
  const auto result = bbl::run_episode(*s, inst, T, 13);
  const auto& entries = result.trace.entries;
  REQUIRE(entries.size() == static_cast<std::size_t>(T));
  bool found = false;
  for (std::size_t i = 0; i + 1 < entries.size(); ++i)
    found = found || entries[i].x == entries.back().x;
  CHECK(found);
}

TEST_CASE("zero cumulative regret forces zero simple regret") {
  bbl::ObjectiveInstance flat;
  flat.objective = [](std::span<const double>) { return 1.0; };
  flat.dim = 1;
  flat.max_value = 1.0;
  flat.max_location = {0.5};
  flat.description = "flat";
  auto s = bbl::make_simple_from_cumulative(bbl::make_random_search(1), 16);
  const auto result = bbl::run_episode(*s, flat, 16, 3);
  CHECK(result.report.cumulative_regret == 0.0);
  CHECK(result.report.simple_regret == 0.0);
}

TEST_CASE("replay conversion meets the cumulative-regret bound") {
  const std::int64_t T = 64;
  const auto inst = tent(0.37);
  const int reps = 1000;
  std::vector<double> diffs(reps);
  for (int rep = 0; rep < reps; ++rep) {
    auto s = bbl::make_simple_from_cumulative(bbl::make_random_search(1), T);
    const auto result =
        bbl::run_episode(*s, inst, T, bbl::mix_seed(7, T, rep));
    diffs[rep] = result.report.cumulative_regret / static_cast<double>(T - 1) -
                 result.report.simple_regret;
  }
  const double mean = bbl_test::mean(diffs);
  const double se = std::sqrt(bbl_test::variance(diffs) / reps);
  CHECK(mean >= -3.0 * se);
}

TEST_CASE("strategies stay inside the unit cube") {
  const auto inst = tent(0.8);
  const std::int64_t T = 100;
  std::vector<std::unique_ptr<Strategy>> suite;
  suite.push_back(bbl::make_random_search(1));
  suite.push_back(bbl::make_grid_explore_commit(1, T, false));
  suite.push_back(bbl::make_doo(1, 1.0, 1.0));
  suite.push_back(bbl::make_ucb_discretization(1, 1.0, 0.1, T));
  suite.push_back(bbl::make_simple_from_cumulative(bbl::make_random_search(1), T));
  for (auto& s : suite) {
    const auto result = bbl::run_episode(*s, inst, T, 21);
    for (const auto& e : result.trace.entries) {
      REQUIRE(e.x.size() == 1);
      CHECK(e.x[0] >= 0.0);
      CHECK(e.x[0] <= 1.0);
    }
  }
}

TEST_CASE("noisy strategies replay bit for bit under one seed") {
  bbl::InstanceSpec spec;
  spec.kind = "tent-peak";
  spec.dim = 1;
  spec.apex = {0.41};
  spec.noise = bbl::NoiseModel::gaussian(0.2);
  const auto inst = bbl::make_instance(spec, 0);
  for (int variant = 0; variant < 2; ++variant) {
    auto make = [&]() -> std::unique_ptr<Strategy> {
      if (variant == 0) return bbl::make_random_search(1);
      return bbl::make_ucb_discretization(1, 1.0, 0.2, 128);
    };
    auto s1 = make();
    auto s2 = make();
    const auto r1 = bbl::run_episode(*s1, inst, 128, 99);
    const auto r2 = bbl::run_episode(*s2, inst, 128, 99);
    REQUIRE(r1.trace.entries.size() == r2.trace.entries.size());
    for (std::size_t i = 0; i < r1.trace.entries.size(); ++i) {
      CHECK(r1.trace.entries[i].x == r2.trace.entries[i].x);
      CHECK(r1.trace.entries[i].y == r2.trace.entries[i].y);
    }
    CHECK(r1.report.cumulative_regret == r2.report.cumulative_regret);
  }
}
