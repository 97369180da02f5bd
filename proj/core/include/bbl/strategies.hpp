#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bbl/rng.hpp"

namespace bbl {

struct TraceEntry {
  std::int64_t t = 0;  // 1-based round
  std::vector<double> x;
  double y = 0.0;  // observed (possibly noisy) value
};

struct Trace {
  std::vector<TraceEntry> entries;
  std::uint64_t seed = 0;
  std::string instance_description;
  std::string strategy_description;
};

// Sequential query policy. next_query sees the full trace so far and the
// episode's strategy stream; it must depend on nothing else. Instances are
// single-episode and stateful (they may keep incremental digests of the
// trace); run a fresh instance per episode.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual std::string description() const { return name(); }
  virtual int dim() const = 0;
  // True for strategies whose guarantees need exact observations; the
  // harness refuses to run them on noisy instances.
  virtual bool requires_noiseless() const { return false; }
  virtual std::vector<double> next_query(const Trace& trace, RngStream& rng) = 0;
};

// Uniform iid queries; the do-nothing baseline.
std::unique_ptr<Strategy> make_random_search(int dim);

// Explore-then-commit: rounds 1..T-1 walk a uniform lattice of cell centers
// (row-major, truncated to T-1 points), round T replays the lattice point
// with the best estimate. Noiseless: one visit per point, estimate is the
// observed value. Noisy: the lattice is coarsened so each point gets
// k = ceil(ln T) visits and the estimate is the visit mean.
std::unique_ptr<Strategy> make_grid_explore_commit(int dim, std::int64_t horizon,
                                                   bool noisy);

// Deterministic optimistic optimization on the dyadic cell tree. Every
// evaluated leaf carries b = y(center) + L ((diam)/2)^s, an upper bound on
// the cell's supremum for any f with C^s seminorm <= L; each round the
// highest-b leaf (FIFO on ties) is split and its 2^d child centers queried.
// Refuses noisy instances: b-validity needs exact values.
std::unique_ptr<Strategy> make_doo(int dim, double holder_s, double holder_L);

// Discretized UCB: K = ceil((T / ln T)^{d/(2s+d)}) arms at lattice centers
// (or an explicit arm count via arms_override > 0), each played once, then
// the arm maximizing mean + eta sqrt(2 ln T / n). Requires T >= K.
std::unique_ptr<Strategy> make_ucb_discretization(int dim, double holder_s,
                                                  double eta, std::int64_t horizon,
                                                  std::int64_t arms_override = 0);

// Cumulative-to-simple conversion: delegates rounds 1..T-1 to the base
// strategy and spends round T re-querying a uniformly chosen earlier point,
// so expected simple regret <= base cumulative regret / (T-1).
std::unique_ptr<Strategy> make_simple_from_cumulative(std::unique_ptr<Strategy> base,
                                                      std::int64_t horizon);

}  // namespace bbl
