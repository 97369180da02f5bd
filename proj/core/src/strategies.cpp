#include "bbl/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "bbl/wavelet.hpp"

namespace bbl {

namespace {

// Smallest a with a^dim >= count. Comparisons run in doubles; the counts in
// play stay far below 2^53 so they are exact.
std::int64_t lattice_side(std::int64_t count, int dim) {
  if (count <= 1) return 1;
  auto big_enough = [&](std::int64_t side) {
    double p = 1.0;
    for (int i = 0; i < dim; ++i) {
      p *= static_cast<double>(side);
      if (p >= static_cast<double>(count)) return true;
    }
    return false;
  };
  std::int64_t a = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(
             std::pow(static_cast<double>(count), 1.0 / dim))) - 1);
  while (!big_enough(a)) ++a;
  return a;
}

// Row-major lattice point: cell centers, axis 0 fastest.
std::vector<double> lattice_point(std::int64_t index, std::int64_t side, int dim) {
  std::vector<double> x(dim);
  for (int i = 0; i < dim; ++i) {
    x[i] = (static_cast<double>(index % side) + 0.5) / static_cast<double>(side);
    index /= side;
  }
  return x;
}

class RandomSearch final : public Strategy {
 public:
  explicit RandomSearch(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("random_search: dim must be >= 1");
  }
  std::string name() const override { return "random-search"; }
  std::string description() const override {
    return "random-search d=" + std::to_string(dim_);
  }
  int dim() const override { return dim_; }
  std::vector<double> next_query(const Trace&, RngStream& rng) override {
    std::vector<double> x(dim_);
    for (double& xi : x) xi = rng.next_uniform();
    return x;
  }

 private:
  int dim_;
};

class GridExploreCommit final : public Strategy {
 public:
  GridExploreCommit(int dim, std::int64_t horizon, bool noisy)
      : dim_(dim), horizon_(horizon), noisy_(noisy) {
    if (dim < 1) throw std::invalid_argument("grid_explore_commit: dim must be >= 1");
    if (horizon < 2) throw std::invalid_argument("grid_explore_commit: horizon must be >= 2");
    repeats_ = noisy ? static_cast<std::int64_t>(
                           std::ceil(std::log(static_cast<double>(horizon))))
                     : 1;
    repeats_ = std::max<std::int64_t>(1, repeats_);
    points_ = std::max<std::int64_t>(1, (horizon - 1) / repeats_);
    side_ = lattice_side(points_, dim);
    sums_.assign(points_, 0.0);
    counts_.assign(points_, 0);
  }

  std::string name() const override { return "grid-explore-commit"; }
  std::string description() const override {
    std::ostringstream out;
    out << "grid-explore-commit d=" << dim_ << " T=" << horizon_ << " points="
        << points_ << " repeats=" << repeats_ << (noisy_ ? " noisy" : " noiseless");
    return out.str();
  }
  int dim() const override { return dim_; }

  std::vector<double> next_query(const Trace& trace, RngStream&) override {
    absorb(trace);
    const std::int64_t t = static_cast<std::int64_t>(trace.entries.size()) + 1;
    if (t > horizon_)
      throw std::logic_error("grid_explore_commit: queried past its horizon");
    if (t < horizon_) return lattice_point(point_for_round(t), side_, dim_);
    // Commit round: replay the point with the best mean estimate.
    std::int64_t best = 0;
    double best_mean = -1e300;
    for (std::int64_t i = 0; i < points_; ++i) {
      if (counts_[i] == 0) continue;
      const double mean = sums_[i] / static_cast<double>(counts_[i]);
      if (mean > best_mean) {
        best_mean = mean;
        best = i;
      }
    }
    return lattice_point(best, side_, dim_);
  }

 private:
  std::int64_t point_for_round(std::int64_t t) const {
    const std::int64_t i = t - 1;  // 0-based exploration index
    if (i < points_ * repeats_) return i / repeats_;
    return (i - points_ * repeats_) % points_;  // leftover rounds wrap around
  }

  void absorb(const Trace& trace) {
    for (; absorbed_ < trace.entries.size(); ++absorbed_) {
      const TraceEntry& e = trace.entries[absorbed_];
      if (e.t >= horizon_) continue;  // the commit round estimates nothing
      const std::int64_t i = point_for_round(e.t);
      sums_[i] += e.y;
      counts_[i] += 1;
    }
  }

  int dim_;
  std::int64_t horizon_;
  bool noisy_;
  std::int64_t repeats_ = 1;
  std::int64_t points_ = 1;
  std::int64_t side_ = 1;
  std::vector<double> sums_;
  std::vector<std::int64_t> counts_;
  std::size_t absorbed_ = 0;
};

class Doo final : public Strategy {
 public:
  Doo(int dim, double holder_s, double holder_L)
      : dim_(dim), s_(holder_s), L_(holder_L) {
    if (dim < 1 || dim > 16)
      throw std::invalid_argument("doo_optimize: dim must lie in [1, 16]");
    if (!(holder_s > 0.0) || !(holder_s <= 1.0))
      throw std::invalid_argument("doo_optimize: s must lie in (0, 1]");
    if (!(holder_L > 0.0) || !std::isfinite(holder_L))
      throw std::invalid_argument("doo_optimize: L must be finite and > 0");
  }

  std::string name() const override { return "doo"; }
  std::string description() const override {
    return "doo d=" + std::to_string(dim_) + " s=" + format_double(s_) +
           " L=" + format_double(L_);
  }
  int dim() const override { return dim_; }
  bool requires_noiseless() const override { return true; }

  std::vector<double> next_query(const Trace& trace, RngStream&) override {
    if (cells_.empty()) {
      Cell root;
      root.lo.assign(dim_, 0.0);
      root.hi.assign(dim_, 1.0);
      root.order = next_order_++;
      cells_.push_back(std::move(root));
      pending_.push_back(0);
    }
    absorb(trace);
    if (pending_.empty()) expand_best_leaf();
    const std::size_t cell = pending_.front();
    pending_.pop_front();
    emitted_.push_back(cell);
    return center(cells_[cell]);
  }

 private:
  struct Cell {
    std::vector<double> lo, hi;
    double y = 0.0;
    std::int64_t order = 0;
  };
  struct HeapItem {
    double b;
    std::int64_t order;
    std::size_t cell;
    // priority_queue keeps the largest element on top; equal b-values fall
    // back to the earliest-created cell (FIFO).
    bool operator<(const HeapItem& o) const {
      if (b != o.b) return b < o.b;
      return order > o.order;
    }
  };

  std::vector<double> center(const Cell& c) const {
    std::vector<double> x(dim_);
    for (int i = 0; i < dim_; ++i) x[i] = 0.5 * (c.lo[i] + c.hi[i]);
    return x;
  }

  double diameter(const Cell& c) const {
    double d2 = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const double side = c.hi[i] - c.lo[i];
      d2 += side * side;
    }
    return std::sqrt(d2);
  }

  void absorb(const Trace& trace) {
    for (; absorbed_ < trace.entries.size(); ++absorbed_) {
      const std::size_t id = emitted_[absorbed_];
      Cell& c = cells_[id];
      c.y = trace.entries[absorbed_].y;
      leaves_.push(HeapItem{c.y + L_ * std::pow(0.5 * diameter(c), s_), c.order, id});
    }
  }

  void expand_best_leaf() {
    if (leaves_.empty())
      throw std::logic_error("doo_optimize: no evaluated leaf to expand");
    const HeapItem top = leaves_.top();
    leaves_.pop();
    const Cell parent = cells_[top.cell];  // copy: cells_ may reallocate
    const std::uint32_t children = 1u << dim_;
    for (std::uint32_t mask = 0; mask < children; ++mask) {
      Cell child;
      child.lo.resize(dim_);
      child.hi.resize(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double mid = 0.5 * (parent.lo[i] + parent.hi[i]);
        if ((mask >> i) & 1u) {
          child.lo[i] = mid;
          child.hi[i] = parent.hi[i];
        } else {
          child.lo[i] = parent.lo[i];
          child.hi[i] = mid;
        }
      }
      child.order = next_order_++;
      cells_.push_back(std::move(child));
      pending_.push_back(cells_.size() - 1);
    }
  }

  int dim_;
  double s_, L_;
  std::vector<Cell> cells_;
  std::deque<std::size_t> pending_;
  std::vector<std::size_t> emitted_;
  std::priority_queue<HeapItem> leaves_;
  std::size_t absorbed_ = 0;
  std::int64_t next_order_ = 0;
};

class UcbDiscretization final : public Strategy {
 public:
  UcbDiscretization(int dim, double holder_s, double eta, std::int64_t horizon,
                    std::int64_t arms_override)
      : dim_(dim), s_(holder_s), eta_(eta), horizon_(horizon) {
    if (dim < 1) throw std::invalid_argument("ucb_discretization: dim must be >= 1");
    if (!(holder_s > 0.0) || !(holder_s <= 1.0))
      throw std::invalid_argument("ucb_discretization: s must lie in (0, 1]");
    if (!(eta > 0.0)) throw std::invalid_argument("ucb_discretization: eta must be > 0");
    if (horizon < 1) throw std::invalid_argument("ucb_discretization: horizon must be >= 1");
    if (arms_override > 0) {
      arms_ = arms_override;
    } else {
      const double v = std::pow(static_cast<double>(horizon) /
                                    std::log(static_cast<double>(horizon)),
                                dim / (2.0 * holder_s + dim));
      arms_ = static_cast<std::int64_t>(std::ceil(v));
      arms_ = std::max<std::int64_t>(1, arms_);
    }
    if (horizon < arms_)
      throw std::invalid_argument("ucb_discretization: horizon smaller than arm count");
    side_ = lattice_side(arms_, dim);
    sums_.assign(arms_, 0.0);
    counts_.assign(arms_, 0);
  }

  std::string name() const override { return "ucb-discretization"; }
  std::string description() const override {
    std::ostringstream out;
    out << "ucb-discretization d=" << dim_ << " s=" << format_double(s_)
        << " eta=" << format_double(eta_) << " T=" << horizon_ << " K=" << arms_;
    return out.str();
  }
  int dim() const override { return dim_; }

  std::vector<double> next_query(const Trace& trace, RngStream&) override {
    absorb(trace);
    const std::int64_t t = static_cast<std::int64_t>(trace.entries.size()) + 1;
    std::int64_t arm;
    if (t <= arms_) {
      arm = t - 1;  // initialization pass: each arm once
    } else {
      const double bonus = 2.0 * std::log(static_cast<double>(horizon_));
      double best = -1e300;
      arm = 0;
      for (std::int64_t i = 0; i < arms_; ++i) {
        const double n = static_cast<double>(counts_[i]);
        const double index = sums_[i] / n + eta_ * std::sqrt(bonus / n);
        if (index > best) {
          best = index;
          arm = i;
        }
      }
    }
    emitted_.push_back(arm);
    return lattice_point(arm, side_, dim_);
  }

 private:
  void absorb(const Trace& trace) {
    for (; absorbed_ < trace.entries.size(); ++absorbed_) {
      const std::int64_t arm = emitted_[absorbed_];
      sums_[arm] += trace.entries[absorbed_].y;
      counts_[arm] += 1;
    }
  }

  int dim_;
  double s_, eta_;
  std::int64_t horizon_;
  std::int64_t arms_ = 1;
  std::int64_t side_ = 1;
  std::vector<double> sums_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> emitted_;
  std::size_t absorbed_ = 0;
};

class SimpleFromCumulative final : public Strategy {
 public:
  SimpleFromCumulative(std::unique_ptr<Strategy> base, std::int64_t horizon)
      : base_(std::move(base)), horizon_(horizon) {
    if (!base_) throw std::invalid_argument("simple_from_cumulative: base strategy required");
    if (horizon < 2) throw std::invalid_argument("simple_from_cumulative: horizon must be >= 2");
  }

  std::string name() const override {
    return "simple-from-cumulative(" + base_->name() + ")";
  }
  std::string description() const override {
    return "simple-from-cumulative T=" + std::to_string(horizon_) + " base=[" +
           base_->description() + "]";
  }
  int dim() const override { return base_->dim(); }
  bool requires_noiseless() const override { return base_->requires_noiseless(); }

  std::vector<double> next_query(const Trace& trace, RngStream& rng) override {
    const std::int64_t t = static_cast<std::int64_t>(trace.entries.size()) + 1;
    if (t < horizon_) return base_->next_query(trace, rng);
    // Final round: replay one of the first T-1 queries, chosen uniformly.
    const std::int64_t span = horizon_ - 1;
    std::int64_t pick = static_cast<std::int64_t>(rng.next_uniform() * static_cast<double>(span));
    pick = std::clamp<std::int64_t>(pick, 0, span - 1);
    return trace.entries[static_cast<std::size_t>(pick)].x;
  }

 private:
  std::unique_ptr<Strategy> base_;
  std::int64_t horizon_;
};

}  // namespace

std::unique_ptr<Strategy> make_random_search(int dim) {
  return std::make_unique<RandomSearch>(dim);
}

std::unique_ptr<Strategy> make_grid_explore_commit(int dim, std::int64_t horizon,
                                                   bool noisy) {
  return std::make_unique<GridExploreCommit>(dim, horizon, noisy);
}

std::unique_ptr<Strategy> make_doo(int dim, double holder_s, double holder_L) {
  return std::make_unique<Doo>(dim, holder_s, holder_L);
}

std::unique_ptr<Strategy> make_ucb_discretization(int dim, double holder_s,
                                                  double eta, std::int64_t horizon,
                                                  std::int64_t arms_override) {
  return std::make_unique<UcbDiscretization>(dim, holder_s, eta, horizon,
                                             arms_override);
}

std::unique_ptr<Strategy> make_simple_from_cumulative(std::unique_ptr<Strategy> base,
                                                      std::int64_t horizon) {
  return std::make_unique<SimpleFromCumulative>(std::move(base), horizon);
}

}  // namespace bbl
