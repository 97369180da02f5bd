#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>

#include "bbl/rng.hpp"
#include "bbl/wavelet.hpp"

namespace bbl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Smoothness-space parameters. p or q may be kInf; the corresponding sum in
// the norm becomes a max. sigma > d/p puts the space above the critical
// line, where functions have a continuous representative and pointwise
// evaluation is meaningful; every bandit experiment here requires that.
struct BesovParams {
  double sigma = 1.0;
  double p = 2.0;
  double q = 2.0;
  double L = 1.0;  // radius of the function ball
  int dim = 1;

  void validate() const;  // throws invalid_argument with the offending field
  bool supercritical() const { return sigma > static_cast<double>(dim) / p; }
  // Smoothness surviving the embedding into sup-norm geometry.
  double embedding_smoothness() const { return sigma - static_cast<double>(dim) / p; }
  // Exponent of the per-level weight 2^{j * (sigma + d(1/2 - 1/p))}.
  double level_weight_exponent() const { return sigma + dim * (0.5 - 1.0 / p); }
};

// Sequence-space norm of a coefficient function:
//   ( sum_j [ 2^{j(sigma + d(1/2 - 1/p))} ( sum_lambda |c_{j,lambda}|^p )^{1/p} ]^q )^{1/q}
// with max in place of the sum when p or q is infinite. Absent coefficients
// are zeros and contribute nothing.
double besov_norm(const CoefficientFunction& f, const BesovParams& bp);

struct HolderParams {
  double s = 1.0;  // exponent in (0, 1]
  double L = 1.0;
  int dim = 1;
  void validate() const;
};

using Objective = std::function<double(std::span<const double>)>;

// Monte-Carlo lower estimate of sup |f(x)-f(y)| / |x-y|^s over [0,1]^d.
// Pairs alternate between independent uniform draws and short-range pairs
// whose separation is ~2^{-k} for k cycling through 1..scale_levels, so both
// the coarse and the fine fluctuations are probed. Deterministic in `seed`.
double holder_seminorm_estimate(const Objective& f, const HolderParams& hp,
                                std::int64_t n_pairs, std::uint64_t seed,
                                int scale_levels = 12);

// Convenience overload; scale_levels tracks the finest stored level so the
// probe separations reach below the narrowest bump.
double holder_seminorm_estimate(const CoefficientFunction& f, const HolderParams& hp,
                                std::int64_t n_pairs, std::uint64_t seed);

// Random element of the radius-L ball: draws signed coefficients on levels
// 0..max_level (each present with probability `fill`), then rescales the
// draw to norm L*u with u uniform on (0,1]. Returns the zero function only
// in the measure-zero event that every attempted draw came out empty.
CoefficientFunction sample_besov_ball(const BesovParams& bp, int max_level,
                                      double fill, std::uint64_t seed,
                                      WaveletKind kind = WaveletKind::SmoothBump);

// Ratio (estimated Holder seminorm at s = sigma - d/p) / besov_norm. The
// embedding makes the seminorm of a norm-1 element boundedly small; the
// ratio is the empirical handle on that constant.
double embedding_ratio(const CoefficientFunction& f, const BesovParams& bp,
                       std::int64_t n_pairs, std::uint64_t seed);

}  // namespace bbl
