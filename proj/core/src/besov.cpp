#include "bbl/besov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bbl {

void BesovParams::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("besov params: sigma must be finite and > 0");
  if (!(p >= 1.0)) throw std::invalid_argument("besov params: p must be >= 1 (or inf)");
  if (!(q >= 1.0)) throw std::invalid_argument("besov params: q must be >= 1 (or inf)");
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("besov params: L must be finite and > 0");
  if (dim < 1) throw std::invalid_argument("besov params: dim must be >= 1");
}

void HolderParams::validate() const {
  if (!(s > 0.0) || !(s <= 1.0))
    throw std::invalid_argument("holder params: s must lie in (0, 1]");
  if (!(L > 0.0) || !std::isfinite(L))
    throw std::invalid_argument("holder params: L must be finite and > 0");
  if (dim < 1) throw std::invalid_argument("holder params: dim must be >= 1");
}

double besov_norm(const CoefficientFunction& f, const BesovParams& bp) {
  bp.validate();
  if (bp.dim != f.dim())
    throw std::invalid_argument("besov_norm: params dim does not match function dim");
  const bool p_inf = std::isinf(bp.p);
  const bool q_inf = std::isinf(bp.q);
  const double weight_exp = bp.level_weight_exponent();

  double outer_sum = 0.0, outer_max = 0.0;
  auto it = f.coefficients().begin();
  const auto end = f.coefficients().end();
  while (it != end) {
    const int level = it->first.first;
    double inner_sum = 0.0, inner_max = 0.0;
    for (; it != end && it->first.first == level; ++it) {
      const double a = std::fabs(it->second);
      if (p_inf)
        inner_max = std::max(inner_max, a);
      else
        inner_sum += std::pow(a, bp.p);
    }
    const double level_lp = p_inf ? inner_max : std::pow(inner_sum, 1.0 / bp.p);
    const double weighted = std::exp2(level * weight_exp) * level_lp;
    if (q_inf)
      outer_max = std::max(outer_max, weighted);
    else
      outer_sum += std::pow(weighted, bp.q);
  }
  return q_inf ? outer_max : std::pow(outer_sum, 1.0 / bp.q);
}

double holder_seminorm_estimate(const Objective& f, const HolderParams& hp,
                                std::int64_t n_pairs, std::uint64_t seed,
                                int scale_levels) {
  hp.validate();
  if (n_pairs < 1) throw std::invalid_argument("holder_seminorm_estimate: n_pairs must be >= 1");
  if (scale_levels < 1) scale_levels = 1;
  const int dim = hp.dim;
  const double s = hp.s;

  RngStream rng(seed);
  std::vector<double> x(dim), y(dim);
  double best = 0.0;
  for (std::int64_t i = 0; i < n_pairs; ++i) {
    for (int k = 0; k < dim; ++k) x[k] = rng.next_uniform();
    if (i % 2 == 0) {
      for (int k = 0; k < dim; ++k) y[k] = rng.next_uniform();
    } else {
      // Short-range probe: random direction, separation ~ 2^{-k}.
      const int k_scale = 1 + static_cast<int>((i / 2) % scale_levels);
      const double mag = std::exp2(-k_scale) * rng.next_uniform_pos();
      double norm2 = 0.0;
      for (int k = 0; k < dim; ++k) {
        y[k] = rng.next_normal();
        norm2 += y[k] * y[k];
      }
      const double inv = norm2 > 0.0 ? mag / std::sqrt(norm2) : 0.0;
      for (int k = 0; k < dim; ++k)
        y[k] = std::clamp(x[k] + y[k] * inv, 0.0, 1.0);
    }
    double dist2 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = x[k] - y[k];
      dist2 += d * d;
    }
    if (dist2 == 0.0) continue;
    const double ratio = std::fabs(f(x) - f(y)) / std::pow(std::sqrt(dist2), s);
    best = std::max(best, ratio);
  }
  return best;
}

double holder_seminorm_estimate(const CoefficientFunction& f, const HolderParams& hp,
                                std::int64_t n_pairs, std::uint64_t seed) {
  if (hp.dim != f.dim())
    throw std::invalid_argument("holder_seminorm_estimate: params dim does not match function dim");
  const int levels = std::max(3, f.max_level() + 2);
  const Objective obj = [&f](std::span<const double> x) { return f.eval(x); };
  return holder_seminorm_estimate(obj, hp, n_pairs, seed, levels);
}

CoefficientFunction sample_besov_ball(const BesovParams& bp, int max_level,
                                      double fill, std::uint64_t seed,
                                      WaveletKind kind) {
  bp.validate();
  if (max_level < 0) throw std::invalid_argument("sample_besov_ball: max_level must be >= 0");
  if (static_cast<long long>(max_level) * bp.dim > 20)
    throw std::invalid_argument("sample_besov_ball: 2^(dim*max_level) coefficients is too large");
  if (!(fill > 0.0) || !(fill <= 1.0))
    throw std::invalid_argument("sample_besov_ball: fill must lie in (0, 1]");

  RngStream rng(seed);
  CoefficientFunction f(FatherWavelet::make(kind), bp.dim);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int j = 0; j <= max_level; ++j) {
      const std::uint64_t count = std::uint64_t{1} << (j * bp.dim);
      for (std::uint64_t c = 0; c < count; ++c) {
        if (rng.next_uniform() >= fill) continue;
        const double v = rng.next_normal();
        if (v != 0.0) f.set(unflatten_lambda(j, c, bp.dim), v);
      }
    }
    if (f.empty()) continue;
    const double norm = besov_norm(f, bp);
    if (norm <= 0.0) continue;
    const double u = rng.next_uniform_pos();
    f.scale(bp.L * u / norm);
    return f;
  }
  return f;  // all attempts empty: zero function
}

double embedding_ratio(const CoefficientFunction& f, const BesovParams& bp,
                       std::int64_t n_pairs, std::uint64_t seed) {
  bp.validate();
  if (bp.dim != f.dim())
    throw std::invalid_argument("embedding_ratio: params dim does not match function dim");
  const double s = bp.embedding_smoothness();
  if (!(s > 0.0) || !(s <= 1.0))
    throw std::invalid_argument("embedding_ratio: requires sigma - d/p in (0, 1]");
  const double norm = besov_norm(f, bp);
  if (!(norm > 0.0))
    throw std::invalid_argument("embedding_ratio: function has zero norm");
  return holder_seminorm_estimate(f, HolderParams{s, bp.L, bp.dim}, n_pairs, seed) / norm;
}

}  // namespace bbl
