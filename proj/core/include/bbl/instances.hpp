#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbl/besov.hpp"
#include "bbl/rng.hpp"
#include "bbl/wavelet.hpp"

namespace bbl {

struct NoiseModel {
  enum class Kind { None, Gaussian };
  Kind kind = Kind::None;
  double eta = 0.0;  // standard deviation; also the variance proxy sqrt

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double eta);
  void validate() const;  // eta == 0 iff kind none
  bool noisy() const { return kind == Kind::Gaussian; }
};

// The needle-in-haystack family: 2^{dj} disjoint-support bumps
//   f_lambda = scale * phi_{j,lambda},  scale = L * 2^{-j(sigma + d(1/2 - 1/p))},
// every member sitting exactly on the boundary of the radius-L ball. Peak
// height decays like 2^{j(d/p - sigma)}, so deeper families hide smaller
// needles in more cells.
class ThetaFamily {
 public:
  ThetaFamily(int level, BesovParams bp, FatherWavelet wavelet);

  int level() const { return level_; }
  int dim() const { return bp_.dim; }
  const BesovParams& params() const { return bp_; }
  const FatherWavelet& wavelet() const { return wavelet_; }

  std::uint64_t member_count() const { return std::uint64_t{1} << (bp_.dim * level_); }
  double scale() const { return scale_; }
  double peak() const { return peak_; }
  double sup_norm_max() const { return sup_norm_max_; }
  // Set when the wavelet's regularity falls below sigma; the family is still
  // well defined but does not represent the smoothness class faithfully.
  bool smoothness_warning() const { return smoothness_warning_; }

  DyadicIndex member_index(std::uint64_t member) const;
  double member_eval(std::uint64_t member, std::span<const double> x) const;
  CoefficientFunction member_coefficients(std::uint64_t member) const;
  std::vector<double> member_cell_center(std::uint64_t member) const;
  // 0-based flat id of the member whose support cell contains x.
  std::uint64_t cell_of(std::span<const double> x) const;

 private:
  int level_;
  BesovParams bp_;
  FatherWavelet wavelet_;
  double scale_, peak_, sup_norm_max_;
  bool smoothness_warning_;
};

ThetaFamily build_theta(int level, const BesovParams& bp, const FatherWavelet& wavelet);

// Family level for a noiseless horizon-T game: ceil(log2(2T) / d), the
// smallest j with 2^{dj} >= 2T; also 2^{dj} <= 2^{d+1} T.
int choose_j_noiseless(std::int64_t T, int dim);

// Answers every query with 0 while recording which dyadic cells were hit.
// After T queries at least 2^{dj} - T cells are untouched, and the zero
// answers are consistent with every member supported in an untouched cell:
// the player has learned nothing that distinguishes them. finalize picks the
// lowest-id untouched member and charges its full peak as regret.
class AdversarialOracle {
 public:
  AdversarialOracle(int level, const BesovParams& bp, const FatherWavelet& wavelet);

  double observe(std::span<const double> x);  // always 0.0
  std::uint64_t query_count() const { return queries_; }
  std::uint64_t touched_count() const { return touched_.size(); }
  std::uint64_t untouched_count() const { return family_.member_count() - touched_.size(); }
  const std::set<std::uint64_t>& touched_cells() const { return touched_; }
  const ThetaFamily& family() const { return family_; }

  struct Outcome {
    std::uint64_t survivor = 0;       // flat member id
    double simple_regret = 0.0;       // = family peak, exactly
    double cumulative_regret = 0.0;   // = T * peak
    CoefficientFunction member;
  };
  // Requires the family to be sized for the horizon (2^{dj} >= 2T) and at
  // least one untouched cell to remain.
  Outcome finalize(std::int64_t T) const;

 private:
  ThetaFamily family_;
  std::set<std::uint64_t> touched_;
  std::uint64_t queries_ = 0;
};

// A concrete objective to optimize: the function, its known maximum, the
// observation noise, and a short comma-free description for result tables.
struct ObjectiveInstance {
  Objective objective;
  int dim = 1;
  double max_value = 0.0;
  std::vector<double> max_location;
  NoiseModel noise;
  std::string description;
  // False when max_value came from a finite grid search (non-haar random
  // draws); regret can then be slightly negative and the harness clamps it.
  bool max_is_exact = true;
};

// One observation y = f(x) + eta * g, g standard normal from the stream
// (or exactly f(x) for noiseless instances).
double noisy_observe(const ObjectiveInstance& inst, std::span<const double> x,
                     RngStream& rng);

// Per-query information gain ceiling of the level-j family under Gaussian
// noise: L^2 ||phi||_inf^2 2^{2j(d/p - sigma)} / (2 eta^2), the largest KL
// divergence between observing the zero function and any single member.
double info_gain(int level, const BesovParams& bp, const FatherWavelet& wavelet,
                 double eta);

struct KlBudget {
  double avg_kl_bound = 0.0;       // info_gain * T / 2^{dj}
  double fano_threshold = 0.0;     // ln(2^{dj}) / 16; drives `holds`
  double fano_threshold_log2 = 0.0;  // dj/16, the log2 reading, for reports
  bool holds = false;              // avg_kl_bound <= fano_threshold
};
KlBudget kl_budget(int level, std::int64_t T, double eta, const BesovParams& bp,
                   const FatherWavelet& wavelet);

struct HorizonTooSmallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Level design for the noisy lower-bound game.
struct NoisyDesign {
  double r = 0.0;       // d + 2(sigma - d/p)
  double z = 0.0;       // L^2 ||phi||_inf^2 T / (2 eta^2)
  double j_real = 0.0;  // (1/r) log2( 8rz / (d log2 8rz) ), the analytic level
  int level = 0;        // smallest integer >= max(0, floor(j_real)) whose
                        // Fano budget holds
  double d_star = 0.0;  // info_gain at `level`
  KlBudget budget;      // budget at `level`; budget.holds is true by search
};

// Picks the family level for horizon T and noise eta. The analytic level
// j_real slightly underestimates what the Fano condition needs at finite
// scales, so the integer level scans upward from floor(j_real) until the
// budget holds; the scan terminates because the average KL decays
// geometrically in j while the threshold grows linearly. Throws
// HorizonTooSmallError when j_real is negative or undefined (T/eta^2 too
// small for the construction to bite).
NoisyDesign choose_j_noisy(std::int64_t T, double eta, const BesovParams& bp,
                           const FatherWavelet& wavelet);

// Instance registry. `kind` selects which of the param subsets applies:
//   "theta-member":  bp, wavelet, level, lambda
//   "random-besov":  bp, wavelet, max_level, fill   (uses the seed argument)
//   "tent-peak":     dim, tent_s, tent_L, height, apex
struct InstanceSpec {
  std::string kind;
  BesovParams bp;
  WaveletKind wavelet = WaveletKind::Haar;
  int level = 0;
  std::vector<std::int64_t> lambda;
  int max_level = 4;
  double fill = 0.5;
  int dim = 1;
  double tent_s = 1.0;
  double tent_L = 1.0;
  double height = 1.0;
  std::vector<double> apex;  // empty: centered at 0.5 per axis
  NoiseModel noise;
};

ObjectiveInstance make_instance(const InstanceSpec& spec, std::uint64_t seed);

}  // namespace bbl
