#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bbl {

enum class WaveletKind { Haar, TentBump, SmoothBump };

std::string to_string(WaveletKind kind);
WaveletKind wavelet_kind_from_string(const std::string& name);

// Father wavelet supported on the unit cell. Haar is the indicator of
// [0,1)^d; the two bump shapes vanish on the cell boundary, so same-level
// translates never overlap for any of the three.
struct FatherWavelet {
  WaveletKind kind = WaveletKind::Haar;
  double peak_value = 1.0;        // phi* = sup phi
  double sup_norm = 1.0;          // ||phi||_inf, equals peak_value here
  double smoothness_order = 0.0;  // regularity the shape actually has

  static FatherWavelet make(WaveletKind kind);

  double eval1d(double u) const;
  // Tensor product over coordinates of the shifted argument u in R^d.
  double eval(std::span<const double> u) const;
};

// Location of one dilated wavelet: level j >= 0 and a 1-based translate
// lambda with lambda[i] in [1, 2^j] per axis.
struct DyadicIndex {
  int level = 0;
  std::vector<std::int64_t> lambda;

  int dim() const { return static_cast<int>(lambda.size()); }
  bool valid() const;
};

// phi_{j,lambda}(x) = 2^{dj/2} phi(2^j x - (lambda - 1)). The shift uses
// lambda - 1 so that lambda = (1,...,1) sits at the origin corner; the
// translate's support is the half-open dyadic cell
// prod_i [(lambda_i-1) 2^{-j}, lambda_i 2^{-j}).
double eval_dilated(const FatherWavelet& w, const DyadicIndex& idx,
                    std::span<const double> x);

// Row-major flattening of the translate (axis 0 fastest), 0-based.
std::uint64_t flatten_lambda(const DyadicIndex& idx);
DyadicIndex unflatten_lambda(int level, std::uint64_t flat, int dim);

// The dyadic cell at `level` containing x, as a 0-based flat id. Interior
// boundaries attribute to the cell on the right (half-open cells); x_i = 1
// clamps into the last cell.
std::uint64_t cell_containing(std::span<const double> x, int level);

// Finite linear combination sum_{(j,lambda)} c_{j,lambda} phi_{j,lambda}.
// Coefficients are stored sparsely and iterate in (level, flat translate)
// order, which fixes the serialization layout.
class CoefficientFunction {
 public:
  using Key = std::pair<int, std::uint64_t>;  // (level, flat translate)

  CoefficientFunction(FatherWavelet wavelet, int dim);

  const FatherWavelet& wavelet() const { return wavelet_; }
  int dim() const { return dim_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  int max_level() const;

  // Setting a value of exactly zero erases the entry.
  void set(const DyadicIndex& idx, double value);
  double get(const DyadicIndex& idx) const;
  void scale(double factor);

  const std::map<Key, double>& coefficients() const { return coeffs_; }

  // Pointwise evaluation; x must lie in [0,1]^d. Costs one map lookup per
  // stored level because same-level supports are disjoint.
  double eval(std::span<const double> x) const;

 private:
  FatherWavelet wavelet_;
  int dim_;
  std::map<Key, double> coeffs_;
};

// Multiresolution analysis of samples on the full dyadic grid at
// `max_level` (2^{d*max_level} values, row-major, axis 0 fastest): the
// level-0 coefficient is the global mean and each finer coefficient is the
// cell mean minus the parent cell mean, normalized by 2^{-dj/2}. The haar
// synthesis of the result telescopes back to the level-`max_level` cell
// means, so analyze -> eval reproduces the samples exactly.
CoefficientFunction haar_analyze(std::span<const double> samples,
                                 int max_level, int dim);

// JSON layout:
//   {"wavelet": "haar", "dim": 1, "entries": [[j, [lambda...], value], ...]}
// entries sorted by (level, flat translate); floats carry 17 significant
// digits so save -> load round-trips bit for bit.
std::string to_json(const CoefficientFunction& f);
CoefficientFunction coefficient_function_from_json(const std::string& text);
void save_coefficient_function(const CoefficientFunction& f,
                               const std::filesystem::path& path);
CoefficientFunction load_coefficient_function(const std::filesystem::path& path);

// Decimal form with 17 significant digits (%.17g); parses back to the
// identical double.
std::string format_double(double v);

}  // namespace bbl
