#include "bbl/instances.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace bbl {

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < x.size(); ++i) out << (i ? " " : "") << format_double(x[i]);
  out << ")";
  return out.str();
}

}  // namespace

NoiseModel NoiseModel::gaussian(double eta) {
  NoiseModel m;
  m.kind = Kind::Gaussian;
  m.eta = eta;
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (kind == Kind::None && eta != 0.0)
    throw std::invalid_argument("noise model: kind none requires eta = 0");
  if (kind == Kind::Gaussian && !(eta > 0.0))
    throw std::invalid_argument("noise model: gaussian requires eta > 0");
}

ThetaFamily::ThetaFamily(int level, BesovParams bp, FatherWavelet wavelet)
    : level_(level), bp_(bp), wavelet_(wavelet) {
  bp_.validate();
  if (level < 0) throw std::invalid_argument("theta family: level must be >= 0");
  if (static_cast<long long>(level) * bp_.dim > 26)
    throw std::invalid_argument("theta family: 2^(dim*level) members is too large");
  const double d = bp_.dim;
  scale_ = bp_.L * std::exp2(-level * (bp_.sigma + d * (0.5 - 1.0 / bp_.p)));
  peak_ = bp_.L * wavelet_.peak_value * std::exp2(level * (d / bp_.p - bp_.sigma));
  sup_norm_max_ = bp_.L * wavelet_.sup_norm * std::exp2(level * (d / bp_.p - bp_.sigma));
  smoothness_warning_ = wavelet_.smoothness_order < bp_.sigma;
}

DyadicIndex ThetaFamily::member_index(std::uint64_t member) const {
  return unflatten_lambda(level_, member, bp_.dim);
}

double ThetaFamily::member_eval(std::uint64_t member, std::span<const double> x) const {
  return scale_ * eval_dilated(wavelet_, member_index(member), x);
}

CoefficientFunction ThetaFamily::member_coefficients(std::uint64_t member) const {
  CoefficientFunction f(wavelet_, bp_.dim);
  f.set(member_index(member), scale_);
  return f;
}

std::vector<double> ThetaFamily::member_cell_center(std::uint64_t member) const {
  const DyadicIndex idx = member_index(member);
  std::vector<double> center(bp_.dim);
  const double side = std::exp2(-level_);
  for (int i = 0; i < bp_.dim; ++i)
    center[i] = (static_cast<double>(idx.lambda[i] - 1) + 0.5) * side;
  return center;
}

std::uint64_t ThetaFamily::cell_of(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != bp_.dim)
    throw std::invalid_argument("theta family: point dimension mismatch");
  return cell_containing(x, level_);
}

ThetaFamily build_theta(int level, const BesovParams& bp, const FatherWavelet& wavelet) {
  return ThetaFamily(level, bp, wavelet);
}

int choose_j_noiseless(std::int64_t T, int dim) {
  if (T < 1) throw std::invalid_argument("choose_j_noiseless: T must be >= 1");
  if (dim < 1) throw std::invalid_argument("choose_j_noiseless: dim must be >= 1");
  const int j = static_cast<int>(std::ceil(std::log2(2.0 * static_cast<double>(T)) / dim));
  return std::max(0, j);
}

AdversarialOracle::AdversarialOracle(int level, const BesovParams& bp,
                                     const FatherWavelet& wavelet)
    : family_(level, bp, wavelet) {}

double AdversarialOracle::observe(std::span<const double> x) {
  touched_.insert(family_.cell_of(x));
  ++queries_;
  return 0.0;
}

AdversarialOracle::Outcome AdversarialOracle::finalize(std::int64_t T) const {
  if (T < 1) throw std::invalid_argument("adversarial oracle: T must be >= 1");
  const std::uint64_t members = family_.member_count();
  if (members < 2 * static_cast<std::uint64_t>(T))
    throw std::invalid_argument("adversarial oracle: family smaller than 2T; level too low for horizon");
  // Lowest untouched flat id; the touched set is ordered so the first gap
  // is found in one pass.
  std::uint64_t survivor = 0;
  for (std::uint64_t cell : touched_) {
    if (cell != survivor) break;
    ++survivor;
  }
  if (survivor >= members)
    throw std::runtime_error("adversarial oracle: every cell was touched");
  Outcome out{survivor, family_.peak(), static_cast<double>(T) * family_.peak(),
              family_.member_coefficients(survivor)};
  return out;
}

double noisy_observe(const ObjectiveInstance& inst, std::span<const double> x,
                     RngStream& rng) {
  const double f = inst.objective(x);
  if (inst.noise.kind == NoiseModel::Kind::Gaussian)
    return f + inst.noise.eta * rng.next_normal();
  return f;
}

double info_gain(int level, const BesovParams& bp, const FatherWavelet& wavelet,
                 double eta) {
  bp.validate();
  if (level < 0) throw std::invalid_argument("info_gain: level must be >= 0");
  if (!(eta > 0.0)) throw std::invalid_argument("info_gain: eta must be > 0");
  const double d = bp.dim;
  const double sup = bp.L * wavelet.sup_norm * std::exp2(level * (d / bp.p - bp.sigma));
  return sup * sup / (2.0 * eta * eta);
}

KlBudget kl_budget(int level, std::int64_t T, double eta, const BesovParams& bp,
                   const FatherWavelet& wavelet) {
  if (T < 1) throw std::invalid_argument("kl_budget: T must be >= 1");
  KlBudget out;
  const double members = std::exp2(static_cast<double>(bp.dim) * level);
  out.avg_kl_bound = info_gain(level, bp, wavelet, eta) * static_cast<double>(T) / members;
  out.fano_threshold = (bp.dim * level * std::numbers::ln2_v<double>) / 16.0;
  out.fano_threshold_log2 = (bp.dim * level) / 16.0;
  out.holds = out.avg_kl_bound <= out.fano_threshold;
  return out;
}

NoisyDesign choose_j_noisy(std::int64_t T, double eta, const BesovParams& bp,
                           const FatherWavelet& wavelet) {
  bp.validate();
  if (!bp.supercritical())
    throw std::invalid_argument("choose_j_noisy: requires sigma > d/p");
  if (!(eta > 0.0)) throw std::invalid_argument("choose_j_noisy: eta must be > 0");
  if (T < 1) throw std::invalid_argument("choose_j_noisy: T must be >= 1");

  NoisyDesign design;
  const double d = bp.dim;
  design.r = d + 2.0 * (bp.sigma - d / bp.p);
  design.z = bp.L * bp.L * wavelet.sup_norm * wavelet.sup_norm *
             static_cast<double>(T) / (2.0 * eta * eta);
  const double a = 8.0 * design.r * design.z;
  if (!(a > 2.0))
    throw HorizonTooSmallError("choose_j_noisy: horizon too small (8rz <= 2)");
  const double denom = d * std::log2(a);
  design.j_real = std::log2(a / denom) / design.r;
  if (design.j_real < 0.0)
    throw HorizonTooSmallError("choose_j_noisy: horizon too small (analytic level negative)");

  int j = std::max(0, static_cast<int>(std::floor(design.j_real)));
  for (;; ++j) {
    if (j > 200)
      throw std::logic_error("choose_j_noisy: level scan failed to converge");
    const KlBudget budget = kl_budget(j, T, eta, bp, wavelet);
    if (budget.holds) {
      design.level = j;
      design.budget = budget;
      break;
    }
  }
  design.d_star = info_gain(design.level, bp, wavelet, eta);
  return design;
}

namespace {

ObjectiveInstance make_instance_impl(const InstanceSpec& spec, std::uint64_t seed) {
  ObjectiveInstance inst;
  inst.noise = spec.noise;
  inst.noise.validate();

  if (spec.kind == "theta-member") {
    spec.bp.validate();
    if (!spec.bp.supercritical())
      throw std::invalid_argument("make_instance: theta-member requires sigma > d/p");
    auto family = std::make_shared<ThetaFamily>(spec.level, spec.bp,
                                                FatherWavelet::make(spec.wavelet));
    DyadicIndex idx;
    idx.level = spec.level;
    idx.lambda = spec.lambda;
    if (!idx.valid() || idx.dim() != spec.bp.dim)
      throw std::invalid_argument("make_instance: theta-member lambda invalid for level/dim");
    const std::uint64_t member = flatten_lambda(idx);
    inst.dim = spec.bp.dim;
    inst.objective = [family, member](std::span<const double> x) {
      return family->member_eval(member, x);
    };
    inst.max_value = family->peak();
    inst.max_location = family->member_cell_center(member);
    std::ostringstream desc;
    desc << "theta-member j=" << spec.level << " lambda=";
    for (std::size_t i = 0; i < spec.lambda.size(); ++i)
      desc << (i ? "." : "") << spec.lambda[i];
    desc << " " << to_string(spec.wavelet) << " d=" << spec.bp.dim;
    inst.description = desc.str();
    return inst;
  }

  if (spec.kind == "random-besov") {
    spec.bp.validate();
    if (!spec.bp.supercritical())
      throw std::invalid_argument("make_instance: random-besov requires sigma > d/p");
    auto f = std::make_shared<CoefficientFunction>(
        sample_besov_ball(spec.bp, spec.max_level, spec.fill, seed, spec.wavelet));
    inst.dim = spec.bp.dim;
    inst.objective = [f](std::span<const double> x) { return f->eval(x); };

    // Dense grid search for the maximum, one sample per cell center at four
    // levels below the finest coefficient. Exact for haar (the function is
    // constant on finer cells); an audited approximation for the bumps.
    const int grid_level = spec.max_level + 4;
    if (static_cast<long long>(grid_level) * spec.bp.dim > 26)
      throw std::invalid_argument("make_instance: random-besov max search grid is too large for this dim");
    const std::uint64_t per_axis = std::uint64_t{1} << grid_level;
    const double side = std::exp2(-grid_level);
    std::uint64_t total = std::uint64_t{1} << (grid_level * spec.bp.dim);
    std::vector<double> x(spec.bp.dim);
    double best = -kInf;
    std::vector<double> best_x(spec.bp.dim, 0.0);
    for (std::uint64_t cell = 0; cell < total; ++cell) {
      std::uint64_t rest = cell;
      for (int i = 0; i < spec.bp.dim; ++i) {
        x[i] = (static_cast<double>(rest % per_axis) + 0.5) * side;
        rest /= per_axis;
      }
      const double v = f->eval(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    inst.max_value = best;
    inst.max_location = best_x;
    inst.max_is_exact = (spec.wavelet == WaveletKind::Haar);
    std::ostringstream desc;
    desc << "random-besov " << to_string(spec.wavelet) << " d=" << spec.bp.dim
         << " max_level=" << spec.max_level << " fill=" << format_double(spec.fill)
         << " seed=" << seed;
    inst.description = desc.str();
    return inst;
  }

  if (spec.kind == "tent-peak") {
    if (spec.dim < 1) throw std::invalid_argument("make_instance: tent-peak dim must be >= 1");
    if (!(spec.tent_s > 0.0) || !(spec.tent_s <= 1.0))
      throw std::invalid_argument("make_instance: tent-peak s must lie in (0, 1]");
    if (!(spec.tent_L > 0.0)) throw std::invalid_argument("make_instance: tent-peak L must be > 0");
    if (!(spec.height > 0.0)) throw std::invalid_argument("make_instance: tent-peak height must be > 0");
    std::vector<double> apex = spec.apex;
    if (apex.empty()) apex.assign(spec.dim, 0.5);
    if (static_cast<int>(apex.size()) != spec.dim)
      throw std::invalid_argument("make_instance: tent-peak apex dimension mismatch");
    for (double a : apex)
      if (!(a >= 0.0 && a <= 1.0))
        throw std::invalid_argument("make_instance: tent-peak apex outside [0,1]^d");
    const double s = spec.tent_s, L = spec.tent_L, h = spec.height;
    inst.dim = spec.dim;
    inst.objective = [apex, s, L, h](std::span<const double> x) {
      double dist2 = 0.0;
      for (std::size_t i = 0; i < apex.size(); ++i) {
        const double d = x[i] - apex[i];
        dist2 += d * d;
      }
      return std::max(0.0, h - L * std::pow(std::sqrt(dist2), s));
    };
    inst.max_value = h;
    inst.max_location = apex;
    std::ostringstream desc;
    desc << "tent-peak d=" << spec.dim << " s=" << format_double(s) << " L="
         << format_double(L) << " height=" << format_double(h) << " apex="
         << format_point(apex);
    inst.description = desc.str();
    return inst;
  }

  throw std::invalid_argument("make_instance: unknown kind \"" + spec.kind +
                              "\" (expected theta-member, random-besov or tent-peak)");
}

}  // namespace

ObjectiveInstance make_instance(const InstanceSpec& spec, std::uint64_t seed) {
  ObjectiveInstance inst = make_instance_impl(spec, seed);
  if (inst.noise.noisy())
    inst.description += " eta=" + format_double(inst.noise.eta);
  return inst;
}

}  // namespace bbl
