#include "bbl/wavelet.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bbl {

namespace {

// Flat ids and per-axis coordinates use at most 62 bits so arithmetic on
// them cannot overflow; this caps level * dim for every entry point that
// builds a full grid or index.
void check_grid_bits(int level, int dim, const char* who) {
  if (level < 0) throw std::invalid_argument(std::string(who) + ": negative level");
  if (dim < 1) throw std::invalid_argument(std::string(who) + ": dim must be >= 1");
  if (static_cast<long long>(level) * dim > 62)
    throw std::invalid_argument(std::string(who) + ": level * dim exceeds 62 bits");
}

std::uint64_t cells_per_axis(int level) { return std::uint64_t{1} << level; }

}  // namespace

std::string to_string(WaveletKind kind) {
  switch (kind) {
    case WaveletKind::Haar: return "haar";
    case WaveletKind::TentBump: return "tent-bump";
    case WaveletKind::SmoothBump: return "smooth-bump";
  }
  throw std::logic_error("unknown wavelet kind");
}

WaveletKind wavelet_kind_from_string(const std::string& name) {
  if (name == "haar") return WaveletKind::Haar;
  if (name == "tent-bump") return WaveletKind::TentBump;
  if (name == "smooth-bump") return WaveletKind::SmoothBump;
  throw std::invalid_argument("unknown wavelet kind: \"" + name +
                              "\" (expected haar, tent-bump or smooth-bump)");
}

FatherWavelet FatherWavelet::make(WaveletKind kind) {
  FatherWavelet w;
  w.kind = kind;
  w.peak_value = 1.0;
  w.sup_norm = 1.0;
  switch (kind) {
    case WaveletKind::Haar: w.smoothness_order = 0.0; break;
    case WaveletKind::TentBump: w.smoothness_order = 1.0; break;
    case WaveletKind::SmoothBump: w.smoothness_order = 3.0; break;
  }
  return w;
}

double FatherWavelet::eval1d(double u) const {
  switch (kind) {
    case WaveletKind::Haar:
      return (u >= 0.0 && u < 1.0) ? 1.0 : 0.0;
    case WaveletKind::TentBump:
      if (u <= 0.0 || u >= 1.0) return 0.0;
      return 1.0 - std::fabs(2.0 * u - 1.0);
    case WaveletKind::SmoothBump: {
      if (u <= 0.0 || u >= 1.0) return 0.0;
      const double a = u * (1.0 - u);
      return 64.0 * a * a * a;
    }
  }
  return 0.0;
}

double FatherWavelet::eval(std::span<const double> u) const {
  double prod = 1.0;
  for (double ui : u) {
    prod *= eval1d(ui);
    if (prod == 0.0) return 0.0;
  }
  return prod;
}

bool DyadicIndex::valid() const {
  if (level < 0 || lambda.empty()) return false;
  if (static_cast<long long>(level) * dim() > 62) return false;
  const std::uint64_t n = cells_per_axis(level);
  for (std::int64_t li : lambda)
    if (li < 1 || static_cast<std::uint64_t>(li) > n) return false;
  return true;
}

double eval_dilated(const FatherWavelet& w, const DyadicIndex& idx,
                    std::span<const double> x) {
  if (!idx.valid()) throw std::invalid_argument("eval_dilated: invalid dyadic index");
  if (static_cast<int>(x.size()) != idx.dim())
    throw std::invalid_argument("eval_dilated: point dimension mismatch");
  const double scale = std::ldexp(1.0, idx.level);
  double prod = 1.0;
  for (int i = 0; i < idx.dim(); ++i) {
    const double u = scale * x[i] - static_cast<double>(idx.lambda[i] - 1);
    prod *= w.eval1d(u);
    if (prod == 0.0) return 0.0;
  }
  // 2^{dj/2} normalization keeps every translate at unit L2 norm for haar.
  return prod * std::exp2(0.5 * idx.dim() * idx.level);
}

std::uint64_t flatten_lambda(const DyadicIndex& idx) {
  if (!idx.valid()) throw std::invalid_argument("flatten_lambda: invalid dyadic index");
  const std::uint64_t n = cells_per_axis(idx.level);
  std::uint64_t flat = 0, stride = 1;
  for (int i = 0; i < idx.dim(); ++i) {
    flat += static_cast<std::uint64_t>(idx.lambda[i] - 1) * stride;
    stride *= n;
  }
  return flat;
}

DyadicIndex unflatten_lambda(int level, std::uint64_t flat, int dim) {
  check_grid_bits(level, dim, "unflatten_lambda");
  const std::uint64_t n = cells_per_axis(level);
  DyadicIndex idx;
  idx.level = level;
  idx.lambda.resize(dim);
  for (int i = 0; i < dim; ++i) {
    idx.lambda[i] = static_cast<std::int64_t>(flat % n) + 1;
    flat /= n;
  }
  if (flat != 0)
    throw std::invalid_argument("unflatten_lambda: flat id out of range for level");
  return idx;
}

std::uint64_t cell_containing(std::span<const double> x, int level) {
  check_grid_bits(level, static_cast<int>(x.size()), "cell_containing");
  const std::uint64_t n = cells_per_axis(level);
  const double scale = std::ldexp(1.0, level);
  std::uint64_t flat = 0, stride = 1;
  for (double xi : x) {
    if (!(xi >= 0.0 && xi <= 1.0))
      throw std::invalid_argument("cell_containing: point outside [0,1]^d");
    std::uint64_t c = static_cast<std::uint64_t>(xi * scale);
    if (c >= n) c = n - 1;  // x_i = 1 belongs to the last (half-open) cell
    flat += c * stride;
    stride *= n;
  }
  return flat;
}

CoefficientFunction::CoefficientFunction(FatherWavelet wavelet, int dim)
    : wavelet_(wavelet), dim_(dim) {
  if (dim < 1) throw std::invalid_argument("CoefficientFunction: dim must be >= 1");
}

int CoefficientFunction::max_level() const {
  if (coeffs_.empty()) return -1;
  return coeffs_.rbegin()->first.first;
}

void CoefficientFunction::set(const DyadicIndex& idx, double value) {
  if (!idx.valid() || idx.dim() != dim_)
    throw std::invalid_argument("CoefficientFunction::set: invalid index for this dimension");
  const Key key{idx.level, flatten_lambda(idx)};
  if (value == 0.0)
    coeffs_.erase(key);
  else
    coeffs_[key] = value;
}

double CoefficientFunction::get(const DyadicIndex& idx) const {
  if (!idx.valid() || idx.dim() != dim_)
    throw std::invalid_argument("CoefficientFunction::get: invalid index for this dimension");
  const auto it = coeffs_.find({idx.level, flatten_lambda(idx)});
  return it == coeffs_.end() ? 0.0 : it->second;
}

void CoefficientFunction::scale(double factor) {
  if (factor == 0.0) {
    coeffs_.clear();
    return;
  }
  for (auto& [key, value] : coeffs_) value *= factor;
}

double CoefficientFunction::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("CoefficientFunction::eval: point dimension mismatch");
  for (double xi : x)
    if (!(xi >= 0.0 && xi <= 1.0))
      throw std::invalid_argument("CoefficientFunction::eval: point outside [0,1]^d");
  double total = 0.0;
  // Per level, only the translate whose cell contains x can be nonzero.
  auto it = coeffs_.begin();
  while (it != coeffs_.end()) {
    const int level = it->first.first;
    const auto hit = coeffs_.find({level, cell_containing(x, level)});
    if (hit != coeffs_.end()) {
      const DyadicIndex idx = unflatten_lambda(level, hit->first.second, dim_);
      total += hit->second * eval_dilated(wavelet_, idx, x);
    }
    it = coeffs_.lower_bound({level + 1, 0});
  }
  return total;
}

CoefficientFunction haar_analyze(std::span<const double> samples, int max_level,
                                 int dim) {
  check_grid_bits(max_level, dim, "haar_analyze");
  if (static_cast<long long>(max_level) * dim > 26)
    throw std::invalid_argument("haar_analyze: grid of 2^(dim*max_level) samples is too large");
  const std::uint64_t total = std::uint64_t{1} << (max_level * dim);
  if (samples.size() != total)
    throw std::invalid_argument("haar_analyze: expected 2^(dim*max_level) samples");

  // Cell means per level, finest first; means[j] is indexed by the flat
  // cell id at level j.
  std::vector<std::vector<double>> means(max_level + 1);
  means[max_level].assign(samples.begin(), samples.end());
  for (int j = max_level - 1; j >= 0; --j) {
    const std::uint64_t n = cells_per_axis(j);
    const std::uint64_t n_child = cells_per_axis(j + 1);
    means[j].assign(std::uint64_t{1} << (j * dim), 0.0);
    const std::uint64_t child_count = std::uint64_t{1} << dim;
    for (std::uint64_t c = 0; c < means[j].size(); ++c) {
      // Per-axis coordinates of cell c at level j.
      std::uint64_t rest = c;
      std::vector<std::uint64_t> coord(dim);
      for (int i = 0; i < dim; ++i) {
        coord[i] = rest % n;
        rest /= n;
      }
      double sum = 0.0;
      for (std::uint64_t b = 0; b < child_count; ++b) {
        std::uint64_t flat = 0, stride = 1;
        for (int i = 0; i < dim; ++i) {
          const std::uint64_t child_coord = 2 * coord[i] + ((b >> i) & 1);
          flat += child_coord * stride;
          stride *= n_child;
        }
        sum += means[j + 1][flat];
      }
      means[j][c] = sum / static_cast<double>(child_count);
    }
  }

  CoefficientFunction out(FatherWavelet::make(WaveletKind::Haar), dim);
  if (means[0][0] != 0.0)
    out.set(unflatten_lambda(0, 0, dim), means[0][0]);
  for (int j = 1; j <= max_level; ++j) {
    const std::uint64_t n = cells_per_axis(j);
    const std::uint64_t n_parent = cells_per_axis(j - 1);
    const double norm = std::exp2(-0.5 * dim * j);
    for (std::uint64_t c = 0; c < means[j].size(); ++c) {
      std::uint64_t rest = c, parent = 0, stride = 1;
      for (int i = 0; i < dim; ++i) {
        parent += (rest % n / 2) * stride;
        rest /= n;
        stride *= n_parent;
      }
      const double delta = means[j][c] - means[j - 1][parent];
      if (delta != 0.0) out.set(unflatten_lambda(j, c, dim), delta * norm);
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_json(const CoefficientFunction& f) {
  std::ostringstream out;
  out << "{\"wavelet\": \"" << to_string(f.wavelet().kind) << "\", \"dim\": " << f.dim()
      << ", \"entries\": [";
  bool first = true;
  for (const auto& [key, value] : f.coefficients()) {
    const DyadicIndex idx = unflatten_lambda(key.first, key.second, f.dim());
    out << (first ? "\n" : ",\n") << "  [" << idx.level << ", [";
    for (int i = 0; i < idx.dim(); ++i) out << (i ? ", " : "") << idx.lambda[i];
    out << "], " << format_double(value) << "]";
    first = false;
  }
  out << (first ? "]}" : "\n]}") << "\n";
  return out.str();
}

CoefficientFunction coefficient_function_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("coefficient function: JSON parse error: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("wavelet") || !doc.contains("dim") ||
      !doc.contains("entries"))
    throw std::invalid_argument("coefficient function: expected object with wavelet, dim, entries");
  if (!doc["wavelet"].is_string())
    throw std::invalid_argument("coefficient function: wavelet must be a string");
  if (!doc["dim"].is_number_integer() || doc["dim"].get<int>() < 1)
    throw std::invalid_argument("coefficient function: dim must be a positive integer");
  if (!doc["entries"].is_array())
    throw std::invalid_argument("coefficient function: entries must be an array");

  const WaveletKind kind = wavelet_kind_from_string(doc["wavelet"].get<std::string>());
  const int dim = doc["dim"].get<int>();
  CoefficientFunction f(FatherWavelet::make(kind), dim);
  std::size_t pos = 0;
  for (const auto& entry : doc["entries"]) {
    const std::string where = "coefficient function: entries[" + std::to_string(pos++) + "]";
    if (!entry.is_array() || entry.size() != 3)
      throw std::invalid_argument(where + ": expected [level, [lambda...], value]");
    if (!entry[0].is_number_integer())
      throw std::invalid_argument(where + ": level must be an integer");
    if (!entry[1].is_array() || entry[1].size() != static_cast<std::size_t>(dim))
      throw std::invalid_argument(where + ": lambda must be an array of length dim");
    if (!entry[2].is_number())
      throw std::invalid_argument(where + ": value must be a number");
    DyadicIndex idx;
    idx.level = entry[0].get<int>();
    for (const auto& li : entry[1]) {
      if (!li.is_number_integer())
        throw std::invalid_argument(where + ": lambda entries must be integers");
      idx.lambda.push_back(li.get<std::int64_t>());
    }
    if (!idx.valid())
      throw std::invalid_argument(where + ": index out of range (lambda is 1-based, <= 2^level)");
    if (f.get(idx) != 0.0)
      throw std::invalid_argument(where + ": duplicate index");
    f.set(idx, entry[2].get<double>());
  }
  return f;
}

void save_coefficient_function(const CoefficientFunction& f,
                               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << to_json(f);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CoefficientFunction load_coefficient_function(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return coefficient_function_from_json(buf.str());
}

}  // namespace bbl
