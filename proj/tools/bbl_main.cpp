// bbl: command-line front end. Subcommands bind JSON configs to the library
// and write CSV/JSON result files; all randomness flows from the config's
// `seed` (overridable with --seed), never from the clock.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bbl/besov.hpp"
#include "bbl/harness.hpp"
#include "bbl/instances.hpp"
#include "bbl/strategies.hpp"
#include "bbl/wavelet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  fs::path config_path;
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  bool quiet = false;
};

// ---- config parsing -------------------------------------------------------

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw CliError(path + ": " + message);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

// p and q admit the string "inf".
double as_extended_real(const json& v, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return bbl::kInf;
    fail(path, "expected a number or \"inf\"");
  }
  return as_real(v, path);
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) fail(path, "expected an integer seed");
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

bbl::BesovParams parse_besov(const json& v, const std::string& path) {
  bbl::BesovParams bp;
  bp.sigma = as_real(require(v, "sigma", path), path + ".sigma");
  bp.p = as_extended_real(require(v, "p", path), path + ".p");
  bp.q = as_extended_real(require(v, "q", path), path + ".q");
  bp.L = v.contains("L") ? as_real(v["L"], path + ".L") : 1.0;
  bp.dim = static_cast<int>(as_int(require(v, "dim", path), path + ".dim"));
  try {
    bp.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return bp;
}

bbl::WaveletKind parse_wavelet(const json& v, const std::string& path) {
  try {
    return bbl::wavelet_kind_from_string(as_string(v, path));
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

bbl::NoiseModel parse_noise(const json& v, const std::string& path) {
  const std::string kind = as_string(require(v, "kind", path), path + ".kind");
  if (kind == "none") return bbl::NoiseModel::none();
  if (kind == "gaussian")
    return bbl::NoiseModel::gaussian(as_real(require(v, "eta", path), path + ".eta"));
  fail(path + ".kind", "expected \"none\" or \"gaussian\"");
}

// Instance config with the two per-episode randomization hooks the sweeps
// use: level matched to the horizon, and a per-rep random apex.
struct InstanceConfig {
  bbl::InstanceSpec spec;
  bool match_horizon = false;
  bool random_apex = false;
};

InstanceConfig parse_instance(const json& v, const std::string& path) {
  InstanceConfig cfg;
  cfg.spec.kind = as_string(require(v, "kind", path), path + ".kind");
  if (v.contains("noise")) cfg.spec.noise = parse_noise(v["noise"], path + ".noise");

  if (cfg.spec.kind == "theta-member" || cfg.spec.kind == "random-besov") {
    cfg.spec.bp = parse_besov(require(v, "bp", path), path + ".bp");
    if (v.contains("wavelet")) cfg.spec.wavelet = parse_wavelet(v["wavelet"], path + ".wavelet");
  }
  if (cfg.spec.kind == "theta-member") {
    const json& level = require(v, "level", path);
    if (level.is_string() && level.get<std::string>() == "match-horizon") {
      cfg.match_horizon = true;
    } else {
      cfg.spec.level = static_cast<int>(as_int(level, path + ".level"));
    }
    cfg.spec.lambda.clear();
    if (v.contains("lambda")) {
      if (!v["lambda"].is_array()) fail(path + ".lambda", "expected an array");
      for (const auto& li : v["lambda"])
        cfg.spec.lambda.push_back(as_int(li, path + ".lambda[]"));
    } else {
      cfg.spec.lambda.assign(cfg.spec.bp.dim, 1);
    }
  } else if (cfg.spec.kind == "random-besov") {
    if (v.contains("max_level"))
      cfg.spec.max_level = static_cast<int>(as_int(v["max_level"], path + ".max_level"));
    if (v.contains("fill")) cfg.spec.fill = as_real(v["fill"], path + ".fill");
  } else if (cfg.spec.kind == "tent-peak") {
    cfg.spec.dim = v.contains("dim")
                       ? static_cast<int>(as_int(v["dim"], path + ".dim"))
                       : 1;
    if (v.contains("s")) cfg.spec.tent_s = as_real(v["s"], path + ".s");
    if (v.contains("L")) cfg.spec.tent_L = as_real(v["L"], path + ".L");
    if (v.contains("height")) cfg.spec.height = as_real(v["height"], path + ".height");
    if (v.contains("apex")) {
      const json& apex = v["apex"];
      if (apex.is_string() && apex.get<std::string>() == "random") {
        cfg.random_apex = true;
      } else if (apex.is_array()) {
        for (const auto& a : apex) cfg.spec.apex.push_back(as_real(a, path + ".apex[]"));
      } else {
        fail(path + ".apex", "expected an array of coordinates or \"random\"");
      }
    }
  } else {
    fail(path + ".kind", "unknown instance kind \"" + cfg.spec.kind + "\"");
  }
  return cfg;
}

int instance_dim(const InstanceConfig& cfg) {
  return cfg.spec.kind == "tent-peak" ? cfg.spec.dim : cfg.spec.bp.dim;
}

// Builds the per-episode instance. Episode randomness not owned by the
// strategy or the noise comes from substream 3 of the episode seed.
bbl::InstanceFactory make_instance_factory(const InstanceConfig& cfg,
                                           std::uint64_t base_seed) {
  return [cfg, base_seed](std::int64_t T, int rep) {
    bbl::InstanceSpec spec = cfg.spec;
    const std::uint64_t episode_seed =
        bbl::mix_seed(base_seed, static_cast<std::uint64_t>(T),
                      static_cast<std::uint64_t>(rep));
    bbl::RngStream instance_rng = bbl::RngStream(episode_seed).substream(3);
    if (cfg.match_horizon)
      spec.level = bbl::choose_j_noiseless(T, spec.bp.dim);
    if (cfg.random_apex) {
      spec.apex.clear();
      for (int i = 0; i < spec.dim; ++i)
        spec.apex.push_back(0.15 + 0.7 * instance_rng.next_uniform());
    }
    return bbl::make_instance(spec, instance_rng.next_u64());
  };
}

struct StrategyConfig {
  std::string name;
  double s = 1.0;
  double L = 1.0;
  double eta = 0.1;
  std::int64_t arms = 0;
  std::optional<bool> noisy;
  std::shared_ptr<StrategyConfig> base;  // simple-from-cumulative
};

StrategyConfig parse_strategy(const json& v, const std::string& path) {
  StrategyConfig cfg;
  cfg.name = as_string(require(v, "name", path), path + ".name");
  if (v.contains("s")) cfg.s = as_real(v["s"], path + ".s");
  if (v.contains("L")) cfg.L = as_real(v["L"], path + ".L");
  if (v.contains("eta")) cfg.eta = as_real(v["eta"], path + ".eta");
  if (v.contains("arms")) cfg.arms = as_int(v["arms"], path + ".arms");
  if (v.contains("noisy")) {
    if (!v["noisy"].is_boolean()) fail(path + ".noisy", "expected a boolean");
    cfg.noisy = v["noisy"].get<bool>();
  }
  if (cfg.name == "simple-from-cumulative")
    cfg.base = std::make_shared<StrategyConfig>(
        parse_strategy(require(v, "base", path), path + ".base"));
  return cfg;
}

std::unique_ptr<bbl::Strategy> build_strategy(const StrategyConfig& cfg, int dim,
                                              bool instance_noisy, std::int64_t T) {
  if (cfg.name == "random-search") return bbl::make_random_search(dim);
  if (cfg.name == "grid-explore-commit")
    return bbl::make_grid_explore_commit(dim, T, cfg.noisy.value_or(instance_noisy));
  if (cfg.name == "doo") return bbl::make_doo(dim, cfg.s, cfg.L);
  if (cfg.name == "ucb")
    return bbl::make_ucb_discretization(dim, cfg.s, cfg.eta, T, cfg.arms);
  if (cfg.name == "simple-from-cumulative")
    return bbl::make_simple_from_cumulative(
        build_strategy(*cfg.base, dim, instance_noisy, T), T);
  throw CliError("strategy.name: unknown strategy \"" + cfg.name +
                 "\" (expected random-search, grid-explore-commit, doo, ucb or "
                 "simple-from-cumulative)");
}

json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open config file: " + path.string());
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError("config parse error in " + path.string() + ": " + e.what());
  }
  if (!cfg.is_object()) throw CliError("config root must be a JSON object");
  return cfg;
}

std::uint64_t config_seed(const json& cfg, const Options& opt) {
  if (opt.seed_override) return *opt.seed_override;
  if (cfg.contains("seed")) return as_seed(cfg["seed"], "seed");
  return 0;
}

std::vector<std::int64_t> parse_horizons(const json& cfg) {
  const json& v = require(cfg, "horizons", "config");
  if (!v.is_array() || v.empty()) fail("horizons", "expected a non-empty array");
  std::vector<std::int64_t> out;
  for (const auto& h : v) out.push_back(as_int(h, "horizons[]"));
  return out;
}

std::vector<double> parse_grid(const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& g : v) out.push_back(as_real(g, path + "[]"));
    if (out.empty()) fail(path, "expected a non-empty grid");
    return out;
  }
  if (v.is_object()) {
    const double lo = as_real(require(v, "min", path), path + ".min");
    const double hi = as_real(require(v, "max", path), path + ".max");
    const double step = as_real(require(v, "step", path), path + ".step");
    if (!(step > 0.0)) fail(path + ".step", "step must be > 0");
    // Half-step slack so the endpoint survives rounding.
    for (double g = lo; g <= hi + step / 2; g += step) out.push_back(g);
    return out;
  }
  fail(path, "expected an array or {min, max, step}");
}

// ---- output helpers -------------------------------------------------------

// All writes go through this sink: contents are fully assembled before the
// first byte hits disk, so a failing command never leaves partial files.
struct OutputSet {
  std::vector<std::pair<fs::path, std::string>> files;
  void add(const fs::path& p, std::string contents) {
    files.emplace_back(p, std::move(contents));
  }
  void commit(const fs::path& dir) const {
    fs::create_directories(dir);
    for (const auto& [name, contents] : files) {
      const fs::path full = dir / name;
      std::ofstream out(full, std::ios::binary);
      if (!out) throw CliError("cannot open for writing: " + full.string());
      out << contents;
      if (!out) throw CliError("write failed: " + full.string());
    }
  }
};

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

// meta block is the only place a timestamp may appear; everything else in
// the outputs is a pure function of config + seed.
std::string meta_json(const std::string& command, std::uint64_t seed) {
  std::ostringstream out;
  out << "{\"command\": \"" << command << "\", \"seed\": " << seed
      << ", \"timestamp\": \"" << timestamp_utc() << "\"}";
  return out.str();
}

// ---- subcommands ----------------------------------------------------------

int cmd_synth(const json& cfg, const Options& opt) {
  const std::uint64_t seed = config_seed(cfg, opt);
  InstanceConfig icfg = parse_instance(cfg, "config");
  if (icfg.spec.kind != "theta-member" && icfg.spec.kind != "random-besov")
    fail("config.kind", "synth supports theta-member and random-besov");
  if (!icfg.spec.bp.supercritical())
    fail("config.bp", "sigma <= dim/p: the ball contains unbounded functions; nothing to synthesize");
  const int dim = icfg.spec.bp.dim;
  if (dim > 2) fail("config.bp.dim", "synth writes 2^(10 dim) sample rows; dim must be <= 2");

  bbl::CoefficientFunction f = [&] {
    if (icfg.spec.kind == "theta-member") {
      bbl::ThetaFamily family(icfg.spec.level, icfg.spec.bp,
                              bbl::FatherWavelet::make(icfg.spec.wavelet));
      bbl::DyadicIndex idx;
      idx.level = icfg.spec.level;
      idx.lambda = icfg.spec.lambda;
      if (!idx.valid() || idx.dim() != dim)
        fail("config.lambda", "invalid member index for level/dim");
      return family.member_coefficients(bbl::flatten_lambda(idx));
    }
    return bbl::sample_besov_ball(icfg.spec.bp, icfg.spec.max_level, icfg.spec.fill,
                                  seed, icfg.spec.wavelet);
  }();

  std::ostringstream csv;
  const std::int64_t n = 1 << 10;
  if (dim == 1) {
    csv << "x,f\n";
    std::vector<double> x(1);
    for (std::int64_t i = 0; i < n; ++i) {
      x[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      csv << bbl::format_double(x[0]) << "," << bbl::format_double(f.eval(x)) << "\n";
    }
  } else {
    csv << "x1,x2,f\n";
    std::vector<double> x(2);
    for (std::int64_t i = 0; i < n; ++i) {
      x[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      for (std::int64_t k = 0; k < n; ++k) {
        x[1] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
        csv << bbl::format_double(x[0]) << "," << bbl::format_double(x[1]) << ","
            << bbl::format_double(f.eval(x)) << "\n";
      }
    }
  }

  OutputSet out;
  out.add("function.json", bbl::to_json(f));
  out.add("samples.csv", csv.str());
  out.commit(opt.out_dir);
  if (!opt.quiet)
    std::cout << "synth: wrote function.json (" << f.size() << " coefficients) and samples.csv\n";
  return 0;
}

int cmd_norm(const json& cfg, const Options& opt) {
  const std::uint64_t seed = config_seed(cfg, opt);
  const fs::path fn_path = as_string(require(cfg, "function", "config"), "config.function");
  const bbl::BesovParams bp = parse_besov(require(cfg, "bp", "config"), "config.bp");
  const std::int64_t n_pairs =
      cfg.contains("n_pairs") ? as_int(cfg["n_pairs"], "config.n_pairs") : 20000;

  const bbl::CoefficientFunction f = bbl::load_coefficient_function(fn_path);
  const double norm = bbl::besov_norm(f, bp);
  const double s = bp.embedding_smoothness();
  if (!(s > 0.0) || !(s <= 1.0))
    fail("config.bp", "sigma - dim/p must lie in (0, 1] for the seminorm estimate");
  const double seminorm =
      bbl::holder_seminorm_estimate(f, bbl::HolderParams{s, bp.L, bp.dim}, n_pairs, seed);

  std::ostringstream out;
  out << "{\"besov_norm\": " << bbl::format_double(norm)
      << ", \"holder_s\": " << bbl::format_double(s)
      << ", \"holder_seminorm\": " << bbl::format_double(seminorm) << ", \"ratio\": ";
  if (norm > 0.0)
    out << bbl::format_double(seminorm / norm);
  else
    out << "null";
  out << "}\n";
  std::cout << out.str();
  return 0;
}

std::string trace_csv(const bbl::Trace& trace, int dim) {
  std::ostringstream out;
  out << "t";
  for (int i = 0; i < dim; ++i) out << ",x" << i;
  out << ",y\n";
  for (const bbl::TraceEntry& e : trace.entries) {
    out << e.t;
    for (double xi : e.x) out << "," << bbl::format_double(xi);
    out << "," << bbl::format_double(e.y) << "\n";
  }
  return out.str();
}

int cmd_run(const json& cfg, const Options& opt) {
  const std::uint64_t seed = config_seed(cfg, opt);
  const std::string experiment =
      cfg.contains("experiment") ? as_string(cfg["experiment"], "experiment") : "run";
  const std::int64_t T = as_int(require(cfg, "T", "config"), "config.T");
  const InstanceConfig icfg = parse_instance(require(cfg, "instance", "config"), "instance");
  const StrategyConfig scfg = parse_strategy(require(cfg, "strategy", "config"), "strategy");

  const bbl::InstanceFactory instances = make_instance_factory(icfg, seed);
  const bbl::ObjectiveInstance instance = instances(T, 0);
  std::unique_ptr<bbl::Strategy> strategy =
      build_strategy(scfg, instance.dim, instance.noise.noisy(), T);
  const std::uint64_t episode_seed = bbl::mix_seed(seed, static_cast<std::uint64_t>(T), 0);
  const bbl::EpisodeResult episode = bbl::run_episode(*strategy, instance, T, episode_seed);

  bbl::EpisodeRow row{experiment,
                      strategy->name(),
                      instance.description,
                      T,
                      0,
                      episode_seed,
                      episode.report.simple_regret,
                      episode.report.cumulative_regret};

  std::ostringstream report;
  report << "{\n  \"simple_regret\": " << bbl::format_double(episode.report.simple_regret)
         << ",\n  \"cumulative_regret\": "
         << bbl::format_double(episode.report.cumulative_regret)
         << ",\n  \"clamped_rounds\": " << episode.report.clamped_rounds
         << ",\n  \"strategy\": \"" << episode.report.strategy_description
         << "\",\n  \"instance\": \"" << episode.report.instance_description
         << "\",\n  \"episode_seed\": " << episode_seed
         << ",\n  \"meta\": " << meta_json("run", seed) << "\n}\n";

  OutputSet out;
  out.add("results.csv", bbl::episodes_csv({&row, 1}));
  out.add("trace.csv", trace_csv(episode.trace, instance.dim));
  out.add("report.json", report.str());
  out.commit(opt.out_dir);
  if (!opt.quiet)
    std::cout << "run: simple_regret=" << bbl::format_double(episode.report.simple_regret)
              << " cumulative_regret="
              << bbl::format_double(episode.report.cumulative_regret) << "\n";
  return 0;
}

int cmd_sweep(const json& cfg, const Options& opt) {
  const std::uint64_t seed = config_seed(cfg, opt);
  bbl::SweepOptions sweep;
  sweep.experiment =
      cfg.contains("experiment") ? as_string(cfg["experiment"], "experiment") : "sweep";
  sweep.horizons = parse_horizons(cfg);
  sweep.reps = cfg.contains("reps") ? static_cast<int>(as_int(cfg["reps"], "reps")) : 1;
  sweep.base_seed = seed;
  sweep.threads = opt.threads;
  if (cfg.contains("regret")) {
    const std::string kind = as_string(cfg["regret"], "regret");
    if (kind == "simple")
      sweep.regret = bbl::RegretKind::Simple;
    else if (kind == "cumulative")
      sweep.regret = bbl::RegretKind::Cumulative;
    else
      fail("regret", "expected \"simple\" or \"cumulative\"");
  }
  sweep.target_exponent =
      as_real(require(cfg, "target_exponent", "config"), "config.target_exponent");
  sweep.tolerance =
      cfg.contains("tolerance") ? as_real(cfg["tolerance"], "tolerance") : 0.1;

  const InstanceConfig icfg = parse_instance(require(cfg, "instance", "config"), "instance");
  const StrategyConfig scfg = parse_strategy(require(cfg, "strategy", "config"), "strategy");
  const int dim = instance_dim(icfg);
  const bool noisy = icfg.spec.noise.noisy();

  const bbl::SweepResult result = bbl::sweep_rates(
      [&](std::int64_t T) { return build_strategy(scfg, dim, noisy, T); },
      make_instance_factory(icfg, seed), sweep);

  std::string fit_json = bbl::rate_fit_json(result.fit);
  // Splice the extra fields in before the RateFit object's closing brace.
  fit_json.erase(fit_json.find_last_not_of("\n} ") + 1);
  std::ostringstream summary;
  summary << fit_json << ",\n  \"clamped_rounds\": " << result.clamped_rounds
          << ",\n  \"meta\": " << meta_json("sweep", seed) << "\n}\n";

  OutputSet out;
  out.add("results.csv", bbl::episodes_csv(result.rows));
  out.add("ratefit.json", summary.str());
  out.commit(opt.out_dir);
  if (!opt.quiet)
    std::cout << "sweep: slope=" << bbl::format_double(result.fit.slope) << " target="
              << bbl::format_double(result.fit.target_exponent) << " r2="
              << bbl::format_double(result.fit.r_squared)
              << (result.fit.within_tolerance ? " (within tolerance)\n"
                                              : " (OUTSIDE tolerance)\n");
  return result.fit.within_tolerance ? 0 : 1;
}

int cmd_lowerbound(const json& cfg, const Options& opt) {
  const std::uint64_t seed = config_seed(cfg, opt);
  const std::string experiment =
      cfg.contains("experiment") ? as_string(cfg["experiment"], "experiment") : "lowerbound";
  const bbl::BesovParams bp = parse_besov(require(cfg, "bp", "config"), "config.bp");
  if (!bp.supercritical()) fail("config.bp", "sigma <= dim/p: minimax regret is unbounded");
  const bbl::FatherWavelet wavelet = bbl::FatherWavelet::make(
      cfg.contains("wavelet") ? parse_wavelet(cfg["wavelet"], "wavelet")
                              : bbl::WaveletKind::Haar);
  const std::vector<std::int64_t> horizons = parse_horizons(cfg);
  const int reps = cfg.contains("reps") ? static_cast<int>(as_int(cfg["reps"], "reps")) : 1;
  const json& strategies = require(cfg, "strategies", "config");
  if (!strategies.is_array() || strategies.empty())
    fail("strategies", "expected a non-empty array");

  std::ostringstream csv;
  csv << "experiment,strategy,T,level,observed_regret,theoretical_floor,ratio,min_untouched\n";
  bool all_ok = true;
  for (std::size_t si = 0; si < strategies.size(); ++si) {
    const StrategyConfig scfg =
        parse_strategy(strategies[si], "strategies[" + std::to_string(si) + "]");
    for (std::int64_t T : horizons) {
      const bbl::LowerBoundOutcome outcome = bbl::lower_bound_game(
          [&](std::int64_t horizon) { return build_strategy(scfg, bp.dim, false, horizon); },
          T, bp, wavelet, reps, seed);
      all_ok = all_ok && outcome.ratio >= 1.0;
      csv << experiment << "," << scfg.name << "," << T << "," << outcome.level << ","
          << bbl::format_double(outcome.observed_regret) << ","
          << bbl::format_double(outcome.theoretical_floor) << ","
          << bbl::format_double(outcome.ratio) << "," << outcome.min_untouched << "\n";
    }
  }

  std::ostringstream summary;
  summary << "{\n  \"all_ratios_at_least_one\": " << (all_ok ? "true" : "false")
          << ",\n  \"meta\": " << meta_json("lowerbound", seed) << "\n}\n";

  OutputSet out;
  out.add("lowerbound.csv", csv.str());
  out.add("summary.json", summary.str());
  out.commit(opt.out_dir);
  if (!opt.quiet)
    std::cout << "lowerbound: all ratios >= 1: " << (all_ok ? "yes" : "NO") << "\n";
  return all_ok ? 0 : 1;
}

int cmd_phase_diagram(const json& cfg, const Options& opt) {
  const int dim = cfg.contains("dim") ? static_cast<int>(as_int(cfg["dim"], "dim")) : 1;
  const std::vector<double> sigmas = parse_grid(require(cfg, "sigmas", "config"), "sigmas");
  const std::vector<double> inv_ps = parse_grid(require(cfg, "inv_ps", "config"), "inv_ps");
  const std::vector<bbl::PhaseDiagramRow> rows = bbl::phase_diagram(dim, sigmas, inv_ps);

  OutputSet out;
  out.add("phase.csv", bbl::phase_diagram_csv(rows));
  out.commit(opt.out_dir);
  if (!opt.quiet) std::cout << "phase-diagram: " << rows.size() << " rows\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuum-armed bandit laboratory"};
  app.require_subcommand(1);

  Options opt;
  if (const char* env = std::getenv("BBL_THREADS")) opt.threads = std::atoi(env);
  if (opt.threads < 1) opt.threads = 1;

  std::string subcommand;
  const std::pair<const char*, const char*> subs[] = {
      {"synth", "generate a function and dense samples for plotting"},
      {"norm", "report smoothness norms of a stored function"},
      {"run", "play one episode and dump the trace"},
      {"sweep", "fit a regret-vs-horizon exponent over a horizon grid"},
      {"lowerbound", "run strategies against the needle adversary"},
      {"phase-diagram", "tabulate minimax exponents over (sigma, 1/p)"}};
  for (const auto& [name, blurb] : subs) {
    CLI::App* sub = app.add_subcommand(name, blurb);
    sub->add_option("--config", opt.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed_override, "override the config seed");
    sub->add_option("--threads", opt.threads, "worker threads for sweeps");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
    sub->callback([&subcommand, name] { subcommand = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const json cfg = load_config(opt.config_path);
    if (subcommand == "synth") return cmd_synth(cfg, opt);
    if (subcommand == "norm") return cmd_norm(cfg, opt);
    if (subcommand == "run") return cmd_run(cfg, opt);
    if (subcommand == "sweep") return cmd_sweep(cfg, opt);
    if (subcommand == "lowerbound") return cmd_lowerbound(cfg, opt);
    if (subcommand == "phase-diagram") return cmd_phase_diagram(cfg, opt);
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
