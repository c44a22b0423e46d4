#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "fpv/combinatorics.hpp"
#include "fpv/exponent.hpp"
#include "fpv/kernel.hpp"
#include "fpv/parallel.hpp"
#include "fpv/random.hpp"
#include "fpv/stats.hpp"
#include "fpv/variation.hpp"
#include "fpv/wick.hpp"

#ifndef FPV_VERSION
#define FPV_VERSION "0.0.0"
#endif

namespace fpv::cli {

namespace {

using json = nlohmann::ordered_json;

// Input problems (bad files, mismatched metadata) map to the usage exit code.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(const KeyValues& kv, const std::string& key, T fallback) {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  const std::string& s = it->second;
  try {
    std::size_t used = 0;
    T v;
    if constexpr (std::is_floating_point_v<T>) {
      v = static_cast<T>(std::stod(s, &used));
    } else if constexpr (std::is_signed_v<T>) {
      v = static_cast<T>(std::stoll(s, &used));
    } else {
      if (!s.empty() && s[0] == '-') throw std::invalid_argument("");
      v = static_cast<T>(std::stoull(s, &used));
    }
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("invalid value '" + s + "' for " + key);
  }
}

std::vector<std::size_t> parse_grid(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    KeyValues tmp{{"n-grid", trim(item)}};
    out.push_back(parse_number<std::size_t>(tmp, "n-grid", 0));
  }
  return out;
}

void write_provenance(std::ostream& os, const std::string& command, const KeyValues& echo) {
  os << "# fpv " << version() << "\n# command=" << command << "\n";
  for (const auto& [k, v] : echo) os << "# " << k << "=" << v << "\n";
}

struct TableFile {
  KeyValues meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// '#' lines carry key=value metadata; the first other line is the header.
TableFile read_table(const std::string& path, char header_sep) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  TableFile t;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto body = trim(line.substr(1));
      auto eq = body.find('=');
      if (eq != std::string::npos) t.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    if (!have_header) {
      std::stringstream ss(line);
      std::string item;
      while (std::getline(ss, item, header_sep)) {
        item = trim(item);
        auto eq = item.find('=');
        if (eq != std::string::npos)
          t.meta[item.substr(0, eq)] = item.substr(eq + 1);
        else
          t.columns.push_back(item);
      }
      have_header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        row.push_back(std::stod(item));
      } catch (...) {
        throw InputError(path + ":" + std::to_string(lineno) + ": not a number: '" + item + "'");
      }
    }
    if (row.size() != t.columns.size())
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) + " fields");
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw InputError("'" + path + "' has no header line");
  return t;
}

std::ostream& open_output(const std::string& path, std::unique_ptr<std::ofstream>& holder, std::ostream& fallback) {
  if (path.empty() || path == "-") return fallback;
  holder = std::make_unique<std::ofstream>(path);
  if (!*holder) throw InputError("cannot write '" + path + "'");
  return *holder;
}

// Options shared by the experiment subcommands; only flags actually given are
// recorded so that they override the config file.
struct FlagSink {
  KeyValues values;
  std::vector<std::string> params;
  std::string config_path;
  std::string out_path;
};

void add_keys(CLI::App* sub, FlagSink& sink, std::initializer_list<std::pair<const char*, const char*>> keys) {
  for (const auto& [key, help] : keys) {
    std::string k = key;
    sub->add_option_function<std::string>("--" + k, [&sink, k](const std::string& v) { sink.values[k] = v; }, help);
  }
}

void add_experiment_options(CLI::App* sub, FlagSink& sink) {
  sub->add_option("--config", sink.config_path, "key=value configuration file (flags override it)");
  sub->add_option("--param", sink.params, "model parameter name=value (repeatable)");
  add_keys(sub, sink,
           {{"model", "model name from the registry"},
            {"k", "power index k >= 1"},
            {"H", "Hurst parameter in (0.5, 1)"},
            {"n", "coarse grid size"},
            {"kappa", "fine steps per coarse step"},
            {"paths", "Monte Carlo paths"},
            {"seed", "base seed"},
            {"x0", "initial value"},
            {"method", "fGn sampler: circulant or cholesky"},
            {"tol", "tail tolerance for the limit constants"},
            {"threads", "worker threads (0: FPV_THREADS or hardware)"}});
}

KeyValues merged(const FlagSink& sink) {
  KeyValues kv;
  if (!sink.config_path.empty()) kv = read_config_file(sink.config_path);
  for (const auto& [k, v] : sink.values) kv[k] = v;
  for (const auto& p : sink.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--param expects name=value, got '" + p + "'");
    kv["param." + trim(p.substr(0, eq))] = trim(p.substr(eq + 1));
  }
  return kv;
}

std::shared_ptr<const SdeModel> make_model(const ExperimentConfig& cfg) {
  auto m = model_registry().make(cfg.model, cfg.params);
  if (!m->bounded) std::cerr << "warning: model '" << cfg.model << "' is flagged unbounded\n";
  return m;
}

ExpansionEnsemble make_ensemble(const ExperimentConfig& cfg) {
  return build_expansion_ensemble(make_model(cfg), cfg.k, HurstParam(cfg.hurst), cfg.n, cfg.kappa, cfg.ensemble_paths,
                                  cfg.ensemble_seed, cfg.x0, cfg.threads, cfg.tol);
}

std::vector<DensityRow> density_rows(const ExperimentConfig& cfg, const ExpansionEnsemble& e) {
  return evaluate_density_grid(e, cfg.n, z_grid(e, cfg.half_width, cfg.points), cfg.threads);
}

// ---- subcommands ---------------------------------------------------------

int cmd_constants(const ExperimentConfig& cfg, std::ostream& out) {
  HurstParam h(cfg.hurst);
  json j;
  j["version"] = version();
  j["H"] = cfg.hurst;
  j["k"] = cfg.k;
  j["c0"] = c0(h);
  json mu_table = json::array();
  for (int l = 0; l <= cfg.k; ++l) {
    auto p = mu_parts(cfg.k, l);
    mu_table.push_back({{"l", l}, {"integer", p.integer}, {"c0_power", p.c0_power}, {"value", p.value(h)}});
  }
  j["mu_table"] = mu_table;
  auto cg = c_g_infinity(cfg.k, h, cfg.tol);
  auto ct = c_tau(cfg.k, h, std::max(cfg.tol, 1e-6));
  json sums = json::array(), tails = json::array();
  for (const auto* lc : {&cg, &ct})
    for (const auto& s : lc->sums) {
      sums.push_back({{"label", s.label}, {"value", s.value}});
      tails.push_back({{"label", s.label}, {"tail_bound", s.tail_bound}, {"radius", s.radius}});
    }
  j["rho_sums"] = sums;
  j["C_G_infinity"] = cg.value;
  j["C_tau"] = ct.value;
  j["tail_certificates"] = {{"C_G_infinity", cg.tail_bound}, {"C_tau", ct.tail_bound}, {"sums", tails}};
  out << j.dump(2) << "\n";
  return kExitPass;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
  auto z = simulate_z(cfg);
  write_provenance(out, "simulate", cfg.echo());
  out << "z_n;model=" << cfg.model << ";n=" << cfg.n << ";k=" << cfg.k << ";H=" << num(cfg.hurst)
      << ";seed=" << cfg.seed << "\n";
  for (double v : z) out << num(v) << "\n";
  return kExitPass;
}

int cmd_expand(const ExperimentConfig& cfg, std::ostream& out) {
  auto e = make_ensemble(cfg);
  auto rows = density_rows(cfg, e);
  auto echo = cfg.echo();
  echo["C_G_infinity"] = num(e.constants.c_g_infinity);
  echo["C_tau"] = num(e.constants.c_tau);
  echo["effective_std"] = num(e.effective_std());
  echo["decreasing_cdf_steps"] = std::to_string(count_decreasing_steps(rows));
  write_provenance(out, "expand", echo);
  out << "z,p_baseline,p_corrected,F_baseline,F_corrected\n";
  for (const auto& r : rows)
    out << num(r.z) << "," << num(r.p_baseline) << "," << num(r.p_corrected) << "," << num(r.f_baseline) << ","
        << num(r.f_corrected) << "\n";
  return kExitPass;
}

void check_same(const std::string& what, const KeyValues& a, const KeyValues& b, const std::string& key) {
  auto ia = a.find(key), ib = b.find(key);
  if (ia == a.end() || ib == b.end()) return;
  bool same = ia->second == ib->second;
  if (!same && (key == "H" || key == "n" || key == "k")) {
    try {
      same = std::stod(ia->second) == std::stod(ib->second);
    } catch (...) {
      same = false;
    }
  }
  if (!same) throw InputError("metadata mismatch for " + key + " (" + what + "): '" + ia->second + "' vs '" + ib->second + "'");
}

int cmd_compare(const KeyValues& given, const std::string& samples_path, const std::string& density_path,
                std::ostream& out) {
  auto samples = read_table(samples_path, ';');
  if (samples.columns.size() != 1 || samples.columns[0] != "z_n")
    throw InputError("'" + samples_path + "' is not a z_n sample file");
  std::vector<double> z;
  for (const auto& r : samples.rows) z.push_back(r[0]);
  if (z.size() < 1000) throw InputError("compare needs at least 1000 samples, got " + std::to_string(z.size()));

  const char* keys[] = {"model", "n", "k", "H"};
  for (const char* k : keys) check_same("config vs samples", given, samples.meta, k);
  KeyValues cfg_values;  // adopt the experiment of the samples
  for (const auto& [k, v] : samples.meta) {
    const bool adopt = k.rfind("param.", 0) == 0 || k == "model" || k == "k" || k == "H" || k == "n" ||
                       k == "kappa" || k == "x0" || k == "method" || k == "tol";
    if (adopt) cfg_values[k] = v;
  }
  for (const auto& [k, v] : given) cfg_values[k] = v;
  auto cfg = ExperimentConfig::from(cfg_values);
  cfg.validate();
  if (cfg.bootstrap < 500) throw std::invalid_argument("bootstrap needs at least 500 resamples");

  std::vector<DensityRow> rows;
  std::string source;
  if (!density_path.empty()) {
    auto d = read_table(density_path, ',');
    for (const char* k : keys) check_same("samples vs density", samples.meta, d.meta, k);
    const std::vector<std::string> want{"z", "p_baseline", "p_corrected", "F_baseline", "F_corrected"};
    if (d.columns != want) throw InputError("'" + density_path + "' does not have the expand columns");
    for (const auto& r : d.rows) rows.push_back({r[0], r[1], r[2], r[3], r[4]});
    source = density_path;
  } else {
    rows = density_rows(cfg, make_ensemble(cfg));
    source = "regenerated ensemble (" + std::to_string(cfg.ensemble_paths) + " paths, seed " +
             std::to_string(cfg.ensemble_seed) + ")";
  }
  auto rep = compare_samples(std::move(z), rows, cfg.bootstrap, substream_seed(cfg.seed, 0, StreamTag::bootstrap));
  json j;
  j["version"] = version();
  j["model"] = cfg.model;
  j["n"] = cfg.n;
  j["k"] = cfg.k;
  j["H"] = cfg.hurst;
  j["samples"] = rep.samples;
  j["density"] = source;
  j["ks_baseline"] = rep.ks_baseline;
  j["ks_corrected"] = rep.ks_corrected;
  j["difference"] = rep.difference;
  j["ci"] = {rep.ci_lo, rep.ci_hi};
  j["resamples"] = rep.resamples;
  j["verdicts"] = {{"ks_in_unit_interval", rep.ks_baseline >= 0 && rep.ks_baseline <= 1 && rep.ks_corrected >= 0 &&
                                               rep.ks_corrected <= 1},
                   {"corrected_better", rep.corrected_better}};
  out << j.dump(2) << "\n";
  return rep.corrected_better ? kExitPass : kExitFailure;
}

int cmd_verify_order(const ExperimentConfig& cfg, std::vector<std::string> ids, const std::string& grid,
                     std::size_t bootstrap, std::ostream& out) {
  if (ids.empty()) ids = default_catalog();
  auto n_grid = parse_grid(grid);
  auto reps = verify_orders(ids, HurstParam(cfg.hurst), n_grid, cfg.paths, cfg.seed, cfg.threads, bootstrap);
  json arr = json::array();
  bool all = true;
  for (const auto& r : reps) {
    arr.push_back({{"functional", r.functional},
                   {"H", r.hurst},
                   {"n_grid", r.n_grid},
                   {"norms", r.norms},
                   {"slope", r.slope},
                   {"ci", {r.ci_lo, r.ci_hi}},
                   {"predicted", r.predicted},
                   {"tolerance", kOrderTolerance},
                   {"pass", r.pass},
                   {"paths", r.paths},
                   {"seed", r.seed}});
    all = all && r.pass;
  }
  json j;
  j["version"] = version();
  j["reports"] = arr;
  j["pass"] = all;
  out << j.dump(2) << "\n";
  return all ? kExitPass : kExitFailure;
}

int cmd_wick_check(const WickCheckOptions& opt, std::ostream& out) {
  auto rep = run_wick_suite(opt);
  json items = json::array();
  for (const auto& i : rep.items) items.push_back({{"name", i.name}, {"pass", i.pass}, {"detail", i.detail}});
  json j;
  j["version"] = version();
  j["seed"] = opt.seed;
  j["perturbation"] = opt.perturbation;
  j["checks"] = rep.items.size();
  j["failed"] = std::count_if(rep.items.begin(), rep.items.end(), [](const auto& i) { return !i.pass; });
  j["pass"] = rep.pass();
  j["items"] = items;
  out << j.dump(2) << "\n";
  return rep.pass() ? kExitPass : kExitFailure;
}

}  // namespace

const char* version() { return FPV_VERSION; }

KeyValues parse_config(std::istream& in, const std::string& origin) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

ExperimentConfig ExperimentConfig::from(const KeyValues& kv) {
  static const char* known[] = {"model", "k",      "H",     "n",     "kappa",      "paths",          "seed",
                                "x0",    "method", "tol",   "threads", "half-width", "points",       "ensemble-paths",
                                "ensemble-seed", "bootstrap"};
  for (const auto& [k, v] : kv) {
    if (k.rfind("param.", 0) == 0) continue;
    if (std::find(std::begin(known), std::end(known), k) == std::end(known))
      throw std::invalid_argument("unknown configuration key '" + k + "'");
  }
  ExperimentConfig c;
  if (auto it = kv.find("model"); it != kv.end()) c.model = it->second;
  c.k = parse_number<int>(kv, "k", c.k);
  c.hurst = parse_number<double>(kv, "H", c.hurst);
  c.n = parse_number<std::size_t>(kv, "n", c.n);
  c.kappa = parse_number<std::size_t>(kv, "kappa", c.kappa);
  c.paths = parse_number<std::size_t>(kv, "paths", c.paths);
  c.seed = parse_number<std::uint64_t>(kv, "seed", c.seed);
  c.x0 = parse_number<double>(kv, "x0", c.x0);
  if (auto it = kv.find("method"); it != kv.end()) c.method = parse_fgn_method(it->second);
  c.tol = parse_number<double>(kv, "tol", c.tol);
  c.threads = parse_number<std::size_t>(kv, "threads", c.threads);
  c.half_width = parse_number<double>(kv, "half-width", c.half_width);
  c.points = parse_number<std::size_t>(kv, "points", c.points);
  c.ensemble_paths = parse_number<std::size_t>(kv, "ensemble-paths", c.ensemble_paths);
  c.ensemble_seed = parse_number<std::uint64_t>(kv, "ensemble-seed", c.ensemble_seed);
  c.bootstrap = parse_number<std::size_t>(kv, "bootstrap", c.bootstrap);
  for (const auto& [k, v] : kv)
    if (k.rfind("param.", 0) == 0) c.params[k.substr(6)] = parse_number<double>(kv, k, 0.0);
  return c;
}

void ExperimentConfig::validate() const {
  if (!(hurst > 0.5 && hurst < 1.0)) throw std::invalid_argument("H must lie in (0.5, 1)");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n < 4) throw std::invalid_argument("n must be >= 4");
  if (paths < 1) throw std::invalid_argument("paths must be >= 1");
  if (kappa < 1) throw std::invalid_argument("kappa must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(half_width > 0.0)) throw std::invalid_argument("half-width must be positive");
  if (points < 2) throw std::invalid_argument("points must be >= 2");
  if (ensemble_paths < 1) throw std::invalid_argument("ensemble-paths must be >= 1");
  model_registry().make(model, params);  // unknown model or parameter
}

KeyValues ExperimentConfig::echo() const {
  KeyValues e{{"model", model},
              {"k", std::to_string(k)},
              {"H", num(hurst)},
              {"n", std::to_string(n)},
              {"kappa", std::to_string(kappa)},
              {"paths", std::to_string(paths)},
              {"seed", std::to_string(seed)},
              {"x0", num(x0)},
              {"method", to_string(method)},
              {"tol", num(tol)},
              {"half-width", num(half_width)},
              {"points", std::to_string(points)},
              {"ensemble-paths", std::to_string(ensemble_paths)},
              {"ensemble-seed", std::to_string(ensemble_seed)}};
  auto full = model_registry().defaults(model);
  for (const auto& [k, v] : params) full[k] = v;
  for (const auto& [k, v] : full) e["param." + k] = num(v);
  return e;
}

ComparisonReport compare_samples(std::vector<double> samples, const std::vector<DensityRow>& rows,
                                 std::size_t resamples, std::uint64_t seed) {
  if (rows.size() < 2) throw std::invalid_argument("density grid needs at least two rows");
  std::sort(samples.begin(), samples.end());
  std::vector<double> zs, fb, fc;
  for (const auto& r : rows) {
    zs.push_back(r.z);
    fb.push_back(r.f_baseline);
    fc.push_back(r.f_corrected);
  }
  PiecewiseLinear base(zs, fb), corr(zs, fc);
  std::vector<double> at_b(samples.size()), at_c(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    at_b[i] = base(samples[i]);
    at_c[i] = corr(samples[i]);
  }
  ComparisonReport r;
  r.samples = samples.size();
  r.resamples = resamples;
  r.ks_baseline = ks_statistic_sorted(samples, at_b);
  r.ks_corrected = ks_statistic_sorted(samples, at_c);
  auto ci = bootstrap_ks_difference(samples, at_c, at_b, resamples, seed);
  r.difference = r.ks_corrected - r.ks_baseline;
  r.ci_lo = ci.lo;
  r.ci_hi = ci.hi;
  r.corrected_better = r.difference < 0.0 && ci.hi < 0.0;
  return r;
}

std::vector<double> simulate_z(const ExperimentConfig& cfg) {
  auto model = make_model(cfg);
  HurstParam h(cfg.hurst);
  return parallel_map(
      cfg.paths,
      [&](std::size_t i) {
        auto p = simulate_path(model, cfg.n, cfg.kappa, cfg.hurst, substream_seed(cfg.seed, i, StreamTag::fgn), cfg.x0,
                               cfg.method);
        return evaluate_variation(p, cfg.k, h).z_n;
      },
      cfg.threads);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted power variations of fractional SDEs: constants, simulation and asymptotic expansion"};
  app.set_version_flag("--version", std::string("fpv ") + version());
  app.require_subcommand(1);

  FlagSink sink;
  auto* constants = app.add_subcommand("constants", "limit constants as JSON");
  add_experiment_options(constants, sink);

  auto* simulate = app.add_subcommand("simulate", "Z_n samples as CSV");
  add_experiment_options(simulate, sink);
  simulate->add_option("--out", sink.out_path, "output file (default stdout)");

  auto* expand = app.add_subcommand("expand", "baseline and corrected density/CDF on a z grid as CSV");
  add_experiment_options(expand, sink);
  add_keys(expand, sink,
           {{"half-width", "grid half width in effective std"},
            {"points", "grid points"},
            {"ensemble-paths", "paths in the expansion ensemble"},
            {"ensemble-seed", "seed of the expansion ensemble"}});
  expand->add_option("--out", sink.out_path, "output file (default stdout)");

  std::string samples_path, density_path;
  auto* compare = app.add_subcommand("compare", "KS comparison of Z_n samples against F_0 and F_n");
  add_experiment_options(compare, sink);
  add_keys(compare, sink,
           {{"half-width", "grid half width in effective std"},
            {"points", "grid points"},
            {"ensemble-paths", "paths in the regenerated ensemble"},
            {"ensemble-seed", "seed of the regenerated ensemble"},
            {"bootstrap", "bootstrap resamples (>= 500)"}});
  compare->add_option("--samples", samples_path, "CSV written by simulate")->required();
  compare->add_option("--density", density_path, "CSV written by expand (default: regenerate)");

  std::vector<std::string> functionals;
  std::string grid = "64,128,256,512,1024,2048,4096";
  std::size_t order_bootstrap = 200;
  auto* verify = app.add_subcommand("verify-order", "empirical order of catalog functionals as JSON");
  add_experiment_options(verify, sink);
  verify->add_option("--functional", functionals, "catalog id (repeatable; default: whole catalog)");
  verify->add_option("--n-grid", grid, "comma separated n values (at least 3)");
  verify->add_option("--bootstrap", order_bootstrap, "bootstrap resamples for the slope CI");

  WickCheckOptions wopt;
  auto* wick = app.add_subcommand("wick-check", "oracle validation of the combinatorial coefficients");
  wick->add_option("--seed", wopt.seed, "seed of the sampling oracle");
  wick->add_option("--max-product-order", wopt.max_product_order, "p, q range of the product formula check");
  wick->add_option("--max-mixed-total", wopt.max_mixed_total, "a1 + a2 + c range of the mixed check");
  wick->add_option("--perturb", wopt.perturbation, "add this to the (3,3,2) product coefficient (fault injection)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << "fpv " << version() << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (wick->parsed()) return cmd_wick_check(wopt, out);
    const KeyValues given = merged(sink);
    if (compare->parsed()) return cmd_compare(given, samples_path, density_path, out);
    auto cfg = ExperimentConfig::from(given);
    cfg.validate();
    std::unique_ptr<std::ofstream> file;
    std::ostream& dest = open_output(sink.out_path, file, out);
    if (constants->parsed()) return cmd_constants(cfg, dest);
    if (simulate->parsed()) return cmd_simulate(cfg, dest);
    if (expand->parsed()) return cmd_expand(cfg, dest);
    if (verify->parsed()) return cmd_verify_order(cfg, functionals, grid, order_bootstrap, dest);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fpv::cli
