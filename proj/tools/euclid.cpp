// euclid: statistics of the standard, centered and odd Euclidean algorithms.
#include "euclid/cache.hpp"
#include "euclid/ensemble.hpp"
#include "euclid/realdyn.hpp"
#include "euclid/spectral.hpp"
#include "euclid/uni.hpp"
#include "euclid/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace euclid;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kCache = 3, kNumerical = 4, kCheckFailed = 5 };

struct RunConfig {
  std::string command;
  std::string algo = "G";
  std::string cost = "unit";
  std::int64_t N = 1000;
  std::vector<std::int64_t> grid;
  bool all_pairs = false;
  double gamma = 0.5;
  int degree = 40;
  std::int64_t m_cap = 64;
  std::uint64_t seed = 20240601;
  std::string out;
  std::string cache = ".euclid-cache";
  bool no_cache = false;
  // verify
  std::string suite = "all";
  // uni
  double a = 0.5;
  std::vector<int> depths = {1, 2, 3, 4};
  // real
  int n = 200;
  int samples = 10000;
  int bits = 256;

  json to_json() const {
    json j;
    j["command"] = command;
    j["algo"] = algo;
    j["cost"] = cost;
    j["N"] = N;
    j["grid"] = grid;
    j["all_pairs"] = all_pairs;
    j["gamma"] = gamma;
    j["degree"] = degree;
    j["m_cap"] = m_cap;
    j["seed"] = seed;
    if (command == "verify") j["suite"] = suite;
    if (command == "uni") {
      j["a"] = a;
      j["depths"] = depths;
    }
    if (command == "real") {
      j["n"] = n;
      j["samples"] = samples;
      j["bits"] = bits;
    }
    return j;
  }

  std::string csv_header() const {
    return "# schema_version=" + std::to_string(kSchemaVersion) + "\n# config=" + to_json().dump() + "\n";
  }

  OperatorConfig op() const {
    OperatorConfig c;
    c.degree = degree;
    c.m_cap = m_cap;
    return c;
  }
};

json envelope(const RunConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = cfg.to_json();
  return j;
}

/// Writes to <out><suffix> when --out is set, otherwise to stdout when
/// the artifact is the primary one.
void emit(const RunConfig& cfg, const std::string& suffix, const std::string& text, bool primary) {
  if (cfg.out.empty()) {
    if (primary) std::cout << text;
    return;
  }
  const std::string path = cfg.out + suffix;
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ConfigError("cannot write output file '" + path + "'");
  f << text;
}

std::optional<SummaryCache> open_cache(const RunConfig& cfg) {
  if (cfg.no_cache) return std::nullopt;
  if (const char* env = std::getenv("EUCLID_CACHE_DIR"); env && *env) return SummaryCache(env);
  return SummaryCache(cfg.cache);
}

int cmd_stats(const RunConfig& cfg) {
  const AlgorithmId id = parse_algorithm(cfg.algo);
  const DigitCost cost = parse_cost(cfg.cost);
  const auto cache = open_cache(cfg);
  const SummaryCache* cp = cache ? &*cache : nullptr;
  std::vector<EnsembleSummary> sums;
  if (!cfg.grid.empty()) {
    if (cfg.all_pairs) throw ConfigError("--grid is only available on Omega_N (drop --all-pairs)");
    sums = cached_grid(cp, id, cost, cfg.grid);
  } else {
    if (cfg.N < 1) throw ConfigError("--N must be >= 1");
    sums.push_back(cached_summary(cp, InputSet{id, cfg.N, !cfg.all_pairs}, cost));
  }
  json j = envelope(cfg);
  j["summaries"] = json::array();
  std::ostringstream csv;
  csv << cfg.csv_header() << "N,";
  bool first = true;
  for (const auto& s : sums) {
    json e = to_json(s);
    e.erase("schema_version");
    e["mean"] = s.count ? s.mean() : 0.0;
    e["variance"] = s.count ? s.variance() : 0.0;
    j["summaries"].push_back(e);
    std::ostringstream h;
    write_histogram_csv(h, s);
    std::string body = h.str();
    if (first) {
      csv << body.substr(0, body.find('\n') + 1);
      first = false;
    }
    std::istringstream lines(body.substr(body.find('\n') + 1));
    for (std::string line; std::getline(lines, line);) csv << s.set.N << ',' << line << '\n';
  }
  emit(cfg, ".json", j.dump(2) + "\n", true);
  emit(cfg, ".csv", csv.str(), false);
  return kOk;
}

int cmd_constants(const RunConfig& cfg) {
  const AlgorithmId id = parse_algorithm(cfg.algo);
  const DigitCost cost = parse_cost(cfg.cost);
  if (cfg.degree < 8) throw NumericalError("--degree " + std::to_string(cfg.degree) + " is below the minimum of 8");
  const SpectralSolver solver(id, cost, cfg.op());
  const ConstantsBundle b = solver.constants();
  json j = envelope(cfg);
  j["lambda_10"] = b.lambda_10;
  j["residual"] = b.residual;
  j["gap_estimate"] = b.gap_estimate;
  j["dL_ds"] = b.dL_ds;
  j["dL_dw"] = b.dL_dw;
  j["dL_dw_analytic"] = b.dL_dw_analytic;
  j["d2L_ds2"] = b.d2L_ds2;
  j["d2L_dw2"] = b.d2L_dw2;
  j["d2L_dsdw"] = b.d2L_dsdw;
  j["chi"] = b.chi;
  j["entropy_closed_form"] = b.entropy_closed_form;
  j["mu"] = b.mu;
  j["delta2"] = b.delta2;
  j["mu_c"] = b.mu_c;
  j["delta2_c"] = b.delta2_c;
  j["delta2_c_decomposition"] = b.delta2_c_decomposition;
  j["mu_hat"] = b.mu_hat;
  j["mu_hat_closed_form"] = b.mu_hat_closed;
  j["mu_hat_tail_bound"] = b.mu_hat_tail;
  j["delta_hat2"] = b.delta_hat2;
  j["muc_check"] = b.muc_check ? "pass" : "fail";
  j["decomposition_check"] = b.decomposition_check ? "pass" : "fail";
  emit(cfg, ".json", j.dump(2) + "\n", true);
  cross_validate(b);
  if (!b.muc_check || !b.decomposition_check) throw NumericalError("mu(c) or delta^2(c) consistency check failed");
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const CLI::App& sub) {
  const auto cache = open_cache(cfg);
  VerifyOptions opt;
  opt.algo = parse_algorithm(cfg.algo);
  opt.cache = cache ? &*cache : nullptr;
  opt.seed = cfg.seed;
  opt.spectral = cfg.op();
  opt.spectral.validate();
  opt.gamma = cfg.gamma;
  if (sub.count("--N")) {
    opt.clt_grid = {cfg.N};
    opt.identities_max_v = cfg.N;
  }
  if (sub.count("--grid")) {
    opt.growth_grid = cfg.grid;
    opt.tv_grid = cfg.grid;
  }
  std::vector<CriterionReport> reports;
  bool ok = true;
  Verifier v(opt);
  for (int id : Verifier::suite(cfg.suite)) {
    reports.push_back(v.run(id));
    std::cerr << summary_line(reports.back()) << std::endl;
    ok = ok && reports.back().pass();
  }
  std::ostringstream csv;
  csv << cfg.csv_header();
  write_report_csv(csv, reports);
  emit(cfg, ".csv", csv.str(), true);
  return ok ? kOk : kCheckFailed;
}

int cmd_smooth(const RunConfig& cfg) {
  const AlgorithmId id = parse_algorithm(cfg.algo);
  const DigitCost cost = parse_cost(cfg.cost);
  const SmoothedSummary s = smoothed(InputSet{id, cfg.N, true}, cost, cfg.gamma);
  const double tv = smoothing_distance(id, cfg.N, cfg.gamma);
  json j = envelope(cfg);
  j["window"] = s.window;
  j["components"] = s.Qs.size();
  j["span"] = to_string(s.span);
  json moments = json::array();
  for (std::size_t k = 1; k < s.moments.size(); ++k) moments.push_back(to_string(s.moments[k]));
  j["moments"] = moments;
  j["mean"] = s.mean();
  j["variance"] = s.variance();
  j["tv_distance"] = tv;
  j["tv_scaled"] = tv * std::pow(static_cast<double>(cfg.N), cfg.gamma);
  std::ostringstream csv;
  csv.precision(17);
  csv << cfg.csv_header() << "j,cost_value,probability\n";
  for (const auto& [bin, p] : s.mixture) csv << bin << ',' << to_string(s.span * bin) << ',' << to_double(p) << '\n';
  emit(cfg, ".json", j.dump(2) + "\n", true);
  emit(cfg, ".csv", csv.str(), false);
  return kOk;
}

int cmd_uni(const RunConfig& cfg) {
  const AlgorithmId id = parse_algorithm(cfg.algo);
  std::ostringstream csv;
  csv.precision(12);
  csv << cfg.csv_header() << "n,eta,branches,tail,worst_truncated,worst_ratio\n";
  for (int n : cfg.depths) {
    const UniResult r = uni_check(id, n, cfg.a, cfg.m_cap);
    csv << n << ',' << r.eta << ',' << r.branches << ',' << r.tail << ',' << r.worst_truncated << ','
        << r.worst_ratio << '\n';
  }
  emit(cfg, ".csv", csv.str(), true);
  return kOk;
}

int cmd_real(const RunConfig& cfg) {
  const AlgorithmId id = parse_algorithm(cfg.algo);
  const DigitCost cost = parse_cost(cfg.cost);
  if (cfg.degree < 8) throw NumericalError("--degree " + std::to_string(cfg.degree) + " is below the minimum of 8");
  const SpectralSolver solver(id, cost, cfg.op());
  RealCltOptions ro;
  ro.bits = cfg.bits;
  ro.seed = cfg.seed;
  ro.mu_hat = mu_hat_closed_form(id, cost, cfg.m_cap).value;
  ro.delta_hat2 = solver.d2L_dw2();
  const RealCltResult r = real_clt_check(id, cost, cfg.n, cfg.samples, ro);
  json j = envelope(cfg);
  j["bits_used"] = r.bits;
  j["rejected"] = r.rejected;
  j["mu_hat"] = ro.mu_hat;
  j["delta_hat2"] = ro.delta_hat2;
  j["mean_rate"] = r.mean_rate;
  j["std_error"] = r.std_error;
  j["var_rate"] = r.var_rate;
  if (std::isnan(r.ks)) {
    j["ks"] = nullptr;  // constant cost: no Gaussian fluctuations to compare
  } else {
    j["ks"] = r.ks;
  }
  std::ostringstream csv;
  csv << cfg.csv_header();
  write_real_csv(csv, r);
  emit(cfg, ".json", j.dump(2) + "\n", true);
  emit(cfg, ".csv", csv.str(), false);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and spectral statistics of Euclidean algorithms"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* s, bool enumerates) {
    s->add_option("--algo", cfg.algo, "G | K | O")->check(CLI::IsMember({"G", "K", "O"}));
    s->add_option("--cost", cfg.cost, "unit | indicator:m | bits | table:<path>");
    s->add_option("--out", cfg.out, "output path prefix (.json / .csv are appended)");
    s->add_option("--degree", cfg.degree, "Chebyshev degree of the operator discretisation");
    s->add_option("--m-cap", cfg.m_cap, "digits summed explicitly (UNI: truncation of the branch set)");
    s->add_option("--seed", cfg.seed, "seed for every random draw");
    if (enumerates) {
      s->add_option("--N", cfg.N, "bound on the denominator");
      s->add_option("--grid", cfg.grid, "list of bounds N")->delimiter(',');
      s->add_option("--gamma", cfg.gamma, "smoothing exponent");
      s->add_option("--cache", cfg.cache, "summary cache directory (EUCLID_CACHE_DIR overrides)");
      s->add_flag("--no-cache", cfg.no_cache, "do not read or write the summary cache");
    }
  };

  auto* stats = app.add_subcommand("stats", "exact cost distribution on Omega_N");
  common(stats, true);
  stats->add_flag("--all-pairs", cfg.all_pairs, "use all pairs (Omega~_N) instead of coprime pairs");
  auto* constants = app.add_subcommand("constants", "spectral constants of the weighted transfer operator");
  common(constants, false);
  auto* verify = app.add_subcommand("verify", "run acceptance checks and write a CSV report");
  common(verify, true);
  verify->add_option("--suite", cfg.suite, "all | spectral | growth | clt | identities | smoothing | real | uni");
  auto* smooth = app.add_subcommand("smooth", "smoothed summary and its TV distance to Omega_N");
  common(smooth, true);
  auto* uni = app.add_subcommand("uni", "UNI ratio table");
  common(uni, false);
  uni->add_option("--a", cfg.a, "exponent a in rho^(a n)");
  uni->add_option("--depths", cfg.depths, "depths n")->delimiter(',');
  auto* real = app.add_subcommand("real", "real-trajectory CLT by sampling");
  common(real, false);
  real->add_option("--n", cfg.n, "number of digits per trajectory");
  real->add_option("--samples", cfg.samples, "number of random seeds");
  real->add_option("--bits", cfg.bits, "seed denominator 2^bits (raised to 4n when smaller)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*uni && !uni->count("--m-cap")) cfg.m_cap = 30;
    if (*stats) return cfg.command = "stats", cmd_stats(cfg);
    if (*constants) return cfg.command = "constants", cmd_constants(cfg);
    if (*verify) return cfg.command = "verify", cmd_verify(cfg, *verify);
    if (*smooth) return cfg.command = "smooth", cmd_smooth(cfg);
    if (*uni) return cfg.command = "uni", cmd_uni(cfg);
    if (*real) return cfg.command = "real", cmd_real(cfg);
  } catch (const CacheError& e) {
    std::cerr << "cache error: " << e.what() << '\n';
    return kCache;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {  // ConfigError, InvalidDigitError
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::domain_error& e) {  // DomainError, DegenerateError
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
