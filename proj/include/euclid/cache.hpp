#pragma once

#include "euclid/ensemble.hpp"
#include "euclid/errors.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace euclid {

inline constexpr int kSchemaVersion = 1;

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ull;
  return h;
}

inline nlohmann::json to_json(const EnsembleSummary& s) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["algo"] = std::string(name(s.set.algo));
  j["cost"] = s.cost_id;
  j["N"] = s.set.N;
  j["reduced"] = s.set.reduced;
  j["count"] = s.count;
  j["span"] = to_string(s.span);
  nlohmann::json moments = nlohmann::json::array();
  nlohmann::json approx = nlohmann::json::array();
  for (std::size_t k = 1; k < s.moments.size(); ++k) {
    moments.push_back(to_string(s.moments[k]));
    approx.push_back(to_double(s.moments[k]));
  }
  j["moments"] = moments;
  j["moments_float"] = approx;
  // [j, count] pairs in increasing j.
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [bin, c] : s.histogram) hist.push_back({bin, c});
  j["histogram"] = hist;
  return j;
}

inline EnsembleSummary summary_from_json(const nlohmann::json& j) {
  EnsembleSummary s;
  s.set.algo = parse_algorithm(j.at("algo").get<std::string>());
  s.set.N = j.at("N").get<std::int64_t>();
  s.set.reduced = j.at("reduced").get<bool>();
  s.cost_id = j.at("cost").get<std::string>();
  s.count = j.at("count").get<std::uint64_t>();
  s.span = parse_rational(j.at("span").get<std::string>());
  s.moments.push_back(Rational(1));
  for (const auto& m : j.at("moments")) s.moments.push_back(parse_rational(m.get<std::string>()));
  std::uint64_t total = 0;
  for (const auto& pair : j.at("histogram")) {
    const auto c = pair.at(1).get<std::uint64_t>();
    s.histogram[pair.at(0).get<std::int64_t>()] = c;
    total += c;
  }
  if (total != s.count) throw CacheError("histogram does not sum to count");
  return s;
}

/// Directory of summary files keyed by (algo, cost descriptor, N, reduced).
/// Writes go to a temporary file first and are renamed into place.
class SummaryCache {
 public:
  explicit SummaryCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// EUCLID_CACHE_DIR when set, otherwise the given fallback.
  static SummaryCache from_env(const std::filesystem::path& fallback) {
    if (const char* env = std::getenv("EUCLID_CACHE_DIR"); env && *env) return SummaryCache(env);
    return SummaryCache(fallback);
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(AlgorithmId id, const std::string& cost_id, std::int64_t N, bool reduced) const {
    std::ostringstream name_os;
    name_os << name(id) << '-' << std::hex << fnv1a(cost_id) << std::dec << "-N" << N << (reduced ? "-r" : "-t")
            << ".json";
    return dir_ / name_os.str();
  }

  /// Cached summary, or nullopt on a miss or an older schema. Throws
  /// CacheError when the file exists but cannot be parsed.
  std::optional<EnsembleSummary> load(AlgorithmId id, const std::string& cost_id, std::int64_t N,
                                      bool reduced) const {
    const auto path = path_for(id, cost_id, N, reduced);
    if (!std::filesystem::exists(path)) return std::nullopt;
    std::ifstream in(path);
    if (!in) throw CacheError("cannot read cache file " + path.string());
    try {
      const nlohmann::json j = nlohmann::json::parse(in);
      if (j.value("schema_version", -1) != kSchemaVersion) return std::nullopt;
      EnsembleSummary s = summary_from_json(j);
      if (s.set.algo != id || s.cost_id != cost_id || s.set.N != N || s.set.reduced != reduced) {
        throw CacheError("cache key mismatch");
      }
      return s;
    } catch (const CacheError& e) {
      throw CacheError(path.string() + ": " + e.what());
    } catch (const std::exception& e) {
      throw CacheError("corrupt cache file " + path.string() + ": " + e.what());
    }
  }

  void store(const EnsembleSummary& s) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw CacheError("cannot create cache directory " + dir_.string() + ": " + ec.message());
    const auto path = path_for(s.set.algo, s.cost_id, s.set.N, s.set.reduced);
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw CacheError("cannot write cache file " + tmp.string());
      out << to_json(s).dump(1) << '\n';
      if (!out) throw CacheError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw CacheError("cannot move cache file into place: " + ec.message());
  }

 private:
  std::filesystem::path dir_;
};

/// Summaries of Omega_N over a grid; cached entries are reused and the
/// missing ones are enumerated together in one pass.
inline std::vector<EnsembleSummary> cached_grid(const SummaryCache* cache, AlgorithmId id, const DigitCost& cost,
                                                std::vector<std::int64_t> grid, int k_max = 4) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::string cid = cost.descriptor();
  std::vector<std::optional<EnsembleSummary>> found(grid.size());
  std::vector<std::int64_t> missing;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (cache) found[i] = cache->load(id, cid, grid[i], true);
    if (found[i] && static_cast<int>(found[i]->moments.size()) < k_max + 1) found[i].reset();
    if (!found[i]) missing.push_back(grid[i]);
  }
  if (!missing.empty()) {
    for (auto& s : summarize_grid(id, cost, missing, k_max)) {
      if (cache) cache->store(s);
      const auto pos = std::lower_bound(grid.begin(), grid.end(), s.set.N) - grid.begin();
      found[static_cast<std::size_t>(pos)] = std::move(s);
    }
  }
  std::vector<EnsembleSummary> out;
  for (auto& f : found) out.push_back(std::move(*f));
  return out;
}

inline EnsembleSummary cached_summary(const SummaryCache* cache, const InputSet& set, const DigitCost& cost,
                                      int k_max = 4) {
  if (set.reduced) return cached_grid(cache, set.algo, cost, {set.N}, k_max).front();
  if (cache) {
    if (auto s = cache->load(set.algo, cost.descriptor(), set.N, false);
        s && static_cast<int>(s->moments.size()) >= k_max + 1) {
      return *s;
    }
  }
  EnsembleSummary s = summarize(set, cost, k_max);
  if (cache) cache->store(s);
  return s;
}

}  // namespace euclid
