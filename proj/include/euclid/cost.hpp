#pragma once

#include "euclid/algorithm.hpp"
#include "euclid/division.hpp"
#include "euclid/errors.hpp"
#include "euclid/numeric.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace euclid {

/// Nonnegative digit cost c(m, eps), with exact rational values.
///
/// Kinds: unit (c = 1), indicator(m0) (c = [m == m0], sign ignored),
/// binary_length (c = floor(log2 m) + 1) and table (explicit values, keyed by
/// (m, eps) or by m alone). Every kind carries a positive rational scale.
class DigitCost {
 public:
  enum class Kind { Unit, Indicator, BinaryLength, Table };

  static DigitCost unit() { return DigitCost(Kind::Unit); }
  static DigitCost indicator(std::int64_t m0) {
    if (m0 < 1) throw ConfigError("indicator digit must be >= 1");
    DigitCost c(Kind::Indicator);
    c.m0_ = m0;
    return c;
  }
  static DigitCost binary_length() { return DigitCost(Kind::BinaryLength); }

  /// Table cost; keys with eps == 0 match both signs.
  static DigitCost table(std::map<std::pair<std::int64_t, int>, Rational> entries,
                         std::string label = "table") {
    for (const auto& [key, value] : entries) {
      if (value < 0) throw ConfigError("table cost values must be nonnegative");
    }
    DigitCost c(Kind::Table);
    c.table_ = std::move(entries);
    c.label_ = std::move(label);
    return c;
  }

  /// Same cost multiplied by a positive rational.
  DigitCost scaled(const Rational& factor) const {
    if (factor <= 0) throw ConfigError("cost scale must be positive");
    DigitCost c = *this;
    c.scale_ *= factor;
    return c;
  }

  Kind kind() const { return kind_; }
  std::int64_t indicator_digit() const { return m0_; }
  const Rational& scale() const { return scale_; }
  const std::map<std::pair<std::int64_t, int>, Rational>& entries() const { return table_; }

  /// Largest m present in a table cost (0 for the other kinds).
  std::int64_t table_max_m() const {
    return table_.empty() ? 0 : table_.rbegin()->first.first;
  }

  bool is_constant() const { return kind_ == Kind::Unit; }

  /// Value c(m, eps); throws MissingTableEntryError for absent table keys.
  Rational operator()(const Digit& q) const {
    switch (kind_) {
      case Kind::Unit: return scale_;
      case Kind::Indicator: return q.m == m0_ ? scale_ : Rational(0);
      case Kind::BinaryLength: return scale_ * binary_length_of(q.m);
      case Kind::Table: {
        auto it = table_.find({q.m, q.eps});
        if (it == table_.end()) it = table_.find({q.m, 0});
        if (it == table_.end()) {
          throw MissingTableEntryError("table cost has no entry for digit (" +
                                       std::to_string(q.m) + "," + std::to_string(q.eps) + ")");
        }
        return scale_ * it->second;
      }
    }
    return Rational(0);
  }

  double value(const Digit& q) const { return to_double((*this)(q)); }

  /// Stable textual descriptor, used in cache keys and report headers.
  std::string descriptor() const {
    std::string base;
    switch (kind_) {
      case Kind::Unit: base = "unit"; break;
      case Kind::Indicator: base = "indicator:" + std::to_string(m0_); break;
      case Kind::BinaryLength: base = "bits"; break;
      case Kind::Table: base = label_; break;
    }
    if (scale_ != 1) base += "*" + to_string(scale_);
    return base;
  }

  static std::int64_t binary_length_of(std::int64_t m) {
    return static_cast<std::int64_t>(std::bit_width(static_cast<std::uint64_t>(m)));
  }

 private:
  explicit DigitCost(Kind k) : kind_(k) {}

  Kind kind_;
  std::int64_t m0_ = 0;
  Rational scale_ = 1;
  std::map<std::pair<std::int64_t, int>, Rational> table_;
  std::string label_;
};

inline Rational eval_cost(const DigitCost& cost, const Digit& q) { return cost(q); }

/// C = sum of c over the digits of a trajectory.
inline Rational total_cost(const DigitCost& cost, const Trajectory& t) {
  Rational sum = 0;
  for (const Digit& q : t.digits) sum += cost(q);
  return sum;
}

namespace detail {
inline std::vector<Digit> digits_up_to(AlgorithmId id, std::int64_t m_max) {
  const Algorithm algo = Algorithm::of(id);
  std::vector<Digit> out;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    for (int eps : {+1, -1}) {
      const Digit q{m, eps};
      if (algo.generic(q)) out.push_back(q);
    }
  }
  return out;
}
}  // namespace detail

/// Rational gcd of the cost values on the valid digits with m <= m_max.
///
/// Returns nullopt when every value is zero. For unit, indicator and binary
/// length costs the result is the exact span; for tables it is an upper bound
/// that is exact once the table is covered.
inline std::optional<Rational> detect_span(const DigitCost& cost, std::int64_t m_max,
                                           std::optional<AlgorithmId> id = std::nullopt) {
  if (m_max < 2) throw ConfigError("detect_span needs m_max >= 2");
  Rational g = 0;
  // Only tables can depend on the sign; without an algorithm every (m, +-1) is scanned.
  std::vector<Digit> digits;
  if (id) {
    digits = detail::digits_up_to(*id, m_max);
  } else {
    for (std::int64_t m = 1; m <= m_max; ++m) {
      digits.push_back({m, +1});
      if (cost.kind() == DigitCost::Kind::Table) digits.push_back({m, -1});
    }
  }
  for (const Digit& q : digits) {
    Rational value;
    try {
      value = cost(q);
    } catch (const MissingTableEntryError&) {
      continue;
    }
    g = rational_gcd(g, value);
  }
  if (g == 0) return std::nullopt;
  return g;
}

/// Cost values expressed as integer multiples of the span, tabulated for
/// m = 1..m_max and both signs. Used by the enumeration kernels.
class LatticeCost {
 public:
  LatticeCost(const DigitCost& cost, AlgorithmId id, std::int64_t m_max)
      : m_max_(std::max<std::int64_t>(m_max, 2)) {
    auto span = detect_span(cost, std::max<std::int64_t>(m_max_, 2), id);
    span_ = span.value_or(Rational(1));
    plus_.assign(static_cast<std::size_t>(m_max_ + 1), 0);
    minus_.assign(static_cast<std::size_t>(m_max_ + 1), 0);
    const Algorithm algo = Algorithm::of(id);
    for (std::int64_t m = 1; m <= m_max_; ++m) {
      for (int eps : {+1, -1}) {
        const Digit q{m, eps};
        if (!algo.generic(q)) continue;
        const Rational units = cost(q) / span_;
        if (denominator_of(units) != 1) {
          throw NumericalError("cost value is not a multiple of the detected span");
        }
        (eps > 0 ? plus_ : minus_)[static_cast<std::size_t>(m)] =
            numerator_of(units).convert_to<std::int32_t>();
      }
    }
  }

  const Rational& span() const { return span_; }
  std::int64_t m_max() const { return m_max_; }
  std::int32_t units(std::int64_t m, int eps) const {
    return (eps > 0 ? plus_ : minus_)[static_cast<std::size_t>(m)];
  }
  const std::int32_t* plus_data() const { return plus_.data(); }
  const std::int32_t* minus_data() const { return minus_.data(); }

 private:
  std::int64_t m_max_;
  Rational span_;
  std::vector<std::int32_t> plus_, minus_;
};

/// Envelope c(m, eps) <= A + B log m fitted over m <= m_max.
struct GrowthEnvelope {
  double A = 0.0;
  double B = 0.0;
  /// False when m > sqrt(m_max) needs a B more than twice the one fitted
  /// below, which points to faster than logarithmic growth.
  bool moderate = true;
};

inline GrowthEnvelope growth_envelope(const DigitCost& cost, AlgorithmId id, std::int64_t m_max) {
  GrowthEnvelope env;
  std::vector<std::pair<std::int64_t, double>> values;
  for (const Digit& q : detail::digits_up_to(id, m_max)) {
    try {
      values.emplace_back(q.m, cost.value(q));
    } catch (const MissingTableEntryError&) {
    }
  }
  for (const auto& [m, c] : values) {
    if (m <= 2) env.A = std::max(env.A, c);
  }
  // Slopes fitted below sqrt(m_max) and above it; logarithmic growth keeps them comparable.
  const double split = std::sqrt(static_cast<double>(m_max));
  double b_low = 0.0, b_high = 0.0;
  for (const auto& [m, c] : values) {
    if (m <= 2) continue;
    const double b = std::max(0.0, (c - env.A) / std::log(static_cast<double>(m)));
    double& slot = static_cast<double>(m) <= split ? b_low : b_high;
    slot = std::max(slot, b);
  }
  env.B = std::max(b_low, b_high);
  env.moderate = b_high <= 2.0 * b_low + 1e-12;
  return env;
}

/// Reads "m,value" or "m,eps,value" lines; '#' starts a comment.
inline DigitCost load_table_cost(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cost table '" + path + "'");
  std::map<std::pair<std::int64_t, int>, Rational> entries;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t hash = 1469598103934665603ull;
  while (std::getline(in, line)) {
    ++lineno;
    for (unsigned char ch : line) hash = (hash ^ ch) * 1099511628211ull;
    if (auto hashpos = line.find('#'); hashpos != std::string::npos) line.resize(hashpos);
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); }),
               line.end());
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    try {
      if (fields.size() == 2) {
        entries[{std::stoll(fields[0]), 0}] = parse_rational(fields[1]);
      } else if (fields.size() == 3) {
        const int eps = std::stoi(fields[1]);
        if (eps != 1 && eps != -1) throw ConfigError("eps must be +1 or -1");
        entries[{std::stoll(fields[0]), eps}] = parse_rational(fields[2]);
      } else {
        throw ConfigError("expected 2 or 3 fields");
      }
    } catch (const std::exception& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (entries.empty()) throw ConfigError("cost table '" + path + "' is empty");
  std::ostringstream label;
  label << "table:" << std::hex << hash;
  return DigitCost::table(std::move(entries), label.str());
}

/// Parses "unit" | "indicator:m" | "bits" | "table:<path>".
inline DigitCost parse_cost(const std::string& spec) {
  if (spec == "unit") return DigitCost::unit();
  if (spec == "bits") return DigitCost::binary_length();
  if (spec.rfind("indicator:", 0) == 0) {
    const std::string arg = spec.substr(10);
    std::size_t pos = 0;
    long long m = 0;
    try {
      m = std::stoll(arg, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != arg.size() || m < 1) throw ConfigError("bad indicator digit in '" + spec + "'");
    return DigitCost::indicator(m);
  }
  if (spec.rfind("table:", 0) == 0) return load_table_cost(spec.substr(6));
  throw ConfigError("unknown cost spec '" + spec + "' (expected unit | indicator:m | bits | table:<path>)");
}

}  // namespace euclid
