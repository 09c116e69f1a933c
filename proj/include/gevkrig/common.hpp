#ifndef GEVKRIG_COMMON_HPP
#define GEVKRIG_COMMON_HPP

#include <cmath>
#include <charconv>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <system_error>

namespace gevkrig {

// Missing observations are carried as quiet NaN end to end; the columnar
// formats spell it "NA".
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Error taxonomy maps onto the CLI exit codes: config 2, data 3, numerical 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal formatting. All numeric output goes through
// this so that parse -> serialize cycles are bit-exact.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "NA" || s.empty()) return kMissing;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DataError("not a number: '" + s + "'");
  return v;
}

inline long parse_long(const std::string& s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DataError("not an integer: '" + s + "'");
  return v;
}

// Exact rational threshold, so e.g. 16557/24837 vs 2/3 is decided without
// floating-point rounding.
struct Fraction {
  std::int64_t num = 2;
  std::int64_t den = 3;

  // Accepts "p/q" or a decimal string.
  static Fraction parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Fraction f;
      f.num = parse_long(s.substr(0, slash));
      f.den = parse_long(s.substr(slash + 1));
      if (f.den <= 0 || f.num < 0) throw ConfigError("bad fraction: " + s);
      return f;
    }
    double v = parse_double(s);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("fraction out of [0,1]: " + s);
    // Scale decimals onto a fixed denominator; exact for inputs with <= 9
    // decimal digits.
    Fraction f;
    f.den = 1000000000;
    f.num = static_cast<std::int64_t>(std::llround(v * 1e9));
    return f;
  }

  // count/total >= num/den, evaluated in integers.
  bool leq_ratio(std::int64_t count, std::int64_t total) const {
    return count * den >= num * total;
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

}  // namespace gevkrig

#endif
