#pragma once

// Run configuration: a flat `key = value` document with `#` comments. Unknown keys are rejected,
// the canonical form lists keys sorted with normalized values, and its SHA-256 tags every artifact.

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tubesol/core/csv.hpp"
#include "tubesol/core/error.hpp"
#include "tubesol/core/params.hpp"

namespace tubesol::cli {

enum class Geometry { Circle, Straight };
enum class Spacing { Log, Linear };

struct RunConfig {
  ProblemParams params;
  double radius = 1.0;  ///< R: circle radius, or length/2π of the straight control
  double eps = 0.2;
  int i_max = 6;
  int N = 4;
  int N0 = 0;
  std::optional<double> M;   ///< ball exponent; empty means the midpoint of the admissible interval
  std::optional<int> nt;     ///< t-samples; empty means sized from the lowest resolved mode
  int nz = 128;
  double tol = 1e-12;
  double eps_lo = 0.05;
  double eps_hi = 0.3;
  int count = 6;
  Spacing spacing = Spacing::Log;
  Geometry geometry = Geometry::Circle;
  std::string out = "out";
  std::string fixtures = "fixtures";
  unsigned long long seed = 0;

  /// ε-sweep points.
  std::vector<double> sweep() const {
    std::vector<double> out_;
    for (int c = 0; c < count; ++c) {
      const double f = count == 1 ? 0.0 : double(c) / (count - 1);
      out_.push_back(spacing == Spacing::Log ? eps_lo * std::pow(eps_hi / eps_lo, f) : eps_lo + f * (eps_hi - eps_lo));
    }
    return out_;
  }
};

namespace detail {

inline const std::set<std::string>& required_keys() {
  static const std::set<std::string> keys{"n", "p", "k", "R", "eps", "i_max", "N", "N0", "M", "nt", "nz", "tol"};
  return keys;
}

inline const std::set<std::string>& optional_keys() {
  static const std::set<std::string> keys{"eps_lo", "eps_hi", "count", "spacing", "geometry", "out", "fixtures", "seed"};
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] inline void bad(const std::string& key, const std::string& why) {
  fail(ErrorKind::ConfigError, "config key '" + key + "': " + why);
}

inline double to_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) bad(key, "expected a real number, got '" + v + "'");
  return x;
}

inline long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, "expected an integer, got '" + v + "'");
  return x;
}

}  // namespace detail

/// Raw key-value document.
using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_document(std::istream& in) {
  KeyValues kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ConfigError, "line " + std::to_string(number) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::ConfigError, "line " + std::to_string(number) + ": empty key");
    if (kv.count(key)) detail::bad(key, "given twice");
    kv[key] = value;
  }
  return kv;
}

/// `key=value` override; replaces or adds the key.
inline void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(ErrorKind::ConfigError, "override '" + assignment + "' is not key=value");
  kv[detail::trim(assignment.substr(0, eq))] = detail::trim(assignment.substr(eq + 1));
}

inline RunConfig interpret(const KeyValues& kv) {
  for (const auto& [key, value] : kv)
    if (!detail::required_keys().count(key) && !detail::optional_keys().count(key)) detail::bad(key, "unknown key");
  for (const auto& key : detail::required_keys())
    if (!kv.count(key)) detail::bad(key, "missing");
  using detail::bad;
  const auto real = [&](const std::string& k) { return detail::to_real(k, kv.at(k)); };
  const auto integer = [&](const std::string& k) { return detail::to_integer(k, kv.at(k)); };
  const auto has = [&](const std::string& k) { return kv.count(k) > 0; };

  RunConfig c;
  c.params.n = int(integer("n"));
  c.params.p = real("p");
  c.params.k = int(integer("k"));
  if (c.params.n < 1) bad("n", "must be >= 1");
  if (!(c.params.p > 1.0)) bad("p", "must be > 1");
  if (c.params.k != 1) bad("k", "only curves (k = 1) are supported");
  c.radius = real("R");
  if (!(c.radius > 0.0)) bad("R", "must be positive");
  c.eps = real("eps");
  if (!(c.eps > 0.0)) bad("eps", "must be positive");
  c.i_max = int(integer("i_max"));
  if (c.i_max < 0) bad("i_max", "must be >= 0");
  c.N = int(integer("N"));
  if (c.N < 1) bad("N", "must be >= 1");
  c.N0 = int(integer("N0"));
  if (c.N0 < 0) bad("N0", "must be >= 0");
  if (kv.at("M") != "auto") c.M = real("M");
  if (kv.at("nt") != "auto") {
    c.nt = int(integer("nt"));
    if (*c.nt < 3 || *c.nt % 2 == 0) bad("nt", "must be odd and >= 3 (or auto)");
  }
  c.nz = int(integer("nz"));
  if (c.nz < 64) bad("nz", "must be >= 64");
  c.tol = real("tol");
  if (!(c.tol > 0.0)) bad("tol", "must be positive");
  if (has("eps_lo")) c.eps_lo = real("eps_lo");
  if (has("eps_hi")) c.eps_hi = real("eps_hi");
  if (!(0.0 < c.eps_lo && c.eps_lo <= c.eps_hi)) bad("eps_lo", "need 0 < eps_lo <= eps_hi");
  if (has("count")) c.count = int(integer("count"));
  if (c.count < 1) bad("count", "must be >= 1");
  if (has("spacing")) {
    const std::string& s = kv.at("spacing");
    if (s == "log") c.spacing = Spacing::Log;
    else if (s == "linear") c.spacing = Spacing::Linear;
    else bad("spacing", "expected log or linear");
  }
  if (has("geometry")) {
    const std::string& s = kv.at("geometry");
    if (s == "circle") c.geometry = Geometry::Circle;
    else if (s == "straight") c.geometry = Geometry::Straight;
    else bad("geometry", "expected circle or straight");
  }
  if (has("out")) c.out = kv.at("out");
  if (has("fixtures")) c.fixtures = kv.at("fixtures");
  if (has("seed")) {
    const long long s = integer("seed");
    if (s < 0) bad("seed", "must be >= 0");
    c.seed = static_cast<unsigned long long>(s);
  }
  return c;
}

/// Sorted `key = value` lines with every key present and values normalized.
inline std::string canonical(const RunConfig& c) {
  KeyValues kv;
  const auto num = [](double v) { return csv::format(v); };
  kv["n"] = std::to_string(c.params.n);
  kv["p"] = num(c.params.p);
  kv["k"] = std::to_string(c.params.k);
  kv["R"] = num(c.radius);
  kv["eps"] = num(c.eps);
  kv["i_max"] = std::to_string(c.i_max);
  kv["N"] = std::to_string(c.N);
  kv["N0"] = std::to_string(c.N0);
  kv["M"] = c.M ? num(*c.M) : "auto";
  kv["nt"] = c.nt ? std::to_string(*c.nt) : "auto";
  kv["nz"] = std::to_string(c.nz);
  kv["tol"] = num(c.tol);
  kv["eps_lo"] = num(c.eps_lo);
  kv["eps_hi"] = num(c.eps_hi);
  kv["count"] = std::to_string(c.count);
  kv["spacing"] = c.spacing == Spacing::Log ? "log" : "linear";
  kv["geometry"] = c.geometry == Geometry::Circle ? "circle" : "straight";
  kv["out"] = c.out;
  kv["fixtures"] = c.fixtures;
  kv["seed"] = std::to_string(c.seed);
  std::string text;
  for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  return text;
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  return interpret(parse_document(in));
}

inline KeyValues read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot open config file " + path);
  return parse_document(in);
}

/// Lower-case hex SHA-256.
inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  require(EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) == 1, ErrorKind::IoError,
          "SHA-256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

inline std::string config_hash(const RunConfig& c) { return sha256_hex(canonical(c)); }

}  // namespace tubesol::cli
