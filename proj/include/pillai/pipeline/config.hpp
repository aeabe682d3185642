#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pillai/error.hpp"
#include "pillai/rigor.hpp"
#include "pillai/search.hpp"
#include "pillai/sequence.hpp"

namespace pillai {

enum class Mode { Faithful, Strict };

inline std::string to_string(Mode m) { return m == Mode::Faithful ? "faithful" : "strict"; }

/// Everything the pipeline needs, parsed from a flat `key = value` file.
struct PipelineConfig {
  RecurrenceSpec recurrence;
  mpz_class base = 3;
  long nmax = 500;
  long mmax = 200;
  std::string convention = "theorem";
  std::optional<long> nmin;
  std::optional<long> mmin;
  PrecisionPolicy policy{};
  Mode mode = Mode::Faithful;
  std::optional<BinetWindow> a_window;
  std::vector<mpz_class> a_minpoly;  // highest degree first
  std::vector<mpz_class> a_numerator;    // polynomial in alpha, lowest degree first
  std::vector<mpz_class> a_denominator;  // polynomial in alpha, lowest degree first
  mpz_class M;
  std::size_t extra_convergents = 16;
  unsigned threads = 1;
  /// Printed constants and presets keyed by name below `presets.`.
  std::map<std::string, std::string> presets;

  SearchConfig search_config() const {
    SearchConfig s = convention == "stated" ? SearchConfig::stated(nmax, mmax) : SearchConfig::theorem(nmax, mmax);
    if (nmin) s.n_min = *nmin;
    if (mmin) s.m_min = *mmin;
    s.base = base;
    if (s.n_max < s.n_min) s.n_max = s.n_min - 1;
    return s;
  }

  std::optional<std::string> preset(const std::string& key) const {
    auto it = presets.find(key);
    if (it == presets.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

/// Integer literal, also accepting `2e46` style powers of ten.
inline mpz_class parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto e = t.find_first_of("eE");
  try {
    if (e == std::string::npos) return mpz_class(t, 10);
    const mpz_class mant(t.substr(0, e), 10);
    const long ex = std::stol(t.substr(e + 1));
    if (ex < 0 || ex > 10000) throw std::invalid_argument("exponent");
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(ex));
    return mant * p;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, key + ": not an integer: '" + text + "'");
  }
}

inline long parse_long(const std::string& key, const std::string& text) {
  const mpz_class z = parse_integer(key, text);
  if (!z.fits_slong_p()) throw Error(ErrorKind::ConfigError, key + ": out of range");
  return z.get_si();
}

inline std::vector<mpz_class> parse_integer_list(const std::string& key, const std::string& text) {
  std::vector<mpz_class> out;
  for (const auto& item : split_list(text)) out.push_back(parse_integer(key, item));
  return out;
}

inline mpq_class parse_decimal_rational(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto dot = t.find('.');
  try {
    if (dot == std::string::npos) return mpq_class(mpz_class(t, 10));
    std::string digits = t.substr(0, dot) + t.substr(dot + 1);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(t.size() - dot - 1));
    mpq_class q(mpz_class(digits, 10), den);
    q.canonicalize();
    return q;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, key + ": not a decimal: '" + text + "'");
  }
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "recurrence.name", "recurrence.order", "recurrence.coefficients", "recurrence.initial", "base",
      "search.nmax", "search.mmax", "search.convention", "search.nmin", "search.mmin",
      "precision.initial_bits", "precision.max_bits", "mode", "binet.a_window", "binet.a_minpoly",
      "binet.a_numerator", "binet.a_denominator", "reduction.M", "reduction.extra_convergents",
      "reduction.threads"};
  return keys;
}

inline const std::set<std::string>& known_presets() {
  static const std::set<std::string> keys = {
      "exponents", "A.gamma_alpha", "A.gamma_base", "A.gamma_neg_alpha", "A.gamma_neg_base", "A.gamma1",
      "A.gamma2", "A.gamma3", "paper.lambda", "paper.case1", "paper.case2", "paper.lambda3_a1", "paper.K",
      "paper.N", "paper.bound_gamma_n", "paper.bound_gamma_m", "paper.bound_gamma1", "paper.bound_gamma2",
      "paper.bound_gamma3", "paper.search_ceiling"};
  return keys;
}

}  // namespace detail

/// Raw key/value pairs in file order; later duplicates are an error.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second) throw Error(ErrorKind::ConfigError, "duplicate key " + key);
  }
  return kv;
}

inline PipelineConfig parse_config(const std::string& text) {
  const auto kv = parse_key_values(text);
  PipelineConfig c;
  for (const auto& [key, value] : kv) {
    if (key.rfind("presets.", 0) == 0) {
      const std::string name = key.substr(8);
      if (!detail::known_presets().count(name)) throw Error(ErrorKind::ConfigError, "unknown key " + key);
      c.presets[name] = value;
    } else if (!detail::known_keys().count(key)) {
      throw Error(ErrorKind::ConfigError, "unknown key " + key);
    }
  }
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto require = [&](const std::string& k) {
    auto v = get(k);
    if (!v) throw Error(ErrorKind::ConfigError, "missing key " + k);
    return *v;
  };

  c.recurrence.name = get("recurrence.name").value_or("custom");
  c.recurrence.order = static_cast<int>(detail::parse_long("recurrence.order", require("recurrence.order")));
  c.recurrence.coefficients = detail::parse_integer_list("recurrence.coefficients", require("recurrence.coefficients"));
  c.recurrence.initial = detail::parse_integer_list("recurrence.initial", require("recurrence.initial"));
  try {
    c.recurrence.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  if (auto v = get("base")) c.base = detail::parse_integer("base", *v);
  if (c.base < 2) throw Error(ErrorKind::ConfigError, "base must be >= 2");
  if (auto v = get("search.nmax")) c.nmax = detail::parse_long("search.nmax", *v);
  if (auto v = get("search.mmax")) c.mmax = detail::parse_long("search.mmax", *v);
  if (auto v = get("search.nmin")) c.nmin = detail::parse_long("search.nmin", *v);
  if (auto v = get("search.mmin")) c.mmin = detail::parse_long("search.mmin", *v);
  if (c.nmax < 0 || c.mmax < 0) throw Error(ErrorKind::ConfigError, "search ranges must be non-negative");
  if (auto v = get("search.convention")) {
    if (*v != "theorem" && *v != "stated") throw Error(ErrorKind::ConfigError, "search.convention must be theorem or stated");
    c.convention = *v;
  }
  if (auto v = get("precision.initial_bits")) c.policy.initial_bits = detail::parse_long("precision.initial_bits", *v);
  if (auto v = get("precision.max_bits")) c.policy.max_bits = detail::parse_long("precision.max_bits", *v);
  if (c.policy.initial_bits < 2 || c.policy.max_bits < 2)
    throw Error(ErrorKind::ConfigError, "precision bits must be >= 2");
  // a cap below the starting precision wins
  if (c.policy.initial_bits > c.policy.max_bits) c.policy.initial_bits = c.policy.max_bits;
  if (auto v = get("mode")) {
    if (*v == "faithful") c.mode = Mode::Faithful;
    else if (*v == "strict") c.mode = Mode::Strict;
    else throw Error(ErrorKind::ConfigError, "mode must be faithful or strict");
  }
  if (auto v = get("binet.a_window")) {
    const auto parts = detail::split_list(*v);
    if (parts.size() != 2) throw Error(ErrorKind::ConfigError, "binet.a_window needs lo, hi");
    c.a_window = BinetWindow{detail::parse_decimal_rational("binet.a_window", parts[0]),
                             detail::parse_decimal_rational("binet.a_window", parts[1])};
    if (c.a_window->lo >= c.a_window->hi) throw Error(ErrorKind::ConfigError, "binet.a_window is empty");
  }
  c.a_minpoly = detail::parse_integer_list("binet.a_minpoly", require("binet.a_minpoly"));
  if (c.a_minpoly.size() < 2) throw Error(ErrorKind::ConfigError, "binet.a_minpoly needs degree >= 1");
  if (auto v = get("binet.a_numerator")) c.a_numerator = detail::parse_integer_list("binet.a_numerator", *v);
  if (auto v = get("binet.a_denominator")) c.a_denominator = detail::parse_integer_list("binet.a_denominator", *v);
  if (c.a_numerator.empty() != c.a_denominator.empty())
    throw Error(ErrorKind::ConfigError, "binet.a_numerator and binet.a_denominator go together");
  c.M = detail::parse_integer("reduction.M", require("reduction.M"));
  if (c.M <= 0) throw Error(ErrorKind::ConfigError, "reduction.M must be positive");
  if (auto v = get("reduction.extra_convergents"))
    c.extra_convergents = static_cast<std::size_t>(detail::parse_long("reduction.extra_convergents", *v));
  if (auto v = get("reduction.threads")) {
    const long t = detail::parse_long("reduction.threads", *v);
    if (t < 1 || t > 256) throw Error(ErrorKind::ConfigError, "reduction.threads must be in 1..256");
    c.threads = static_cast<unsigned>(t);
  }
  if (auto e = c.preset("exponents"); e && detail::split_list(*e).size() != 5)
    throw Error(ErrorKind::ConfigError, "presets.exponents needs five values");
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace detail {

inline std::string join(const std::vector<mpz_class>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
  return s;
}

inline std::string rational_decimal(const mpq_class& q) {
  // windows are short decimals; print exactly when 10^k q is an integer
  mpz_class scale = 1;
  unsigned digits = 0;
  while (digits < 64) {
    const mpq_class t = q * scale;
    if (t.get_den() == 1) break;
    scale *= 10;
    ++digits;
  }
  const mpq_class scaled = q * scale;
  if (scaled.get_den() != 1) return q.get_str();
  std::string num = mpz_class(abs(scaled.get_num())).get_str();
  if (digits == 0) return (q < 0 ? "-" : "") + num;
  if (num.size() <= digits) num = std::string(digits - num.size() + 1, '0') + num;
  return (q < 0 ? "-" : "") + num.substr(0, num.size() - digits) + "." + num.substr(num.size() - digits);
}

}  // namespace detail

/// Sorted `key=value` lines with normalized values; the digest input.
inline std::map<std::string, std::string> canonical_entries(const PipelineConfig& c) {
  std::map<std::string, std::string> m;
  m["recurrence.name"] = c.recurrence.name;
  m["recurrence.order"] = std::to_string(c.recurrence.order);
  m["recurrence.coefficients"] = detail::join(c.recurrence.coefficients);
  m["recurrence.initial"] = detail::join(c.recurrence.initial);
  m["base"] = c.base.get_str();
  m["search.nmax"] = std::to_string(c.nmax);
  m["search.mmax"] = std::to_string(c.mmax);
  m["search.convention"] = c.convention;
  if (c.nmin) m["search.nmin"] = std::to_string(*c.nmin);
  if (c.mmin) m["search.mmin"] = std::to_string(*c.mmin);
  m["precision.initial_bits"] = std::to_string(c.policy.initial_bits);
  m["precision.max_bits"] = std::to_string(c.policy.max_bits);
  m["mode"] = to_string(c.mode);
  if (c.a_window)
    m["binet.a_window"] = detail::rational_decimal(c.a_window->lo) + "," + detail::rational_decimal(c.a_window->hi);
  m["binet.a_minpoly"] = detail::join(c.a_minpoly);
  if (!c.a_numerator.empty()) {
    m["binet.a_numerator"] = detail::join(c.a_numerator);
    m["binet.a_denominator"] = detail::join(c.a_denominator);
  }
  m["reduction.M"] = c.M.get_str();
  m["reduction.extra_convergents"] = std::to_string(c.extra_convergents);
  for (const auto& [k, v] : c.presets) m["presets." + k] = v;
  return m;
}

inline std::string canonical_text(const PipelineConfig& c) {
  std::string s;
  for (const auto& [k, v] : canonical_entries(c)) s += k + "=" + v + "\n";
  return s;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error(ErrorKind::InvalidArgument, "sha256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// reduction.threads is a scheduling knob and stays out of the digest.
inline std::string config_digest(const PipelineConfig& c) { return sha256_hex(canonical_text(c)); }

/// PILLAI_INITIAL_BITS / PILLAI_MAX_BITS override the file.
inline void apply_env_overrides(PipelineConfig& c) {
  if (const char* v = std::getenv("PILLAI_INITIAL_BITS"))
    c.policy.initial_bits = detail::parse_long("PILLAI_INITIAL_BITS", v);
  if (const char* v = std::getenv("PILLAI_MAX_BITS")) c.policy.max_bits = detail::parse_long("PILLAI_MAX_BITS", v);
  if (c.policy.initial_bits < 2 || c.policy.max_bits < 2)
    throw Error(ErrorKind::ConfigError, "precision bits must be >= 2");
  if (c.policy.initial_bits > c.policy.max_bits) c.policy.initial_bits = c.policy.max_bits;
}

/// The Padovan / base-3 configuration the published argument uses.
inline const char* padovan_config_text() {
  return R"(# Padovan sequence against powers of 3
recurrence.name = padovan
recurrence.order = 3
recurrence.coefficients = 0, 1, 1
recurrence.initial = 0, 1, 1
base = 3

search.nmax = 500
search.mmax = 200
search.convention = theorem

precision.initial_bits = 192
precision.max_bits = 65536
mode = faithful

# a = alpha(alpha+1)/(3alpha^2-1)
binet.a_window = 0.72, 0.73
binet.a_minpoly = 23, -23, 6, -1
binet.a_numerator = 0, 1, 1
binet.a_denominator = -1, 0, 3

reduction.M = 2e46
reduction.extra_convergents = 16

# exponent constants of the five inequalities, alpha/3 powers as printed
presets.exponents = 5, 1, 1, 5, 4
presets.A.gamma_alpha = 36
presets.A.gamma_base = 9
presets.A.gamma_neg_alpha = 64
presets.A.gamma_neg_base = 15
presets.A.gamma1 = 9
presets.A.gamma2 = 106
presets.A.gamma3 = 116

# printed constants, compared against the certified ones
presets.paper.lambda = 7.97e12
presets.paper.case1 = 6.40e25
presets.paper.case2 = 1.92e26
presets.paper.lambda3_a1 = 3.86e26
presets.paper.K = 3.10e39
presets.paper.N = 2e46
presets.paper.bound_gamma_n = 416
presets.paper.bound_gamma_m = 105
presets.paper.bound_gamma1 = 110
presets.paper.bound_gamma2 = 464
presets.paper.bound_gamma3 = 458
presets.paper.search_ceiling = 500
)";
}

inline const char* fibonacci_config_text() {
  return R"(# Fibonacci sequence against powers of 3
recurrence.name = fibonacci
recurrence.order = 2
recurrence.coefficients = 1, 1
recurrence.initial = 0, 1
base = 3

search.nmax = 500
search.mmax = 220
search.convention = stated
search.nmin = 2

precision.initial_bits = 192
precision.max_bits = 65536
mode = faithful

# a = 1/sqrt(5) = 1/(2 alpha - 1)
binet.a_minpoly = 5, 0, -1
binet.a_numerator = 1
binet.a_denominator = -1, 2

reduction.M = 1e44
reduction.extra_convergents = 16
)";
}

}  // namespace pillai
