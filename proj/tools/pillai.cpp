#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "pillai/pillai.hpp"

using namespace pillai;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;
constexpr int kPrecision = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::PrecisionExhausted: return kPrecision;
    case ErrorKind::InvalidArgument:
    case ErrorKind::ConfigError: return kUsage;
    default: return kFailure;
  }
}

PipelineConfig base_config(const std::string& path) {
  PipelineConfig cfg = path.empty() ? parse_config(padovan_config_text()) : load_config(path);
  apply_env_overrides(cfg);
  return cfg;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::ostringstream os;
  os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// search

struct SearchArgs {
  std::string config;
  long nmax = 500, mmax = 200;
  std::optional<long> nmin, mmin;
  std::string base;
  std::string convention = "theorem";
  std::string format = "table";
  std::string out;
  unsigned threads = 1;
};

int cmd_search(const SearchArgs& a) {
  PipelineConfig cfg = base_config(a.config);
  SearchConfig sc = a.convention == "theorem" ? SearchConfig::theorem(a.nmax, a.mmax) : SearchConfig::stated(a.nmax, a.mmax);
  if (!a.config.empty()) {
    cfg.nmax = a.nmax;
    cfg.mmax = a.mmax;
    cfg.convention = a.convention;
    sc = cfg.search_config();
  }
  if (!a.base.empty()) sc.base = detail::parse_integer("--base", a.base);
  if (a.nmin) sc.n_min = *a.nmin;
  if (a.mmin) sc.m_min = *a.mmin;
  if (sc.n_min < 0 || sc.m_min < 0 || sc.base < 2) throw UsageError("ranges must be non-negative and base >= 2");
  const bool empty = sc.n_max < sc.n_min || sc.m_max < sc.m_min;
  const SolutionTable table = empty ? SolutionTable{sc, {}} : enumerate(cfg.recurrence, sc, a.threads);

  std::ostringstream os;
  if (a.format == "json") os << search_json(table).dump(2) << '\n';
  else if (a.format == "csv") write_search_csv(os, table);
  else write_search_table(os, table);
  write_output(a.out, os.str());
  return kOk;
}

// cf

struct CfArgs {
  std::string config;
  std::string expr;
  std::optional<std::size_t> terms;
  std::string qmin;
  std::vector<long> convergents;
  long bits = 512;
  std::string format = "text";
};

/// `log(alpha)/log(INT)` or `log(INT)/log(alpha)`; returns the base and whether alpha is on top.
std::pair<mpz_class, bool> parse_expr(const std::string& expr) {
  static const std::regex re(R"(^\s*log\(\s*(alpha|[0-9]+)\s*\)\s*/\s*log\(\s*(alpha|[0-9]+)\s*\)\s*$)");
  std::smatch m;
  if (!std::regex_match(expr, m, re)) throw UsageError("expression must be log(alpha)/log(INT) or log(INT)/log(alpha)");
  const bool top_alpha = m[1] == "alpha", bottom_alpha = m[2] == "alpha";
  if (top_alpha == bottom_alpha)
    throw UsageError("exactly one side must be log(alpha); a ratio of integer logarithms is not supported");
  const mpz_class base(std::string(top_alpha ? m[2] : m[1]), 10);
  if (base < 2) throw UsageError("the integer must be >= 2");
  return {base, top_alpha};
}

int cmd_cf(const CfArgs& a) {
  if (!a.terms && a.qmin.empty()) throw UsageError("give --terms or --qmin");
  const auto [base, top_alpha] = parse_expr(a.expr);
  PipelineConfig cfg = base_config(a.config);
  PrecisionPolicy policy = cfg.policy;
  policy.initial_bits = std::min<mpfr_prec_t>(a.bits, policy.max_bits);
  const RecurrenceSpec spec = cfg.recurrence;
  RealProvider x = [spec, base = base, top_alpha = top_alpha](mpfr_prec_t b) {
    const BallReal la = log(characteristic_roots(spec, b).alpha);
    const BallReal lb = log(BallReal::exact(base, b));
    return top_alpha ? la / lb : lb / la;
  };
  std::size_t needed = a.terms.value_or(0);
  for (long k : a.convergents) {
    if (k < 0) throw UsageError("convergent index must be non-negative");
    needed = std::max(needed, static_cast<std::size_t>(k) + 1);
  }
  const CFStop stop = a.terms ? CFStop::terms(needed)
                              : CFStop::q_exceeds(detail::parse_integer("--qmin", a.qmin), needed);
  const CFExpansion e = expand(x, stop, policy);
  const BallReal value = x(e.source_precision);

  std::size_t shown = a.terms ? std::min(*a.terms, e.quotients.size()) : e.quotients.size();
  if (a.format == "json") {
    Json j;
    j["expr"] = a.expr;
    j["value"] = interval_json(value);
    j["precision_bits"] = e.source_precision;
    Json q = Json::array();
    for (std::size_t i = 0; i < shown; ++i) q.push_back(e.quotients[i].get_str());
    j["quotients"] = q;
    Json c = Json::array();
    for (long k : a.convergents) {
      const auto [p, qq] = convergent(e, k);
      c.push_back(Json{{"k", k}, {"p", p.get_str()}, {"q", qq.get_str()}});
    }
    j["convergents"] = c;
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::cout << "value in [" << value.lower_decimal(kCertificateDigits) << ", " << value.upper_decimal(kCertificateDigits)
            << "]\n";
  std::cout << "precision " << e.source_precision << " bits, " << e.quotients.size() << " certified quotients\n";
  std::cout << "quotients:";
  for (std::size_t i = 0; i < shown; ++i) std::cout << (i ? ", " : " ") << e.quotients[i].get_str();
  std::cout << '\n';
  for (long k : a.convergents) {
    const auto [p, q] = convergent(e, k);
    std::cout << "p_" << k << " = " << p.get_str() << "\nq_" << k << " = " << q.get_str() << '\n';
  }
  return kOk;
}

// certify / verify

struct CertifyArgs {
  std::string config;
  std::string out;
  std::string mode;
  unsigned threads = 1;
  bool timestamp = false;
};

int cmd_certify(const CertifyArgs& a) {
  PipelineConfig cfg = base_config(a.config);
  if (a.mode == "strict") cfg.mode = Mode::Strict;
  else if (a.mode == "faithful") cfg.mode = Mode::Faithful;
  Json cert = run_all(cfg, RunOptions{a.threads});
  if (a.timestamp) cert["generated_at"] = utc_now();
  write_output(a.out, cert.dump(1) + "\n");

  const Json& fin = cert["final_conclusion"];
  if (fin["consistent"].get<bool>()) {
    std::cerr << "consistent: n <= " << fin["threshold_n"] << ", m <= " << fin["threshold_m"] << " (search covers n <= "
              << cfg.nmax << ", m <= " << cfg.mmax << ")\n";
    return kOk;
  }
  for (const auto& e : cert["errors"])
    std::cerr << "error in " << e["stage"].get<std::string>() << ": "
              << e["message"].get<std::string>() << '\n';
  return precision_exhausted(cert) ? kPrecision : kFailure;
}

int cmd_verify(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  Json cert;
  try {
    cert = Json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "not valid JSON: " << e.what() << '\n';
    return kFailure;
  }
  const VerifyReport r = verify_report(cert);
  for (const auto& f : r.failures) std::cerr << "FAIL " << f << '\n';
  std::cout << (r.ok() ? "certificate verified\n" : "certificate rejected\n");
  return r.ok() ? kOk : kFailure;
}

// sequence

struct SequenceArgs {
  std::string config;
  std::string name;
  long from = 0;
  long count = 20;
};

int cmd_sequence(const SequenceArgs& a) {
  RecurrenceSpec spec = base_config(a.config).recurrence;
  if (!a.name.empty()) {
    if (a.name == "padovan") spec = RecurrenceSpec::padovan();
    else if (a.name == "fibonacci") spec = RecurrenceSpec::fibonacci();
    else if (a.name == "tribonacci") spec = RecurrenceSpec::tribonacci();
    else throw UsageError("unknown sequence " + a.name);
  }
  if (a.from < 0 || a.count < 0) throw UsageError("--from and --count must be non-negative");
  const auto u = terms(spec, static_cast<std::size_t>(a.from + a.count));
  for (long i = a.from; i < a.from + a.count; ++i) std::cout << i << '\t' << u[static_cast<std::size_t>(i)].get_str() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pillai-type equations U_n - b^m = c for linear recurrences"};
  app.require_subcommand(1);

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "brute-force the c with at least two representations");
  search->add_option("--config", sa.config, "config file (recurrence and base)");
  search->add_option("--nmax", sa.nmax, "largest n")->check(CLI::NonNegativeNumber);
  search->add_option("--mmax", sa.mmax, "largest m")->check(CLI::NonNegativeNumber);
  search->add_option("--nmin", sa.nmin, "smallest n (overrides the convention)");
  search->add_option("--mmin", sa.mmin, "smallest m (overrides the convention)");
  search->add_option("--base", sa.base, "base b");
  search->add_option("--convention", sa.convention, "index convention")->check(CLI::IsMember({"stated", "theorem"}));
  search->add_option("--format", sa.format, "output format")->check(CLI::IsMember({"json", "csv", "table"}));
  search->add_option("--out", sa.out, "output path (default stdout)");
  search->add_option("--threads", sa.threads, "worker threads")->check(CLI::PositiveNumber);

  CfArgs ca;
  auto* cf = app.add_subcommand("cf", "certified continued fraction of a logarithm ratio");
  cf->add_option("--config", ca.config, "config file (recurrence)");
  cf->add_option("--expr", ca.expr, "log(alpha)/log(INT) or log(INT)/log(alpha)")->required();
  cf->add_option("--terms", ca.terms, "number of quotients");
  cf->add_option("--qmin", ca.qmin, "expand until q exceeds this");
  cf->add_option("--convergent", ca.convergents, "print p_k and q_k (repeatable)");
  cf->add_option("--bits", ca.bits, "working precision")->check(CLI::Range(2L, 1L << 24));
  cf->add_option("--format", ca.format, "output format")->check(CLI::IsMember({"text", "json"}));

  CertifyArgs ka;
  auto* certify = app.add_subcommand("certify", "run the full proof pipeline and write a certificate");
  certify->add_option("--config", ka.config, "config file (default: built-in Padovan/base-3)");
  certify->add_option("--out", ka.out, "certificate path (default stdout)");
  certify->add_option("--mode", ka.mode, "exponent constants")->check(CLI::IsMember({"faithful", "strict"}));
  certify->add_option("--threads", ka.threads, "worker threads")->check(CLI::PositiveNumber);
  certify->add_flag("--timestamp", ka.timestamp, "add generated_at (not covered by the digest)");

  std::string cert_path;
  auto* verify = app.add_subcommand("verify", "re-check a certificate");
  verify->add_option("--cert", cert_path, "certificate path")->required();

  SequenceArgs qa;
  auto* sequence = app.add_subcommand("sequence", "print terms of the recurrence");
  sequence->add_option("--config", qa.config, "config file");
  sequence->add_option("--name", qa.name, "padovan, fibonacci or tribonacci");
  sequence->add_option("--from", qa.from, "first index");
  sequence->add_option("--count", qa.count, "number of terms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*search) return cmd_search(sa);
    if (*cf) return cmd_cf(ca);
    if (*certify) return cmd_certify(ka);
    if (*verify) return cmd_verify(cert_path);
    if (*sequence) return cmd_sequence(qa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
