#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pillai/cfrac.hpp"
#include "pillai/error.hpp"
#include "pillai/heights.hpp"
#include "pillai/pipeline/chain.hpp"
#include "pillai/pipeline/config.hpp"
#include "pillai/pipeline/context.hpp"
#include "pillai/search.hpp"
#include "pillai/sequence.hpp"

namespace pillai {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCertificateSchema = "pillai-certificate/1";
inline constexpr int kCertificateDigits = 30;

inline const std::vector<std::string>& required_stages() {
  static const std::vector<std::string> names = {"search",           "constants",        "absolute_bound",
                                                 "reduction_gamma",  "reduction_gamma1", "reduction_gamma2",
                                                 "reduction_gamma3", "conclusion"};
  return names;
}

/// Writes a ball as a decimal interval and hands back the re-parsed ball, so
/// every later step consumes exactly what the certificate shows.
inline BallReal record_interval(Json& obj, const std::string& name, const BallReal& x, mpfr_prec_t bits) {
  const std::string lo = x.lower_decimal(kCertificateDigits), hi = x.upper_decimal(kCertificateDigits);
  obj[name] = Json{{"lo", lo}, {"hi", hi}};
  return BallReal::decimal(lo, hi, bits);
}

inline BallReal read_interval(const Json& j, mpfr_prec_t bits) {
  return BallReal::decimal(j.at("lo").get<std::string>(), j.at("hi").get<std::string>(), bits);
}

inline Json interval_json(const BallReal& x) {
  return Json{{"lo", x.lower_decimal(kCertificateDigits)}, {"hi", x.upper_decimal(kCertificateDigits)}};
}

/// Precision the recorded chain is computed at.
inline mpfr_prec_t chain_bits(const PrecisionPolicy& p) { return std::min<mpfr_prec_t>(256, p.max_bits); }

namespace detail {

inline Json stage(const std::string& name) {
  return Json{{"name", name},
              {"inputs", Json::object()},
              {"certified_constants", Json::object()},
              {"paper_constants", Json::object()},
              {"checks", Json::array()},
              {"conclusion", Json::object()}};
}

inline void add_check(Json& st, const std::string& name, bool holds, bool binding, const std::string& detail_text = "") {
  Json c{{"name", name}, {"holds", holds}, {"binding", binding}};
  if (!detail_text.empty()) c["detail"] = detail_text;
  st["checks"].push_back(std::move(c));
}

inline Json reps_json(const std::vector<Representation>& reps) {
  Json a = Json::array();
  for (const auto& r : reps) a.push_back(Json::array({r.n, r.m}));
  return a;
}

inline Json c_set_json(const SolutionTable& t) {
  Json out = Json::array();
  for (const auto& [c, reps] : multi_represented(t)) out.push_back(Json{{"c", c.get_str()}, {"reps", reps_json(reps)}});
  return out;
}

inline bool is_canonical_padovan(const PipelineConfig& c) {
  return c.recurrence.same_recurrence(RecurrenceSpec::padovan()) && c.base == 3;
}

inline std::optional<std::array<long, 5>> preset_exponents(const PipelineConfig& c) {
  auto e = c.preset("exponents");
  if (!e) return std::nullopt;
  const auto parts = split_list(*e);
  std::array<long, 5> out{};
  for (std::size_t i = 0; i < 5; ++i) out[i] = parse_long("presets.exponents", parts[i]);
  return out;
}

inline std::optional<BallReal> preset_ball(const PipelineConfig& c, const std::string& key, mpfr_prec_t bits) {
  auto v = c.preset(key);
  if (!v) return std::nullopt;
  return BallReal::decimal(*v, bits);
}

}  // namespace detail

/// State handed from stage to stage. Every ball here was read back from the
/// certificate text.
struct ChainState {
  mpfr_prec_t bits = 256;
  int offset = 0;
  long k0 = 0;
  int D = 3;
  BallReal alpha, beta_abs, a, b_abs, rho0, log_alpha, log_base, h_a_D, g;
  ExponentOffsets offsets;
  ChainValues chain;
  long gamma_n = 0, gamma_m = 0;  // round 1: k <= gamma_n or l <= gamma_m
  long gamma1_m = 0;              // case 1: l <= gamma1_m
  long gamma2_n = 0;              // case 2: k <= gamma2_n
  long final_n = 0;               // analytic index bound
};

struct RunOptions {
  unsigned threads = 1;
};

namespace detail {

inline Json stage_search(const PipelineConfig& cfg, const NumberContext& ctx, const ChainState& s) {
  Json st = stage("search");
  const SearchConfig sc = cfg.search_config();
  st["inputs"] = Json{{"nmax", cfg.nmax},           {"mmax", cfg.mmax},   {"n_min", sc.n_min},
                      {"m_min", sc.m_min},           {"base", cfg.base.get_str()},
                      {"convention", cfg.convention}, {"dedup", "skip n when U_n = U_{n+1}"}};
  const SolutionTable table = sc.n_max >= sc.n_min ? enumerate(cfg.recurrence, sc) : SolutionTable{sc, {}};
  st["conclusion"]["multi_represented"] = c_set_json(table);

  // the other preset, for the convention audit
  const bool primary_theorem = cfg.convention == "theorem";
  SearchConfig other = primary_theorem ? SearchConfig::stated(cfg.nmax, cfg.mmax) : SearchConfig::theorem(cfg.nmax, cfg.mmax);
  other.base = cfg.base;
  if (other.n_max >= other.n_min) {
    const SolutionTable t2 = enumerate(cfg.recurrence, other);
    st["conclusion"][primary_theorem ? "stated_convention" : "theorem_convention"] = c_set_json(t2);
    const SolutionTable& stated = primary_theorem ? t2 : table;
    const SolutionTable& theorem = primary_theorem ? table : t2;
    Json extras = Json::array();
    const auto th = multi_represented(theorem);
    for (const auto& [c, reps] : multi_represented(stated)) {
      bool found = std::any_of(th.begin(), th.end(), [&](const auto& e) { return e.first == c; });
      if (!found) extras.push_back(c.get_str());
    }
    st["conclusion"]["stated_extras"] = extras;
  }

  if (is_canonical_padovan(cfg)) {
    const DiffReport printed = diff_against_claim(table, published_claim());
    Json mism = Json::array();
    for (const auto& m : printed.index_mismatches) {
      Json claimed = Json::array(), found = Json::array();
      for (const auto& [n, mm] : m.claimed_not_found) claimed.push_back(Json::array({n, mm}));
      for (const auto& [n, mm] : m.found_not_claimed) found.push_back(Json::array({n, mm}));
      mism.push_back(Json{{"c", m.c.get_str()}, {"printed_not_verified", claimed}, {"verified_not_printed", found}});
    }
    st["conclusion"]["printed_list_index_mismatches"] = mism;
    const auto fc = multi_represented(table);
    Json expected = Json::array({"-6", "0", "1", "22", "87"});
    Json got = Json::array();
    for (const auto& [c, reps] : fc) got.push_back(c.get_str());
    add_check(st, "c-set equals {-6, 0, 1, 22, 87}", got == expected, cfg.convention == "theorem");
  }

  // m reachable when the larger index stays below the search ceiling
  const auto u = terms(cfg.recurrence, static_cast<std::size_t>(cfg.nmax + 1));
  const long m_implied = implied_m(u.back(), cfg.base);
  st["conclusion"]["m_implied_by_n_max"] = m_implied;
  // base^m < U_n base/(base - 1) < alpha^n base/(base - 1), so m log base is about n log alpha
  const auto& e = ctx.at(s.bits);
  record_interval(st["certified_constants"], "log_base_over_log_alpha", e.log_base / e.log_alpha, s.bits);
  st["conclusion"]["covered_n"] = cfg.nmax;
  st["conclusion"]["covered_m"] = cfg.mmax;
  add_check(st, "m_implied_by_n_max <= mmax", m_implied <= cfg.mmax, true);
  return st;
}

inline Json stage_constants(const PipelineConfig& cfg, const NumberContext& ctx, ChainState& s) {
  Json st = stage("constants");
  const mpfr_prec_t bits = s.bits;
  const auto& e = with_refinement(
      [&](mpfr_prec_t b) -> std::optional<const NumberContext::Entry*> {
        try {
          return &ctx.at(b);
        } catch (const Error& err) {
          if (err.kind() == ErrorKind::PrecisionExhausted) return std::nullopt;
          throw;
        }
      },
      cfg.policy.starting_at_least(bits), "base constants");
  Json& cc = st["certified_constants"];
  const int order = cfg.recurrence.order;
  s.offset = e->binet.convention_offset;
  s.D = order;
  s.k0 = cfg.nmax + 1 - s.offset;
  st["inputs"] = Json{{"bits", bits}, {"index_offset", s.offset}, {"D", s.D}, {"k0", s.k0}, {"mode", to_string(cfg.mode)}};

  s.alpha = record_interval(cc, "alpha", e->roots.alpha, bits);
  s.beta_abs = record_interval(cc, "beta_abs", e->roots.beta_abs, bits);
  s.a = record_interval(cc, "a", e->binet.a, bits);
  s.b_abs = record_interval(cc, "b_abs", e->binet.b_abs(), bits);
  s.log_alpha = record_interval(cc, "log_alpha", e->log_alpha, bits);
  s.log_base = record_interval(cc, "log_base", e->log_base, bits);
  s.rho0 = record_interval(cc, "rho0", s.b_abs * (order - 1), bits);
  record_interval(cc, "log_base_over_log_alpha", s.log_base / s.log_alpha, bits);

  // height of a from its minimal polynomial; conjugates a, b (and conj b)
  if (static_cast<int>(cfg.a_minpoly.size()) - 1 != order)
    throw Error(ErrorKind::ConfigError, "binet.a_minpoly must have degree equal to the recurrence order");
  AlgebraicNumberDesc desc{cfg.a_minpoly, {}};
  desc.conjugate_abs.push_back(s.a);
  for (int i = 1; i < order; ++i) desc.conjugate_abs.push_back(s.b_abs);
  const BallReal h = record_interval(cc, "h_a", height_from_minpoly(desc, bits), bits);
  s.h_a_D = record_interval(cc, "h_a_times_D", h * s.D, bits);

  // minimal polynomial sanity: vanishes at a (ball) and exactly when a closed form is given
  BallReal at_a = BallReal::exact(0, bits);
  for (const auto& c : cfg.a_minpoly) at_a = at_a * e->binet.a + BallReal::exact(c, bits);
  add_check(st, "minpoly(a) encloses 0", at_a.contains(0L), true);
  if (!cfg.a_numerator.empty()) {
    const auto charp = detail::char_poly(cfg.recurrence);
    const bool exact = minpoly_vanishes(cfg.a_minpoly, cfg.a_numerator, cfg.a_denominator, charp);
    auto eval = [&](const std::vector<mpz_class>& p) {
      BallReal acc = BallReal::exact(0, bits);
      for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * e->roots.alpha + BallReal::exact(*it, bits);
      return acc;
    };
    const BallReal closed = eval(cfg.a_numerator) / eval(cfg.a_denominator);
    add_check(st, "minpoly(num(alpha)/den(alpha)) = 0 exactly", exact, true);
    add_check(st, "a = num(alpha)/den(alpha)", closed.overlaps(e->binet.a), true);
  }

  // magnitude facts used by the nonvanishing arguments
  add_check(st, "|beta| < 1", certainly_lt(s.beta_abs, BallReal::exact(1, bits)), true);
  add_check(st, "rho0 = (order-1)|b| < 1", certainly_lt(s.rho0, BallReal::exact(1, bits)), true);

  // U nondecreasing: nonnegative coefficients and a nondecreasing first window
  bool monotone = std::all_of(cfg.recurrence.coefficients.begin(), cfg.recurrence.coefficients.end(),
                              [](const mpz_class& c) { return c >= 0; });
  const auto first = terms(cfg.recurrence, static_cast<std::size_t>(order + 1));
  for (std::size_t i = 1; i < first.size(); ++i) monotone = monotone && first[i - 1] <= first[i];
  add_check(st, "U nondecreasing", monotone, true);

  s.g = record_interval(cc, "g", strict_growth_gap(s.a, s.alpha, s.beta_abs, s.rho0, s.k0), bits);
  add_check(st, "g > 0", certified_sign(s.g) == Sign::Positive, true);

  const ExponentOffsets strict = strict_offsets(s.a, s.rho0, s.g);
  const auto printed = preset_exponents(cfg);
  const bool use_printed = cfg.mode == Mode::Faithful && printed.has_value();
  st["inputs"]["exponent_source"] = use_printed ? "printed" : "derived";
  if (printed) {
    Json arr = Json::array();
    for (long x : *printed) arr.push_back(x);
    st["paper_constants"]["exponents"] = arr;
  }
  // strict offsets in units of the base each inequality uses
  Json& eq = st["conclusion"]["derived_exponents"];
  eq["gamma_alpha"] = interval_json(strict.gamma_alpha / s.log_alpha);
  eq["gamma_base"] = interval_json(strict.gamma_base / s.log_base);
  eq["case1"] = interval_json(strict.case1 / s.log_base);
  eq["case2"] = interval_json(strict.case2 / s.log_alpha);
  eq["lambda3"] = interval_json(strict.lambda3 / s.log_alpha);

  const ExponentOffsets chosen = use_printed ? faithful_offsets(*printed, s.log_alpha, s.log_base) : strict;
  Json& oc = cc;
  s.offsets.gamma_alpha = record_interval(oc, "L_gamma_alpha", chosen.gamma_alpha, bits);
  s.offsets.gamma_base = record_interval(oc, "L_gamma_base", chosen.gamma_base, bits);
  s.offsets.case1 = record_interval(oc, "L_case1", chosen.case1, bits);
  s.offsets.case2 = record_interval(oc, "L_case2", chosen.case2, bits);
  s.offsets.lambda3 = record_interval(oc, "L_lambda3", chosen.lambda3, bits);
  if (use_printed) {
    const bool covers = certainly_le(strict.gamma_alpha, chosen.gamma_alpha) &&
                        certainly_le(strict.gamma_base, chosen.gamma_base) &&
                        certainly_le(strict.case1, chosen.case1) && certainly_le(strict.case2, chosen.case2) &&
                        certainly_le(strict.lambda3, chosen.lambda3);
    add_check(st, "printed exponents dominate the derived ones", covers, false,
              "informational; strict mode uses the derived offsets");
  }
  return st;
}

inline Json stage_absolute_bound(const PipelineConfig& cfg, ChainState& s) {
  Json st = stage("absolute_bound");
  const mpfr_prec_t bits = s.bits;
  st["inputs"] = Json{{"t", 3}, {"D", s.D}, {"B", "n"}, {"M", cfg.M.get_str()}};
  const ChainInputs in{s.log_alpha, s.log_base, s.h_a_D, s.D, s.offsets};
  const ChainValues v = compute_chain(in);
  Json& cc = st["certified_constants"];
  s.chain.lambda = record_interval(cc, "lambda", v.lambda, bits);
  s.chain.c_min = record_interval(cc, "c_min", v.c_min, bits);
  s.chain.lambda1_a1 = record_interval(cc, "lambda1_a1", v.lambda1_a1, bits);
  s.chain.lambda1 = record_interval(cc, "lambda1", v.lambda1, bits);
  s.chain.case1 = record_interval(cc, "case1", v.case1, bits);
  s.chain.lambda2_a1 = record_interval(cc, "lambda2_a1", v.lambda2_a1, bits);
  s.chain.lambda2 = record_interval(cc, "lambda2", v.lambda2, bits);
  s.chain.case2 = record_interval(cc, "case2", v.case2, bits);
  s.chain.lambda3_a1 = record_interval(cc, "lambda3_a1", v.lambda3_a1, bits);
  s.chain.lambda3 = record_interval(cc, "lambda3", v.lambda3, bits);
  s.chain.K = record_interval(cc, "K", v.K, bits);
  s.chain.N_max = record_interval(cc, "N_max", v.N_max, bits);

  const bool binding = cfg.mode == Mode::Faithful;
  auto compare_le = [&](const std::string& key, const BallReal& ours, const std::string& label) {
    auto paper = preset_ball(cfg, "paper." + key, bits);
    if (!paper) return;
    st["paper_constants"][key] = *cfg.preset("paper." + key);
    add_check(st, label + " <= printed", certainly_le(ours, *paper), binding);
  };
  if (auto paper = preset_ball(cfg, "paper.lambda", bits)) {
    st["paper_constants"]["lambda"] = *cfg.preset("paper.lambda");
    const BallReal ratio = s.chain.lambda / *paper;
    record_interval(st["conclusion"], "lambda_over_printed", ratio, bits);
    const bool within = certainly_le(BallReal::rational(mpq_class(49, 50), bits), ratio) &&
                        certainly_le(ratio, BallReal::rational(mpq_class(51, 50), bits));
    add_check(st, "lambda within 2% of printed", within, binding);
  }
  compare_le("case1", s.chain.case1, "case1");
  compare_le("case2", s.chain.case2, "case2");
  compare_le("lambda3_a1", s.chain.lambda3_a1, "lambda3_a1");
  compare_le("K", s.chain.K, "K");
  compare_le("N", s.chain.N_max, "N_max");
  add_check(st, "N_max <= M", certainly_le(s.chain.N_max, BallReal::exact(cfg.M, bits)), true);
  st["conclusion"]["N_max_upper"] = s.chain.N_max.upper_decimal(kCertificateDigits);
  return st;
}

struct RoundPair {
  std::string label;  // "alpha" or "base"
  BallReal offset;
  bool B_is_alpha = true;
  std::string preset_key;
};

/// A used by a reduction: the printed preset when it covers the derived
/// value (faithful mode), else the derived value.
inline BallReal choose_A(const PipelineConfig& cfg, const BallReal& derived, const std::string& preset_key,
                         mpfr_prec_t bits, Json& rec) {
  rec["A_derived"] = interval_json(derived);
  auto preset = preset_key.empty() ? std::nullopt : preset_ball(cfg, preset_key, bits);
  if (preset) rec["A_printed"] = *cfg.preset(preset_key);
  if (preset && cfg.mode == Mode::Faithful) {
    const bool covers = certainly_le(derived, *preset);
    rec["A_printed_covers_derived"] = covers;
    if (covers) {
      rec["A_source"] = "printed";
      return record_interval(rec, "A", *preset, bits);
    }
  }
  rec["A_source"] = "derived";
  return record_interval(rec, "A", derived, bits);
}

inline Json outcome_json(const ReductionOutcome& o, const BallReal& A, const BallReal& B, mpfr_prec_t bits, long& max_w) {
  Json j;
  j["convergent_index"] = o.convergent_index;
  j["q"] = o.q.get_str();
  const BallReal eps = record_interval(j, "epsilon", o.epsilon, bits);
  const BallReal w = record_interval(j, "w", reduction_w(A, o.q, eps, B), bits);
  max_w = reduction_max_exponent(w);
  j["max_w"] = max_w;
  return j;
}

inline Json stage_gamma(const PipelineConfig& cfg, const NumberContext& ctx, ChainState& s) {
  Json st = stage("reduction_gamma");
  const mpfr_prec_t bits = s.bits;
  st["inputs"] = Json{{"M", cfg.M.get_str()}, {"extra_convergents", cfg.extra_convergents}};
  ReductionOptions opt;
  opt.extra_convergents = cfg.extra_convergents;
  opt.policy = cfg.policy;

  struct Orientation {
    std::string name;
    RealProvider tau;
    RealProvider mu;
    BallReal log_divisor;
    std::string preset_alpha, preset_base;
  };
  const std::vector<Orientation> orientations = {
      {"positive", ctx.tau(), [&ctx](mpfr_prec_t b) { const auto& e = ctx.at(b); return e.log_a / e.log_base; },
       s.log_base, "A.gamma_alpha", "A.gamma_base"},
      {"negative", ctx.tau_reciprocal(), [&ctx](mpfr_prec_t b) { const auto& e = ctx.at(b); return -e.log_a / e.log_alpha; },
       s.log_alpha, "A.gamma_neg_alpha", "A.gamma_neg_base"}};

  long best_n = -1, best_m = -1;
  Json list = Json::array();
  for (const auto& o : orientations) {
    Json oj{{"orientation", o.name}};
    for (const bool is_alpha : {true, false}) {
      Json pj;
      const BallReal& offset = is_alpha ? s.offsets.gamma_alpha : s.offsets.gamma_base;
      const BallReal& logB = is_alpha ? s.log_alpha : s.log_base;
      const BallReal B = is_alpha ? s.alpha : BallReal::exact(cfg.base, bits);
      pj["B"] = is_alpha ? "alpha" : cfg.base.get_str();
      const BallReal A = choose_A(cfg, derived_A(offset, o.log_divisor), is_alpha ? o.preset_alpha : o.preset_base, bits, pj);
      const ReductionOutcome r = dp_reduce({o.tau, o.mu, A, B, cfg.M}, opt);
      long max_w = 0;
      pj["outcome"] = outcome_json(r, A, B, bits, max_w);
      add_check(st, o.name + "/" + pj["B"].get<std::string>() + ": q > 6M", r.q > 6 * cfg.M, true);
      const long small = small_gap_limit(offset, logB);
      pj["small_gap_limit"] = small;
      const long bound = std::max(max_w, small);
      pj["bound"] = bound;
      long& best = is_alpha ? best_n : best_m;
      best = best < 0 ? bound : std::min(best, bound);
      oj[is_alpha ? "alpha" : "base"] = pj;
    }
    list.push_back(oj);
  }
  st["certified_constants"]["orientations"] = list;
  s.gamma_n = best_n;
  s.gamma_m = best_m;
  st["conclusion"] = Json{{"k_bound", best_n}, {"l_bound", best_m}, {"statement", "k <= k_bound or l <= l_bound"}};
  const bool binding = cfg.mode == Mode::Faithful;
  if (auto p = cfg.preset("paper.bound_gamma_n")) {
    st["paper_constants"]["k_bound"] = *p;
    add_check(st, "k_bound <= printed", best_n <= parse_long("paper.bound_gamma_n", *p), binding);
  }
  if (auto p = cfg.preset("paper.bound_gamma_m")) {
    st["paper_constants"]["l_bound"] = *p;
    add_check(st, "l_bound <= printed", best_m <= parse_long("paper.bound_gamma_m", *p), binding);
  }
  return st;
}

template <class Key>
inline Json family_json(const FamilyOutcome<Key>& f, const BallReal& A, const BallReal& B, mpfr_prec_t bits,
                        long& max_w, const std::function<Json(const Key&)>& key_json) {
  Json j;
  j["count"] = f.keys.size();
  j["first_convergent"] = f.first_convergent;
  // the main group shares q; its smallest epsilon bounds every w in it
  bool have = false;
  BallReal main_min;
  mpz_class q;
  Json fallbacks = Json::array();
  max_w = -1;
  for (std::size_t i = 0; i < f.keys.size(); ++i) {
    const auto& r = f.per_key[i];
    if (!r) continue;
    if (r->convergent_index == static_cast<long>(f.first_convergent)) {
      q = r->q;
      if (!have || cmp(r->epsilon.lower(), main_min.lower()) < 0) main_min = r->epsilon;
      have = true;
    } else {
      long w = 0;
      Json fj = outcome_json(*r, A, B, bits, w);
      fj["key"] = key_json(f.keys[i]);
      max_w = std::max(max_w, w);
      fallbacks.push_back(std::move(fj));
    }
  }
  if (have) {
    j["q"] = q.get_str();
    const BallReal eps = record_interval(j, "min_epsilon", main_min, bits);
    const BallReal w = record_interval(j, "w", reduction_w(A, q, eps, B), bits);
    max_w = std::max(max_w, reduction_max_exponent(w));
  }
  j["fallbacks"] = fallbacks;
  Json exc = Json::array();
  for (const auto& k : f.exceptional) exc.push_back(key_json(k));
  j["exceptional"] = exc;
  j["max_w"] = max_w;
  return j;
}

inline ReductionOptions reduction_options(const PipelineConfig& cfg) {
  ReductionOptions opt;
  opt.extra_convergents = cfg.extra_convergents;
  opt.policy = cfg.policy;
  return opt;
}

inline Json stage_gamma1(const PipelineConfig& cfg, const NumberContext& ctx, ChainState& s, unsigned threads) {
  Json st = stage("reduction_gamma1");
  const mpfr_prec_t bits = s.bits;
  st["inputs"] = Json{{"keys", Json{{"k", Json::array({1, s.gamma_n})}}}, {"B", cfg.base.get_str()}};
  const BallReal B = BallReal::exact(cfg.base, bits);
  Json& cc = st["certified_constants"];
  const BallReal A = choose_A(cfg, derived_A(s.offsets.case1, s.log_base), "A.gamma1", bits, cc);
  auto mu = [&ctx](long k, mpfr_prec_t b) {
    const auto& e = ctx.at(b);
    return (e.log_a + ctx.log_alpha_pow_minus_one(k, b)) / e.log_base;
  };
  const auto f = family_reduce(ctx.tau(), mu, index_range(1, s.gamma_n), A, B, cfg.M, reduction_options(cfg), threads);
  long max_w = 0;
  cc["family"] = family_json<long>(f, A, B, bits, max_w, [](const long& k) { return Json(k); });
  add_check(st, "no exceptional keys", f.exceptional.empty(), true);
  const long small = small_gap_limit(s.offsets.case1, s.log_base);
  s.gamma1_m = std::max(max_w, small);
  st["conclusion"] = Json{{"l_bound", s.gamma1_m}, {"small_gap_limit", small}, {"statement", "case 1: l <= l_bound"}};
  if (auto p = cfg.preset("paper.bound_gamma1")) {
    st["paper_constants"]["l_bound"] = *p;
    add_check(st, "l_bound <= printed", s.gamma1_m <= parse_long("paper.bound_gamma1", *p), cfg.mode == Mode::Faithful);
  }
  return st;
}

inline Json stage_gamma2(const PipelineConfig& cfg, const NumberContext& ctx, ChainState& s, unsigned threads) {
  Json st = stage("reduction_gamma2");
  const mpfr_prec_t bits = s.bits;
  st["inputs"] = Json{{"keys", Json{{"l", Json::array({1, s.gamma_m})}}}, {"B", "alpha"}};
  Json& cc = st["certified_constants"];
  const BallReal A = choose_A(cfg, derived_A(s.offsets.case2, s.log_base), "A.gamma2", bits, cc);
  auto mu = [&ctx](long l, mpfr_prec_t b) {
    const auto& e = ctx.at(b);
    return (e.log_a - ctx.log_base_pow_minus_one(l, b)) / e.log_base;
  };
  const auto f = family_reduce(ctx.tau(), mu, index_range(1, s.gamma_m), A, s.alpha, cfg.M, reduction_options(cfg), threads);
  long max_w = 0;
  cc["family"] = family_json<long>(f, A, s.alpha, bits, max_w, [](const long& l) { return Json(l); });
  add_check(st, "no exceptional keys", f.exceptional.empty(), true);
  const long small = small_gap_limit(s.offsets.case2, s.log_alpha);
  s.gamma2_n = std::max(max_w, small);
  st["conclusion"] = Json{{"k_bound", s.gamma2_n}, {"small_gap_limit", small}, {"statement", "case 2: k <= k_bound"}};
  if (auto p = cfg.preset("paper.bound_gamma2")) {
    st["paper_constants"]["k_bound"] = *p;
    add_check(st, "k_bound <= printed", s.gamma2_n <= parse_long("paper.bound_gamma2", *p), cfg.mode == Mode::Faithful);
  }
  return st;
}

inline Json stage_gamma3(const PipelineConfig& cfg, const NumberContext& ctx, ChainState& s, unsigned threads) {
  Json st = stage("reduction_gamma3");
  const mpfr_prec_t bits = s.bits;
  const long k_max = std::max(s.gamma_n, s.gamma2_n);
  const long l_max = std::max(s.gamma_m, s.gamma1_m);
  st["inputs"] = Json{{"keys", Json{{"k", Json::array({1, k_max})}, {"l", Json::array({1, l_max})}}}, {"B", "alpha"}};
  Json& cc = st["certified_constants"];
  const BallReal A = choose_A(cfg, derived_A(s.offsets.lambda3, s.log_base), "A.gamma3", bits, cc);
  using Key = std::pair<long, long>;
  std::vector<Key> keys;
  for (long k = 1; k <= k_max; ++k)
    for (long l = 1; l <= l_max; ++l) keys.emplace_back(k, l);
  auto mu = [&ctx](const Key& kl, mpfr_prec_t b) {
    const auto& e = ctx.at(b);
    return (e.log_a + ctx.log_alpha_pow_minus_one(kl.first, b) - ctx.log_base_pow_minus_one(kl.second, b)) / e.log_base;
  };
  const auto f = family_reduce(ctx.tau(), mu, keys, A, s.alpha, cfg.M, reduction_options(cfg), threads);
  long max_w = 0;
  cc["family"] = family_json<Key>(f, A, s.alpha, bits, max_w,
                                  [](const Key& kl) { return Json::array({kl.first, kl.second}); });
  add_check(st, "no exceptional keys", f.exceptional.empty(), true);
  const long small = small_gap_limit(s.offsets.lambda3, s.log_alpha);
  s.final_n = std::max(max_w, small);
  st["conclusion"] = Json{{"n_bound", s.final_n}, {"small_gap_limit", small}, {"index", "analytic"}};
  if (auto p = cfg.preset("paper.bound_gamma3")) {
    st["paper_constants"]["n_bound"] = *p;
    add_check(st, "n_bound <= printed", s.final_n <= parse_long("paper.bound_gamma3", *p), cfg.mode == Mode::Faithful);
  }
  return st;
}

inline Json stage_conclusion(const PipelineConfig& cfg, const ChainState& s) {
  Json st = stage("conclusion");
  const long threshold_n = s.final_n + s.offset;
  const long threshold_m =
      implied_m(term(cfg.recurrence, static_cast<std::size_t>(std::max(threshold_n, 0L))), cfg.base);
  st["inputs"] = Json{{"analytic_bound", s.final_n}, {"index_offset", s.offset}};
  st["conclusion"] = Json{{"threshold_n", threshold_n}, {"threshold_m", threshold_m},
                          {"search_n", cfg.nmax},       {"search_m", cfg.mmax}};
  add_check(st, "threshold_n <= search nmax", threshold_n <= cfg.nmax, true);
  add_check(st, "threshold_m <= search mmax", threshold_m <= cfg.mmax, true);
  if (auto p = cfg.preset("paper.search_ceiling")) {
    st["paper_constants"]["search_ceiling"] = *p;
    add_check(st, "threshold_n < printed ceiling", threshold_n < parse_long("paper.search_ceiling", *p), true);
  }
  return st;
}

}  // namespace detail

inline Json assumed_hypotheses() {
  return Json::array({"Lambda, Lambda_1, Lambda_2, Lambda_3 are nonzero (Galois conjugation argument; magnitudes "
                      "checked in the constants stage)",
                      "A_i >= D h(gamma_i) >= |log gamma_i| for the real positive gamma_i used",
                      "gaps below small_gap_limit are covered by the family ranges, which start at 1",
                      "|y| < 2|e^y - 1| whenever |e^y - 1| < 1/2 (used to pass from Lambda to Gamma)"});
}

/// Runs every stage in order and assembles the certificate. Stage failures
/// are recorded and leave the certificate inconsistent.
inline Json run_all(const PipelineConfig& cfg, const RunOptions& opts = {}) {
  Json cert;
  cert["schema"] = kCertificateSchema;
  cert["config_digest"] = config_digest(cfg);
  Json cfg_json = Json::object();
  for (const auto& [k, v] : canonical_entries(cfg)) cfg_json[k] = v;
  cert["config"] = cfg_json;
  cert["stages"] = Json::array();
  cert["assumed_hypotheses"] = assumed_hypotheses();
  cert["errors"] = Json::array();

  ChainState s;
  s.bits = chain_bits(cfg.policy);
  const NumberContext ctx(cfg.recurrence, cfg.base, cfg.a_window);
  const unsigned threads = std::max(opts.threads, cfg.threads);

  // a failed check marks the certificate inconsistent; a thrown error also
  // stops the later stages, which would have no inputs
  bool ok = true, broken = false;
  auto run_stage = [&](const std::string& name, auto&& fn) {
    if (broken) return;
    try {
      Json st = fn();
      for (const auto& c : st["checks"]) {
        if (!c["binding"].get<bool>() || c["holds"].get<bool>()) continue;
        ok = false;
        const bool eps = c["name"] == "no exceptional keys";
        cert["errors"].push_back(Json{{"stage", name},
                                      {"kind", eps ? "EpsilonNeverPositive" : "SoundnessViolation"},
                                      {"message", "check failed: " + c["name"].get<std::string>()}});
      }
      cert["stages"].push_back(std::move(st));
    } catch (const Error& e) {
      ok = false;
      broken = true;
      cert["errors"].push_back(Json{{"stage", name}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}});
    }
  };
  run_stage("search", [&] { return detail::stage_search(cfg, ctx, s); });
  run_stage("constants", [&] { return detail::stage_constants(cfg, ctx, s); });
  run_stage("absolute_bound", [&] { return detail::stage_absolute_bound(cfg, s); });
  run_stage("reduction_gamma", [&] { return detail::stage_gamma(cfg, ctx, s); });
  run_stage("reduction_gamma1", [&] { return detail::stage_gamma1(cfg, ctx, s, threads); });
  run_stage("reduction_gamma2", [&] { return detail::stage_gamma2(cfg, ctx, s, threads); });
  run_stage("reduction_gamma3", [&] { return detail::stage_gamma3(cfg, ctx, s, threads); });
  run_stage("conclusion", [&] { return detail::stage_conclusion(cfg, s); });

  Json fin{{"threshold_n", nullptr}, {"threshold_m", nullptr}, {"consistent", false}};
  if (ok) {
    const Json& last = cert["stages"].back()["conclusion"];
    fin["threshold_n"] = last["threshold_n"];
    fin["threshold_m"] = last["threshold_m"];
    fin["consistent"] = true;
  }
  cert["final_conclusion"] = fin;
  return cert;
}

/// True when the certificate failed only for lack of precision.
inline bool precision_exhausted(const Json& cert) {
  for (const auto& e : cert["errors"])
    if (e["kind"] == "PrecisionExhausted") return true;
  return false;
}

}  // namespace pillai
