#pragma once

#include <string>
#include <vector>

#include "pillai/pipeline/run.hpp"

namespace pillai {

struct VerifyReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

namespace detail {

class Verifier {
 public:
  explicit Verifier(const Json& cert) : cert_(cert) {}

  VerifyReport run() {
    try {
      check_structure();
      if (!report_.ok()) return report_;
      check_config();
      if (!report_.ok()) return report_;
      check_search();
      check_base_stages();
      if (!report_.ok()) return report_;
      check_gamma();
      check_families();
      check_conclusion();
    } catch (const std::exception& e) {
      fail(std::string("malformed certificate: ") + e.what());
    }
    return report_;
  }

 private:
  void fail(const std::string& msg) { report_.failures.push_back(msg); }
  void expect(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
  }

  const Json& stage(const std::string& name) const { return *stages_.at(name); }

  void check_structure() {
    if (cert_.value("schema", "") != kCertificateSchema) fail("unknown schema");
    if (!cert_.contains("stages") || !cert_["stages"].is_array()) return fail("no stages");
    for (const auto& st : cert_["stages"]) stages_[st.at("name").get<std::string>()] = &st;
    const auto& names = required_stages();
    if (cert_["stages"].size() != names.size()) fail("stage count differs from the required list");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!stages_.count(names[i])) {
        fail("missing stage " + names[i]);
        continue;
      }
      if (i < cert_["stages"].size() && cert_["stages"][i].at("name") != names[i]) fail("stage order differs at " + names[i]);
    }
    if (!cert_.at("errors").empty()) fail("certificate records stage errors");
    for (const auto& st : cert_["stages"])
      for (const auto& c : st.at("checks"))
        if (c.at("binding").get<bool>() && !c.at("holds").get<bool>())
          fail(st.at("name").get<std::string>() + ": binding check fails: " + c.at("name").get<std::string>());
  }

  void check_config() {
    std::string text;
    for (const auto& [k, v] : cert_.at("config").items()) text += k + "=" + v.get<std::string>() + "\n";
    cfg_ = parse_config(text);
    expect(config_digest(cfg_) == cert_.at("config_digest").get<std::string>(), "config digest mismatch");
    expect(sha256_hex(text) == cert_.at("config_digest").get<std::string>(), "recorded config text does not hash to digest");
  }

  // recorded check value must equal the recomputed one
  void expect_check(const Json& st, const std::string& name, bool value) {
    for (const auto& c : st.at("checks"))
      if (c.at("name") == name) {
        expect(c.at("holds").get<bool>() == value, st.at("name").get<std::string>() + ": check '" + name + "' does not re-derive");
        return;
      }
    fail(st.at("name").get<std::string>() + ": check '" + name + "' missing");
  }

  void check_search() {
    const Json& st = stage("search");
    const Json& c = st.at("conclusion");
    expect(c.at("covered_n").get<long>() == cfg_.nmax && c.at("covered_m").get<long>() == cfg_.mmax,
           "search: coverage differs from config");
    const auto u = terms(cfg_.recurrence, static_cast<std::size_t>(cfg_.nmax + 1));
    const long m_implied = implied_m(u.back(), cfg_.base);
    expect(c.at("m_implied_by_n_max").get<long>() == m_implied, "search: implied m does not re-derive");
    expect_check(st, "m_implied_by_n_max <= mmax", m_implied <= cfg_.mmax);
  }

  // constants and the absolute bound are cheap and deterministic: regenerate and compare
  void check_base_stages() {
    ctx_.emplace(cfg_.recurrence, cfg_.base, cfg_.a_window);
    state_.bits = chain_bits(cfg_.policy);
    const Json& recorded_bits = stage("constants").at("inputs").at("bits");
    expect(recorded_bits.get<long>() == state_.bits, "constants: working precision differs from policy");
    const Json c = stage_constants(cfg_, *ctx_, state_);
    expect(c == stage("constants"), "constants: recorded intervals do not match recomputation");
    const Json a = stage_absolute_bound(cfg_, state_);
    expect(a == stage("absolute_bound"), "absolute_bound: recorded chain does not match recomputation");
  }

  const CFExpansion& tau_cf(bool reciprocal, std::size_t index) {
    auto& slot = reciprocal ? cf_recip_ : cf_;
    if (!slot || slot->quotients.size() <= index)
      slot = expand(reciprocal ? ctx_->tau_reciprocal() : ctx_->tau(), CFStop::terms(index + 1), cfg_.policy);
    return *slot;
  }

  /// Re-derives one reduction outcome from its recorded numbers; returns max_w.
  long check_outcome(const std::string& where, const Json& o, const BallReal& A, const BallReal& B, bool reciprocal) {
    const mpfr_prec_t bits = state_.bits;
    const mpz_class q(o.at("q").get<std::string>());
    expect(q > 6 * cfg_.M, where + ": q <= 6M");
    const long idx = o.at("convergent_index").get<long>();
    expect(convergent(tau_cf(reciprocal, static_cast<std::size_t>(idx)), idx).second == q,
           where + ": q is not the recorded convergent denominator");
    const BallReal eps = read_interval(o.at("epsilon"), bits);
    expect(certified_sign(eps) == Sign::Positive, where + ": epsilon not certified positive");
    return check_w(where, o, A, q, eps, B);
  }

  long check_w(const std::string& where, const Json& o, const BallReal& A, const mpz_class& q, const BallReal& eps,
               const BallReal& B) {
    const BallReal w = reduction_w(A, q, eps, B);
    const BallReal w_rec = read_interval(o.at("w"), state_.bits);
    expect(certainly_le(w.upper_ball(), w_rec.upper_ball()), where + ": w does not re-derive");
    const long max_w = reduction_max_exponent(w_rec);
    expect(o.at("max_w").get<long>() == max_w, where + ": max_w does not re-derive");
    return max_w;
  }

  BallReal check_A(const std::string& where, const Json& rec, const BallReal& offset, const BallReal& log_divisor,
                   const std::string& preset_key) {
    const BallReal derived = derived_A(offset, log_divisor);
    const BallReal used = read_interval(rec.at("A"), state_.bits);
    expect(certainly_le(derived.upper_ball(), used.upper_ball()), where + ": A below the derived value");
    const std::string source = rec.at("A_source").get<std::string>();
    if (source == "printed") {
      auto p = cfg_.preset(preset_key);
      expect(p && cfg_.mode == Mode::Faithful && certainly_le(used, BallReal::decimal(*p, state_.bits)) &&
                 certainly_le(BallReal::decimal(*p, state_.bits), used),
             where + ": printed A not in config");
    }
    return used;
  }

  void check_gamma() {
    const Json& st = stage("reduction_gamma");
    const auto& list = st.at("certified_constants").at("orientations");
    expect(list.size() == 2, "reduction_gamma: need both orientations");
    long best_n = -1, best_m = -1;
    for (const auto& oj : list) {
      const bool negative = oj.at("orientation") == "negative";
      const BallReal& log_div = negative ? state_.log_alpha : state_.log_base;
      for (const bool is_alpha : {true, false}) {
        const Json& pj = oj.at(is_alpha ? "alpha" : "base");
        const std::string where = "reduction_gamma/" + oj.at("orientation").get<std::string>() + "/" +
                                  pj.at("B").get<std::string>();
        const BallReal& offset = is_alpha ? state_.offsets.gamma_alpha : state_.offsets.gamma_base;
        const BallReal& logB = is_alpha ? state_.log_alpha : state_.log_base;
        const BallReal B = is_alpha ? state_.alpha : BallReal::exact(cfg_.base, state_.bits);
        const std::string key = std::string("A.gamma_") + (negative ? "neg_" : "") + (is_alpha ? "alpha" : "base");
        const BallReal A = check_A(where, pj, offset, log_div, key);
        const long max_w = check_outcome(where, pj.at("outcome"), A, B, negative);
        const long small = small_gap_limit(offset, logB);
        expect(pj.at("small_gap_limit").get<long>() == small, where + ": small-gap limit does not re-derive");
        const long bound = std::max(max_w, small);
        expect(pj.at("bound").get<long>() == bound, where + ": bound does not re-derive");
        long& best = is_alpha ? best_n : best_m;
        best = best < 0 ? bound : std::min(best, bound);
      }
    }
    expect(st.at("conclusion").at("k_bound").get<long>() == best_n, "reduction_gamma: k_bound does not re-derive");
    expect(st.at("conclusion").at("l_bound").get<long>() == best_m, "reduction_gamma: l_bound does not re-derive");
    state_.gamma_n = best_n;
    state_.gamma_m = best_m;
    if (auto p = cfg_.preset("paper.bound_gamma_n"))
      expect_check(st, "k_bound <= printed", best_n <= parse_long("", *p));
    if (auto p = cfg_.preset("paper.bound_gamma_m"))
      expect_check(st, "l_bound <= printed", best_m <= parse_long("", *p));
  }

  /// Re-checks a family record over the expected key count; returns max_w.
  long check_family(const std::string& where, const Json& f, std::size_t expected_count, const BallReal& A,
                    const BallReal& B) {
    expect(f.at("count").get<std::size_t>() == expected_count, where + ": key count differs from the cascade range");
    expect(f.at("exceptional").empty(), where + ": exceptional keys present");
    long max_w = -1;
    if (f.contains("q")) {
      const mpz_class q(f.at("q").get<std::string>());
      const long idx = f.at("first_convergent").get<long>();
      expect(q > 6 * cfg_.M, where + ": q <= 6M");
      expect(convergent(tau_cf(false, static_cast<std::size_t>(idx)), idx).second == q,
             where + ": q is not the recorded convergent denominator");
      const BallReal eps = read_interval(f.at("min_epsilon"), state_.bits);
      expect(certified_sign(eps) == Sign::Positive, where + ": min epsilon not certified positive");
      const BallReal w = reduction_w(A, q, eps, B);
      const BallReal w_rec = read_interval(f.at("w"), state_.bits);
      expect(certainly_le(w.upper_ball(), w_rec.upper_ball()), where + ": w does not re-derive");
      max_w = reduction_max_exponent(w_rec);
    }
    for (const auto& fb : f.at("fallbacks")) max_w = std::max(max_w, check_outcome(where + "/fallback", fb, A, B, false));
    expect(f.at("max_w").get<long>() == max_w, where + ": max_w does not re-derive");
    return max_w;
  }

  void check_families() {
    {
      const Json& st = stage("reduction_gamma1");
      const Json& cc = st.at("certified_constants");
      const BallReal B = BallReal::exact(cfg_.base, state_.bits);
      const BallReal A = check_A("reduction_gamma1", cc, state_.offsets.case1, state_.log_base, "A.gamma1");
      const long w = check_family("reduction_gamma1", cc.at("family"), count(1, state_.gamma_n), A, B);
      state_.gamma1_m = std::max(w, small_gap_limit(state_.offsets.case1, state_.log_base));
      expect(st.at("conclusion").at("l_bound").get<long>() == state_.gamma1_m, "reduction_gamma1: bound does not re-derive");
    }
    {
      const Json& st = stage("reduction_gamma2");
      const Json& cc = st.at("certified_constants");
      const BallReal A = check_A("reduction_gamma2", cc, state_.offsets.case2, state_.log_base, "A.gamma2");
      const long w = check_family("reduction_gamma2", cc.at("family"), count(1, state_.gamma_m), A, state_.alpha);
      state_.gamma2_n = std::max(w, small_gap_limit(state_.offsets.case2, state_.log_alpha));
      expect(st.at("conclusion").at("k_bound").get<long>() == state_.gamma2_n, "reduction_gamma2: bound does not re-derive");
    }
    {
      const Json& st = stage("reduction_gamma3");
      const Json& cc = st.at("certified_constants");
      const BallReal A = check_A("reduction_gamma3", cc, state_.offsets.lambda3, state_.log_base, "A.gamma3");
      const long k_max = std::max(state_.gamma_n, state_.gamma2_n);
      const long l_max = std::max(state_.gamma_m, state_.gamma1_m);
      const long w = check_family("reduction_gamma3", cc.at("family"), count(1, k_max) * count(1, l_max), A, state_.alpha);
      state_.final_n = std::max(w, small_gap_limit(state_.offsets.lambda3, state_.log_alpha));
      expect(st.at("conclusion").at("n_bound").get<long>() == state_.final_n, "reduction_gamma3: bound does not re-derive");
    }
  }

  static std::size_t count(long from, long to) { return to >= from ? static_cast<std::size_t>(to - from + 1) : 0; }

  void check_conclusion() {
    const Json& st = stage("conclusion");
    const long threshold_n = state_.final_n + state_.offset;
    const long threshold_m =
        implied_m(term(cfg_.recurrence, static_cast<std::size_t>(std::max(threshold_n, 0L))), cfg_.base);
    const Json& c = st.at("conclusion");
    expect(c.at("threshold_n").get<long>() == threshold_n, "conclusion: threshold_n does not re-derive");
    expect(c.at("threshold_m").get<long>() == threshold_m, "conclusion: threshold_m does not re-derive");
    const bool closes = threshold_n <= cfg_.nmax && threshold_m <= cfg_.mmax;
    expect_check(st, "threshold_n <= search nmax", threshold_n <= cfg_.nmax);
    expect_check(st, "threshold_m <= search mmax", threshold_m <= cfg_.mmax);
    const Json& fin = cert_.at("final_conclusion");
    expect(fin.at("consistent").get<bool>() == closes, "final_conclusion: consistent flag does not re-derive");
    expect(fin.at("consistent").get<bool>(), "certificate is not consistent");
    expect(fin.at("threshold_n") == threshold_n && fin.at("threshold_m") == threshold_m,
           "final_conclusion: thresholds differ from the conclusion stage");
  }

  const Json& cert_;
  VerifyReport report_;
  std::map<std::string, const Json*> stages_;
  PipelineConfig cfg_;
  std::optional<NumberContext> ctx_;
  ChainState state_;
  std::optional<CFExpansion> cf_, cf_recip_;
};

}  // namespace detail

/// Re-checks every stage from its recorded constants without re-running the
/// search or the reductions.
inline VerifyReport verify_report(const Json& cert) { return detail::Verifier(cert).run(); }

inline bool verify_certificate(const Json& cert) { return verify_report(cert).ok(); }

}  // namespace pillai
