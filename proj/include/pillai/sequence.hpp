#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pillai/error.hpp"
#include "pillai/rigor.hpp"

namespace pillai {

/// Integer linear recurrence U_{n+d} = c_1 U_{n+d-1} + ... + c_d U_n.
struct RecurrenceSpec {
  int order = 0;
  std::vector<mpz_class> coefficients;  // c_1..c_d, by lag
  std::vector<mpz_class> initial;       // U_0..U_{d-1}
  std::string name;

  void validate() const {
    if (order <= 0) throw Error(ErrorKind::InvalidArgument, "recurrence order must be positive");
    if (coefficients.size() != static_cast<std::size_t>(order) || initial.size() != static_cast<std::size_t>(order))
      throw Error(ErrorKind::InvalidArgument, "recurrence needs exactly `order` coefficients and initial values");
  }

  static RecurrenceSpec padovan() { return {3, {0, 1, 1}, {0, 1, 1}, "padovan"}; }
  static RecurrenceSpec fibonacci() { return {2, {1, 1}, {0, 1}, "fibonacci"}; }
  static RecurrenceSpec tribonacci() { return {3, {1, 1, 1}, {0, 0, 1}, "tribonacci"}; }

  bool same_recurrence(const RecurrenceSpec& o) const {
    return order == o.order && coefficients == o.coefficients && initial == o.initial;
  }
};

/// U_0 .. U_{count-1}.
inline std::vector<mpz_class> terms(const RecurrenceSpec& spec, std::size_t count) {
  spec.validate();
  const auto d = static_cast<std::size_t>(spec.order);
  std::vector<mpz_class> u;
  u.reserve(std::max(count, d));
  for (std::size_t i = 0; i < d; ++i) u.push_back(spec.initial[i]);
  while (u.size() < count) {
    mpz_class next = 0;
    const std::size_t n = u.size();
    for (std::size_t i = 1; i <= d; ++i) next += spec.coefficients[i - 1] * u[n - i];
    u.push_back(std::move(next));
  }
  u.resize(count);
  return u;
}

inline mpz_class term(const RecurrenceSpec& spec, std::size_t n) { return terms(spec, n + 1)[n]; }

/// U_n for any integer n; negative indices run the recurrence backwards and
/// exist only when every step divides exactly by c_d.
inline std::optional<mpz_class> term_signed(const RecurrenceSpec& spec, long n) {
  if (n >= 0) return term(spec, static_cast<std::size_t>(n));
  spec.validate();
  const auto d = static_cast<std::size_t>(spec.order);
  const mpz_class& last = spec.coefficients[d - 1];
  if (last == 0) return std::nullopt;
  // window holds U_k .. U_{k+d-1}, starting at k = 0
  std::vector<mpz_class> window(spec.initial.begin(), spec.initial.end());
  for (long k = -1; k >= n; --k) {
    // U_{k+d} = sum_{i=1}^{d} c_i U_{k+d-i}  =>  c_d U_k = U_{k+d} - sum_{i<d} c_i U_{k+d-i}
    mpz_class rhs = window[d - 1];
    for (std::size_t i = 1; i < d; ++i) rhs -= spec.coefficients[i - 1] * window[d - 1 - i];
    if (rhs % last != 0) return std::nullopt;
    window.insert(window.begin(), rhs / last);
    window.pop_back();
  }
  return window.front();
}

/// Roots of the characteristic polynomial: the dominant real root alpha and
/// the remaining root(s), a complex-conjugate pair (order 3) or a real root
/// (order 2). Only recurrences whose other roots lie strictly inside the unit
/// disk are accepted.
struct CubicRoots {
  int order = 3;
  BallReal alpha;
  BallReal beta_abs;
  BallReal beta_re;
  BallReal beta_im;

  ComplexBall beta() const { return {beta_re, beta_im}; }
  ComplexBall gamma() const { return conj(beta()); }
};

using CharacteristicRoots = CubicRoots;

namespace detail {

/// Characteristic polynomial coefficients, highest degree first.
inline std::vector<mpz_class> char_poly(const RecurrenceSpec& spec) {
  std::vector<mpz_class> p{1};
  for (const auto& c : spec.coefficients) p.push_back(-c);
  return p;
}

inline BallReal horner(const std::vector<mpz_class>& p, const BallReal& x) {
  BallReal acc = BallReal::exact(p.front(), x.precision());
  for (std::size_t i = 1; i < p.size(); ++i) acc = acc * x + BallReal::exact(p[i], x.precision());
  return acc;
}

inline std::vector<mpz_class> derivative(const std::vector<mpz_class>& p) {
  std::vector<mpz_class> d;
  const std::size_t deg = p.size() - 1;
  for (std::size_t i = 0; i < deg; ++i) d.push_back(p[i] * static_cast<unsigned long>(deg - i));
  return d;
}

/// Dominant real root > 1 by bisection, then interval Newton.
inline BallReal dominant_root(const std::vector<mpz_class>& p, mpfr_prec_t prec) {
  const auto dp = derivative(p);
  mpz_class bound = 0;
  for (std::size_t i = 1; i < p.size(); ++i) bound = std::max(bound, mpz_class(abs(p[i])));
  Mpfr lo(prec), hi(prec);
  mpfr_set_ui(lo.get(), 1, MPFR_RNDN);
  mpfr_set_z(hi.get(), mpz_class(bound + 1).get_mpz_t(), MPFR_RNDU);

  if (certified_sign(horner(p, BallReal::point(lo))) != Sign::Negative ||
      certified_sign(horner(p, BallReal::point(hi))) != Sign::Positive)
    throw Error(ErrorKind::InvalidArgument, "characteristic polynomial has no isolated real root above 1");

  BallReal x = BallReal::interval(lo, hi);
  for (int iter = 0; iter < 4 * prec + 64; ++iter) {
    if (certified_sign(horner(dp, x)) == Sign::Positive) break;
    Mpfr mid = x.midpoint();
    mpfr_prec_round(mid.get(), prec, MPFR_RNDN);
    if (mpfr_equal_p(mid.get(), x.lower().get()) || mpfr_equal_p(mid.get(), x.upper().get()))
      throw Error(ErrorKind::PrecisionExhausted, "cannot isolate the dominant root at " + std::to_string(prec) + " bits");
    const Sign s = certified_sign(horner(p, BallReal::point(mid)));
    if (s == Sign::Positive) x = BallReal::interval(x.lower(), mid);
    else if (s == Sign::Negative) x = BallReal::interval(mid, x.upper());
    else throw Error(ErrorKind::PrecisionExhausted, "root isolation undecidable at " + std::to_string(prec) + " bits");
  }
  if (certified_sign(horner(dp, x)) != Sign::Positive)
    throw Error(ErrorKind::PrecisionExhausted, "derivative sign not certified on the root bracket");

  for (int iter = 0; iter < 200; ++iter) {
    Mpfr mid = x.midpoint();
    mpfr_prec_round(mid.get(), prec, MPFR_RNDN);
    const BallReal m = BallReal::point(mid);
    const BallReal newton = m - horner(p, m) / horner(dp, x);
    auto next = intersect(x, newton);
    if (!next) throw Error(ErrorKind::PrecisionExhausted, "interval Newton lost the root");
    const bool progressed = mpfr_cmp(next->width().get(), x.width().get()) < 0;
    x = std::move(*next);
    if (!progressed) break;
  }
  return x;
}

}  // namespace detail

/// Certified roots of the characteristic polynomial at `prec` bits.
inline CubicRoots characteristic_roots(const RecurrenceSpec& spec, mpfr_prec_t prec) {
  spec.validate();
  if (spec.order != 2 && spec.order != 3)
    throw Error(ErrorKind::InvalidArgument, "only order-2 and order-3 recurrences are supported");
  const auto p = detail::char_poly(spec);
  CubicRoots r;
  r.order = spec.order;
  r.alpha = detail::dominant_root(p, prec);
  const BallReal c1 = BallReal::exact(spec.coefficients[0], prec);
  if (spec.order == 2) {
    r.beta_re = c1 - r.alpha;
    r.beta_im = BallReal::exact(0, prec);
    r.beta_abs = abs(r.beta_re);
  } else {
    const BallReal s = c1 - r.alpha;                                         // beta + gamma
    const BallReal prod = BallReal::exact(spec.coefficients[2], prec) / r.alpha;  // beta * gamma
    const BallReal disc = sqr(s) - 4 * prod;
    const Sign ds = certified_sign(disc);
    if (ds == Sign::Undecidable)
      throw Error(ErrorKind::PrecisionExhausted, "cannot decide whether the minor roots are complex");
    if (ds == Sign::Positive)
      throw Error(ErrorKind::InvalidArgument, "minor roots are real; a complex-conjugate pair is required");
    r.beta_re = s / 2;
    r.beta_im = sqrt(-disc) / 2;
    r.beta_abs = sqrt(prod);
  }
  const Sign inside = certified_sign(BallReal::exact(1, prec) - r.beta_abs);
  if (inside == Sign::Undecidable)
    throw Error(ErrorKind::PrecisionExhausted, "cannot certify |beta| < 1");
  if (inside == Sign::Negative)
    throw Error(ErrorKind::InvalidArgument, "minor roots must lie strictly inside the unit disk");
  return r;
}

/// Roots of x^3 - x - 1.
inline CubicRoots real_root(mpfr_prec_t prec) {
  if (prec < 64) throw Error(ErrorKind::InvalidArgument, "real_root needs at least 64 bits");
  return characteristic_roots(RecurrenceSpec::padovan(), prec);
}

/// Cardano form (r1 + r2)/6 with r1,2 = cbrt(108 +- 12 sqrt 69); a cross-check only.
inline BallReal padovan_radical_alpha(mpfr_prec_t prec) {
  const BallReal s = sqrt(BallReal::exact(69, prec)) * 12;
  const BallReal r1 = cbrt(BallReal::exact(108, prec) + s);
  const BallReal r2 = cbrt(BallReal::exact(108, prec) - s);
  return (r1 + r2) / 6;
}

/// Binet data U_{k + convention_offset} = a alpha^k + b beta^k (+ conj(b) conj(beta)^k).
struct BinetCoefficients {
  BallReal a;
  BallReal b_re;
  BallReal b_im;
  int convention_offset = 0;

  ComplexBall b() const { return {b_re, b_im}; }
  BallReal b_abs() const { return abs(b()); }
};

/// Open window the fitted `a` must land in.
struct BinetWindow {
  mpq_class lo;
  mpq_class hi;
};

namespace detail {

inline BinetCoefficients solve_binet(const CubicRoots& roots, const std::vector<mpz_class>& q, int offset) {
  const mpfr_prec_t prec = roots.alpha.precision();
  const BallReal q0 = BallReal::exact(q[0], prec), q1 = BallReal::exact(q[1], prec);
  BinetCoefficients out;
  out.convention_offset = offset;
  const BallReal& alpha = roots.alpha;
  if (roots.order == 2) {
    const BallReal& beta = roots.beta_re;
    out.a = (q1 - beta * q0) / (alpha - beta);
    out.b_re = (q1 - alpha * q0) / (beta - alpha);
    out.b_im = BallReal::exact(0, prec);
    return out;
  }
  const BallReal q2 = BallReal::exact(q[2], prec);
  const BallReal s = 2 * roots.beta_re;
  const BallReal prod = sqr(roots.beta_abs);
  out.a = (q2 - s * q1 + prod * q0) / (sqr(alpha) - alpha * s + prod);
  // Lagrange basis at beta: (x - alpha)(x - gamma) / ((beta - alpha)(beta - gamma))
  const ComplexBall beta = roots.beta(), gamma = roots.gamma();
  const ComplexBall al = ComplexBall::real(alpha);
  const ComplexBall numer = ComplexBall::real(q2) - (al + gamma) * ComplexBall::real(q1) +
                            (al * gamma) * ComplexBall::real(q0);
  const ComplexBall b = numer / ((beta - al) * (beta - gamma));
  out.b_re = b.re;
  out.b_im = b.im;
  return out;
}

}  // namespace detail

/// Fits the Binet coefficients to exact terms. With a window, tries index
/// offsets -2..2 and keeps the one whose `a` lands in the window.
inline BinetCoefficients binet_fit(const RecurrenceSpec& spec, const CubicRoots& roots,
                                   const std::optional<BinetWindow>& window = std::nullopt) {
  auto fit_at = [&](int offset) -> std::optional<BinetCoefficients> {
    std::vector<mpz_class> q;
    for (int i = 0; i < spec.order; ++i) {
      auto t = term_signed(spec, offset + i);
      if (!t) return std::nullopt;
      q.push_back(*t);
    }
    return detail::solve_binet(roots, q, offset);
  };
  if (!window) {
    auto fit = fit_at(0);
    if (!fit) throw Error(ErrorKind::ConventionMismatch, "cannot evaluate initial terms");
    return *fit;
  }
  const mpfr_prec_t prec = roots.alpha.precision();
  const BallReal lo = BallReal::rational(window->lo, prec), hi = BallReal::rational(window->hi, prec);
  bool undecided = false;
  for (int offset = -2; offset <= 2; ++offset) {
    auto fit = fit_at(offset);
    if (!fit) continue;
    if (certainly_gt(fit->a, lo) && certainly_lt(fit->a, hi)) return *fit;
    if (fit->a.overlaps(hi) || fit->a.overlaps(lo)) undecided = true;
  }
  if (undecided) throw Error(ErrorKind::PrecisionExhausted, "Binet coefficient window undecidable at this precision");
  throw Error(ErrorKind::ConventionMismatch, "no index offset in -2..2 puts the Binet coefficient in the window");
}

/// a = alpha(alpha+1)/(3 alpha^2 - 1), the closed form for Padovan.
inline BallReal padovan_closed_form_a(const BallReal& alpha) {
  return alpha * (alpha + 1) / (3 * sqr(alpha) - 1);
}

/// Certified bound on |U_{k+offset} - a alpha^k|: (order-1) |b| |beta|^k.
inline BallReal binet_residual(const BinetCoefficients& binet, const CubicRoots& roots, unsigned long k) {
  return (roots.order - 1) * binet.b_abs() * pow(roots.beta_abs, k);
}

struct GrowthEntry {
  long k = 0;
  bool lower_ok = false;
  bool upper_ok = false;
};

struct GrowthReport {
  long k_from = 0;
  long k_to = 0;
  int index_offset = 0;
  int lower_shift = 0;
  int upper_shift = 0;
  std::vector<GrowthEntry> entries;
  std::vector<long> failures;
  /// Set when the Binet tail argument certifies the bounds for every k >= k_to.
  bool tail_certified = false;

  bool all_hold() const { return failures.empty(); }
};

/// Certifies alpha^{k - lower_shift} <= U_{k + index_offset} <= alpha^{k - upper_shift}
/// for k in [k_from, k_to]. When `binet` describes the same indexing, also
/// tries to certify the bounds for all k >= k_to.
inline GrowthReport growth_bounds_check(const RecurrenceSpec& spec, const CubicRoots& roots, int index_offset,
                                        long k_from, long k_to, int lower_shift, int upper_shift,
                                        const BinetCoefficients* binet = nullptr) {
  GrowthReport rep{k_from, k_to, index_offset, lower_shift, upper_shift, {}, {}, false};
  if (k_to < k_from) return rep;
  const long first_index = k_from + index_offset;
  if (first_index < 0) throw Error(ErrorKind::InvalidArgument, "growth check starts before U_0");
  const auto u = terms(spec, static_cast<std::size_t>(k_to + index_offset + 1));
  const mpfr_prec_t prec = roots.alpha.precision();
  for (long k = k_from; k <= k_to; ++k) {
    const BallReal value = BallReal::exact(u[static_cast<std::size_t>(k + index_offset)], prec);
    const BallReal lower = powi(roots.alpha, k - lower_shift);
    const BallReal upper = powi(roots.alpha, k - upper_shift);
    GrowthEntry e{k, certainly_le(lower, value), certainly_le(value, upper)};
    if (!e.lower_ok || !e.upper_ok) rep.failures.push_back(k);
    rep.entries.push_back(e);
  }
  if (binet != nullptr && binet->convention_offset == index_offset) {
    // |U - a alpha^k| <= rho_k with rho_k alpha^{-k} decreasing, so checking
    // a -+ rho_k alpha^{-k} against alpha^{-shift} at k_to covers the tail.
    const BallReal slack = binet_residual(*binet, roots, static_cast<unsigned long>(k_to)) /
                           pow(roots.alpha, static_cast<unsigned long>(k_to));
    const bool decreasing = certainly_lt(roots.beta_abs, roots.alpha);
    rep.tail_certified = decreasing && certainly_le(powi(roots.alpha, -lower_shift), binet->a - slack) &&
                         certainly_le(binet->a + slack, powi(roots.alpha, -upper_shift));
  }
  return rep;
}

}  // namespace pillai
