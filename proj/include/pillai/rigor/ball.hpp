#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "pillai/error.hpp"
#include "pillai/rigor/mpfr.hpp"

namespace pillai {

inline constexpr mpfr_prec_t kDefaultBits = 192;

/// Certified enclosure of a real number.
///
/// Stored as a closed interval [lower, upper] of MPFR floats; every operation
/// rounds the lower endpoint toward -inf and the upper endpoint toward +inf,
/// so the image of the input intervals is always contained in the result.
/// Midpoint/radius are derived views. Exact integers and dyadic rationals are
/// radius-0 balls.
class BallReal {
 public:
  BallReal() : BallReal(kDefaultBits) {}
  explicit BallReal(mpfr_prec_t prec) : lo_(prec), hi_(prec) {}

  static BallReal exact(long v, mpfr_prec_t prec = kDefaultBits) {
    return exact(mpz_class(v), prec);
  }

  /// Exact embedding; precision grows to hold z without rounding.
  static BallReal exact(const mpz_class& z, mpfr_prec_t prec = kDefaultBits) {
    const auto bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(z.get_mpz_t(), 2));
    BallReal r(std::max(prec, bits + 1));
    mpfr_set_z(r.lo_.get(), z.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_.get(), z.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  static BallReal rational(const mpq_class& q, mpfr_prec_t prec = kDefaultBits) {
    BallReal r(prec);
    mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  static BallReal point(const Mpfr& x) {
    BallReal r(x.precision());
    mpfr_set(r.lo_.get(), x.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), x.get(), MPFR_RNDU);
    return r;
  }

  static BallReal interval(const Mpfr& lo, const Mpfr& hi) {
    if (mpfr_nan_p(lo.get()) || mpfr_nan_p(hi.get()) || cmp(lo, hi) > 0)
      throw Error(ErrorKind::InvalidArgument, "interval endpoints out of order");
    BallReal r(std::max(lo.precision(), hi.precision()));
    mpfr_set(r.lo_.get(), lo.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), hi.get(), MPFR_RNDU);
    return r;
  }

  /// Ball with the given midpoint and radius (both taken exactly as doubles).
  static BallReal mid_rad(double mid, double rad, mpfr_prec_t prec = kDefaultBits) {
    if (!(rad >= 0)) throw Error(ErrorKind::InvalidArgument, "negative radius");
    BallReal r(prec);
    mpfr_set_d(r.lo_.get(), mid, MPFR_RNDD);
    mpfr_sub_d(r.lo_.get(), r.lo_.get(), rad, MPFR_RNDD);
    mpfr_set_d(r.hi_.get(), mid, MPFR_RNDU);
    mpfr_add_d(r.hi_.get(), r.hi_.get(), rad, MPFR_RNDU);
    return r;
  }

  /// Enclosure of a decimal literal such as "7.97e12".
  static BallReal decimal(std::string_view text, mpfr_prec_t prec = kDefaultBits) {
    return decimal(text, text, prec);
  }

  /// Enclosure of the decimal interval [lo, hi].
  static BallReal decimal(std::string_view lo, std::string_view hi, mpfr_prec_t prec = kDefaultBits) {
    BallReal r(prec);
    const std::string l(lo), h(hi);
    if (mpfr_set_str(r.lo_.get(), l.c_str(), 10, MPFR_RNDD) != 0 ||
        mpfr_set_str(r.hi_.get(), h.c_str(), 10, MPFR_RNDU) != 0)
      throw Error(ErrorKind::InvalidArgument, "malformed decimal: [" + l + ", " + h + "]");
    if (cmp(r.lo_, r.hi_) > 0) throw Error(ErrorKind::InvalidArgument, "decimal interval out of order");
    return r;
  }

  mpfr_prec_t precision() const noexcept { return std::max(lo_.precision(), hi_.precision()); }
  const Mpfr& lower() const noexcept { return lo_; }
  const Mpfr& upper() const noexcept { return hi_; }

  Mpfr midpoint() const {
    Mpfr m(precision() + 1);
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m;
  }

  /// Upper bound on max(|x - midpoint()|) over the ball.
  Mpfr radius() const {
    const Mpfr m = midpoint();
    Mpfr a(precision()), b(precision());
    mpfr_sub(a.get(), hi_.get(), m.get(), MPFR_RNDU);
    mpfr_sub(b.get(), m.get(), lo_.get(), MPFR_RNDU);
    return mpfr_cmp(a.get(), b.get()) >= 0 ? a : b;
  }

  Mpfr width() const {
    Mpfr w(precision());
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    return w;
  }

  bool is_exact() const { return mpfr_equal_p(lo_.get(), hi_.get()) != 0; }
  bool is_finite() const { return mpfr_number_p(lo_.get()) && mpfr_number_p(hi_.get()); }

  bool contains(const mpq_class& q) const {
    return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
  }
  bool contains(const mpz_class& z) const {
    return mpfr_cmp_z(lo_.get(), z.get_mpz_t()) <= 0 && mpfr_cmp_z(hi_.get(), z.get_mpz_t()) >= 0;
  }
  bool contains(long v) const { return contains(mpz_class(v)); }
  /// True when `inner` is a subset of this ball.
  bool contains(const BallReal& inner) const {
    return cmp(lo_, inner.lo_) <= 0 && cmp(hi_, inner.hi_) >= 0;
  }
  bool overlaps(const BallReal& o) const { return cmp(lo_, o.hi_) <= 0 && cmp(o.lo_, hi_) <= 0; }

  /// Certified floor, or nothing when the endpoints straddle an integer.
  std::optional<mpz_class> floor() const {
    mpz_class a = lo_.floor(), b = hi_.floor();
    if (a != b) return std::nullopt;
    return a;
  }

  BallReal lower_ball() const { return point(lo_); }
  BallReal upper_ball() const { return point(hi_); }

  double to_double() const { return midpoint().to_double(); }

  std::string lower_decimal(int digits = 30) const { return lo_.to_decimal(digits, MPFR_RNDD); }
  std::string upper_decimal(int digits = 30) const { return hi_.to_decimal(digits, MPFR_RNDU); }
  std::string to_string(int digits = 20) const {
    return "[" + lower_decimal(digits) + ", " + upper_decimal(digits) + "]";
  }

  Mpfr& mutable_lower() noexcept { return lo_; }
  Mpfr& mutable_upper() noexcept { return hi_; }

 private:
  Mpfr lo_;
  Mpfr hi_;
};

inline std::ostream& operator<<(std::ostream& os, const BallReal& b) { return os << b.to_string(); }

namespace detail {

inline mpfr_prec_t join(const BallReal& a, const BallReal& b) {
  return std::max(a.precision(), b.precision());
}

inline void min_into(Mpfr& acc, const Mpfr& v) {
  if (mpfr_cmp(v.get(), acc.get()) < 0) mpfr_set(acc.get(), v.get(), MPFR_RNDD);
}
inline void max_into(Mpfr& acc, const Mpfr& v) {
  if (mpfr_cmp(v.get(), acc.get()) > 0) mpfr_set(acc.get(), v.get(), MPFR_RNDU);
}

using BinaryOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

/// Hull of op over the four endpoint combinations (valid for * and / when the
/// divisor excludes zero).
inline BallReal corner_hull(const BallReal& a, const BallReal& b, BinaryOp op) {
  const mpfr_prec_t prec = join(a, b);
  BallReal r(prec);
  const Mpfr* xs[2] = {&a.lower(), &a.upper()};
  const Mpfr* ys[2] = {&b.lower(), &b.upper()};
  Mpfr t(prec);
  bool first = true;
  for (const Mpfr* x : xs) {
    for (const Mpfr* y : ys) {
      op(t.get(), x->get(), y->get(), MPFR_RNDD);
      if (first) mpfr_set(r.mutable_lower().get(), t.get(), MPFR_RNDD);
      else min_into(r.mutable_lower(), t);
      op(t.get(), x->get(), y->get(), MPFR_RNDU);
      if (first) mpfr_set(r.mutable_upper().get(), t.get(), MPFR_RNDU);
      else max_into(r.mutable_upper(), t);
      first = false;
    }
  }
  return r;
}

using UnaryOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

inline BallReal monotone(const BallReal& x, UnaryOp op) {
  BallReal r(x.precision());
  op(r.mutable_lower().get(), x.lower().get(), MPFR_RNDD);
  op(r.mutable_upper().get(), x.upper().get(), MPFR_RNDU);
  return r;
}

}  // namespace detail

inline BallReal operator+(const BallReal& a, const BallReal& b) {
  BallReal r(detail::join(a, b));
  mpfr_add(r.mutable_lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_add(r.mutable_upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

inline BallReal operator-(const BallReal& a, const BallReal& b) {
  BallReal r(detail::join(a, b));
  mpfr_sub(r.mutable_lower().get(), a.lower().get(), b.upper().get(), MPFR_RNDD);
  mpfr_sub(r.mutable_upper().get(), a.upper().get(), b.lower().get(), MPFR_RNDU);
  return r;
}

inline BallReal operator-(const BallReal& a) {
  BallReal r(a.precision());
  mpfr_neg(r.mutable_lower().get(), a.upper().get(), MPFR_RNDD);
  mpfr_neg(r.mutable_upper().get(), a.lower().get(), MPFR_RNDU);
  return r;
}

inline BallReal operator*(const BallReal& a, const BallReal& b) {
  return detail::corner_hull(a, b, &mpfr_mul);
}

inline BallReal operator/(const BallReal& a, const BallReal& b) {
  if (mpfr_sgn(b.lower().get()) <= 0 && mpfr_sgn(b.upper().get()) >= 0)
    throw Error(ErrorKind::ContainsZero, "division by a ball containing 0: " + b.to_string());
  return detail::corner_hull(a, b, &mpfr_div);
}

inline BallReal& operator+=(BallReal& a, const BallReal& b) { return a = a + b; }
inline BallReal& operator-=(BallReal& a, const BallReal& b) { return a = a - b; }
inline BallReal& operator*=(BallReal& a, const BallReal& b) { return a = a * b; }
inline BallReal& operator/=(BallReal& a, const BallReal& b) { return a = a / b; }

inline BallReal operator*(const BallReal& a, long v) { return a * BallReal::exact(v, a.precision()); }
inline BallReal operator*(long v, const BallReal& a) { return a * v; }
inline BallReal operator*(const BallReal& a, const mpz_class& z) { return a * BallReal::exact(z, a.precision()); }
inline BallReal operator+(const BallReal& a, long v) { return a + BallReal::exact(v, a.precision()); }
inline BallReal operator-(const BallReal& a, long v) { return a - BallReal::exact(v, a.precision()); }
inline BallReal operator-(long v, const BallReal& a) { return BallReal::exact(v, a.precision()) - a; }
inline BallReal operator/(const BallReal& a, long v) { return a / BallReal::exact(v, a.precision()); }
inline BallReal operator/(long v, const BallReal& a) { return BallReal::exact(v, a.precision()) / a; }

inline BallReal abs(const BallReal& x) {
  if (mpfr_sgn(x.lower().get()) >= 0) return x;
  if (mpfr_sgn(x.upper().get()) <= 0) return -x;
  BallReal r(x.precision());
  mpfr_set_zero(r.mutable_lower().get(), 1);
  Mpfr neg_lo(x.precision());
  mpfr_neg(neg_lo.get(), x.lower().get(), MPFR_RNDU);
  mpfr_max(r.mutable_upper().get(), neg_lo.get(), x.upper().get(), MPFR_RNDU);
  return r;
}

inline BallReal hull(const BallReal& a, const BallReal& b) {
  BallReal r(detail::join(a, b));
  mpfr_min(r.mutable_lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_max(r.mutable_upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

/// Enclosure of max(x, y) for x in a, y in b.
inline BallReal max(const BallReal& a, const BallReal& b) {
  BallReal r(detail::join(a, b));
  mpfr_max(r.mutable_lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_max(r.mutable_upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

inline BallReal min(const BallReal& a, const BallReal& b) {
  BallReal r(detail::join(a, b));
  mpfr_min(r.mutable_lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_min(r.mutable_upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

/// Intersection; nothing when the balls are disjoint.
inline std::optional<BallReal> intersect(const BallReal& a, const BallReal& b) {
  if (!a.overlaps(b)) return std::nullopt;
  BallReal r(detail::join(a, b));
  mpfr_max(r.mutable_lower().get(), a.lower().get(), b.lower().get(), MPFR_RNDD);
  mpfr_min(r.mutable_upper().get(), a.upper().get(), b.upper().get(), MPFR_RNDU);
  return r;
}

inline BallReal sqr(const BallReal& x) {
  const BallReal a = abs(x);
  BallReal r(x.precision());
  mpfr_sqr(r.mutable_lower().get(), a.lower().get(), MPFR_RNDD);
  mpfr_sqr(r.mutable_upper().get(), a.upper().get(), MPFR_RNDU);
  return r;
}

/// x^n for n >= 0.
inline BallReal pow(const BallReal& x, unsigned long n) {
  if (n == 0) return BallReal::exact(1, x.precision());
  if (n % 2 == 0) {
    const BallReal a = abs(x);
    BallReal r(x.precision());
    mpfr_pow_ui(r.mutable_lower().get(), a.lower().get(), n, MPFR_RNDD);
    mpfr_pow_ui(r.mutable_upper().get(), a.upper().get(), n, MPFR_RNDU);
    return r;
  }
  BallReal r(x.precision());
  mpfr_pow_ui(r.mutable_lower().get(), x.lower().get(), n, MPFR_RNDD);
  mpfr_pow_ui(r.mutable_upper().get(), x.upper().get(), n, MPFR_RNDU);
  return r;
}

/// x^n for any integer n (x must exclude 0 when n < 0).
inline BallReal powi(const BallReal& x, long n) {
  if (n >= 0) return pow(x, static_cast<unsigned long>(n));
  return BallReal::exact(1, x.precision()) / pow(x, static_cast<unsigned long>(-n));
}

/// Natural logarithm.
inline BallReal log(const BallReal& x) {
  if (mpfr_sgn(x.lower().get()) <= 0)
    throw Error(ErrorKind::NonPositiveInput, "log of a ball touching or below 0: " + x.to_string());
  return detail::monotone(x, &mpfr_log);
}

inline BallReal exp(const BallReal& x) { return detail::monotone(x, &mpfr_exp); }

inline BallReal sqrt(const BallReal& x) {
  if (mpfr_sgn(x.upper().get()) < 0)
    throw Error(ErrorKind::NonPositiveInput, "sqrt of a negative ball: " + x.to_string());
  BallReal r = detail::monotone(abs(x), &mpfr_sqrt);
  if (mpfr_sgn(x.lower().get()) < 0) mpfr_set_zero(r.mutable_lower().get(), 1);
  return r;
}

inline BallReal cbrt(const BallReal& x) { return detail::monotone(x, &mpfr_cbrt); }

inline BallReal const_log2(mpfr_prec_t prec) {
  BallReal r(prec);
  mpfr_const_log2(r.mutable_lower().get(), MPFR_RNDD);
  mpfr_const_log2(r.mutable_upper().get(), MPFR_RNDU);
  return r;
}

inline BallReal const_pi(mpfr_prec_t prec) {
  BallReal r(prec);
  mpfr_const_pi(r.mutable_lower().get(), MPFR_RNDD);
  mpfr_const_pi(r.mutable_upper().get(), MPFR_RNDU);
  return r;
}

/// log of an exact positive integer.
inline BallReal log_of(const mpz_class& z, mpfr_prec_t prec) { return log(BallReal::exact(z, prec)); }

enum class Sign { Positive, Negative, Undecidable };

inline Sign certified_sign(const BallReal& x) {
  if (mpfr_sgn(x.lower().get()) > 0) return Sign::Positive;
  if (mpfr_sgn(x.upper().get()) < 0) return Sign::Negative;
  return Sign::Undecidable;
}

inline std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::Positive: return "Positive";
    case Sign::Negative: return "Negative";
    case Sign::Undecidable: return "Undecidable";
  }
  return "?";
}

/// a < b for every choice of representatives.
inline bool certainly_lt(const BallReal& a, const BallReal& b) { return cmp(a.upper(), b.lower()) < 0; }
inline bool certainly_le(const BallReal& a, const BallReal& b) { return cmp(a.upper(), b.lower()) <= 0; }
inline bool certainly_gt(const BallReal& a, const BallReal& b) { return certainly_lt(b, a); }

/// Ball containing ||x|| = min |x - n| over integers n; always within [0, 1/2].
inline BallReal nearest_int_distance(const BallReal& x) {
  const mpfr_prec_t prec = x.precision();
  Mpfr half(prec);
  mpfr_set_d(half.get(), 0.5, MPFR_RNDN);
  if (mpfr_cmp(x.width().get(), half.get()) >= 0 || !x.is_finite())
    throw Error(ErrorKind::AmbiguousNearestInteger, "ball too wide to locate its nearest integer: " + x.to_string());

  // Distance of an exact endpoint, as an enclosure.
  auto endpoint_distance = [prec](const Mpfr& e) {
    if (mpfr_zero_p(e.get())) return BallReal::exact(0, prec);
    const mpfr_exp_t ex = mpfr_get_exp(e.get());
    Mpfr n(std::max<mpfr_prec_t>(prec, ex > 0 ? static_cast<mpfr_prec_t>(ex) + 2 : 2));
    mpfr_rint(n.get(), e.get(), MPFR_RNDN);
    BallReal d(prec);
    mpfr_sub(d.mutable_lower().get(), e.get(), n.get(), MPFR_RNDD);
    mpfr_sub(d.mutable_upper().get(), e.get(), n.get(), MPFR_RNDU);
    return abs(d);
  };
  const BallReal dl = endpoint_distance(x.lower());
  const BallReal du = endpoint_distance(x.upper());

  // The distance function is 1-Lipschitz and piecewise linear with minima at
  // integers and maxima at half-integers; width < 1/2 leaves at most one of each.
  const mpz_class top = x.upper().floor();
  const bool has_integer = mpfr_cmp_z(x.lower().get(), top.get_mpz_t()) <= 0;
  Mpfr twice_lo(prec + 1), twice_hi(prec + 1);
  mpfr_mul_2ui(twice_lo.get(), x.lower().get(), 1, MPFR_RNDD);
  mpfr_mul_2ui(twice_hi.get(), x.upper().get(), 1, MPFR_RNDU);
  const mpz_class twice_top = twice_hi.floor();
  const bool has_half = mpz_odd_p(twice_top.get_mpz_t()) &&
                        mpfr_cmp_z(twice_lo.get(), twice_top.get_mpz_t()) <= 0;

  BallReal r(prec);
  if (has_integer) mpfr_set_zero(r.mutable_lower().get(), 1);
  else mpfr_min(r.mutable_lower().get(), dl.lower().get(), du.lower().get(), MPFR_RNDD);
  if (has_half) mpfr_set(r.mutable_upper().get(), half.get(), MPFR_RNDU);
  else mpfr_max(r.mutable_upper().get(), dl.upper().get(), du.upper().get(), MPFR_RNDU);
  if (mpfr_cmp(r.upper().get(), half.get()) > 0) mpfr_set(r.mutable_upper().get(), half.get(), MPFR_RNDU);
  if (mpfr_sgn(r.lower().get()) < 0) mpfr_set_zero(r.mutable_lower().get(), 1);
  return r;
}

}  // namespace pillai
