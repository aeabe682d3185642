#pragma once

#include <array>
#include <string>

#include "pillai/cfrac.hpp"
#include "pillai/heights.hpp"
#include "pillai/rigor.hpp"

namespace pillai {

/// Natural-log offsets L of the five starting inequalities |Lambda| < e^L X^{-w}:
/// the two branches of the first form, then Lambda_1 (base), Lambda_2 (alpha)
/// and Lambda_3 (alpha).
struct ExponentOffsets {
  BallReal gamma_alpha;
  BallReal gamma_base;
  BallReal case1;
  BallReal case2;
  BallReal lambda3;
};

/// Offsets as printed: alpha^{e1}, base^{e2}, base^{e3}, alpha^{e4}, alpha^{e5}.
inline ExponentOffsets faithful_offsets(const std::array<long, 5>& e, const BallReal& log_alpha,
                                        const BallReal& log_base) {
  return {log_alpha * e[0], log_base * e[1], log_base * e[2], log_alpha * e[3], log_alpha * e[4]};
}

/// Lower bound g with U_n - U_{n-1} >= g alpha^n for analytic n >= k0:
/// a(alpha - 1)/alpha - rho0 |beta|^{k0-1} (1 + |beta|) / alpha^{k0}.
inline BallReal strict_growth_gap(const BallReal& a, const BallReal& alpha, const BallReal& beta_abs,
                                  const BallReal& rho0, long k0) {
  const BallReal tail = rho0 * pow(beta_abs, static_cast<unsigned long>(k0 - 1)) * (beta_abs + 1) /
                        pow(alpha, static_cast<unsigned long>(k0));
  return a * (alpha - 1) / alpha - tail;
}

/// Offsets re-derived from |U_{n} - a alpha^n| <= rho0 and the gap g.
inline ExponentOffsets strict_offsets(const BallReal& a, const BallReal& rho0, const BallReal& g) {
  const BallReal two = BallReal::exact(2, a.precision());
  return {log(two * (a + rho0 * 2) / g), log(two), log(rho0 * 2 + 1), log((a + rho0 * 2) / g),
          log(rho0 * 2 / g)};
}

struct ChainInputs {
  BallReal log_alpha;
  BallReal log_base;
  BallReal h_a_D;
  int D = 3;
  ExponentOffsets offsets;
};

/// Every coefficient of the absolute bound, each of (1 + log n)^j.
struct ChainValues {
  BallReal lambda;        // V for Lambda
  BallReal c_min;         // min{k log alpha, l log base} < c_min (1 + log n)
  BallReal lambda1_a1;
  BallReal lambda1;
  BallReal case1;         // l log base < case1 (1 + log n)^2 in case 1
  BallReal lambda2_a1;
  BallReal lambda2;
  BallReal case2;         // k log alpha < case2 (1 + log n)^2 in case 2
  BallReal lambda3_a1;
  BallReal lambda3;
  BallReal K;             // n < K (1 + log n)^3
  BallReal N_max;         // n < N_max
};

namespace detail {
inline BallReal positive_part(const BallReal& x) { return max(x, BallReal::exact(0, x.precision())); }
}  // namespace detail

/// The Matveev chain followed by the Guzman-Luca step with x = e n, Y = e K.
inline ChainValues compute_chain(const ChainInputs& in) {
  const mpfr_prec_t prec = in.log_alpha.precision();
  const PresetInputs pre{in.log_alpha, in.log_base, in.h_a_D, in.D};
  const BallReal one = BallReal::exact(1, prec);
  ChainValues v;

  auto coefficient = [&](const LinearFormPreset& p) {
    MatveevInstance inst = p.instance;
    inst.B = one;
    inst.validate();
    return preset_coefficient(pre, p);
  };

  v.lambda = coefficient(preset_lambda(pre, one));
  const BallReal& o = in.offsets.gamma_alpha;
  v.c_min = v.lambda + detail::positive_part(max(o, in.offsets.gamma_base));

  const auto p1 = preset_lambda1(pre, v.c_min, one);
  v.lambda1_a1 = p1.a1_coefficient;
  v.lambda1 = coefficient(p1);
  v.case1 = v.lambda1 + detail::positive_part(in.offsets.case1);

  const auto p2 = preset_lambda2(pre, v.c_min, one);
  v.lambda2_a1 = p2.a1_coefficient;
  v.lambda2 = coefficient(p2);
  v.case2 = v.lambda2 + detail::positive_part(in.offsets.case2);

  const auto p3 = preset_lambda3(pre, v.c_min, v.case1, v.case2, one);
  v.lambda3_a1 = p3.a1_coefficient;
  v.lambda3 = coefficient(p3);
  v.K = (v.lambda3 + detail::positive_part(in.offsets.lambda3)) / in.log_alpha;

  const BallReal e = exp(one);
  v.N_max = guzman_luca_bound(3, e * v.K) / e;
  return v;
}

/// A with |Gamma / divisor| < A B^{-w}, from |Lambda| < e^L B^{-w} and |Gamma| < 2 |Lambda|.
inline BallReal derived_A(const BallReal& offset, const BallReal& log_divisor) {
  return exp(offset) * 2 / log_divisor;
}

/// Largest w for which e^L B^{-w} >= 1/2 (so the reduction does not apply), or -1.
inline long small_gap_limit(const BallReal& offset, const BallReal& log_B) {
  const BallReal s = (offset + const_log2(offset.precision())) / log_B.lower_ball();
  const mpz_class f = s.upper().floor();
  return f < 0 ? -1 : f.get_si();
}

/// log(A q / eps) / log B with A, B, eps taken at their sound endpoints.
inline BallReal reduction_w(const BallReal& A, const mpz_class& q, const BallReal& eps, const BallReal& B) {
  return log(A.upper_ball() * q / eps.lower_ball()) / log(B.lower_ball());
}

inline long reduction_max_exponent(const BallReal& w) {
  Mpfr c(w.precision());
  mpfr_ceil(c.get(), w.upper().get());
  return c.floor().get_si() - 1;
}

/// Largest m with base^m <= U * base/(base - 1), the m reachable by a pair
/// of representations whose larger term is U.
inline long implied_m(const mpz_class& U, const mpz_class& base) {
  if (U <= 0) return 0;
  const mpz_class lim = U * base;
  mpz_class p = base - 1;  // (base - 1) base^m <= U base
  long m = 0;
  while (p * base <= lim) {
    p *= base;
    ++m;
  }
  return m;
}

}  // namespace pillai
