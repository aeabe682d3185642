#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "pillai/error.hpp"
#include "pillai/rigor.hpp"

namespace pillai {

/// h(p/q) = log max(|p|, q) for p/q in lowest terms.
inline BallReal height_rational(const mpz_class& p, const mpz_class& q, mpfr_prec_t prec = kDefaultBits) {
  if (q <= 0) throw Error(ErrorKind::InvalidArgument, "denominator must be positive");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  if (g != 1) throw Error(ErrorKind::NotReduced, p.get_str() + "/" + q.get_str() + " is not in lowest terms");
  const mpz_class m = std::max(mpz_class(abs(p)), q);
  return log(BallReal::exact(m, prec));
}

/// Minimal primitive polynomial a_0 x^d + ... + a_d and the moduli of its roots.
struct AlgebraicNumberDesc {
  std::vector<mpz_class> minpoly_coeffs;  // a_0 first
  std::vector<BallReal> conjugate_abs;

  int degree() const { return static_cast<int>(minpoly_coeffs.size()) - 1; }

  void validate() const {
    if (minpoly_coeffs.size() < 2) throw Error(ErrorKind::InvalidArgument, "minimal polynomial must have degree >= 1");
    if (minpoly_coeffs.front() <= 0) throw Error(ErrorKind::InvalidArgument, "leading coefficient must be positive");
    mpz_class g = 0;
    for (const auto& c : minpoly_coeffs) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g != 1) throw Error(ErrorKind::NotReduced, "minimal polynomial is not primitive");
    if (conjugate_abs.size() != minpoly_coeffs.size() - 1)
      throw Error(ErrorKind::InvalidArgument, "need one conjugate modulus per root");
  }
};

/// (1/d)(log a_0 + sum log max(|gamma_i|, 1)).
inline BallReal height_from_minpoly(const AlgebraicNumberDesc& desc, mpfr_prec_t prec = kDefaultBits) {
  desc.validate();
  BallReal one = BallReal::exact(1, prec);
  BallReal sum = log(BallReal::exact(desc.minpoly_coeffs.front(), prec));
  for (const auto& c : desc.conjugate_abs) sum += log(max(c, one));
  BallReal h = sum / desc.degree();
  // each term is >= 0, so clip roundoff below zero
  if (mpfr_sgn(h.lower().get()) < 0) mpfr_set_zero(h.mutable_lower().get(), 1);
  return h;
}

/// Upper bounds from the standard height inequalities.
inline BallReal height_sum_bound(const BallReal& h1, const BallReal& h2) {
  return h1 + h2 + const_log2(std::max(h1.precision(), h2.precision()));
}
inline BallReal height_product_bound(const BallReal& h1, const BallReal& h2) { return h1 + h2; }
inline BallReal height_power_bound(long s, const BallReal& h) { return h * (s < 0 ? -s : s); }

enum class HeightCombination { Sum, Product, Power };

inline BallReal height_bound(HeightCombination kind, const std::vector<BallReal>& inputs, long s = 1) {
  if (inputs.empty()) throw Error(ErrorKind::InvalidArgument, "height_bound needs at least one height");
  switch (kind) {
    case HeightCombination::Power:
      return height_power_bound(s, inputs.front());
    case HeightCombination::Product: {
      BallReal acc = inputs.front();
      for (std::size_t i = 1; i < inputs.size(); ++i) acc = height_product_bound(acc, inputs[i]);
      return acc;
    }
    case HeightCombination::Sum: {
      BallReal acc = inputs.front();
      for (std::size_t i = 1; i < inputs.size(); ++i) acc = height_sum_bound(acc, inputs[i]);
      return acc;
    }
  }
  return inputs.front();
}

/// Data for Matveev's lower bound on a nonzero linear form in t logarithms.
struct MatveevInstance {
  int t = 0;
  int D = 0;
  BallReal B;
  std::vector<BallReal> A;

  void validate() const {
    if (t <= 0 || D <= 0) throw Error(ErrorKind::InvalidArgument, "t and D must be positive");
    if (A.size() != static_cast<std::size_t>(t)) throw Error(ErrorKind::InvalidArgument, "need exactly t values A_i");
    const BallReal floor_a = BallReal::rational(mpq_class(4, 25), A.front().precision());
    for (const auto& a : A)
      if (!certainly_le(floor_a, a)) throw Error(ErrorKind::HypothesisViolated, "A_i >= 0.16 is not certified");
    if (!certainly_le(BallReal::exact(1, B.precision()), B))
      throw Error(ErrorKind::HypothesisViolated, "B >= 1 is not certified");
  }
};

/// 1.4 * 30^{t+3} * t^{4.5} * D^2 (1 + log D), the factor shared by every instance.
inline BallReal matveev_prefactor(int t, int D, mpfr_prec_t prec) {
  const BallReal tt = BallReal::exact(t, prec);
  const BallReal dd = BallReal::exact(D, prec);
  return BallReal::rational(mpq_class(7, 5), prec) * pow(BallReal::exact(30, prec), static_cast<unsigned long>(t + 3)) *
         pow(tt, 4) * sqrt(tt) * sqr(dd) * (log(dd) + 1);
}

/// V with log|Lambda| > -V.
inline BallReal matveev_lower_bound(const MatveevInstance& inst) {
  inst.validate();
  const mpfr_prec_t prec = std::max(inst.B.precision(), inst.A.front().precision());
  BallReal v = matveev_prefactor(inst.t, inst.D, prec) * (log(inst.B) + 1);
  for (const auto& a : inst.A) v *= a;
  return v;
}

/// x < 2^m Y (log Y)^m whenever Y > x / (log x)^m, for Y > (4 m^2)^m.
inline BallReal guzman_luca_bound(int m, const BallReal& Y) {
  if (m <= 0) throw Error(ErrorKind::InvalidArgument, "m must be positive");
  const mpfr_prec_t prec = Y.precision();
  mpz_class threshold;
  mpz_ui_pow_ui(threshold.get_mpz_t(), 4UL * static_cast<unsigned long>(m) * static_cast<unsigned long>(m),
                static_cast<unsigned long>(m));
  if (!certainly_gt(Y, BallReal::exact(threshold, prec)))
    throw Error(ErrorKind::HypothesisViolated, "Y > (4m^2)^m is not certified");
  return pow(BallReal::exact(2, prec), static_cast<unsigned long>(m)) * Y *
         pow(log(Y), static_cast<unsigned long>(m));
}

/// Polynomials over Q, lowest degree first, reduced modulo a monic integer polynomial.
class QPolyMod {
 public:
  /// `modulus` highest degree first with leading coefficient 1.
  explicit QPolyMod(std::vector<mpz_class> modulus) : mod_(std::move(modulus)) {
    if (mod_.size() < 2 || mod_.front() != 1) throw Error(ErrorKind::InvalidArgument, "modulus must be monic");
  }

  using Poly = std::vector<mpq_class>;

  Poly reduce(Poly p) const {
    const std::size_t d = mod_.size() - 1;
    while (p.size() > d) {
      const mpq_class lead = p.back();
      const std::size_t shift = p.size() - 1 - d;
      // x^d = -sum_{i=1}^{d} mod_[i] x^{d-i}
      for (std::size_t i = 1; i <= d; ++i) p[shift + d - i] -= lead * mod_[i];
      p.pop_back();
    }
    trim(p);
    return p;
  }

  Poly mul(const Poly& a, const Poly& b) const {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return reduce(std::move(r));
  }

  static Poly add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), mpq_class(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
  }

  static Poly scale(const Poly& a, const mpq_class& s) {
    Poly r = a;
    for (auto& c : r) c *= s;
    trim(r);
    return r;
  }

  static void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
  }

 private:
  std::vector<mpz_class> mod_;
};

/// Exact test that num(x)/den(x) is a root of `minpoly` in Q[x]/(modulus):
/// sum_i c_i num^{d-i} den^i == 0. Polynomials num/den lowest degree first,
/// minpoly highest degree first.
inline bool minpoly_vanishes(const std::vector<mpz_class>& minpoly, const std::vector<mpz_class>& num,
                             const std::vector<mpz_class>& den, const std::vector<mpz_class>& modulus) {
  QPolyMod ring(modulus);
  auto lift = [](const std::vector<mpz_class>& p) {
    QPolyMod::Poly r(p.begin(), p.end());
    QPolyMod::trim(r);
    return r;
  };
  const auto n = ring.reduce(lift(num));
  const auto d = ring.reduce(lift(den));
  if (d.empty()) throw Error(ErrorKind::InvalidArgument, "denominator vanishes");
  const std::size_t deg = minpoly.size() - 1;
  std::vector<QPolyMod::Poly> npow{{mpq_class(1)}}, dpow{{mpq_class(1)}};
  for (std::size_t i = 0; i < deg; ++i) {
    npow.push_back(ring.mul(npow.back(), n));
    dpow.push_back(ring.mul(dpow.back(), d));
  }
  QPolyMod::Poly acc;
  for (std::size_t i = 0; i <= deg; ++i)
    acc = QPolyMod::add(acc, QPolyMod::scale(ring.mul(npow[deg - i], dpow[i]), mpq_class(minpoly[i])));
  return acc.empty();
}

/// Named Matveev instances for the four linear forms. Each A_1 is the
/// coefficient of (1 + log n)^j, so the returned V is the coefficient of
/// (1 + log n)^{j+1} after substituting B = n.
struct LinearFormPreset {
  std::string name;
  MatveevInstance instance;
  BallReal a1_coefficient;
  int log_power = 0;  // V <= coefficient * (1 + log n)^log_power
};

/// log3 stands for the log of the base; D is the degree of Q(alpha).
struct PresetInputs {
  BallReal log_alpha;
  BallReal log3;
  BallReal h_a_times_D;  // D h(a), log 23 for Padovan
  int D = 3;
};

namespace detail {

inline BallReal matveev_coefficient(const PresetInputs& in, const BallReal& a1) {
  const mpfr_prec_t prec = a1.precision();
  return matveev_prefactor(3, in.D, prec) * a1 * in.log_alpha * (in.log3 * in.D);
}

inline LinearFormPreset make_preset(std::string name, const PresetInputs& in, BallReal a1, int log_power,
                                    const BallReal& n) {
  MatveevInstance inst{3, in.D, n, {a1, in.log_alpha, in.log3 * in.D}};
  return {std::move(name), std::move(inst), std::move(a1), log_power};
}

}  // namespace detail

/// Lambda = a alpha^n 3^{-m} - 1.
inline LinearFormPreset preset_lambda(const PresetInputs& in, const BallReal& n) {
  return detail::make_preset("Lambda", in, in.h_a_times_D, 1, n);
}

/// Lambda_1 = a(alpha^k - 1) alpha^{n_1} 3^{-m} - 1, given k log alpha < c_min (1 + log n).
inline LinearFormPreset preset_lambda1(const PresetInputs& in, const BallReal& c_min, const BallReal& n) {
  BallReal a1 = in.h_a_times_D + const_log2(c_min.precision()) * in.D + c_min;
  return detail::make_preset("Lambda1", in, std::move(a1), 2, n);
}

/// Lambda_2 = a(3^l - 1)^{-1} alpha^n 3^{-m_1} - 1, given l log 3 < c_min (1 + log n).
inline LinearFormPreset preset_lambda2(const PresetInputs& in, const BallReal& c_min, const BallReal& n) {
  BallReal a1 = in.h_a_times_D + c_min * in.D;
  return detail::make_preset("Lambda2", in, std::move(a1), 2, n);
}

/// Lambda_3 = a(alpha^k - 1)/(3^l - 1) alpha^{n_1} 3^{-m_1} - 1. In case 1,
/// k log alpha < c_min(1+log n) and l log 3 < c_case1(1+log n)^2; in case 2
/// the roles swap with c_case2. A_1 covers both.
inline LinearFormPreset preset_lambda3(const PresetInputs& in, const BallReal& c_min, const BallReal& c_case1,
                                       const BallReal& c_case2, const BallReal& n) {
  const BallReal base = in.h_a_times_D + const_log2(c_min.precision()) * in.D;
  BallReal a1 = max(base + c_min + c_case1 * in.D, base + c_case2 + c_min * in.D);
  return detail::make_preset("Lambda3", in, std::move(a1), 3, n);
}

/// Coefficient of (1 + log n)^{log_power} in Matveev's bound for a preset.
inline BallReal preset_coefficient(const PresetInputs& in, const LinearFormPreset& p) {
  return detail::matveev_coefficient(in, p.a1_coefficient);
}

}  // namespace pillai
