#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "properties.hpp"

using namespace pillai;

namespace {

std::vector<long> quotients(const CFExpansion& e) {
  std::vector<long> out;
  for (const auto& a : e.quotients) out.push_back(a.get_si());
  return out;
}

RealProvider sqrt_of(long n) {
  return [n](mpfr_prec_t b) { return sqrt(BallReal::exact(n, b)); };
}

RealProvider log_ratio(long x, long y) {
  return [x, y](mpfr_prec_t b) { return log(BallReal::exact(x, b)) / log(BallReal::exact(y, b)); };
}

const NumberContext& padovan() {
  static const NumberContext ctx(RecurrenceSpec::padovan(), 3, BinetWindow{mpq_class(72, 100), mpq_class(73, 100)});
  return ctx;
}

}  // namespace

TEST(ContinuedFraction, ClassicalExpansions) {
  EXPECT_EQ(quotients(expand(sqrt_of(2), CFStop::terms(10))), (std::vector<long>{1, 2, 2, 2, 2, 2, 2, 2, 2, 2}));
  const RealProvider phi = [](mpfr_prec_t b) { return (sqrt(BallReal::exact(5, b)) + 1) / 2; };
  EXPECT_EQ(quotients(expand(phi, CFStop::terms(40))), std::vector<long>(40, 1));
  // e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]
  const RealProvider e = [](mpfr_prec_t b) { return exp(BallReal::exact(1, b)); };
  const auto q = quotients(expand(e, CFStop::terms(60)));
  EXPECT_EQ(q[0], 2);
  for (std::size_t i = 1; i < q.size(); ++i) EXPECT_EQ(q[i], i % 3 == 2 ? 2 * static_cast<long>(i + 1) / 3 : 1) << i;
}

TEST(ContinuedFraction, RationalInputTerminates) {
  const RealProvider x = [](mpfr_prec_t b) { return BallReal::rational(mpq_class(355, 113), b); };
  // an exact rational needs a ball of width zero; 113 is odd, so use a dyadic value
  const RealProvider d = [](mpfr_prec_t b) { return BallReal::rational(mpq_class(45, 16), b); };
  const CFExpansion e = expand(d, CFStop::terms(10));
  EXPECT_TRUE(e.terminated);
  EXPECT_EQ(quotients(e), (std::vector<long>{2, 1, 4, 3}));
  EXPECT_EQ(convergent(e, 3), std::make_pair(mpz_class(45), mpz_class(16)));
  const CFExpansion f = expand(x, CFStop::terms(2));
  EXPECT_EQ(quotients(f), (std::vector<long>{3, 7}));
}

TEST(ContinuedFraction, LogRatioOfPadovanRoot) {
  PrecisionPolicy p;
  p.initial_bits = 512;
  const CFExpansion e = expand(padovan().tau(), CFStop::terms(89), p);
  const std::vector<long> head = {0, 3, 1, 9, 1, 2, 1, 4, 1, 2, 2, 1, 1, 3, 1, 2, 1, 20, 1, 1};
  const auto all = quotients(e);
  EXPECT_EQ(std::vector<long>(all.begin(), all.begin() + 20), head);
  const auto [p88, q88] = convergent(e, 88);
  EXPECT_EQ(p88, mpz_class("3123049185137266854491675319812527194766363593581"));
  EXPECT_EQ(q88, mpz_class("12201370578769620000479260876419428374896683408344"));
  // the reciprocal drops the leading zero
  const CFExpansion r = expand(padovan().tau_reciprocal(), CFStop::terms(12), p);
  EXPECT_EQ(quotients(r), (std::vector<long>{3, 1, 9, 1, 2, 1, 4, 1, 2, 2, 1, 1}));
}

TEST(ContinuedFraction, ConvergentLaws) {
  for (const RealProvider& x : {padovan().tau(), padovan().tau_reciprocal(), sqrt_of(7), log_ratio(2, 3)}) {
    const CFExpansion e = expand(x, CFStop::terms(100));
    const auto r = props::convergent_laws(e, x);
    EXPECT_TRUE(r.ok) << r.detail;
    EXPECT_EQ(r.cases, 100);
  }
}

TEST(ContinuedFraction, StopOnDenominatorThreshold) {
  const mpz_class t("1000000000000");
  const CFExpansion e = expand(log_ratio(2, 3), CFStop::q_exceeds(t, 3));
  const auto k = first_index_above(e, t);
  ASSERT_TRUE(k.has_value());
  EXPECT_LE(e.q[*k - 1], t);
  EXPECT_EQ(e.size(), *k + 4);
  EXPECT_FALSE(first_index_above(e, e.q.back()).has_value());
}

TEST(ContinuedFraction, IndexBeyondCertifiedIsAnError) {
  const CFExpansion e = expand(sqrt_of(2), CFStop::terms(5));
  EXPECT_NO_THROW(convergent(e, 4));
  for (long k : {-1L, 5L, 100L}) {
    try {
      convergent(e, k);
      FAIL() << k;
    } catch (const Error& err) {
      EXPECT_EQ(err.kind(), ErrorKind::IndexBeyondCertified);
    }
  }
}

TEST(ContinuedFraction, PrecisionCapIsReported) {
  PrecisionPolicy p;
  p.initial_bits = 32;
  p.max_bits = 64;
  try {
    expand(sqrt_of(2), CFStop::terms(200), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PrecisionExhausted);
  }
}

TEST(Reduction, FirstRoundForPadovan) {
  const mpfr_prec_t bits = 256;
  const auto& e = padovan().at(bits);
  const RealProvider mu = [](mpfr_prec_t b) { return padovan().at(b).log_a / padovan().at(b).log_base; };
  const ReductionOutcome o =
      dp_reduce({padovan().tau(), mu, BallReal::exact(36, bits), e.roots.alpha,
                 mpz_class("20000000000000000000000000000000000000000000000")});
  EXPECT_EQ(o.convergent_index, 88);
  EXPECT_EQ(o.q, mpz_class("12201370578769620000479260876419428374896683408344"));
  EXPECT_TRUE(o.epsilon.overlaps(props::quoted("0.436532892520904549187647726509", 24)));
  EXPECT_TRUE(o.w.overlaps(props::quoted("417.63236492896900762379107533", 24)));
  EXPECT_EQ(o.w_bound, 418);
  EXPECT_EQ(o.max_exponent(), 417);
}

TEST(Reduction, DependentShiftNeverGivesPositiveEpsilon) {
  // mu = 2 tau: ||2 q tau|| <= 2 ||q tau|| < M ||q tau||
  const RealProvider tau = log_ratio(2, 3);
  const RealProvider mu = [](mpfr_prec_t b) { return log_ratio(2, 3)(b) * 2; };
  try {
    dp_reduce({tau, mu, BallReal::exact(10, 128), BallReal::exact(2, 128), mpz_class(1000)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EpsilonNeverPositive);
  }
}

TEST(Reduction, InvalidProblemsRejected) {
  const RealProvider tau = log_ratio(2, 3);
  EXPECT_THROW(dp_reduce({tau, tau, BallReal::exact(0, 64), BallReal::exact(2, 64), 10}), Error);
  EXPECT_THROW(dp_reduce({tau, tau, BallReal::exact(1, 64), BallReal::exact(1, 64), 10}), Error);
  EXPECT_THROW(dp_reduce({tau, tau, BallReal::exact(1, 64), BallReal::exact(2, 64), 0}), Error);
  EXPECT_THROW(dp_reduce({tau, nullptr, BallReal::exact(1, 64), BallReal::exact(2, 64), 10}), Error);
}

// Brute force over every u <= M: no solution of |u tau - v + mu| < A B^{-w} has w >= w_bound.
TEST(Reduction, BoundHoldsAgainstExhaustiveSearch) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> num(1, 997);
  const long M = 20000;
  for (int trial = 0; trial < 20; ++trial) {
    const long s = num(rng);
    const RealProvider tau = log_ratio(2, 5);
    const RealProvider mu = [s](mpfr_prec_t b) { return log(BallReal::exact(s, b)) / log(BallReal::exact(5, b)); };
    const double A = 4.0, B = 2.0;
    ReductionOutcome o;
    try {
      o = dp_reduce({tau, mu, BallReal::exact(4, 128), BallReal::exact(2, 128), mpz_class(M)});
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::EpsilonNeverPositive) << s;
      continue;
    }
    const long double t = std::log(2.0L) / std::log(5.0L), m = std::log(static_cast<long double>(s)) / std::log(5.0L);
    const long double floor_value = A * std::pow(B, -static_cast<long double>(o.w_bound.get_si()));
    for (long u = 1; u <= M; ++u) {
      const long double x = u * t + m;
      const long double d = std::fabs(x - std::nearbyint(x));
      ASSERT_GE(d * (1 + 1e-12L), floor_value) << "s = " << s << " u = " << u;
    }
  }
}

TEST(Reduction, FamilyReportsExceptionalKeysAndIsThreadIndependent) {
  const RealProvider tau = log_ratio(2, 3);
  // key 0 gives mu = 2 tau, every other key an independent shift
  const auto mu = [](long key, mpfr_prec_t b) {
    if (key == 0) return log_ratio(2, 3)(b) * 2;
    return log(BallReal::exact(key + 4, b)) / log(BallReal::exact(3, b));
  };
  const std::vector<long> keys = {0, 1, 3, 7, 9, 13};
  const BallReal A = BallReal::exact(5, 128), B = BallReal::exact(3, 128);
  const auto one = family_reduce(tau, mu, keys, A, B, mpz_class(100000), {}, 1);
  const auto four = family_reduce(tau, mu, keys, A, B, mpz_class(100000), {}, 4);
  EXPECT_EQ(one.exceptional, std::vector<long>{0});
  EXPECT_EQ(four.exceptional, std::vector<long>{0});
  EXPECT_EQ(one.max_w_bound, four.max_w_bound);
  for (std::size_t i = 1; i < keys.size(); ++i) {
    ASSERT_TRUE(one.per_key[i] && four.per_key[i]);
    EXPECT_EQ(one.per_key[i]->w_bound, four.per_key[i]->w_bound);
    EXPECT_EQ(one.per_key[i]->q, four.per_key[i]->q);
    EXPECT_TRUE(certified_sign(one.per_key[i]->epsilon) == Sign::Positive);
  }
  EXPECT_THROW(family_reduce(tau, mu, std::vector<long>{}, A, B, mpz_class(10)), Error);
}
