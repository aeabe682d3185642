#include <gtest/gtest.h>

#include "properties.hpp"

using namespace pillai;

namespace {

const RecurrenceSpec kPadovan = RecurrenceSpec::padovan();
const BinetWindow kWindow{mpq_class(72, 100), mpq_class(73, 100)};

// mpmath, 50 digits
constexpr const char* kAlpha = "1.3247179572447460259609088544780973407344040569017";
constexpr const char* kBetaAbs = "0.8688369618327093018065699641910972224774656620145";
constexpr const char* kA = "0.72212441830311284114380309256468687756507175570919";
constexpr const char* kBAbs = "0.24537486102673100708099100495932335307576440730311";

BallReal ref(const char* digits) { return props::quoted(digits); }

}  // namespace

TEST(Sequence, PadovanTermsMatchListing) {
  // 0, 1, 1, 1, 2, 2, 3, 4, 5, 7, 9, 12, 16, 21, 28, 37, 49, 65, 86, 114, 151, 200, 265, 351, 465, 616, 816
  const std::vector<long> want = {0,  1,  1,  1,  2,  2,  3,  4,   5,   7,   9,   12,  16, 21,
                                  28, 37, 49, 65, 86, 114, 151, 200, 265, 351, 465, 616, 816};
  const auto u = terms(kPadovan, want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(u[i], want[i]) << i;
  EXPECT_EQ(term(kPadovan, 26), 816);
}

TEST(Sequence, OtherPresets) {
  const auto f = terms(RecurrenceSpec::fibonacci(), 11);
  EXPECT_EQ(f[10], 55);
  const auto t = terms(RecurrenceSpec::tribonacci(), 11);
  EXPECT_EQ(t[10], 81);  // 0, 0, 1, 1, 2, 4, 7, 13, 24, 44, 81
}

TEST(Sequence, NegativeIndicesRunBackwards) {
  // P_{n} = P_{n+3} - P_{n+1}: P_{-1} = P_2 - P_0 = 1, P_{-2} = P_1 - P_{-1} = 0, P_{-3} = P_0 - P_{-2} = 0
  EXPECT_EQ(term_signed(kPadovan, -1), mpz_class(1));
  EXPECT_EQ(term_signed(kPadovan, -2), mpz_class(0));
  EXPECT_EQ(term_signed(kPadovan, -3), mpz_class(0));
  EXPECT_EQ(term_signed(kPadovan, 5), mpz_class(2));
}

TEST(Sequence, InvalidSpecRejected) {
  RecurrenceSpec bad{3, {0, 1}, {0, 1, 1}, "bad"};
  EXPECT_THROW(terms(bad, 5), Error);
}

TEST(Roots, DominantRootMatchesReference) {
  const CubicRoots r = characteristic_roots(kPadovan, 256);
  EXPECT_TRUE(r.alpha.overlaps(ref(kAlpha)));
  EXPECT_TRUE(r.beta_abs.overlaps(ref(kBetaAbs)));
  EXPECT_LT(mpfr_get_d(r.alpha.width().get(), MPFR_RNDU), 1e-70);
  // alpha^3 - alpha - 1 encloses zero
  EXPECT_TRUE((powi(r.alpha, 3) - r.alpha - 1).contains(0L));
  // |beta|^2 = 1/alpha
  EXPECT_TRUE((sqr(r.beta_abs) * r.alpha).overlaps(BallReal::exact(1, 256)));
}

TEST(Roots, CardanoFormAgrees) {
  const BallReal cardano = padovan_radical_alpha(256);
  EXPECT_TRUE(cardano.overlaps(characteristic_roots(kPadovan, 256).alpha));
}

TEST(Roots, QuadraticCase) {
  const CubicRoots r = characteristic_roots(RecurrenceSpec::fibonacci(), 128);
  EXPECT_TRUE(r.alpha.overlaps(props::quoted("1.6180339887498948482045868343656381177", 35, 128)));
  EXPECT_TRUE(r.beta_abs.overlaps(props::quoted("0.6180339887498948482045868343656381177", 35, 128)));
}

TEST(Roots, TribonacciIsAccepted) {
  const CubicRoots r = characteristic_roots(RecurrenceSpec::tribonacci(), 128);
  EXPECT_TRUE(r.alpha.overlaps(props::quoted("1.8392867552141611325518525646532866004", 35, 128)));
}

TEST(Roots, RealMinorRootsRejected) {
  // x^3 = 6x^2 - 11x + 6 has roots 1, 2, 3
  const RecurrenceSpec s{3, {6, -11, 6}, {0, 1, 2}, "real"};
  EXPECT_THROW(characteristic_roots(s, 128), Error);
}

TEST(Binet, WindowSelectsShiftedConvention) {
  const CubicRoots r = characteristic_roots(kPadovan, 256);
  const BinetCoefficients c = binet_fit(kPadovan, r, kWindow);
  EXPECT_EQ(c.convention_offset, 1);
  EXPECT_TRUE(c.a.overlaps(ref(kA)));
  EXPECT_TRUE(c.b_abs().overlaps(ref(kBAbs)));
  EXPECT_TRUE(c.a.overlaps(padovan_closed_form_a(r.alpha)));
}

TEST(Binet, UnshiftedFitDiffers) {
  const CubicRoots r = characteristic_roots(kPadovan, 256);
  const BinetCoefficients c = binet_fit(kPadovan, r);
  EXPECT_EQ(c.convention_offset, 0);
  EXPECT_FALSE(c.a.overlaps(ref(kA)));
}

TEST(Binet, WindowWithNoMatchIsAConventionMismatch) {
  const CubicRoots r = characteristic_roots(kPadovan, 256);
  try {
    binet_fit(kPadovan, r, BinetWindow{mpq_class(10), mpq_class(11)});
    FAIL() << "expected ConventionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConventionMismatch);
  }
}

TEST(Binet, ResidualBoundHoldsAgainstExactTerms) {
  const auto r = props::binet_residual(kPadovan, 200);
  EXPECT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(r.cases, 201);
}

TEST(Binet, LibraryResidualBoundCoversActualResidual) {
  const CubicRoots r = characteristic_roots(kPadovan, 256);
  const BinetCoefficients c = binet_fit(kPadovan, r, kWindow);
  const auto u = terms(kPadovan, 120);
  for (unsigned long k = 0; k + 1 < u.size(); ++k) {
    const BallReal resid = abs(BallReal::exact(u[k + 1], 256) - c.a * pow(r.alpha, k));
    EXPECT_TRUE(certainly_le(resid, binet_residual(c, r, k))) << k;
  }
}

TEST(Growth, AnalyticBoundsHoldUpToAThousand) {
  const auto r = props::growth_bounds(kPadovan, 1, 4, 1000);
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Growth, LibraryCheckAgreesAndCertifiesTheTail) {
  const CubicRoots r = characteristic_roots(kPadovan, 256);
  const BinetCoefficients c = binet_fit(kPadovan, r, kWindow);
  const GrowthReport rep = growth_bounds_check(kPadovan, r, 1, 4, 1000, 2, 1, &c);
  EXPECT_TRUE(rep.all_hold());
  EXPECT_TRUE(rep.tail_certified);
}

TEST(Growth, BoundsFailBelowFour) {
  // Q_3 = P_4 = 2 > alpha^2
  const CubicRoots r = characteristic_roots(kPadovan, 256);
  const GrowthReport rep = growth_bounds_check(kPadovan, r, 1, 1, 3, 2, 1);
  EXPECT_FALSE(rep.all_hold());
}
