#include <gtest/gtest.h>

#include "properties.hpp"

using namespace pillai;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

const BallReal& alpha() {
  static const BallReal a = characteristic_roots(RecurrenceSpec::padovan(), 256).alpha;
  return a;
}

}  // namespace

TEST(Height, RationalUsesTheLargerOfNumeratorAndDenominator) {
  EXPECT_TRUE(height_rational(3, 7).overlaps(log(BallReal::exact(7, kDefaultBits))));
  EXPECT_TRUE(height_rational(-9, 4).overlaps(log(BallReal::exact(9, kDefaultBits))));
  EXPECT_TRUE(height_rational(0, 1).contains(0L));
  EXPECT_EQ(kind_of([] { height_rational(6, 4); }), ErrorKind::NotReduced);
  EXPECT_EQ(kind_of([] { height_rational(1, 0); }), ErrorKind::InvalidArgument);
}

TEST(Height, CoefficientOfPadovanBinetForm) {
  const CubicRoots r = characteristic_roots(RecurrenceSpec::padovan(), 256);
  const BinetCoefficients c = binet_fit(RecurrenceSpec::padovan(), r, BinetWindow{mpq_class(72, 100), mpq_class(73, 100)});
  const BallReal h = height_from_minpoly({{23, -23, 6, -1}, {c.a, c.b_abs(), c.b_abs()}}, 256);
  // every conjugate lies inside the unit disc, so h = log 23 / 3
  EXPECT_TRUE(h.overlaps(props::quoted("1.04516473864304989693558427727006537281412677", 43)));
  EXPECT_TRUE(h.overlaps(log(BallReal::exact(23, 256)) / 3));
}

TEST(Height, QuadraticIrrational) {
  const BallReal s2 = sqrt(BallReal::exact(2, 256));
  const BallReal h = height_from_minpoly({{1, 0, -2}, {s2, s2}}, 256);
  EXPECT_TRUE(h.overlaps(const_log2(256) / 2));
}

TEST(Height, MalformedDescriptionsRejected) {
  const BallReal one = BallReal::exact(1, 64);
  EXPECT_EQ(kind_of([&] { height_from_minpoly({{2, 0, -4}, {one, one}}); }), ErrorKind::NotReduced);
  EXPECT_EQ(kind_of([&] { height_from_minpoly({{-1, 0, 2}, {one, one}}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { height_from_minpoly({{1, 0, -2}, {one}}); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([&] { height_from_minpoly({{1}, {}}); }), ErrorKind::InvalidArgument);
}

TEST(Height, CombinationBounds) {
  const BallReal a = BallReal::exact(2, 128), b = BallReal::exact(3, 128);
  EXPECT_TRUE(height_bound(HeightCombination::Sum, {a, b}).overlaps(BallReal::exact(5, 128) + const_log2(128)));
  EXPECT_TRUE(height_bound(HeightCombination::Product, {a, b, a}).contains(7L));
  EXPECT_TRUE(height_bound(HeightCombination::Power, {b}, -4).contains(12L));
  EXPECT_THROW(height_bound(HeightCombination::Sum, {}), Error);
  // h(7/3 + 1/2) = log 17 against h(7/3) + h(1/2) + log 2
  const BallReal sum = height_rational(17, 6, 128);
  EXPECT_TRUE(certainly_le(sum, height_sum_bound(height_rational(7, 3, 128), height_rational(1, 2, 128))));
}

TEST(Matveev, PrefactorForThreeLogarithmsOverACubicField) {
  const BallReal c = matveev_prefactor(3, 3, 256);
  EXPECT_TRUE(c.overlaps(props::quoted("2704431160679.11039476895409340809476507067925", 30)));
}

TEST(Matveev, LowerBoundMultipliesTheHeights) {
  const mpfr_prec_t p = 256;
  const MatveevInstance inst{3, 3, BallReal::exact(100, p),
                             {BallReal::exact(2, p), BallReal::exact(3, p), BallReal::exact(5, p)}};
  const BallReal want = matveev_prefactor(3, 3, p) * (log(BallReal::exact(100, p)) + 1) * 30;
  EXPECT_TRUE(matveev_lower_bound(inst).overlaps(want));
}

TEST(Matveev, HypothesesAreChecked) {
  const mpfr_prec_t p = 64;
  const BallReal one = BallReal::exact(1, p);
  MatveevInstance small_a{2, 1, BallReal::exact(10, p), {one, BallReal::decimal("0.1", p)}};
  EXPECT_EQ(kind_of([&] { matveev_lower_bound(small_a); }), ErrorKind::HypothesisViolated);
  MatveevInstance small_b{2, 1, BallReal::decimal("0.5", p), {one, one}};
  EXPECT_EQ(kind_of([&] { matveev_lower_bound(small_b); }), ErrorKind::HypothesisViolated);
  MatveevInstance wrong_t{3, 1, one, {one, one}};
  EXPECT_EQ(kind_of([&] { matveev_lower_bound(wrong_t); }), ErrorKind::InvalidArgument);
}

TEST(Matveev, FirstLinearFormCoefficient) {
  const mpfr_prec_t p = 256;
  const BallReal la = log(alpha());
  const PresetInputs in{la, log(BallReal::exact(3, p)), log(BallReal::exact(23, p)), 3};
  const LinearFormPreset lam = preset_lambda(in, BallReal::exact(1000, p));
  EXPECT_EQ(lam.log_power, 1);
  EXPECT_EQ(lam.instance.t, 3);
  EXPECT_TRUE(preset_coefficient(in, lam).overlaps(props::quoted("7858909749684.67015942354061009", 16)));
  EXPECT_NO_THROW(matveev_lower_bound(lam.instance));
}

TEST(GuzmanLuca, BoundAndHypothesis) {
  const BallReal y = BallReal::exact(1000, 128);
  const BallReal want = BallReal::exact(4, 128) * y * sqr(log(y));
  EXPECT_TRUE(guzman_luca_bound(2, y).overlaps(want));
  // (4 m^2)^m = 256 for m = 2
  EXPECT_EQ(kind_of([] { guzman_luca_bound(2, BallReal::exact(256, 128)); }), ErrorKind::HypothesisViolated);
  EXPECT_EQ(kind_of([] { guzman_luca_bound(0, BallReal::exact(10, 128)); }), ErrorKind::InvalidArgument);
}

TEST(GuzmanLuca, ExhaustiveSmallRange) {
  for (int m : {1, 2, 3}) {
    const auto r = props::guzman_luca_exhaustive(m, 200'000);
    EXPECT_TRUE(r.ok) << m << ": " << r.detail;
  }
}

TEST(Minpoly, BinetCoefficientIsARootOfItsPolynomial) {
  // a = (alpha + alpha^2) / (3 alpha^2 - 1) in Q[x]/(x^3 - x - 1)
  EXPECT_TRUE(minpoly_vanishes({23, -23, 6, -1}, {0, 1, 1}, {-1, 0, 3}, {1, 0, -1, -1}));
  EXPECT_FALSE(minpoly_vanishes({23, -23, 6, 1}, {0, 1, 1}, {-1, 0, 3}, {1, 0, -1, -1}));
  // 1/sqrt 5 = 1/(2 phi - 1) in Q[x]/(x^2 - x - 1)
  EXPECT_TRUE(minpoly_vanishes({5, 0, -1}, {1}, {-1, 2}, {1, -1, -1}));
  EXPECT_THROW(minpoly_vanishes({1, -1}, {1}, {0}, {1, -1, -1}), Error);
  EXPECT_THROW(minpoly_vanishes({1, -1}, {1}, {1}, {2, -1, -1}), Error);
}

TEST(Minpoly, ReductionMatchesNumericEvaluation) {
  // alpha^5 reduced mod x^3 - x - 1 is alpha^2 + alpha + 1
  QPolyMod ring({1, 0, -1, -1});
  const auto r = ring.reduce({0, 0, 0, 0, 0, 1});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], 1);
  EXPECT_EQ(r[1], 1);
  EXPECT_EQ(r[2], 1);
  EXPECT_TRUE(powi(alpha(), 5).overlaps(sqr(alpha()) + alpha() + 1));
}
