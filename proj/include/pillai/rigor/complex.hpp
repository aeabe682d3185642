#pragma once

#include "pillai/rigor/ball.hpp"

namespace pillai {

/// Rectangular complex enclosure; only the operations root fitting needs.
struct ComplexBall {
  BallReal re;
  BallReal im;

  static ComplexBall real(const BallReal& x) { return {x, BallReal::exact(0, x.precision())}; }
};

inline ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) { return {a.re + b.re, a.im + b.im}; }
inline ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) { return {a.re - b.re, a.im - b.im}; }
inline ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline ComplexBall operator*(const BallReal& s, const ComplexBall& z) { return {s * z.re, s * z.im}; }

inline ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) {
  const BallReal den = sqr(b.re) + sqr(b.im);
  return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

inline ComplexBall conj(const ComplexBall& z) { return {z.re, -z.im}; }

inline BallReal norm(const ComplexBall& z) { return sqr(z.re) + sqr(z.im); }
inline BallReal abs(const ComplexBall& z) { return sqrt(norm(z)); }

inline ComplexBall pow(const ComplexBall& z, unsigned long n) {
  ComplexBall result = ComplexBall::real(BallReal::exact(1, z.re.precision()));
  ComplexBall base = z;
  while (n > 0) {
    if (n & 1UL) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace pillai
