#pragma once

namespace kdv {

/// Value and slope of A(x) = (1/2pi) \int e^{i x xi} e^{i xi^3} d xi.
/// A(x) = 3^{-1/3} Ai(3^{-1/3} x) in terms of the standard Airy function,
/// and A'' = (x/3) A.
struct AiryValue {
  double a = 0.0;
  double ap = 0.0;
  double x = 0.0;
};

AiryValue airy(double x);

/// \int_x^\infty A(y) dy. Equals 1/3 at x = 0 and tends to 1 as x -> -inf.
double airy_integral_tail(double x);

/// \int_0^\infty x^{lambda-1} A(-x) dx in closed form, 0 < lambda < 1/4.
double airy_mellin_left(double lambda);

/// \int_0^\infty x^{lambda-1} A(x) dx in closed form, lambda > 0.
/// At lambda = 1, 4, 7, ... the removable singularity is filled in.
double airy_mellin_right(double lambda);

/// Quadrature realizations of the two Mellin transforms, independent of the
/// closed forms. The left one sums the oscillatory tail half-wave by
/// half-wave and accelerates the partial sums by repeated averaging.
double airy_mellin_left_quadrature(double lambda);
double airy_mellin_right_quadrature(double lambda);

namespace detail {
/// Standard-normalization Ai and Ai' (series near the origin, Bessel-K
/// integral for moderate positive arguments, asymptotics beyond).
void airy_std(double z, double& ai, double& aip);
/// \int_z^\infty Ai(s) ds for the standard normalization.
double airy_std_tail(double z);
}  // namespace detail

}  // namespace kdv
