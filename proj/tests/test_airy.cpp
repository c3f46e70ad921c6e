#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "kdv/airy.hpp"
#include "kdv/types.hpp"

using namespace kdv;

namespace {
const double c3 = std::cbrt(1.0 / 3.0);
double ref_a(double x) { return c3 * boost::math::airy_ai(c3 * x); }
double ref_ap(double x) { return c3 * c3 * boost::math::airy_ai_prime(c3 * x); }
}  // namespace

TEST_CASE("values and slopes against Boost") {
  for (double x = -30.0; x <= 20.0; x += 0.37) {
    const AiryValue v = airy(x);
    CHECK_MESSAGE(std::abs(v.a - ref_a(x)) <= 1e-11, "x=" << x);
    CHECK_MESSAGE(std::abs(v.ap - ref_ap(x)) <= 1e-10 * std::max(1.0, std::abs(ref_ap(x))), "x=" << x);
  }
}

TEST_CASE("values at the origin") {
  CHECK(airy(0.0).a == doctest::Approx(1.0 / (3.0 * std::tgamma(2.0 / 3.0))).epsilon(1e-13));
  CHECK(airy(0.0).ap == doctest::Approx(-1.0 / (3.0 * std::tgamma(1.0 / 3.0))).epsilon(1e-13));
  CHECK(airy_integral_tail(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("A'' = x A / 3") {
  const double h = 1e-3;
  for (double x : {-8.0, -2.5, -0.4, 0.7, 3.0, 6.0}) {
    const double d2 = (airy(x + h).ap - airy(x - h).ap) / (2.0 * h);
    CHECK(std::abs(d2 - x * airy(x).a / 3.0) < 1e-6);
  }
}

TEST_CASE("integral tail") {
  for (double x : {-12.0, -3.0, 0.5, 2.0, 7.0}) {
    const double want = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(ref_a, x, 60.0, 15, 1e-14);
    CHECK_MESSAGE(std::abs(airy_integral_tail(x) - want) < 1e-10, "x=" << x);
  }
  // The total mass is 1, approached in an oscillating fashion.
  CHECK(std::abs(airy_integral_tail(-400.0) - 1.0) < 0.02);
}

TEST_CASE("right Mellin transform") {
  boost::math::quadrature::exp_sinh<double> es;
  for (double lam : {0.5, 1.0, 2.0, 3.5}) {
    const double want = es.integrate([&](double x) { return std::pow(x, lam - 1.0) * ref_a(x); });
    CHECK(airy_mellin_right(lam) == doctest::Approx(want).epsilon(1e-9));
    CHECK(airy_mellin_right_quadrature(lam) == doctest::Approx(want).epsilon(1e-8));
  }
  // Removable singularities are filled in continuously.
  for (double lam : {1.0, 4.0, 7.0})
    CHECK(airy_mellin_right(lam) == doctest::Approx(airy_mellin_right(lam + 1e-7)).epsilon(1e-5));
  CHECK(airy_mellin_right(1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("left Mellin transform") {
  for (double lam : {0.03, 0.1, 0.2, 0.24})
    CHECK(airy_mellin_left(lam) == doctest::Approx(airy_mellin_left_quadrature(lam)).epsilon(1e-6));
  // x^{lambda-1} is not integrable at 0 in the limit, so the transform blows up like 1/lambda.
  CHECK(airy_mellin_left(1e-4) * 1e-4 == doctest::Approx(airy(0.0).a).epsilon(1e-3));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(airy_mellin_left(0.0), DomainError);
  CHECK_THROWS_AS(airy_mellin_left(0.25), DomainError);
  CHECK_THROWS_AS(airy_mellin_right(-1.0), DomainError);
}
