#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "kdv/fractional.hpp"
#include "kdv/laplace.hpp"
#include "kdv/numerics.hpp"

using namespace kdv;

namespace {

TimeSignal bump(const Axis& t, double a, double b) {
  TimeSignal f(std::vector<cplx>(t.n), t.step, t.start);
  for (std::size_t n = 0; n < t.n; ++n) {
    const double s = t.at(n);
    if (s > a && s < b) f.samples[n] = std::exp(1.0 - 0.25 * (b - a) * (b - a) / ((s - a) * (b - s)));
  }
  return f;
}

double rel(const TimeSignal& a, const TimeSignal& b) { return sup_diff(a.samples, b.samples) / b.max_abs(); }

}  // namespace

TEST_CASE("order zero is the identity") {
  const Axis t = time_axis(1.0, 257);
  const TimeSignal f = bump(t, 0.1, 0.8);
  CHECK(sup_diff(frac_integrate(f, FracOrder(0.0)).samples, f.samples) == 0.0);
}

TEST_CASE("order one of the ramp is t^2/2") {
  const Axis t = time_axis(2.0, 513);
  TimeSignal f(std::vector<cplx>(t.n), t.step);
  for (std::size_t n = 0; n < t.n; ++n) f.samples[n] = t.at(n);
  const TimeSignal g = frac_integrate(f, FracOrder(1.0));
  double err = 0.0;
  for (std::size_t n = 0; n < t.n; ++n) err = std::max(err, std::abs(g.samples[n] - 0.5 * t.at(n) * t.at(n)));
  CHECK(err < 1e-12);
}

TEST_CASE("half order twice equals order one") {
  const Axis t = time_axis(1.0, 1024);
  const TimeSignal f = bump(t, 0.1, 0.7);
  const TimeSignal twice = frac_integrate(frac_integrate(f, FracOrder(0.5)), FracOrder(0.5));
  CHECK(rel(twice, frac_integrate(f, FracOrder(1.0))) < 1e-7);
}

TEST_CASE("power functions match the Beta-function oracle") {
  const Axis t = time_axis(1.0, 1024);
  for (double gamma : {2.5, 3.0}) {
    for (double beta : {0.3, 0.75, 1.6}) {
      TimeSignal f(std::vector<cplx>(t.n), t.step);
      for (std::size_t n = 0; n < t.n; ++n) f.samples[n] = std::pow(t.at(n), gamma - 1.0) / std::tgamma(gamma);
      const TimeSignal g = frac_integrate(f, FracOrder(beta));
      double err = 0.0;
      for (std::size_t n = 0; n < t.n; ++n) {
        const double s = t.at(n);
        // \int_0^s (s-r)^{beta-1} r^{gamma-1} dr = s^{beta+gamma-1} B(beta, gamma)
        const double want =
            std::pow(s, beta + gamma - 1.0) * boost::math::beta(beta, gamma) / (std::tgamma(beta) * std::tgamma(gamma));
        err = std::max(err, std::abs(g.samples[n] - want));
      }
      CHECK_MESSAGE(err < 1e-7, "gamma=" << gamma << " beta=" << beta << " err=" << err);
    }
  }
}

TEST_CASE("semigroup for complex orders") {
  const Axis t = time_axis(1.0, 1024);
  const TimeSignal f = bump(t, 0.1, 0.75);
  const FracOrder pairs[][2] = {{{0.4, 0.3}, {0.9, -0.2}}, {{-0.6, 0.1}, {1.3, 0.0}}, {{1.7, -0.4}, {-0.8, 0.4}}};
  for (const auto& p : pairs) {
    const TimeSignal lhs = frac_integrate(frac_integrate(f, p[1]), p[0]);
    const TimeSignal rhs = frac_integrate(f, FracOrder(p[0].re + p[1].re, p[0].im + p[1].im));
    CHECK(rel(lhs, rhs) < 1e-6);
  }
}

TEST_CASE("order one is the running integral and order minus one the derivative") {
  const Axis t = time_axis(1.0, 1024);
  const TimeSignal f = bump(t, 0.2, 0.9);
  // Oracle: adaptive quadrature of the closed-form bump.
  auto fx = [](double s) { return s > 0.2 && s < 0.9 ? std::exp(1.0 - 0.1225 / ((s - 0.2) * (0.9 - s))) : 0.0; };
  const TimeSignal g = frac_integrate(f, FracOrder(1.0));
  for (std::size_t n : {300u, 600u, 900u}) {
    const double want = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fx, 0.0, t.at(n), 12, 1e-13);
    CHECK(std::abs(g.samples[n].real() - want) < 1e-9);
  }
  const TimeSignal d = frac_integrate(f, FracOrder(-1.0));
  const double h = 1e-5;
  for (std::size_t n : {300u, 500u, 800u}) {
    const double s = t.at(n);
    const double want = (fx(s + h) - fx(s - h)) / (2.0 * h);
    CHECK(std::abs(d.samples[n].real() - want) < 1e-6 * 10.0);
  }
}

TEST_CASE("symbol values") {
  CHECK(std::abs(frac_symbol(FracOrder(0.0), 2.5) - cplx(1.0)) < 1e-15);
  for (double tau : {0.3, 1.0, 7.0}) CHECK(std::abs(frac_symbol(FracOrder(1.0), tau) - cplx(0.0, -1.0 / tau)) < 1e-14);
  for (double g : {0.5, 2.0}) {
    double worst = 0.0;
    for (double tau : {-50.0, -1.0, -0.01, 0.01, 1.0, 50.0})
      worst = std::max(worst, std::abs(frac_symbol(FracOrder(0.0, g), tau)));
    CHECK(worst <= 2.0 * std::cosh(std::numbers::pi * g / 2.0));
  }
  CHECK_THROWS_AS(frac_symbol(FracOrder(0.5), 0.0), DomainError);
}

TEST_CASE("quadrature agrees with the spectral realization") {
  const Axis t = time_axis(1.0, 1024);
  const TimeSignal f = bump(t, 0.1, 0.7);
  for (FracOrder a : {FracOrder(0.5), FracOrder(1.4, 0.3), FracOrder(-0.4, -0.2)})
    CHECK(rel(frac_integrate(f, a), frac_integrate_spectral(f, a)) < 1e-6);
}

TEST_CASE("serial and parallel paths agree bit for bit") {
  const Axis t = time_axis(1.0, 777);
  const TimeSignal f = bump(t, 0.1, 0.9);
  for (FracOrder a : {FracOrder(0.3, 0.2), FracOrder(-1.2)})
    CHECK(sup_diff(frac_integrate(f, a, Exec::serial).samples, frac_integrate(f, a, Exec::parallel).samples) == 0.0);
}

TEST_CASE("non-causal input is rejected") {
  TimeSignal f(std::vector<cplx>(16, 1.0), 0.1, -0.5, false);
  CHECK_THROWS_AS(frac_integrate(f, FracOrder(0.5)), DomainError);
}

TEST_CASE("spatial integral matches quadrature of a Gaussian") {
  const Axis x = staggered_axis(20.0, 1024), t = time_axis(1.0, 2);
  SpaceTimeField v(x, t);
  for (std::size_t j = 0; j < x.n; ++j) v(j, 0) = v(j, 1) = std::exp(-x.at(j) * x.at(j));
  const double beta = 0.6;
  const SpaceTimeField left = x_frac_integrate(v, cplx(beta), Side::left);
  const SpaceTimeField right = x_frac_integrate(v, cplx(beta), Side::right);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (std::size_t j : {400u, 512u, 600u}) {
    const double at = x.at(j);
    auto kl = [&](double y) { return std::pow(at - y, beta - 1.0) * std::exp(-y * y); };
    auto kr = [&](double y) { return std::pow(y - at, beta - 1.0) * std::exp(-y * y); };
    const double wl = ts.integrate(kl, -20.0, at) / std::tgamma(beta);
    const double wr = ts.integrate(kr, at, 20.0) / std::tgamma(beta);
    CHECK(std::abs(left(j, 0).real() - wl) < 1e-6);
    CHECK(std::abs(right(j, 1).real() - wr) < 1e-6);
  }
}

TEST_CASE("causal transform inverts its forward map") {
  const Axis t = time_axis(1.0, 300);
  const TimeSignal f = bump(t, 0.1, 0.9);
  const CausalTransform tr(t.n, t.step);
  CHECK(sup_diff(tr.inverse(tr.forward(f.samples)), f.samples) < 1e-12);
}
