#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kdv/spaces.hpp"

using namespace kdv;

namespace {

constexpr double kPi = std::numbers::pi;

SpatialProfile gaussian(const Axis& x) {
  SpatialProfile p;
  p.x0 = x.start;
  p.dx = x.step;
  p.pad = 0.5 * x.step * static_cast<double>(x.n);
  for (std::size_t j = 0; j < x.n; ++j) p.samples.push_back(std::exp(-x.at(j) * x.at(j)));
  return p;
}

double bracket(double v) { return std::sqrt(1.0 + v * v); }

}  // namespace

TEST_CASE("Sobolev norms of a Gaussian") {
  const SpatialProfile phi = gaussian(staggered_axis(20.0, 512));
  // |phi^|^2 = pi e^{-xi^2/2}.
  const double l2sq = std::sqrt(kPi / 2.0);
  CHECK(sobolev_norm(phi, 0.0) == doctest::Approx(std::sqrt(l2sq)).epsilon(1e-12));
  CHECK(sobolev_norm(phi, 1.0) == doctest::Approx(std::sqrt(2.0 * l2sq)).epsilon(1e-12));
  CHECK(sobolev_norm(phi, -0.5) < sobolev_norm(phi, 0.0));
}

TEST_CASE("space-time norms of a single mode") {
  const Axis x = staggered_axis(8.0, 64), t{0.0, 4.0 / 32.0, 32};
  const double xi = 2.0 * kPi * 3.0 / 16.0, tau = 2.0 * kPi * 5.0 / 4.0;
  SpaceTimeField u(x, t);
  for (std::size_t n = 0; n < t.n; ++n)
    for (std::size_t j = 0; j < x.n; ++j) u(j, n) = std::exp(cplx(0.0, xi * x.at(j) + tau * t.at(n)));
  const NormParams p{0.3, 0.45, 0.6};
  const SpaceTimeNorms nm = xsb_norm(u, p);
  const double area = std::sqrt(16.0 * 4.0);
  CHECK(nm.xsb == doctest::Approx(area * std::pow(bracket(xi), p.s) * std::pow(bracket(tau - xi * xi * xi), p.b)));
  CHECK(nm.ysb ==
        doctest::Approx(area * std::pow(bracket(tau), p.s / 3.0) * std::pow(bracket(tau - xi * xi * xi), p.b)));
  // |xi| > 1, so the low-frequency norm does not see the mode.
  CHECK(nm.dalpha < 1e-12 * nm.xsb);
  CHECK(nm.flags.empty());
}

TEST_CASE("space-time norms are homogeneous and flag unresolved fields") {
  const Axis x = staggered_axis(8.0, 64), t{0.0, 4.0 / 32.0, 32};
  SpaceTimeField u(x, t), noisy(x, t);
  for (std::size_t n = 0; n < t.n; ++n)
    for (std::size_t j = 0; j < x.n; ++j) {
      u(j, n) = std::exp(-x.at(j) * x.at(j)) * std::sin(kPi * t.at(n) / 4.0);
      noisy(j, n) = (j % 2 ? 1.0 : -1.0);
    }
  const NormParams p{0.0, 0.4, 0.6};
  CHECK(xsb_norm(2.0 * u, p).xsb == doctest::Approx(2.0 * xsb_norm(u, p).xsb));
  CHECK_FALSE(xsb_norm(noisy, p).flags.empty());
}

TEST_CASE("bilinear probe is reproducible") {
  const NormParams p{0.0, 0.45, 0.6};
  const ProbeGrid g{64, 32, 32.0, 4.0};
  const ProbeReport a = bilinear_probe(6, p, 11, g), b = bilinear_probe(6, p, 11, g);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.quantiles.size() == 4);
  CHECK(a.max_ratio == doctest::Approx(a.quantiles.back()));
  CHECK(a.max_ratio > 0.0);
  CHECK(bilinear_probe(6, p, 12, g).to_json() != a.to_json());
  CHECK(a.flags.empty());
}

TEST_CASE("bilinear probe flags the range") {
  const ProbeGrid g{32, 16, 32.0, 4.0};
  const ProbeReport r = bilinear_probe(2, NormParams{-0.9, 0.45, 0.6}, 1, g);
  CHECK(r.flags.size() == 1);
  CHECK(r.flags[0] == "outside proven range");
  CHECK_THROWS_AS(bilinear_probe(0, NormParams{}, 1, g), DomainError);
  CHECK_THROWS_AS(bilinear_probe(1, NormParams{}, 1, ProbeGrid{8, 8, 1.0, 1.0}), DomainError);
}

TEST_CASE("compatibility condition") {
  const SpatialProfile phi = gaussian(staggered_axis(10.0, 256));
  TimeSignal one(std::vector<cplx>(8, 1.0), 0.1), half(std::vector<cplx>(8, 0.5), 0.1);
  CHECK(check_compatibility(phi, one, 1.0, 0.0, 1e-6) == Compatibility::pass);
  CHECK(check_compatibility(phi, half, 1.0) == Compatibility::fail);
  CHECK(check_compatibility(phi, half, 0.2) == Compatibility::not_required);
  CHECK(std::string(to_string(Compatibility::not_required)) != to_string(Compatibility::pass));
  CHECK_THROWS_AS(check_compatibility(phi, one, 0.5), DomainError);
}

TEST_CASE("time cutoff") {
  const Axis t = time_axis(3.0, 301);
  const TimeSignal th = theta_cutoff(t, 1.0, 1.0);
  CHECK(th.samples[0] == cplx(1.0));
  CHECK(th.samples[100] == cplx(1.0));
  CHECK(std::abs(th.samples[200]) < 1e-15);
  CHECK(std::abs(th.samples[300]) == 0.0);
  for (std::size_t n = 1; n < t.n; ++n) CHECK(th.samples[n].real() <= th.samples[n - 1].real() + 1e-15);
  CHECK_THROWS_AS(theta_cutoff(t, 1.0, 0.0), DomainError);
}
