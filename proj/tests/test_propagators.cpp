#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kdv/numerics.hpp"
#include "kdv/propagators.hpp"

using namespace kdv;

namespace {

SpatialProfile gaussian(const Axis& x, double x0, double w) {
  SpatialProfile p;
  p.x0 = x.start;
  p.dx = x.step;
  p.pad = 0.5 * x.step * static_cast<double>(x.n);
  p.samples.resize(x.n);
  for (std::size_t j = 0; j < x.n; ++j) {
    const double y = (x.at(j) - x0) / w;
    p.samples[j] = std::exp(-y * y);
  }
  return p;
}

double l2(const SpatialProfile& p) {
  double s = 0.0;
  for (const auto& v : p.samples) s += std::norm(v);
  return std::sqrt(s);
}

double rel(const SpatialProfile& a, const SpatialProfile& b) { return sup_diff(a.samples, b.samples) / b.max_abs(); }

}  // namespace

TEST_CASE("group at time zero is the identity") {
  const Axis x = staggered_axis(30.0, 512);
  const SpatialProfile phi = gaussian(x, 1.0, 1.5);
  CHECK(rel(airy_group(phi, 0.0), phi) < 1e-14);
}

TEST_CASE("group is unitary and satisfies the group law") {
  const Axis x = staggered_axis(30.0, 512);
  const SpatialProfile phi = gaussian(x, 0.0, 1.0);
  const SpatialProfile a = airy_group(phi, 0.5);
  CHECK(std::abs(l2(a) - l2(phi)) / l2(phi) < 1e-13);
  CHECK(rel(airy_group(airy_group(phi, 0.2), 0.3), a) < 1e-12);
  // Reversibility.
  CHECK(rel(airy_group(a, -0.5), phi) < 1e-12);
}

TEST_CASE("multiplier and kernel realizations agree") {
  // The kernel is truncated to the box, so the box must hold the slow
  // dispersive tail of the multiplier result.
  const Axis x = staggered_axis(50.0, 2048);
  const SpatialProfile phi = gaussian(x, 0.0, 1.0);
  CHECK(rel(airy_group_kernel(phi, 0.3), airy_group(phi, 0.3)) < 1e-6);
}

TEST_CASE("kernel serial and parallel agree") {
  const Axis x = staggered_axis(20.0, 256);
  const SpatialProfile phi = gaussian(x, 0.5, 1.0);
  CHECK(sup_diff(airy_group_kernel(phi, 0.3, Exec::serial).samples,
                 airy_group_kernel(phi, 0.3, Exec::parallel).samples) == 0.0);
}

TEST_CASE("traces agree with the field") {
  const Axis x = staggered_axis(30.0, 512), t = time_axis(1.0, 33);
  const SpatialProfile phi = gaussian(x, 2.0, 1.0);
  const SpaceTimeField u = airy_group_field(phi, t);
  const auto [tr, dtr] = airy_group_trace(phi, 0.3, t);
  const TimeSignal a = spectral_trace(u, 0.3), b = spectral_trace(u, 0.3, 1);
  CHECK(sup_diff(tr.samples, a.samples) < 1e-12);
  CHECK(sup_diff(dtr.samples, b.samples) < 1e-12);
  // Every slice equals the group applied directly.
  CHECK(rel(u.slice(20), airy_group(phi, t.at(20))) < 1e-12);
}

TEST_CASE("spectral derivative and band limit") {
  const Axis x = staggered_axis(std::numbers::pi, 64), t = time_axis(1.0, 2);
  SpaceTimeField u(x, t);
  for (std::size_t j = 0; j < x.n; ++j) u(j, 0) = u(j, 1) = std::sin(3.0 * x.at(j)) + std::sin(30.0 * x.at(j));
  const SpaceTimeField d = spectral_dx(u, 1);
  const SpaceTimeField low = spectral_dx(u, 1, 2.0 / 3.0);
  double e_full = 0.0, e_band = 0.0;
  for (std::size_t j = 0; j < x.n; ++j) {
    const double s = x.at(j);
    e_full = std::max(e_full, std::abs(d(j, 0) - (3.0 * std::cos(3.0 * s) + 30.0 * std::cos(30.0 * s))));
    e_band = std::max(e_band, std::abs(low(j, 1) - 3.0 * std::cos(3.0 * s)));
  }
  CHECK(e_full < 1e-11);
  CHECK(e_band < 1e-12);
}

TEST_CASE("Duhamel integral") {
  const Axis x = staggered_axis(30.0, 256), t = time_axis(1.0, 129);
  const SpatialProfile phi = gaussian(x, 0.0, 2.0);

  SUBCASE("of zero is zero") {
    CHECK(duhamel_field(SpaceTimeField(x, t)).max_abs() == 0.0);
  }
  SUBCASE("of a free solution is t times it") {
    const SpaceTimeField w = airy_group_field(phi, t);
    const SpaceTimeField d = duhamel_field(w);
    double err = 0.0;
    for (std::size_t n = 0; n < t.n; ++n)
      for (std::size_t j = 0; j < x.n; ++j) err = std::max(err, std::abs(d(j, n) - t.at(n) * w(j, n)));
    CHECK(err < 1e-8);
    CHECK(rel(duhamel(w, t.at(64)), d.slice(64)) < 1e-14);
  }
  SUBCASE("of a time-independent source") {
    SpaceTimeField w(x, t);
    for (std::size_t n = 0; n < t.n; ++n)
      for (std::size_t j = 0; j < x.n; ++j) w(j, n) = phi.samples[j];
    const SpaceTimeField d = duhamel_field(w);
    // Simpson's rule over the group gives an independent value at t = 1.
    SpatialProfile want = phi;
    for (auto& v : want.samples) v = 0.0;
    const int panels = 400;
    for (int i = 0; i <= panels; ++i) {
      const double wt = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const SpatialProfile g = airy_group(phi, static_cast<double>(i) / panels);
      for (std::size_t j = 0; j < x.n; ++j) want.samples[j] += wt * g.samples[j] / (3.0 * panels);
    }
    CHECK(rel(d.slice(t.n - 1), want) < 1e-8);
  }
  SUBCASE("serial and parallel agree") {
    const SpaceTimeField w = airy_group_field(phi, t);
    CHECK(sup_diff(duhamel_field(w, Exec::serial).values, duhamel_field(w, Exec::parallel).values) == 0.0);
  }
}

TEST_CASE("spectral tail fraction") {
  std::vector<cplx> spec(96, 0.0);
  spec[1] = 1.0;
  CHECK(spectral_tail_fraction(spec) == 0.0);
  spec[48] = 1.0;
  CHECK(spectral_tail_fraction(spec) > 0.4);
}
