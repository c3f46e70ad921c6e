#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kdv/forcing.hpp"
#include "kdv/numerics.hpp"
#include "kdv/solver.hpp"

using namespace kdv;

namespace {

constexpr double kPi = std::numbers::pi;

struct Setup {
  GridConfig g{25.0, 1024, 1.0, 256};
  Axis x = solver_x_axis(g);
  Axis t = solver_t_axis(g);
  TimeSignal f = bump_signal(t, 1.0);
  TimeSignal i13 = frac_integrate(f, FracOrder(-1.0 / 3.0));
};

double rel(const TimeSignal& got, const TimeSignal& want) {
  return sup_diff(got.samples, want.samples) / want.max_abs();
}

}  // namespace

TEST_CASE("zero boundary data gives a zero field") {
  Setup s;
  const TimeSignal z(std::vector<cplx>(s.t.n), s.t.step);
  CHECK(forcing_L0(z, s.x, s.t).max_abs() == 0.0);
  CHECK(forcing_Lm1(z, s.x, s.t).max_abs() == 0.0);
}

TEST_CASE("L0 and L^{-1} traces at the boundary") {
  Setup s;
  ForcingEngine e(s.x, s.t);
  const auto F = e.spectrum(s.f);
  const SpaceTimeField l0 = e.L0(F), lm = e.Lm1(F);
  for (Side side : {Side::left, Side::right}) {
    CHECK(rel(side_limit(l0, 0.0, side, 0), s.f) < 1e-4);
    CHECK(rel(side_limit(l0, 0.0, side, 1), -1.0 * s.i13) < 1e-4);
    CHECK(rel(side_limit(lm, 0.0, side, 0), -1.0 * s.f) < 1e-4);
  }
  CHECK(rel(side_limit(lm, 0.0, Side::left, 1), -2.0 * s.i13) < 1e-4);
  CHECK(rel(side_limit(lm, 0.0, Side::right, 1), s.i13) < 1e-4);
}

TEST_CASE("L0 serial and parallel agree") {
  Setup s;
  ForcingEngine e(s.x, s.t);
  const auto F = e.spectrum(s.f);
  CHECK(sup_diff(e.L0(F, 0, Exec::serial).values, e.L0(F, 0, Exec::parallel).values) == 0.0);
}

TEST_CASE("L0 decays rapidly for x > 0") {
  Setup s;
  const SpaceTimeField l0 = forcing_L0(s.f, s.x, s.t);
  auto sup_at = [&](double at) {
    const auto j = static_cast<std::size_t>((at - s.x.start) / s.x.step);
    return l0.trace(j).max_abs();
  };
  CHECK(sup_at(8.0) < 1e-3 * sup_at(0.5));
}

TEST_CASE("L0 against its kernel representation") {
  Setup s;
  const SpaceTimeField l0 = forcing_L0(s.f, s.x, s.t);
  const L0Kernel k(s.f);
  const std::size_t n = 180;
  for (std::size_t j : {s.x.n / 2 - 30, s.x.n / 2 - 3, s.x.n / 2 + 2, s.x.n / 2 + 25}) {
    const cplx want = k.eval(s.x.at(j), s.t.at(n));
    CHECK_MESSAGE(std::abs(l0(j, n) - want) < 1e-4 * s.f.max_abs(), "x=" << s.x.at(j));
  }
}

TEST_CASE("family member of order zero is L0") {
  Setup s;
  ForcingEngine e(s.x, s.t);
  const auto F = e.spectrum(s.f);
  const SpaceTimeField l0 = e.L0(F);
  // Compared inside the taper and before the dispersive tail of L0 reaches
  // the box edge, which the x-integral on the polynomial side starts from.
  auto diff = [&](const SpaceTimeField& v) {
    double d = 0.0;
    for (std::size_t n = 0; n <= 100; ++n)
      for (std::size_t j = 0; j < s.x.n; ++j)
        if (std::abs(s.x.at(j)) < 14.0) d = std::max(d, std::abs(v(j, n) - l0(j, n)));
    return d;
  };
  CHECK(diff(e.family(F, FracOrder(0.0), Sign::minus)) < 1e-5 * l0.max_abs());
  CHECK(diff(e.family(F, FracOrder(0.0), Sign::plus)) < 1e-5 * l0.max_abs());
}

TEST_CASE("family traces on the rapidly decaying side") {
  Setup s;
  ForcingEngine e(s.x, s.t);
  const auto F = e.spectrum(s.f);
  const std::size_t mid = s.x.n / 2, k = 16;
  const Axis left{s.x.at(mid - k), s.x.step, k}, right{s.x.at(mid), s.x.step, k};
  for (double lam : {-1.6, -0.7, 0.2, 0.45}) {
    const SpaceTimeField m = e.family_easy(F, FracOrder(lam), Sign::minus, left);
    const SpaceTimeField p = e.family_easy(F, FracOrder(lam), Sign::plus, right);
    CHECK(rel(side_limit(m, 0.0, Side::left, 0), family_trace_coefficient(FracOrder(lam), Sign::minus) * s.f) < 1e-4);
    CHECK(rel(side_limit(p, 0.0, Side::right, 0), family_trace_coefficient(FracOrder(lam), Sign::plus) * s.f) < 1e-4);
    CHECK(rel(side_limit(m, 0.0, Side::left, 1), family_slope_coefficient(FracOrder(lam)) * s.i13) < 1e-3);
  }
}

TEST_CASE("trace coefficients") {
  CHECK(std::abs(family_trace_coefficient(FracOrder(0.0), Sign::minus) - 1.0) < 1e-15);
  CHECK(std::abs(family_trace_coefficient(FracOrder(0.0), Sign::plus) - 1.0) < 1e-15);
  CHECK(std::abs(family_trace_coefficient(FracOrder(0.5), Sign::plus) - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(family_trace_coefficient(FracOrder(-0.5), Sign::minus)) < 1e-15);
  CHECK(std::abs(family_slope_coefficient(FracOrder(0.0)) + 1.0) < 1e-15);
  CHECK(std::abs(family_trace_coefficient(FracOrder(1.0), Sign::minus) - 2.0 * std::sin(kPi / 2.0)) < 1e-15);
}

TEST_CASE("family rejects orders at or below -3") {
  Setup s;
  CHECK_THROWS_AS(forcing_family(s.f, FracOrder(-3.0), Sign::minus, s.x, s.t), DomainError);
}

TEST_CASE("second derivative of L0 jumps by 3 I_{-2/3} f") {
  Setup s;
  const SpaceTimeField l0 = forcing_L0(s.f, s.x, s.t);
  const TimeSignal i23 = frac_integrate(s.f, FracOrder(-2.0 / 3.0));
  for (std::size_t n : {90u, 128u, 170u}) {
    const JumpResult j = jump_size(l0, s.t.at(n), 2);
    CHECK(std::abs(j.value - 3.0 * i23.samples[n]) < 1e-2 * std::abs(i23.samples[n]) * 3.0);
  }
}

TEST_CASE("nonuniqueness witness") {
  Setup s;
  const SpaceTimeField u = nonuniqueness_witness(s.f, s.x, s.t);
  for (Side side : {Side::left, Side::right}) CHECK(side_limit(u, 0.0, side, 0).max_abs() < 1e-4);
  double left = 0.0;
  for (std::size_t j = 0; j < s.x.n / 2; ++j) left = std::max(left, std::abs(u(j, 200)));
  CHECK(left > 0.1);
  // Zero initial data.
  double start = 0.0;
  for (std::size_t j = 0; j < s.x.n; ++j) start = std::max(start, std::abs(u(j, 0)));
  CHECK(start < 1e-12);
  CHECK(rel(side_limit(u, 0.0, Side::left, 1), -3.0 * s.i13) < 1e-3);
}

TEST_CASE("Laplace spectrum round trip") {
  Setup s;
  ForcingEngine e(s.x, s.t);
  CHECK(sup_diff(e.signal(e.spectrum(s.f)).samples, s.f.samples) < 1e-12);
  CHECK(rel(e.signal(e.frac(e.spectrum(s.f), FracOrder(0.5))), frac_integrate(s.f, FracOrder(0.5))) < 1e-6);
}
