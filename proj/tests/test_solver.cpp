#include <doctest.h>

#include <cmath>

#include "kdv/numerics.hpp"
#include "kdv/propagators.hpp"
#include "kdv/solver.hpp"
#include "kdv/spaces.hpp"

using namespace kdv;

namespace {

SolverConfig small(Problem p, bool nonlinear = true) {
  SolverConfig c;
  c.problem = p;
  c.grid = GridConfig{25.0, 1024, 1.0, 256};
  c.nonlinear = nonlinear;
  return c;
}

SolveResult solve_preset(const SolverConfig& c, const std::string& name = "gauss-small") {
  const Preset p = make_preset(name, c);
  return picard_solve(p.data, p.phi, c);
}

/// sup over physical nodes and t <= T of |a - b|.
double region_diff(const SpaceTimeField& a, const SpaceTimeField& b, Region r, std::size_t nt) {
  double d = 0.0;
  for (std::size_t n = 0; n < nt; ++n)
    for (std::size_t j = 0; j < a.x.n; ++j)
      if (r.contains(a.x.at(j))) d = std::max(d, std::abs(a(j, n) - b(j, n)));
  return d;
}

Preset scaled_preset(const SolverConfig& c, double amp) {
  Preset p = make_preset("gauss-large", c);
  for (auto& v : p.phi.samples) v *= amp;
  for (auto* s : {&p.data.f, &p.data.g1, &p.data.g2})
    if (*s)
      for (auto& v : (*s)->samples) v *= amp;
  return p;
}

}  // namespace

TEST_CASE("parameter checks") {
  CHECK(parse_problem("segment") == Problem::segment);
  CHECK_THROWS_AS(parse_problem("circle"), DomainError);
  CHECK_THROWS_AS(check_sobolev_index(0.5), DomainError);
  CHECK_THROWS_AS(check_sobolev_index(-0.8), DomainError);
  CHECK_THROWS_AS(check_sobolev_index(1.5), DomainError);
  CHECK_NOTHROW(check_sobolev_index(1.2));
  for (double s : {-0.7, 0.0, 0.3, 1.0, 1.4}) CHECK_NOTHROW(check_lambdas(Problem::segment, default_lambdas(s), s));
  CHECK_THROWS_AS(check_lambdas(Problem::right, LambdaChoice{0.0, 0.0, 0.6}, 0.0), DomainError);
  // Equal orders make the boundary system singular.
  CHECK_THROWS_AS(check_lambdas(Problem::left, LambdaChoice{0.1, 0.1, 0.0}, 0.0), DomainError);
  BoundaryData d;
  d.problem = Problem::left;
  CHECK_THROWS_AS(check_boundary_data(d), DomainError);
}

TEST_CASE("zero data converges at once to zero") {
  for (Problem p : {Problem::right, Problem::left, Problem::segment}) {
    const SolveResult r = solve_preset(small(p), "zero");
    CHECK(r.iterations == 1);
    CHECK(r.u.max_abs() == 0.0);
  }
}

TEST_CASE("small data: nonlinear right half-line") {
  const SolveResult r = solve_preset(small(Problem::right));
  CHECK(r.iterations <= 10);
  for (double q : r.contraction_factors) CHECK(q < 0.5);
  CHECK(r.fixed_point_residual < 1e-6);
  CHECK(r.max_trace_error() < 1e-4);
  CHECK(r.pde_residual < 1e-4);
  CHECK(r.solution_norm > 0.0);
}

TEST_CASE("small data: segment with contracting boundary system") {
  const SolveResult r = solve_preset(small(Problem::segment));
  REQUIRE(r.segment);
  CHECK(r.segment->contraction < 1.0);
  CHECK(r.segment->neumann_terms > 0);
  CHECK(r.segment->neumann_vs_direct < 1e-10);
  CHECK(r.max_trace_error() < 1e-4);
  // This grid is coarser than the default one.
  CHECK(r.pde_residual < 1e-3);
}

TEST_CASE("left half-line solution does not depend on the order pair") {
  SolverConfig a = small(Problem::left, false), b = a;
  a.lambda1 = -0.6;
  a.lambda2 = 0.2;
  b.lambda1 = -0.3;
  b.lambda2 = 0.35;
  const SolveResult ra = solve_preset(a), rb = solve_preset(b);
  const double scale = ra.u.max_abs();
  CHECK(region_diff(ra.u, rb.u, ra.region, a.grid.m) < 1e-4 * scale);
}

TEST_CASE("solution on [0, T] does not depend on the cutoff ramp") {
  SolverConfig a = small(Problem::right), b = a;
  b.theta_ramp = 0.7;
  const SolveResult ra = solve_preset(a), rb = solve_preset(b);
  CHECK(region_diff(ra.u, rb.u, ra.region, a.grid.m) < 1e-6 * ra.u.max_abs());
}

TEST_CASE("segment boundary densities") {
  const SolverConfig c = small(Problem::segment);
  const Axis t = solver_t_axis(c.grid);
  const TimeSignal z(std::vector<cplx>(t.n), t.step);
  const SegmentBoundary zero = segment_boundary_solve(z, z, z, c.lambdas(), 10.0, t);
  CHECK(zero.h1.max_abs() == 0.0);
  CHECK(zero.h2.max_abs() == 0.0);
  CHECK(zero.h3.max_abs() == 0.0);
  const TimeSignal f = bump_signal(t, 1.0, 0.01);
  const SegmentBoundary one = segment_boundary_solve(f, z, z, c.lambdas(), 10.0, t);
  CHECK(one.h3.max_abs() > 0.0);
  CHECK(one.diagnostics.contraction < 1.0);
}

TEST_CASE("coupling between the segment ends shrinks with L") {
  const Axis t = time_axis(1.0, 256);
  const TimeSignal f = bump_signal(t, 1.0);
  const double k5 = kl_bump_ratio(f, 5.0), k10 = kl_bump_ratio(f, 10.0), k20 = kl_bump_ratio(f, 20.0);
  CHECK(k5 > k10);
  CHECK(k10 > k20);
  CHECK(kl_bump_ratio(TimeSignal(std::vector<cplx>(t.n), t.step), 5.0) == 0.0);
}

TEST_CASE("scaling") {
  const SolverConfig c = small(Problem::right);
  const Preset p = make_preset("gauss-small", c);

  SUBCASE("factor one is the identity") {
    const ScaledProblem s = scale_data(p.data, p.phi, 1.0, c);
    CHECK(sup_diff(s.phi.samples, p.phi.samples) < 1e-14);
    CHECK(sup_diff(s.data.f->samples, p.data.f->samples) < 1e-14);
  }
  SUBCASE("norm ratio matches the scaling factor") {
    SolverConfig wide = c;
    wide.grid.half_width = 50.0;
    wide.grid.n = 2048;
    const Preset q = make_preset("gauss-small", wide);
    for (double lam : {0.5, 0.8}) {
      const ScaledProblem s = scale_data(q.data, q.phi, lam, wide);
      const double ratio = sobolev_norm(s.phi, 0.0) / sobolev_norm(q.phi, 0.0);
      CHECK(std::abs(ratio / scaling_norm_factor(lam, 0.0) - 1.0) < 0.1);
      CHECK(sobolev_norm(s.phi, -0.5) / sobolev_norm(q.phi, -0.5) <= 1.1 * scaling_norm_factor(lam, -0.5));
    }
  }
  SUBCASE("factors outside (0, 1] are rejected") {
    CHECK_THROWS_AS(scale_data(p.data, p.phi, 0.0, c), DomainError);
    CHECK_THROWS_AS(scale_data(p.data, p.phi, 1.5, c), DomainError);
  }
  SUBCASE("unscaling maps axes back") {
    SpaceTimeField u(solver_x_axis(c.grid), solver_t_axis(c.grid));
    const SpaceTimeField v = unscale_solution(u, 0.5, 1.0);
    CHECK(v.t.n == c.grid.m);
    CHECK(v.t.end() == doctest::Approx(0.125));
    CHECK(v.x.step == doctest::Approx(0.5 * u.x.step));
  }
}

TEST_CASE("polynomial continuation") {
  const Axis x = staggered_axis(10.0, 256);
  const Extension e(x, Region{0.0, 6.0});
  std::vector<cplx> in(x.n), out(x.n);
  for (std::size_t j = 0; j < x.n; ++j) {
    const double s = x.at(j);
    in[j] = e.physical(j) ? 1.0 + s - 0.3 * s * s + 0.01 * std::pow(s, 5) : 1e6;
  }
  e.apply(in.data(), out.data());
  double inside = 0.0, near = 0.0, far = 0.0;
  for (std::size_t j = 0; j < x.n; ++j) {
    const double s = x.at(j);
    const double p = 1.0 + s - 0.3 * s * s + 0.01 * std::pow(s, 5);
    if (e.physical(j)) inside = std::max(inside, std::abs(out[j] - in[j]));
    else if ((s < 0.0 && s > -0.5 * e.width()) || (s > 6.0 && s < 6.0 + 0.5 * e.width()))
      near = std::max(near, std::abs(out[j] - p));
    else if (s < -e.width() || s > 6.0 + e.width())
      far = std::max(far, std::abs(out[j]));
  }
  CHECK(inside == 0.0);
  CHECK(near < 1e-9);
  CHECK(far == 0.0);
}

TEST_CASE("energy identity") {
  const Axis x = staggered_axis(25.0, 1024), t = time_axis(2.0, 511);
  SUBCASE("vanishes for u = 0") {
    const EnergyCheck e = energy_identity_check(SpaceTimeField(x, t), Region{0.0, 10.0}, 1.0);
    CHECK(e.mass_start == 0.0);
    CHECK(e.flux == 0.0);
    CHECK(e.residual == 0.0);
  }
  SUBCASE("holds for the linear right half-line solve") {
    const SolveResult r = solve_preset(small(Problem::right, false));
    CHECK(energy_identity_check(r.u, r.region, 1.0).residual < 1e-4);
  }
}

TEST_CASE("PDE residual of a traveling soliton") {
  // u = 3c sech^2(sqrt(c)(x - ct)/2) solves u_t + u_xxx + u u_x = 0.
  const Axis x = staggered_axis(25.0, 1024), t = time_axis(1.0, 257);
  const double c = 1.0;
  SpaceTimeField u(x, t);
  for (std::size_t n = 0; n < t.n; ++n)
    for (std::size_t j = 0; j < x.n; ++j) {
      const double z = 0.5 * std::sqrt(c) * (x.at(j) - c * t.at(n));
      u(j, n) = 3.0 * c / std::pow(std::cosh(z), 2);
    }
  CHECK(pde_residual(u, -10.0, 10.0, 1.0, true) < 1e-4);
  CHECK(pde_residual(u, -10.0, 10.0, 1.0, false) > 0.1);
}

TEST_CASE("large data diverge") {
  const SolverConfig c = small(Problem::right);
  const Preset p = scaled_preset(c, 10.0);
  CHECK_THROWS_AS(picard_solve(p.data, p.phi, c), DivergenceError);
}

TEST_CASE("scaled solve agrees with the direct solve") {
  const SolverConfig c = small(Problem::right);
  Preset p = make_preset("gauss-small", c);
  // Keep the data well inside half the box, which is all the scaled grid covers.
  for (std::size_t j = 0; j < p.phi.size(); ++j) {
    const double z = (p.phi.x(j) - 5.0) / 1.5;
    p.phi.samples[j] = 0.01 * std::exp(-z * z);
  }
  const SolveResult direct = picard_solve(p.data, p.phi, c);
  const SolveResult scaled = scaled_solve(p.data, p.phi, c, 0.5);
  CHECK(scaled.region.lo == 0.0);
  // With factor 1/2 every eighth scaled time is a direct time.
  const std::size_t n = 31, m = 8 * n;
  REQUIRE(m < scaled.u.t.n);
  CHECK(scaled.u.t.at(m) == doctest::Approx(direct.u.t.at(n)).epsilon(1e-12));
  auto spectrum = [](const SpaceTimeField& u, std::size_t k) {
    std::vector<cplx> v = u.slice(k).samples;
    fft_inplace(v, -1);
    return v;
  };
  const auto sd = spectrum(direct.u, n), ss = spectrum(scaled.u, m);
  for (double at : {1.0, 3.0, 5.0, 8.0}) {
    const cplx a = spectral_eval(sd, direct.u.x, at), b = spectral_eval(ss, scaled.u.x, at);
    CHECK_MESSAGE(std::abs(a - b) < 1e-3 * direct.u.max_abs(), "x=" << at << " " << a << " " << b);
  }
}
