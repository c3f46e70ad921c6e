#include "kdv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdv/numerics.hpp"
#include "kdv/propagators.hpp"
#include "kdv/spaces.hpp"

namespace kdv {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
// The boundary flux needs u_xx; eight extrapolation nodes keep its error
// well below that of the mass quadrature at desk resolution.
constexpr std::size_t kFluxNodes = 8;
constexpr double kPicardFloor = 1e-7;

bool in_window(double lam, double s) { return lam >= s - 1.0 && lam < s + 0.5 && lam > -1.0 && lam < 0.5; }

TimeSignal times(const TimeSignal& theta, const TimeSignal& g) {
  TimeSignal out = g;
  for (std::size_t n = 0; n < out.size(); ++n) out.samples[n] *= theta.samples[n];
  return out;
}

double sup_upto(const TimeSignal& g, std::size_t last) {
  double m = 0.0;
  for (std::size_t n = 0; n <= last && n < g.size(); ++n) m = std::max(m, std::abs(g.samples[n]));
  return m;
}

double rel_error(const TimeSignal& got, const TimeSignal& want, std::size_t last) {
  double err = 0.0;
  for (std::size_t n = 0; n <= last; ++n) err = std::max(err, std::abs(got.samples[n] - want.samples[n]));
  const double scale = sup_upto(want, last);
  return scale > 0.0 ? err / scale : err;
}

std::size_t grid_index(const Axis& t, double at) {
  const double s = (at - t.start) / t.step;
  const long long n = std::llround(s);
  if (std::abs(s - static_cast<double>(n)) > 1e-6 || n < 0 || n >= static_cast<long long>(t.n))
    throw DomainError("time is not on the grid");
  return static_cast<std::size_t>(n);
}

/// Solves [[a1, a2], [b1, b2]] y = v.
std::array<cplx, 2> solve2(cplx a1, cplx a2, cplx b1, cplx b2, cplx v1, cplx v2) {
  const cplx det = a1 * b2 - a2 * b1;
  return {(b2 * v1 - a2 * v2) / det, (a1 * v2 - b1 * v1) / det};
}

/// Per-frequency data of the segment boundary system.
struct SegmentRow {
  cplx a1, a2, b1, b2, m1, m2, e3, kappa;

  std::array<cplx, 3> e_inverse(const std::array<cplx, 3>& v) const {
    const auto y = solve2(a1, a2, b1, b2, v[0], v[1]);
    return {y[0], y[1], (v[2] - m1 * y[0] - m2 * y[1]) / e3};
  }
};

/// Neumann series for (E + K) H = R, where K has only the third column
/// (kappa, -kappa, 0); the direct solve is kept for comparison.
std::array<std::vector<cplx>, 3> neumann_segment(const ForcingEngine& e, const std::vector<cplx>& r1,
                                                 const std::vector<cplx>& r2, const std::vector<cplx>& r3,
                                                 const LambdaChoice& lam, double L, SegmentDiagnostics& diag) {
  const FracOrder l1(lam.lambda1), l2(lam.lambda2), l3(lam.lambda3);
  SegmentRow row;
  row.a1 = family_trace_coefficient(l1, Sign::minus);
  row.a2 = family_trace_coefficient(l2, Sign::minus);
  row.b1 = family_slope_coefficient(l1);
  row.b2 = family_slope_coefficient(l2);
  row.e3 = family_trace_coefficient(l3, Sign::plus);

  const std::size_t kk = r1.size();
  std::array<std::vector<cplx>, 3> h{std::vector<cplx>(kk), std::vector<cplx>(kk), std::vector<cplx>(kk)};
  double contraction = 0.0, diff = 0.0, scale = 0.0;
  std::size_t terms = 0;
  for (std::size_t q = 0; q < kk; ++q) {
    row.m1 = e.family_multiplier(l1, Sign::minus, -L, q);
    row.m2 = e.family_multiplier(l2, Sign::minus, -L, q);
    row.kappa = row.e3 * std::exp(-e.rho()[q] * L);
    const auto col = row.e_inverse({row.kappa, -row.kappa, 0.0});
    contraction = std::max(contraction, std::abs(col[2]));

    const auto base = row.e_inverse({r1[q], r2[q], r3[q]});
    std::array<cplx, 3> x = base;
    std::size_t it = 0;
    for (; it < 200; ++it) {
      // (E^{-1} K x) is x_3 times the third column of E^{-1} K.
      std::array<cplx, 3> next;
      for (int i = 0; i < 3; ++i) next[i] = base[i] - col[i] * x[2];
      const double change = std::abs(next[2] - x[2]);
      x = next;
      if (change <= 1e-16 * std::abs(x[2]) || change == 0.0) break;
    }
    terms = std::max(terms, it + 1);

    // Direct elimination of the 3x3 system for comparison.
    const cplx h3 = (r3[q] - row.m1 * solve2(row.a1, row.a2, row.b1, row.b2, r1[q], r2[q])[0] -
                     row.m2 * solve2(row.a1, row.a2, row.b1, row.b2, r1[q], r2[q])[1]) /
                    (row.e3 - row.m1 * col[0] - row.m2 * col[1]);
    const auto y = solve2(row.a1, row.a2, row.b1, row.b2, r1[q] - row.kappa * h3, r2[q] + row.kappa * h3);
    diff = std::max({diff, std::abs(y[0] - x[0]), std::abs(y[1] - x[1]), std::abs(h3 - x[2])});
    scale = std::max({scale, std::abs(y[0]), std::abs(y[1]), std::abs(h3)});
    for (int i = 0; i < 3; ++i) h[static_cast<std::size_t>(i)][q] = x[static_cast<std::size_t>(i)];
  }
  if (!(contraction < 1.0))
    throw DomainError("segment boundary system: Neumann series does not contract (|E^-1 K| = " +
                      std::to_string(contraction) + "); increase L");
  diag.contraction = contraction;
  diag.neumann_terms = terms;
  diag.neumann_vs_direct = scale > 0.0 ? diff / scale : diff;
  return h;
}

std::vector<double> gregory_weights(std::size_t n, double h) {
  std::vector<double> w(n, h);
  if (n < 6) {
    // Too short for end corrections: trapezoid.
    if (n >= 2) w.front() = w.back() = 0.5 * h;
    return w;
  }
  const double c[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (std::size_t i = 0; i < 3; ++i) {
    w[i] = c[i] * h;
    w[n - 1 - i] = c[i] * h;
  }
  return w;
}

}  // namespace

const char* to_string(Problem p) {
  switch (p) {
    case Problem::right: return "right";
    case Problem::left: return "left";
    case Problem::segment: return "segment";
  }
  return "unknown";
}

Problem parse_problem(const std::string& name) {
  if (name == "right") return Problem::right;
  if (name == "left") return Problem::left;
  if (name == "segment") return Problem::segment;
  throw DomainError("unknown problem type '" + name + "'");
}

LambdaChoice default_lambdas(double s) {
  LambdaChoice l;
  const double lo = std::max(s - 1.0, -1.0), hi = std::min(s + 0.5, 0.5);
  const double centre = 0.5 * (lo + hi), w = hi - lo;
  l.lambda1 = centre - 0.25 * w;
  l.lambda2 = centre + 0.25 * w;
  l.lambda3 = std::min(std::max(s - 1.0, -0.9), std::min(0.5, s + 0.5) - 0.05);
  return l;
}

void check_sobolev_index(double s) {
  if (!(s > -0.75 && s < 1.5)) throw DomainError("s must lie in (-3/4, 3/2)");
  if (s == 0.5) throw DomainError("s = 1/2 is excluded");
}

void check_lambdas(Problem p, const LambdaChoice& lam, double s) {
  auto check = [&](double l, const char* name) {
    if (!in_window(l, s))
      throw DomainError(std::string(name) + " = " + std::to_string(l) +
                        " is outside [s-1, s+1/2) intersected with (-1, 1/2)");
  };
  if (p != Problem::left) check(lam.lambda3, "lambda3");
  if (p != Problem::right) {
    check(lam.lambda1, "lambda1");
    check(lam.lambda2, "lambda2");
    if (std::abs(std::sin(kPi * (lam.lambda2 - lam.lambda1) / 3.0)) < 1e-3)
      throw DomainError("lambda1 and lambda2 give a near-singular boundary matrix");
  }
}

void check_boundary_data(const BoundaryData& d) {
  switch (d.problem) {
    case Problem::right:
      if (!d.f || d.g1 || d.g2) throw DomainError("right half-line data is f only");
      break;
    case Problem::left:
      if (d.f || !d.g1 || !d.g2) throw DomainError("left half-line data is g1, g2");
      break;
    case Problem::segment:
      if (!d.f || !d.g1 || !d.g2) throw DomainError("segment data is f, g1, g2");
      if (!(d.L > 0.0)) throw DomainError("segment length must be positive");
      break;
  }
}

Axis solver_x_axis(const GridConfig& g) { return staggered_axis(g.half_width, g.n); }

Axis solver_t_axis(const GridConfig& g) {
  if (g.m < 8) throw DomainError("need at least 8 time samples");
  if (!(g.T > 0.0)) throw DomainError("T must be positive");
  return {0.0, g.T / static_cast<double>(g.m - 1), 2 * g.m - 1};
}

LambdaChoice SolverConfig::lambdas() const {
  LambdaChoice l = default_lambdas(s);
  if (lambda1) l.lambda1 = *lambda1;
  if (lambda2) l.lambda2 = *lambda2;
  if (lambda3) l.lambda3 = *lambda3;
  return l;
}

Region physical_region(Problem p, double L) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (p) {
    case Problem::right: return {0.0, inf};
    case Problem::left: return {-inf, 0.0};
    case Problem::segment: return {0.0, L};
  }
  return {};
}

Extension::Extension(const Axis& x, Region r, double max_width) : x_(x) {
  first_ = x.n;
  for (std::size_t j = 0; j < x.n; ++j)
    if (r.contains(x.at(j))) {
      first_ = std::min(first_, j);
      last_ = j + 1;
    }
  if (first_ >= last_ || last_ - first_ < 12) throw DomainError("physical region holds too few nodes");
  width_ = max_width;

  auto add_end = [&](double x0, std::size_t base, bool below) {
    if (!std::isfinite(x0)) return;
    std::vector<double> xs(6);
    for (std::size_t k = 0; k < 6; ++k) xs[k] = x.at(base + k);
    for (std::size_t j = 0; j < x.n; ++j) {
      if (physical(j) || (x.at(j) <= x0) != below) continue;
      const double d = std::abs(x.at(j) - x0);
      if (d >= width_) continue;
      const double chi = 1.0 - smooth_step(2.0 * d / width_ - 1.0);
      const auto w = fd_weights(xs, x.at(j), 0);
      for (std::size_t k = 0; k < 6; ++k) taps_.push_back({j, base + k, chi * w[k]});
    }
  };
  add_end(r.lo, first_, true);
  add_end(r.hi, last_ - 6, false);
}

void Extension::apply(const cplx* in, cplx* out) const {
  for (std::size_t j = 0; j < x_.n; ++j) out[j] = physical(j) ? in[j] : cplx(0.0);
  for (const Tap& t : taps_) out[t.target] += t.weight * in[t.source];
}

SpaceTimeField Extension::apply(const SpaceTimeField& u) const {
  SpaceTimeField out(u.x, u.t);
  out.flags = u.flags;
  for (std::size_t n = 0; n < u.t.n; ++n) apply(&u.values[n * u.x.n], &out.values[n * u.x.n]);
  return out;
}

SpatialProfile Extension::apply(const SpatialProfile& u) const {
  SpatialProfile out = u;
  apply(u.samples.data(), out.samples.data());
  return out;
}

TimeSignal resample_signal(const TimeSignal& g, const Axis& t, double scale, double amp) {
  if (g.size() < 2) throw DomainError("signal needs at least two samples");
  TimeSignal out(std::vector<cplx>(t.n), t.step, t.start, g.causal);
  out.flags = g.flags;
  const double end = g.t(g.size() - 1);
  for (std::size_t n = 0; n < t.n; ++n) {
    const double tau = scale * t.at(n);
    cplx v;
    if (tau < g.t0 - 1e-9 * g.dt)
      v = g.causal ? cplx(0.0) : g.samples.front();
    else if (tau > end)
      v = g.samples.back();
    else
      v = lagrange_sample(g.samples, g.t0, g.dt, tau, std::min<std::size_t>(6, g.size()), false);
    out.samples[n] = amp * v;
  }
  return out;
}

SpatialProfile resample_profile(const SpatialProfile& phi, const Axis& x, double scale, double amp) {
  if (phi.size() < 2) throw DomainError("profile needs at least two samples");
  SpatialProfile out;
  out.x0 = x.start;
  out.dx = x.step;
  out.pad = phi.pad;
  out.flags = phi.flags;
  out.samples.resize(x.n);
  const double lo = phi.x0 - 0.5 * phi.dx, hi = phi.x(phi.size() - 1) + 0.5 * phi.dx;
  for (std::size_t j = 0; j < x.n; ++j) {
    const double y = scale * x.at(j);
    if (y < lo || y > hi) continue;
    out.samples[j] = amp * lagrange_sample(phi.samples, phi.x0, phi.dx, y,
                                           std::min<std::size_t>(6, phi.size()), false);
  }
  return out;
}

TimeSignal bump_signal(const Axis& t, double T, double amp) {
  TimeSignal out(std::vector<cplx>(t.n), t.step, t.start, true);
  for (std::size_t n = 0; n < t.n; ++n) {
    const double s = t.at(n);
    if (s > 0.0 && s < T) out.samples[n] = amp * std::exp(4.0 / (T * T) - 1.0 / (s * (T - s)));
  }
  return out;
}

Preset make_preset(const std::string& name, const SolverConfig& cfg) {
  double amp = 0.01;
  bool with_phi = true, with_boundary = true;
  if (name == "zero") {
    amp = 0.0;
  } else if (name == "gauss-small") {
  } else if (name == "gauss-large") {
    amp = 1.0;
  } else if (name == "gauss-only") {
    with_boundary = false;
  } else if (name == "bump-only") {
    with_phi = false;
  } else {
    throw DomainError("unknown preset '" + name + "'");
  }
  const Axis x = solver_x_axis(cfg.grid), t = solver_t_axis(cfg.grid);
  double x0 = 12.0, w = 2.0;
  if (cfg.problem == Problem::left) x0 = -12.0;
  if (cfg.problem == Problem::segment) {
    x0 = 0.5 * cfg.L;
    w = std::min(2.0, cfg.L / 10.0);
  }
  Preset p;
  p.phi.x0 = x.start;
  p.phi.dx = x.step;
  p.phi.samples.resize(x.n);
  if (with_phi)
    for (std::size_t j = 0; j < x.n; ++j) {
      const double z = (x.at(j) - x0) / w;
      p.phi.samples[j] = amp * std::exp(-z * z);
    }
  const TimeSignal b = bump_signal(t, cfg.grid.T, with_boundary ? amp : 0.0);
  p.data.problem = cfg.problem;
  if (cfg.problem != Problem::left) p.data.f = b;
  if (cfg.problem != Problem::right) {
    p.data.g1 = b;
    p.data.g2 = b;
  }
  if (cfg.problem == Problem::segment) p.data.L = cfg.L;
  return p;
}

double SolveResult::max_trace_error() const {
  double m = initial_trace_error;
  for (const auto& e : trace_errors) m = std::max(m, e.error);
  return m;
}

IbvpSolver::IbvpSolver(BoundaryData data, const SpatialProfile& phi, const SolverConfig& cfg)
    : cfg_(cfg),
      data_(std::move(data)),
      x_(solver_x_axis(cfg.grid)),
      t_(solver_t_axis(cfg.grid)),
      horizon_(cfg.grid.m - 1),
      region_(physical_region(data_.problem, data_.L)),
      lam_(cfg.lambdas()),
      ext_(x_, region_),
      engine_(x_, t_),
      shifted_(Axis{x_.start - data_.L, x_.step, x_.n}, t_) {
  check_sobolev_index(cfg.s);
  check_boundary_data(data_);
  check_lambdas(data_.problem, lam_, cfg.s);
  if (data_.problem == Problem::segment) {
    if (data_.L < cfg.L_min) throw DomainError("segment length below L_min");
    if (data_.L > 0.5 * cfg.grid.half_width) throw DomainError("segment too long for the box");
  }
  if (!(cfg.theta_ramp > 0.0 && cfg.theta_ramp <= 1.0)) throw DomainError("theta_ramp must lie in (0, 1]");

  theta_ = theta_cutoff(t_, cfg.grid.T, cfg.theta_ramp * cfg.grid.T);
  const bool same = phi.size() == x_.n && std::abs(phi.x0 - x_.start) < 1e-12 && std::abs(phi.dx - x_.step) < 1e-15;
  phi_ = ext_.apply(same ? phi : resample_profile(phi, x_));
  group_ = airy_group_field(phi_, t_);

  auto on_grid = [&](const std::optional<TimeSignal>& g) {
    if (!g) return TimeSignal(std::vector<cplx>(t_.n), t_.step);
    const bool aligned = g->t0 == 0.0 && std::abs(g->dt - t_.step) < 1e-12 * t_.step && g->size() >= t_.n;
    if (aligned) {
      TimeSignal out = *g;
      out.samples.resize(t_.n);
      return out;
    }
    return resample_signal(*g, t_);
  };
  f_ = on_grid(data_.f);
  g1_ = on_grid(data_.g1);
  g2_ = on_grid(data_.g2);
}

void IbvpSolver::note(const std::string& what) const {
  if (std::find(notes_.begin(), notes_.end(), what) == notes_.end()) notes_.push_back(what);
}

TimeSignal IbvpSolver::cut(const TimeSignal& g) const { return times(theta_, g); }

IbvpSolver::Boundary IbvpSolver::boundary_spectra(const SpaceTimeField* d) const {
  // Residual the forcing must supply at x0: theta [g - theta (G phi - D/2)|_{x0}],
  // for the value (deriv 0) or the slope (deriv 1).
  auto residual = [&](const TimeSignal& g, double x0, int deriv) {
    TimeSignal base = spectral_trace(group_, x0, deriv);
    if (d) base = base - 0.5 * spectral_trace(*d, x0, deriv);
    TimeSignal r = g - times(theta_, base);
    r.causal = true;
    r.t0 = 0.0;
    return r;
  };
  auto spectrum_of = [&](TimeSignal r, const char* what) {
    const double scale = r.max_abs();
    if (scale > 0.0 && std::abs(r.samples[0]) > 1e-8 * std::max(scale, 1.0))
      note(std::string("boundary forcing not causal at ") + what + ": compatibility violated numerically");
    return engine_.spectrum(r);
  };
  // theta I_{1/3} of a slope residual.
  auto slope = [&](const TimeSignal& r) {
    TimeSignal s = cut(engine_.signal(engine_.frac(engine_.spectrum(r), FracOrder(1.0 / 3.0))));
    return engine_.spectrum(s);
  };

  Boundary b;
  const std::size_t kk = engine_.transform().length();
  switch (data_.problem) {
    case Problem::right: {
      const auto r = spectrum_of(cut(residual(f_, 0.0, 0)), "x = 0");
      const cplx c = std::exp(-kI * kPi * lam_.lambda3);
      b.h3.resize(kk);
      for (std::size_t q = 0; q < kk; ++q) b.h3[q] = c * r[q];
      break;
    }
    case Problem::left: {
      const auto r1 = spectrum_of(cut(residual(g1_, 0.0, 0)), "x = 0");
      const auto r2 = slope(residual(g2_, 0.0, 1));
      const FracOrder l1(lam_.lambda1), l2(lam_.lambda2);
      const cplx a1 = family_trace_coefficient(l1, Sign::minus), a2 = family_trace_coefficient(l2, Sign::minus);
      const cplx b1 = family_slope_coefficient(l1), b2 = family_slope_coefficient(l2);
      b.h1.resize(kk);
      b.h2.resize(kk);
      for (std::size_t q = 0; q < kk; ++q) {
        const auto y = solve2(a1, a2, b1, b2, r1[q], r2[q]);
        b.h1[q] = y[0];
        b.h2[q] = y[1];
      }
      break;
    }
    case Problem::segment: {
      const double L = data_.L;
      const auto r1 = spectrum_of(cut(residual(g1_, L, 0)), "x = L");
      const auto r2 = slope(residual(g2_, L, 1));
      const auto r3 = spectrum_of(cut(residual(f_, 0.0, 0)), "x = 0");
      SegmentDiagnostics diag;
      auto h = neumann_segment(engine_, r1, r2, r3, lam_, L, diag);
      if (!seg_) {
        diag.bump_ratio = kl_bump_ratio(bump_signal(t_, cfg_.grid.T), L);
      } else {
        diag.bump_ratio = seg_->bump_ratio;
      }
      seg_ = diag;
      b.h1 = std::move(h[0]);
      b.h2 = std::move(h[1]);
      b.h3 = std::move(h[2]);
      break;
    }
  }
  return b;
}

void IbvpSolver::add_forcing(const Boundary& b, SpaceTimeField& u, bool full) const {
  const std::size_t first = ext_.first(), count = ext_.last() - ext_.first();
  const Axis phys{x_.at(first), x_.step, count};
  auto accumulate = [&](const SpaceTimeField& v, std::size_t offset) {
    for (std::size_t n = 0; n < t_.n; ++n) {
      const cplx th = theta_.samples[n];
      for (std::size_t j = 0; j < v.x.n; ++j) u(offset + j, n) += th * v(j, n);
    }
  };
  const FracOrder l1(lam_.lambda1), l2(lam_.lambda2), l3(lam_.lambda3);
  switch (data_.problem) {
    case Problem::right:
      if (full)
        accumulate(engine_.family(b.h3, l3, Sign::plus), 0);
      else
        accumulate(engine_.family_easy(b.h3, l3, Sign::plus, phys), first);
      break;
    case Problem::left:
      if (full) {
        accumulate(engine_.family(b.h1, l1, Sign::minus), 0);
        accumulate(engine_.family(b.h2, l2, Sign::minus), 0);
      } else {
        accumulate(engine_.family_easy(b.h1, l1, Sign::minus, phys), first);
        accumulate(engine_.family_easy(b.h2, l2, Sign::minus, phys), first);
      }
      break;
    case Problem::segment: {
      if (full) {
        accumulate(shifted_.family(b.h1, l1, Sign::minus), 0);
        accumulate(shifted_.family(b.h2, l2, Sign::minus), 0);
        accumulate(engine_.family(b.h3, l3, Sign::plus), 0);
      } else {
        const Axis moved{phys.start - data_.L, phys.step, phys.n};
        accumulate(shifted_.family_easy(b.h1, l1, Sign::minus, moved), first);
        accumulate(shifted_.family_easy(b.h2, l2, Sign::minus, moved), first);
        accumulate(engine_.family_easy(b.h3, l3, Sign::plus, phys), first);
      }
      break;
    }
  }
}

SpaceTimeField IbvpSolver::apply(const SpaceTimeField& w, bool full) const {
  std::optional<SpaceTimeField> d;
  if (cfg_.nonlinear && w.max_abs() > 0.0) {
    SpaceTimeField sq(x_, t_);
    for (std::size_t i = 0; i < sq.values.size(); ++i) sq.values[i] = w.values[i] * w.values[i];
    SpaceTimeField src = spectral_dx(ext_.apply(sq), 1);
    for (std::size_t n = 0; n < t_.n; ++n)
      for (std::size_t j = 0; j < x_.n; ++j) src(j, n) *= theta_.samples[n];
    d = duhamel_field(src);
  }
  SpaceTimeField u(x_, t_);
  for (std::size_t n = 0; n < t_.n; ++n) {
    const cplx th = theta_.samples[n];
    for (std::size_t j = 0; j < x_.n; ++j) {
      cplx v = group_(j, n);
      if (d) v -= 0.5 * (*d)(j, n);
      u(j, n) = th * v;
    }
  }
  add_forcing(boundary_spectra(d ? &*d : nullptr), u, full);
  for (const auto& f : group_.flags) note(f);
  if (d)
    for (const auto& f : d->flags) note(f);
  u.flags = notes_;
  return u;
}

double IbvpSolver::surrogate_norm(const SpaceTimeField& w) const {
  const std::size_t first = ext_.first(), count = ext_.last() - ext_.first();
  SpatialProfile slice;
  slice.x0 = x_.at(first);
  slice.dx = x_.step;
  slice.samples.resize(count);
  double sup = 0.0, l2 = 0.0;
  for (std::size_t n = 0; n <= horizon_; ++n) {
    for (std::size_t j = 0; j < count; ++j) {
      slice.samples[j] = w(first + j, n);
      l2 += std::norm(slice.samples[j]);
    }
    sup = std::max(sup, sobolev_norm(slice, cfg_.s));
  }
  return sup + std::sqrt(l2 * x_.step * t_.step);
}

SolveResult IbvpSolver::solve() const {
  SolveResult r;
  r.region = region_;
  r.lambdas = lam_;
  {
    SpatialProfile p = phi_;
    for (std::size_t j = 0; j < x_.n; ++j)
      if (!ext_.physical(j)) p.samples[j] = 0.0;
    r.data_norm = sobolev_norm(p, cfg_.s) + sup_upto(f_, horizon_) + sup_upto(g1_, horizon_) +
                  sup_upto(g2_, horizon_);
  }
  if (cfg_.nonlinear && r.data_norm > cfg_.delta) r.flags.emplace_back("data above smallness threshold delta");

  const SpaceTimeField zero(x_, t_);
  SpaceTimeField w = apply(zero, !cfg_.nonlinear);
  r.iterations = 1;
  if (cfg_.nonlinear && w.max_abs() > 0.0) {
    std::size_t rising = 0;
    bool converged = false;
    while (r.iterations < cfg_.max_iter) {
      SpaceTimeField next = apply(w, false);
      ++r.iterations;
      const double d = surrogate_norm(next - w);
      if (!std::isfinite(d) || !std::isfinite(next.max_abs()))
        throw DivergenceError("Picard iteration produced non-finite values", r.contraction_factors);
      if (!r.increments.empty()) {
        const double q = r.increments.back() > 0.0 ? d / r.increments.back() : 0.0;
        r.contraction_factors.push_back(q);
        // Increments that stop shrinking far below the solution size have hit
        // the discretization floor rather than a growing mode.
        if (q >= 1.0 && r.increments.back() <= kPicardFloor * surrogate_norm(w)) {
          r.flags.emplace_back("picard: increments stagnated at discretization floor");
          converged = true;
          break;
        }
        rising = q >= 1.0 ? rising + 1 : 0;
        if (rising >= 3)
          throw DivergenceError("Picard iteration diverges: contraction factor >= 1 for 3 iterations",
                                r.contraction_factors);
      }
      r.increments.push_back(d);
      w = std::move(next);
      if (d <= cfg_.tol * r.increments.front() || d <= 1e-15 * surrogate_norm(w)) {
        converged = true;
        break;
      }
    }
    if (!converged) r.flags.emplace_back("picard: iteration limit reached");
    r.u = apply(w, true);
    const double nu = surrogate_norm(r.u);
    r.fixed_point_residual = nu > 0.0 ? surrogate_norm(r.u - w) / nu : 0.0;
  } else {
    r.u = cfg_.nonlinear ? apply(w, true) : std::move(w);
  }
  diagnose(r.u, r);
  for (const auto& f : r.u.flags)
    if (std::find(r.flags.begin(), r.flags.end(), f) == r.flags.end()) r.flags.push_back(f);
  return r;
}

void IbvpSolver::diagnose(const SpaceTimeField& u, SolveResult& r) const {
  r.trace_errors.clear();
  const std::size_t last = horizon_;
  auto add = [&](const char* name, double at, Side side, int deriv, const TimeSignal& want) {
    r.trace_errors.push_back({name, rel_error(side_limit(u, at, side, deriv), want, last)});
  };
  switch (data_.problem) {
    case Problem::right:
      add("u(0,t) = f", 0.0, Side::right, 0, f_);
      break;
    case Problem::left:
      add("u(0,t) = g1", 0.0, Side::left, 0, g1_);
      add("u_x(0,t) = g2", 0.0, Side::left, 1, g2_);
      break;
    case Problem::segment:
      add("u(0,t) = f", 0.0, Side::right, 0, f_);
      add("u(L,t) = g1", data_.L, Side::left, 0, g1_);
      add("u_x(L,t) = g2", data_.L, Side::left, 1, g2_);
      break;
  }
  double err = 0.0, scale = 0.0;
  for (std::size_t j = ext_.first(); j < ext_.last(); ++j) {
    err = std::max(err, std::abs(u(j, 0) - phi_.samples[j]));
    scale = std::max(scale, std::abs(phi_.samples[j]));
  }
  r.initial_trace_error = scale > 0.0 ? err / scale : err;

  const double h = cfg_.grid.half_width;
  r.pde_residual = pde_residual(u, std::max(region_.lo, -0.6 * h), std::min(region_.hi, 0.6 * h), cfg_.grid.T,
                                cfg_.nonlinear);
  r.solution_norm = surrogate_norm(u);
  if (data_.problem == Problem::segment) r.segment = seg_;
}

SolveResult picard_solve(const BoundaryData& data, const SpatialProfile& phi, const SolverConfig& cfg) {
  return IbvpSolver(data, phi, cfg).solve();
}

SpaceTimeField lambda_map_right(const SpaceTimeField& w, const SpatialProfile& phi, const TimeSignal& f,
                                double lambda, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.problem = Problem::right;
  c.lambda3 = lambda;
  BoundaryData d;
  d.problem = Problem::right;
  d.f = f;
  return IbvpSolver(d, phi, c).apply(w, true);
}

SpaceTimeField lambda_map_left(const SpaceTimeField& w, const SpatialProfile& phi, const TimeSignal& g1,
                               const TimeSignal& g2, const LambdaChoice& lam, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.problem = Problem::left;
  c.lambda1 = lam.lambda1;
  c.lambda2 = lam.lambda2;
  BoundaryData d;
  d.problem = Problem::left;
  d.g1 = g1;
  d.g2 = g2;
  return IbvpSolver(d, phi, c).apply(w, true);
}

SegmentBoundary segment_boundary_solve(const TimeSignal& f, const TimeSignal& g1, const TimeSignal& g2,
                                       const LambdaChoice& lam, double L, const Axis& t) {
  for (double l : {lam.lambda1, lam.lambda2, lam.lambda3})
    if (!(l > -1.0 && l < 0.5)) throw DomainError("segment orders must lie in (-1, 1/2)");
  if (std::abs(std::sin(kPi * (lam.lambda2 - lam.lambda1) / 3.0)) < 1e-3)
    throw DomainError("lambda1 and lambda2 give a near-singular boundary matrix");
  const Axis x{-1.0, 0.25, 8};
  const ForcingEngine e(x, t);
  const auto r1 = e.spectrum(resample_signal(g1, t));
  const auto r2 = e.frac(e.spectrum(resample_signal(g2, t)), FracOrder(1.0 / 3.0));
  const auto r3 = e.spectrum(resample_signal(f, t));
  SegmentBoundary out;
  auto h = neumann_segment(e, r1, r2, r3, lam, L, out.diagnostics);
  out.h1 = e.signal(h[0]);
  out.h2 = e.signal(h[1]);
  out.h3 = e.signal(h[2]);
  return out;
}

double kl_bump_ratio(const TimeSignal& f, double L) {
  const double fm = f.max_abs();
  if (fm == 0.0) return 0.0;
  const Axis x{L, 0.125, 8};
  const ForcingEngine e(x, f.axis());
  return e.L0(e.spectrum(f)).trace(0).max_abs() / fm;
}

ScaledProblem scale_data(const BoundaryData& data, const SpatialProfile& phi, double lambda,
                         const SolverConfig& cfg) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DomainError("scaling factor must lie in (0, 1]");
  const Axis x = solver_x_axis(cfg.grid), t = solver_t_axis(cfg.grid);
  const double l2 = lambda * lambda, l3 = l2 * lambda;
  ScaledProblem s;
  s.lambda = lambda;
  s.phi = resample_profile(phi, x, lambda, l2);
  s.data.problem = data.problem;
  s.data.L = data.L / lambda;
  if (data.f) s.data.f = resample_signal(*data.f, t, l3, l2);
  if (data.g1) s.data.g1 = resample_signal(*data.g1, t, l3, l2);
  if (data.g2) s.data.g2 = resample_signal(*data.g2, t, l3, l3);
  return s;
}

SpaceTimeField unscale_solution(const SpaceTimeField& u, double lambda, double T) {
  const std::size_t nt = grid_index(u.t, T) + 1;
  const double l3 = lambda * lambda * lambda;
  SpaceTimeField out(Axis{lambda * u.x.start, lambda * u.x.step, u.x.n}, Axis{l3 * u.t.start, l3 * u.t.step, nt});
  const double a = 1.0 / (lambda * lambda);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * u.values[i];
  out.flags = u.flags;
  return out;
}

SolveResult scaled_solve(const BoundaryData& data, const SpatialProfile& phi, const SolverConfig& cfg,
                         double lambda) {
  const ScaledProblem sp = scale_data(data, phi, lambda, cfg);
  SolverConfig c = cfg;
  c.L = sp.data.L;
  SolveResult r = picard_solve(sp.data, sp.phi, c);
  r.u = unscale_solution(r.u, lambda, cfg.grid.T);
  r.region = physical_region(data.problem, data.L);
  return r;
}

double scaling_norm_factor(double lambda, double s) { return std::pow(lambda, 1.5) * std::max(1.0, std::pow(lambda, s)); }

std::vector<double> region_weights(const Axis& x, Region r) {
  std::vector<double> w(x.n, 0.0);
  std::size_t first = x.n, last = 0;
  for (std::size_t j = 0; j < x.n; ++j)
    if (r.contains(x.at(j))) {
      first = std::min(first, j);
      last = j + 1;
    }
  if (first >= last) return w;
  const std::size_t count = last - first;
  const auto g = gregory_weights(count, x.step);
  for (std::size_t i = 0; i < count; ++i) w[first + i] = g[i];
  if (count < 6) return w;
  const GaussRule& gl = gauss_legendre(4);
  auto partial = [&](double a, double b, std::size_t base) {
    std::vector<double> xs(6);
    for (std::size_t k = 0; k < 6; ++k) xs[k] = x.at(base + k);
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
      const double at = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[q];
      const auto l = fd_weights(xs, at, 0);
      for (std::size_t k = 0; k < 6; ++k) w[base + k] += 0.5 * (b - a) * gl.w[q] * l[k];
    }
  };
  if (std::isfinite(r.lo)) partial(r.lo, x.at(first), first);
  if (std::isfinite(r.hi)) partial(x.at(last - 1), r.hi, last - 6);
  return w;
}

EnergyCheck energy_identity_check(const SpaceTimeField& u, Region r, double T, bool cubic) {
  EnergyCheck out;
  const std::size_t nT = grid_index(u.t, T);
  const auto w = region_weights(u.x, r);
  auto mass = [&](std::size_t n) {
    double m = 0.0;
    for (std::size_t j = 0; j < u.x.n; ++j)
      if (w[j] != 0.0) m += w[j] * std::norm(u(j, n));
    return m;
  };
  out.mass_start = mass(0);
  out.mass_end = mass(nT);

  // Boundary flux F = 2 Re(conj(u) u_xx) - |u_x|^2 (+ 2/3 Re(u)^3).
  auto flux_at = [&](double x0, Side side) {
    const TimeSignal a = side_limit(u, x0, side, 0, kFluxNodes), b = side_limit(u, x0, side, 1, kFluxNodes),
                     c = side_limit(u, x0, side, 2, kFluxNodes);
    std::vector<double> f(nT + 1);
    for (std::size_t n = 0; n <= nT; ++n) {
      f[n] = 2.0 * std::real(std::conj(a.samples[n]) * c.samples[n]) - std::norm(b.samples[n]);
      if (cubic) f[n] += 2.0 / 3.0 * std::pow(a.samples[n].real(), 3);
    }
    return f;
  };
  std::vector<double> net(nT + 1, 0.0);
  if (std::isfinite(r.lo)) {
    const auto f = flux_at(r.lo, Side::right);
    for (std::size_t n = 0; n <= nT; ++n) net[n] += f[n];
  }
  if (std::isfinite(r.hi)) {
    const auto f = flux_at(r.hi, Side::left);
    for (std::size_t n = 0; n <= nT; ++n) net[n] -= f[n];
  }
  const auto tw = gregory_weights(nT + 1, u.t.step);
  for (std::size_t n = 0; n <= nT; ++n) out.flux += tw[n] * net[n];

  const double scale = std::max({out.mass_start, out.mass_end, std::abs(out.flux)});
  const double gap = std::abs(out.mass_end - out.mass_start - out.flux);
  out.residual = scale > 0.0 ? gap / scale : gap;

  // The identity assumes decay at an infinite end of the region.
  double edge = 0.0, peak = 0.0;
  for (std::size_t n = 0; n <= nT; ++n)
    for (std::size_t j = 0; j < u.x.n; ++j) {
      if (!r.contains(u.x.at(j))) continue;
      const double v = std::abs(u(j, n));
      peak = std::max(peak, v);
      const bool outer = (!std::isfinite(r.lo) && j < 8) || (!std::isfinite(r.hi) && j + 8 >= u.x.n);
      if (outer) edge = std::max(edge, v);
    }
  if (peak > 0.0 && edge > 1e-3 * peak) out.flags.emplace_back("energy: solution not decayed at the outer boundary");
  return out;
}

EnergyCheck energy_identity_check(const SpaceTimeField& u, Side side, double T) {
  const double inf = std::numeric_limits<double>::infinity();
  return energy_identity_check(u, side == Side::right ? Region{0.0, inf} : Region{-inf, 0.0}, T, false);
}

double pde_residual(const SpaceTimeField& u, double lo, double hi, double T, bool nonlinear) {
  const Axis& x = u.x;
  const Axis& t = u.t;
  static const std::vector<double> nodes{-4, -3, -2, -1, 0, 1, 2, 3, 4};
  static const auto w1 = fd_weights(nodes, 0.0, 1);
  static const auto w3 = fd_weights(nodes, 0.0, 3);
  const double h = x.step, h3 = h * h * h, dt = t.step;
  const std::size_t nT = std::min(grid_index(t, T), t.n - 3);
  double res = 0.0, scale = 0.0;
  for (std::size_t n = 3; n <= nT; ++n)
    for (std::size_t j = 4; j + 4 < x.n; ++j) {
      const double xj = x.at(j);
      if (xj < lo + 5.0 * h || xj > hi - 5.0 * h) continue;
      const cplx ut = (-u(j, n + 2) + 8.0 * u(j, n + 1) - 8.0 * u(j, n - 1) + u(j, n - 2)) / (12.0 * dt);
      cplx ux = 0.0, uxxx = 0.0;
      for (std::size_t k = 0; k < 9; ++k) {
        const cplx v = u(j + k - 4, n);
        ux += w1[k] * v;
        uxxx += w3[k] * v;
      }
      cplx r = ut + uxxx / h3;
      if (nonlinear) r += u(j, n) * ux / h;
      res = std::max(res, std::abs(r));
      scale = std::max(scale, std::abs(ut));
    }
  return scale > 0.0 ? res / scale : res;
}

}  // namespace kdv
