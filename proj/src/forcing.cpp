#include "kdv/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdv/airy.hpp"
#include "kdv/numerics.hpp"

namespace kdv {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kW1 = std::polar(1.0, kPi / 3.0);
const cplx kW2 = std::polar(1.0, -kPi / 3.0);
const cplx kI(0.0, 1.0);

// d_x^d of the L0 transfer function at x.
cplx l0_multiplier(cplx rho, double x, int d) {
  if (x >= 0.0) return std::pow(-rho, d) * std::exp(-rho * x);
  const cplx r1 = kW1 * rho;
  const cplx r2 = kW2 * rho;
  return kW1 * std::pow(r1, d) * std::exp(r1 * x) - kW1 * kW1 * std::pow(r2, d) * std::exp(r2 * x);
}

int minimal_k(double re_lambda) {
  return re_lambda > 0.0 ? 0 : static_cast<int>(std::floor(-re_lambda)) + 1;
}

}  // namespace

ForcingEngine::ForcingEngine(const Axis& x, const Axis& t, FamilyOptions opt)
    : x_(x), t_(t), opt_(opt), tr_(t.n, t.step) {
  if (t.start != 0.0) throw DomainError("forcing operators need a time axis starting at 0");
  if (x.n < 8) throw DomainError("spatial axis too short");
  rho_.resize(tr_.length());
  for (std::size_t k = 0; k < rho_.size(); ++k) rho_[k] = std::pow(tr_.p()[k], 1.0 / 3.0);
}

std::vector<cplx> ForcingEngine::spectrum(const TimeSignal& f) const {
  if (!f.causal) throw DomainError("forcing operators need a causal signal");
  if (f.t0 != 0.0) throw DomainError("signal must start at t = 0");
  if (std::abs(f.dt - t_.step) > 1e-12 * t_.step) throw DomainError("signal step differs from the time axis");
  if (f.size() <= t_.n) return tr_.forward(f.samples);
  return tr_.forward(std::vector<cplx>(f.samples.begin(), f.samples.begin() + static_cast<long>(t_.n)));
}

TimeSignal ForcingEngine::signal(std::vector<cplx> spec) const {
  return TimeSignal(tr_.inverse(std::move(spec)), t_.step, 0.0);
}

std::vector<cplx> ForcingEngine::frac(const std::vector<cplx>& spec, FracOrder alpha) const {
  std::vector<cplx> out(spec.size());
  const cplx a = alpha.value();
  for (std::size_t k = 0; k < spec.size(); ++k) out[k] = spec[k] * std::exp(-a * std::log(tr_.p()[k]));
  return out;
}

template <class M>
SpaceTimeField ForcingEngine::transfer(const Axis& xs, const std::vector<cplx>& F, M&& mult,
                                       Exec exec) const {
  if (F.size() != tr_.length()) throw DomainError("spectrum length does not match the transform");
  SpaceTimeField out(xs, t_);
  const std::size_t kk = F.size();
  auto node = [&](std::size_t j, std::vector<cplx>& buf) {
    const double xj = xs.at(j);
    for (std::size_t k = 0; k < kk; ++k) buf[k] = mult(xj, k) * F[k];
    tr_.inverse_into(buf, &out.values[j], xs.n);
  };
  const auto nodes = static_cast<long long>(xs.n);
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<cplx> buf(kk);
#pragma omp for schedule(static)
      for (long long j = 0; j < nodes; ++j) node(static_cast<std::size_t>(j), buf);
    }
  } else {
    std::vector<cplx> buf(kk);
    for (long long j = 0; j < nodes; ++j) node(static_cast<std::size_t>(j), buf);
  }
  return out;
}

double ForcingEngine::taper(double x) const {
  if (opt_.taper_start >= 1.0) return 1.0;
  const double h = 0.5 * static_cast<double>(x_.n) * x_.step;
  const double centre = x_.start - 0.5 * x_.step + h;
  const double r = std::abs(x - centre) / h;
  return 1.0 - smooth_step((r - opt_.taper_start) / (opt_.taper_end - opt_.taper_start));
}

SpaceTimeField ForcingEngine::L0(const std::vector<cplx>& F, int deriv, Exec exec) const {
  return transfer(x_, F, [&](double x, std::size_t k) { return l0_multiplier(rho_[k], x, deriv); }, exec);
}

SpaceTimeField ForcingEngine::Lm1(const std::vector<cplx>& F, Exec exec) const {
  // d_x L0 I_{1/3}: the factor rho from d_x cancels rho^{-1}.
  return transfer(x_, F, [&](double x, std::size_t k) { return l0_multiplier(rho_[k], x, 1) / rho_[k]; }, exec);
}

cplx ForcingEngine::family_multiplier(FracOrder lambda, Sign sign, double x, std::size_t k) const {
  const cplx lam = lambda.value();
  const cplx rho = rho_[k];
  if (sign == Sign::plus) return std::exp(kI * kPi * lam) * std::exp(-rho * x);
  const cplx c1 = std::exp(kI * kPi * (1.0 - lam) / 3.0);            // w1^{1-lambda}
  const cplx c2 = kW1 * kW1 * std::exp(kI * kPi * lam / 3.0);        // w1^2 w2^{-lambda}
  return c1 * std::exp(kW1 * rho * x) - c2 * std::exp(kW2 * rho * x);
}

SpaceTimeField ForcingEngine::family_easy(const std::vector<cplx>& F, FracOrder lambda, Sign sign,
                                          const Axis& xs, Exec exec) const {
  if (xs.n == 0) return SpaceTimeField(xs, t_);
  const double lo = std::min(xs.start, xs.end()), hi = std::max(xs.start, xs.end());
  if ((sign == Sign::minus && hi > 0.0) || (sign == Sign::plus && lo < 0.0))
    throw DomainError("family_easy: axis reaches the slowly decaying side");
  return transfer(xs, F, [&](double x, std::size_t k) { return family_multiplier(lambda, sign, x, k); }, exec);
}

SpaceTimeField ForcingEngine::family(const std::vector<cplx>& F, FracOrder lambda, Sign sign,
                                     Exec exec) const {
  if (!(lambda.re > -3.0)) throw DomainError("forcing family needs Re lambda > -3");
  const cplx lam = lambda.value();
  const bool minus = sign == Sign::minus;
  auto hard = [&](double x) { return minus ? x > 0.0 : x < 0.0; };

  // Rapidly decaying side straight from the transfer function.
  SpaceTimeField out = transfer(x_, F, [&](double x, std::size_t k) {
    return hard(x) ? cplx(0.0) : family_multiplier(lambda, sign, x, k);
  }, exec);

  // Other side: I^x_{lambda+k} of (+-d_x)^k L0 I_{-lambda/3} f, with the
  // piecewise-polynomial part carrying the jump of d_x^2 L0 at x = 0 split
  // off and integrated exactly.
  const int k = minimal_k(lambda.re);
  const cplx beta = lam + static_cast<double>(k);
  const double sgn = (!minus && k % 2 == 1) ? -1.0 : 1.0;
  auto g_mult = [&](std::size_t q) { return std::exp(lam * std::log(rho_[q])); };
  const auto extra = minus ? static_cast<std::size_t>(std::ceil(opt_.extension / x_.step)) : 0;
  const Axis xv{x_.start - static_cast<double>(extra) * x_.step, x_.step, x_.n + extra};
  SpaceTimeField v = transfer(xv, F, [&](double x, std::size_t q) {
    return sgn * l0_multiplier(rho_[q], x, k) * g_mult(q);
  }, exec);

  std::vector<cplx> jspec(F.size());
  for (std::size_t q = 0; q < F.size(); ++q) jspec[q] = 3.0 * rho_[q] * rho_[q] * g_mult(q) * F[q];
  const std::vector<cplx> jump = tr_.inverse(std::move(jspec));
  const double c_sign = minus ? 1.0 : -1.0;
  const int m = 2 - k;
  if (m >= 0) {
    double mfact = 1.0;
    for (int i = 2; i <= m; ++i) mfact *= i;
    for (std::size_t j = 0; j < xv.n; ++j) {
      const double xj = xv.at(j);
      if (!hard(xj)) continue;
      const double s = std::pow(std::abs(xj), m) / mfact;
      for (std::size_t n = 0; n < t_.n; ++n) v(j, n) -= c_sign * jump[n] * s;
    }
  }
  const SpaceTimeField iv = x_frac_integrate(v, beta, minus ? Side::left : Side::right, exec);
  const cplx head = minus ? cplx(1.0) : std::exp(kI * kPi * lam);
  const cplx rg = crgamma(lam + 3.0);
  for (std::size_t j = 0; j < x_.n; ++j) {
    const double xj = x_.at(j);
    if (!hard(xj)) continue;
    const cplx s = std::pow(cplx(std::abs(xj)), lam + 2.0) * rg;
    const double w = taper(xj);
    for (std::size_t n = 0; n < t_.n; ++n)
      out(j, n) = head * w * (iv(j + extra, n) + c_sign * jump[n] * s);
  }
  return out;
}

SpaceTimeField forcing_L0(const TimeSignal& f, const Axis& x, const Axis& t) {
  ForcingEngine e(x, t);
  auto u = e.L0(e.spectrum(f));
  u.flags = f.flags;
  return u;
}

SpaceTimeField forcing_Lm1(const TimeSignal& f, const Axis& x, const Axis& t) {
  ForcingEngine e(x, t);
  auto u = e.Lm1(e.spectrum(f));
  u.flags = f.flags;
  return u;
}

SpaceTimeField forcing_family(const TimeSignal& f, FracOrder lambda, Sign sign, const Axis& x,
                              const Axis& t, FamilyOptions opt) {
  ForcingEngine e(x, t, opt);
  auto u = e.family(e.spectrum(f), lambda, sign);
  u.flags = f.flags;
  return u;
}

cplx family_trace_coefficient(FracOrder lambda, Sign sign) {
  const cplx lam = lambda.value();
  if (sign == Sign::plus) return std::exp(kI * kPi * lam);
  return 2.0 * std::sin(kPi * lam / 3.0 + kPi / 6.0);
}

cplx family_slope_coefficient(FracOrder lambda) {
  return 2.0 * std::sin(kPi * lambda.value() / 3.0 - kPi / 6.0);
}

L0Kernel::L0Kernel(const TimeSignal& f) : q_(frac_integrate(f, FracOrder(-2.0 / 3.0))) {}

cplx L0Kernel::q_at(double t) const {
  if (t <= 0.0) return 0.0;
  return lagrange_sample(q_.samples, q_.t0, q_.dt, t, 6, false);
}

cplx L0Kernel::eval(double x, double t, int deriv) const {
  if (deriv < 0 || deriv > 2) throw DomainError("L0Kernel: derivative order must be 0, 1 or 2");
  if (deriv == 2 && x < 0.0) throw DomainError("L0Kernel: second derivative only for x >= 0");
  if (t <= 0.0) return 0.0;
  const double a = std::cbrt(t);
  auto integrand = [&](double u) -> cplx {
    const AiryValue av = airy(x / u);
    const cplx q = q_at(t - u * u * u);
    if (deriv == 0) return 9.0 * u * av.a * q;
    if (deriv == 1) return 9.0 * av.ap * q;
    return 3.0 * x / (u * u) * av.a * q;
  };
  if (x == 0.0) {
    if (deriv == 2) return 0.0;
    return gauss_integrate(integrand, 0.0, a, 256);
  }
  if (x > 0.0) {
    // A(x/u) is below 1e-40 once x/u > 40.
    const double lo = std::min(a, x / 40.0);
    return gauss_integrate(integrand, lo, a, 256);
  }
  // x < 0: the kernel oscillates ever faster as u -> 0. The tail [0, cut]
  // is below 1e-13 by an integration-by-parts bound; beyond it, panels are
  // one local wavelength wide.
  const double ax = std::abs(x);
  const double expo = deriv == 0 ? 4.0 / 15.0 : 4.0 / 11.0;
  const double cut = std::min(a, std::pow(1e-13 * std::pow(ax, 1.75), expo));
  const double c = std::cbrt(1.0 / 3.0);
  const double k32 = std::pow(c * ax, 1.5);
  cplx acc = 0.0;
  double u = cut;
  while (u < a) {
    const double wavelength = 2.0 * kPi * std::pow(u, 2.5) / k32;
    const double h = std::min({a - u, wavelength, a / 64.0});
    acc += gauss_integrate(integrand, u, u + h, 1);
    u += h;
  }
  return acc;
}

TimeSignal side_limit(const SpaceTimeField& u, double at, Side side, int deriv, std::size_t nodes) {
  const Axis& x = u.x;
  const double s = (at - x.start) / x.step;
  long long first = 0;
  long long dir = 1;
  if (side == Side::right) {
    first = static_cast<long long>(std::floor(s)) + 1;
    if (static_cast<double>(first) <= s) ++first;
  } else {
    first = static_cast<long long>(std::ceil(s)) - 1;
    if (static_cast<double>(first) >= s) --first;
    dir = -1;
  }
  const long long last = first + dir * static_cast<long long>(nodes - 1);
  if (std::min(first, last) < 0 || std::max(first, last) >= static_cast<long long>(x.n))
    throw DomainError("side_limit: not enough nodes on the requested side");
  std::vector<double> xs(nodes);
  std::vector<std::size_t> idx(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    idx[i] = static_cast<std::size_t>(first + dir * static_cast<long long>(i));
    xs[i] = x.at(idx[i]) - at;
  }
  const auto w = fd_weights(xs, 0.0, deriv);
  TimeSignal out(std::vector<cplx>(u.t.n), u.t.step, u.t.start);
  for (std::size_t n = 0; n < u.t.n; ++n) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) acc += w[i] * u(idx[i], n);
    out.samples[n] = acc;
  }
  return out;
}

JumpResult jump_size(const SpaceTimeField& u, double t, int deriv) {
  const double s = (t - u.t.start) / u.t.step;
  const long long n = std::llround(s);
  if (std::abs(s - static_cast<double>(n)) > 1e-9 || n < 0 || n >= static_cast<long long>(u.t.n))
    throw DomainError("jump_size: t is not on the time grid");
  const auto idx = static_cast<std::size_t>(n);
  auto jump = [&](std::size_t nodes) {
    return side_limit(u, 0.0, Side::right, deriv, nodes).samples[idx] -
           side_limit(u, 0.0, Side::left, deriv, nodes).samples[idx];
  };
  JumpResult r;
  r.value = jump(6);
  r.spread = std::abs(r.value - jump(7));
  r.resolved = r.spread <= 1e-2 * std::abs(r.value) + 1e-12;
  return r;
}

SpaceTimeField nonuniqueness_witness(const TimeSignal& h, const Axis& x, const Axis& t) {
  ForcingEngine e(x, t);
  const auto F = e.spectrum(h);
  auto u = e.L0(F);
  u += e.Lm1(F);
  u.flags = h.flags;
  return u;
}

}  // namespace kdv
