#include "kdv/propagators.hpp"

#include <algorithm>
#include <cmath>

#include "kdv/airy.hpp"
#include "kdv/numerics.hpp"

namespace kdv {

namespace {

constexpr char kAliasFlag[] = "aliasing: spectral tail above tolerance";

std::vector<cplx> forward_dft(const cplx* v, std::size_t n) {
  std::vector<cplx> s(v, v + n);
  fft_inplace(s, -1);
  return s;
}

void check_inside(const Axis& x, double at) {
  const double lo = x.start - 0.5 * x.step;
  const double hi = x.end() + 0.5 * x.step;
  if (!(at >= lo && at <= hi)) throw DomainError("point outside the spatial box");
}

// mu_k = \int_0^1 e^{z(1-s)} s^k ds, k = 0..3.
std::array<cplx, 4> exp_moments(cplx z) {
  std::array<cplx, 4> mu{};
  if (std::abs(z) < 1.0) {
    for (int k = 0; k < 4; ++k) {
      // k! / (j+k+1)! built incrementally.
      double coef = 1.0;
      for (int i = 1; i <= k + 1; ++i) coef /= i;
      double kf = 1.0;
      for (int i = 2; i <= k; ++i) kf *= i;
      coef *= kf;
      cplx zj = 1.0;
      cplx acc = 0.0;
      for (int j = 0; j < 30; ++j) {
        acc += zj * coef;
        zj *= z;
        coef /= static_cast<double>(j + k + 2);
      }
      mu[static_cast<std::size_t>(k)] = acc;
    }
    return mu;
  }
  mu[0] = (std::exp(z) - 1.0) / z;
  for (int k = 1; k < 4; ++k)
    mu[static_cast<std::size_t>(k)] = -1.0 / z + static_cast<double>(k) / z * mu[static_cast<std::size_t>(k - 1)];
  return mu;
}

constexpr std::array<std::array<int, 4>, 3> kPanelNodes = {{{-1, 0, 1, 2}, {0, 1, 2, 3}, {-2, -1, 0, 1}}};

}  // namespace

std::vector<double> box_wavenumbers(const Axis& x) {
  return fft_frequencies(x.n, x.step * static_cast<double>(x.n));
}

double spectral_tail_fraction(const std::vector<cplx>& spectrum) {
  const std::size_t n = spectrum.size();
  double total = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = std::min(k, n - k);
    const double e = std::norm(spectrum[k]);
    total += e;
    if (3 * m > n) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

cplx spectral_eval(const std::vector<cplx>& spectrum, const Axis& x, double at, int deriv) {
  const std::size_t n = spectrum.size();
  const auto xi = box_wavenumbers(x);
  const double s = at - x.start;
  cplx acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (2 * k == n) continue;  // Nyquist mode has no consistent off-grid interpolant
    acc += spectrum[k] * std::pow(cplx(0, xi[k]), deriv) * std::exp(cplx(0, xi[k] * s));
  }
  return acc / static_cast<double>(n);
}

SpatialProfile airy_group(const SpatialProfile& phi, double t) {
  SpatialProfile out = phi;
  if (t == 0.0) return out;
  auto s = forward_dft(phi.samples.data(), phi.size());
  if (spectral_tail_fraction(s) > kAliasTol) out.flag(kAliasFlag);
  const auto xi = box_wavenumbers(phi.axis());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= std::exp(cplx(0, t * xi[k] * xi[k] * xi[k]));
  fft_inplace(s, +1);
  const double inv = 1.0 / static_cast<double>(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) out.samples[j] = s[j] * inv;
  return out;
}

SpatialProfile airy_group_kernel(const SpatialProfile& phi, double t, Exec exec) {
  if (!(t > 0.0)) throw DomainError("airy_group_kernel needs t > 0");
  const std::size_t n = phi.size();
  const double scale = std::cbrt(t);
  // kernel[d + n - 1] for node offset d = i - j.
  std::vector<double> kernel(2 * n - 1);
  for (std::size_t q = 0; q < kernel.size(); ++q) {
    const double d = (static_cast<double>(q) - static_cast<double>(n - 1)) * phi.dx;
    kernel[q] = airy(d / scale).a / scale * phi.dx;
  }
  SpatialProfile out = phi;
  auto row = [&](std::size_t i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += kernel[i + n - 1 - j] * phi.samples[j];
    out.samples[i] = acc;
  };
  const auto total = static_cast<long long>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < total; ++i) row(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < total; ++i) row(static_cast<std::size_t>(i));
  }
  return out;
}

SpaceTimeField airy_group_field(const SpatialProfile& phi, const Axis& t) {
  SpaceTimeField u(phi.axis(), t);
  const std::size_t n = phi.size();
  const auto s = forward_dft(phi.samples.data(), n);
  if (spectral_tail_fraction(s) > kAliasTol) u.flag(kAliasFlag);
  const auto xi = box_wavenumbers(phi.axis());
  const double inv = 1.0 / static_cast<double>(n);
  const auto slices = static_cast<long long>(t.n);
#pragma omp parallel for schedule(static)
  for (long long m = 0; m < slices; ++m) {
    const double tm = t.at(static_cast<std::size_t>(m));
    std::vector<cplx> buf(n);
    for (std::size_t k = 0; k < n; ++k) buf[k] = s[k] * std::exp(cplx(0, tm * xi[k] * xi[k] * xi[k]));
    fft_inplace(buf, +1);
    cplx* dst = &u.values[static_cast<std::size_t>(m) * n];
    for (std::size_t j = 0; j < n; ++j) dst[j] = buf[j] * inv;
  }
  return u;
}

std::pair<TimeSignal, TimeSignal> airy_group_trace(const SpatialProfile& phi, double x, const Axis& t) {
  check_inside(phi.axis(), x);
  const std::size_t n = phi.size();
  const auto s = forward_dft(phi.samples.data(), n);
  const auto xi = box_wavenumbers(phi.axis());
  const double off = x - phi.x0;
  std::vector<cplx> base(n), slope(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (2 * k == n) continue;
    base[k] = s[k] * std::exp(cplx(0, xi[k] * off)) / static_cast<double>(n);
    slope[k] = base[k] * cplx(0, xi[k]);
  }
  TimeSignal v(std::vector<cplx>(t.n), t.step, t.start);
  TimeSignal d = v;
  const auto slices = static_cast<long long>(t.n);
#pragma omp parallel for schedule(static)
  for (long long m = 0; m < slices; ++m) {
    const double tm = t.at(static_cast<std::size_t>(m));
    cplx a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx g = std::exp(cplx(0, tm * xi[k] * xi[k] * xi[k]));
      a += base[k] * g;
      b += slope[k] * g;
    }
    v.samples[static_cast<std::size_t>(m)] = a;
    d.samples[static_cast<std::size_t>(m)] = b;
  }
  if (spectral_tail_fraction(s) > kAliasTol) {
    v.flag(kAliasFlag);
    d.flag(kAliasFlag);
  }
  return {v, d};
}

TimeSignal spectral_trace(const SpaceTimeField& u, double x, int deriv) {
  check_inside(u.x, x);
  const std::size_t n = u.x.n;
  const auto xi = box_wavenumbers(u.x);
  std::vector<cplx> phase(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (2 * k == n) continue;
    phase[k] = std::pow(cplx(0, xi[k]), deriv) * std::exp(cplx(0, xi[k] * (x - u.x.start))) /
               static_cast<double>(n);
  }
  TimeSignal out(std::vector<cplx>(u.t.n), u.t.step, u.t.start);
  bool aliased = false;
  const auto slices = static_cast<long long>(u.t.n);
#pragma omp parallel for schedule(static) reduction(|| : aliased)
  for (long long m = 0; m < slices; ++m) {
    const auto s = forward_dft(&u.values[static_cast<std::size_t>(m) * n], n);
    if (spectral_tail_fraction(s) > kAliasTol) aliased = true;
    cplx acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += s[k] * phase[k];
    out.samples[static_cast<std::size_t>(m)] = acc;
  }
  out.flags = u.flags;
  if (aliased) out.flag(kAliasFlag);
  return out;
}

SpaceTimeField spectral_dx(const SpaceTimeField& u, int deriv, double band) {
  SpaceTimeField out(u.x, u.t);
  out.flags = u.flags;
  const std::size_t n = u.x.n;
  const auto xi = box_wavenumbers(u.x);
  std::vector<cplx> mult(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool cut = 2.0 * static_cast<double>(std::min(k, n - k)) > band * static_cast<double>(n);
    mult[k] = (cut || (2 * k == n && deriv % 2 == 1)) ? cplx(0.0)
                                                      : std::pow(cplx(0, xi[k]), deriv) / static_cast<double>(n);
  }
  const auto slices = static_cast<long long>(u.t.n);
#pragma omp parallel for schedule(static)
  for (long long m = 0; m < slices; ++m) {
    auto s = forward_dft(&u.values[static_cast<std::size_t>(m) * n], n);
    for (std::size_t k = 0; k < n; ++k) s[k] *= mult[k];
    fft_inplace(s, +1);
    std::copy(s.begin(), s.end(), out.values.begin() + static_cast<long>(static_cast<std::size_t>(m) * n));
  }
  return out;
}

SpaceTimeField duhamel_field(const SpaceTimeField& w, Exec exec) {
  const std::size_t n = w.x.n;
  const std::size_t mt = w.t.n;
  if (mt < 4) throw DomainError("duhamel needs at least 4 time samples");
  const double dt = w.t.step;
  const auto xi = box_wavenumbers(w.x);

  // Spectra of all slices, then one independent time march per Fourier mode.
  std::vector<cplx> spec(w.values);
  const auto slices = static_cast<long long>(mt);
  bool aliased = false;
  auto transform = [&](long long m) {
    cplx* p = &spec[static_cast<std::size_t>(m) * n];
    fft_inplace(p, n, -1);
    std::vector<cplx> view(p, p + n);
    return spectral_tail_fraction(view) > kAliasTol;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(|| : aliased)
    for (long long m = 0; m < slices; ++m) aliased = transform(m) || aliased;
  } else {
    for (long long m = 0; m < slices; ++m) aliased = transform(m) || aliased;
  }

  std::array<std::array<std::array<double, 4>, 4>, 3> lag{};
  for (std::size_t s = 0; s < 3; ++s) lag[s] = cubic_lagrange(kPanelNodes[s]);

  auto march = [&](std::size_t k) {
    const cplx z(0.0, xi[k] * xi[k] * xi[k] * dt);
    const cplx ez = std::exp(z);
    const auto mu = exp_moments(z);
    std::array<std::array<cplx, 4>, 3> wts{};
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t i = 0; i < 4; ++i) {
        cplx acc = 0.0;
        for (std::size_t q = 0; q < 4; ++q) acc += lag[s][i][q] * mu[q];
        wts[s][i] = dt * acc;
      }
    std::vector<cplx> src(mt);
    for (std::size_t m = 0; m < mt; ++m) src[m] = spec[m * n + k];
    cplx v = 0.0;
    spec[k] = 0.0;
    for (std::size_t m = 0; m + 1 < mt; ++m) {
      std::size_t st = 0;
      if (m == 0) st = 1;
      else if (m + 2 >= mt) st = 2;
      cplx inc = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        const auto node = static_cast<std::size_t>(static_cast<long long>(m) + kPanelNodes[st][i]);
        inc += wts[st][i] * src[node];
      }
      v = ez * v + inc;
      spec[(m + 1) * n + k] = v;
    }
  };
  const auto modes = static_cast<long long>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < modes; ++k) march(static_cast<std::size_t>(k));
  } else {
    for (long long k = 0; k < modes; ++k) march(static_cast<std::size_t>(k));
  }

  SpaceTimeField out(w.x, w.t);
  out.flags = w.flags;
  if (aliased) out.flag(kAliasFlag);
  const double inv = 1.0 / static_cast<double>(n);
  auto back = [&](long long m) {
    cplx* p = &spec[static_cast<std::size_t>(m) * n];
    fft_inplace(p, n, +1);
    cplx* dst = &out.values[static_cast<std::size_t>(m) * n];
    for (std::size_t j = 0; j < n; ++j) dst[j] = p[j] * inv;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long m = 0; m < slices; ++m) back(m);
  } else {
    for (long long m = 0; m < slices; ++m) back(m);
  }
  return out;
}

SpatialProfile duhamel(const SpaceTimeField& w, double t) {
  const double s = (t - w.t.start) / w.t.step;
  const long long idx = std::llround(s);
  if (std::abs(s - static_cast<double>(idx)) > 1e-9 || idx < 0 || idx >= static_cast<long long>(w.t.n))
    throw DomainError("duhamel: t is not on the time grid");
  return duhamel_field(w).slice(static_cast<std::size_t>(idx));
}

}  // namespace kdv
