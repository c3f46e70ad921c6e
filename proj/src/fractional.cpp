#include "kdv/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdv/laplace.hpp"
#include "kdv/numerics.hpp"

namespace kdv {

namespace {

// Stencil node offsets relative to the panel's left node.
constexpr std::array<std::array<int, 4>, 3> kOffsets = {{{-1, 0, 1, 2}, {0, 1, 2, 3}, {-2, -1, 0, 1}}};

// m_k(D) = \int_0^1 (D - s)^{beta-1} s^k ds, k = 0..3.
std::array<cplx, 4> moments(cplx beta, std::size_t distance) {
  std::array<cplx, 4> m{};
  if (distance == 1) {
    // Beta function values k! / (beta (beta+1) ... (beta+k)).
    cplx denom = beta;
    double fact = 1.0;
    for (int k = 0; k < 4; ++k) {
      if (k > 0) {
        fact *= k;
        denom *= beta + static_cast<double>(k);
      }
      m[k] = fact / denom;
    }
    return m;
  }
  const GaussRule& g = gauss_legendre(20);
  const double d = static_cast<double>(distance);
  for (std::size_t q = 0; q < g.x.size(); ++q) {
    const double s = 0.5 * (g.x[q] + 1.0);
    const cplx ker = 0.5 * g.w[q] * std::pow(cplx(d - s), beta - 1.0);
    double sk = 1.0;
    for (int k = 0; k < 4; ++k) {
      m[k] += ker * sk;
      sk *= s;
    }
  }
  return m;
}

void check_causal(const TimeSignal& f) {
  if (!f.causal) throw DomainError("fractional integral needs a causal signal");
  if (f.size() < 5) throw DomainError("fractional integral needs at least 5 samples");
  if (!(f.dt > 0.0)) throw DomainError("fractional integral needs dt > 0");
}

std::vector<cplx> product_integrate(const std::vector<cplx>& f, const ProductRule& rule, Exec exec) {
  const std::size_t m = f.size();
  std::vector<cplx> out(m, 0.0);
  auto row = [&](std::size_t n) {
    cplx acc = 0.0;
    const std::size_t hi = std::max<std::size_t>(n, 3);
    for (std::size_t j = 0; j < n; ++j) {
      long long s0 = static_cast<long long>(j) - 1;
      s0 = std::clamp<long long>(s0, 0, static_cast<long long>(std::min(hi, m - 1)) - 3);
      const long long shift = s0 - static_cast<long long>(j);
      const auto st = shift == -1 ? ProductRule::interior
                                  : (shift == 0 ? ProductRule::start : ProductRule::end);
      const auto& w = rule.weights(st, n - j);
      const auto base = static_cast<std::size_t>(s0);
      acc += w[0] * f[base] + w[1] * f[base + 1] + w[2] * f[base + 2] + w[3] * f[base + 3];
    }
    out[n] = acc;
  };
  const auto total = static_cast<long long>(m);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static, 1)
    for (long long n = 1; n < total; ++n) row(static_cast<std::size_t>(n));
  } else {
    for (long long n = 1; n < total; ++n) row(static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace

ProductRule::ProductRule(cplx beta, double h, std::size_t max_distance)
    : beta_(beta), max_d_(max_distance) {
  if (!(beta.real() > 0.0)) throw DomainError("ProductRule: Re beta must be positive");
  const cplx scale = std::pow(cplx(h), beta) * crgamma(beta);
  std::array<std::array<std::array<double, 4>, 4>, 3> lag{};
  for (std::size_t s = 0; s < 3; ++s) lag[s] = cubic_lagrange(kOffsets[s]);
  for (auto& w : w_) w.assign(max_distance + 1, std::array<cplx, 4>{});
  for (std::size_t d = 1; d <= max_distance; ++d) {
    const auto mom = moments(beta, d);
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t i = 0; i < 4; ++i) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < 4; ++k) acc += lag[s][i][k] * mom[k];
        w_[s][d][i] = scale * acc;
      }
    }
  }
}

std::vector<cplx> ProductRule::toeplitz(std::size_t n) const {
  if (max_d_ < n + 1) throw DomainError("ProductRule::toeplitz: rule too short");
  std::vector<cplx> c(n + 1, 0.0);
  for (long long d = -1; d < static_cast<long long>(n); ++d) {
    cplx acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      const long long dist = d + kOffsets[0][static_cast<std::size_t>(i)];
      if (dist >= 1 && dist <= static_cast<long long>(n)) acc += w_[0][static_cast<std::size_t>(dist)][static_cast<std::size_t>(i)];
    }
    c[static_cast<std::size_t>(d + 1)] = acc;
  }
  return c;
}

TimeSignal frac_integrate(const TimeSignal& f, FracOrder alpha, Exec exec) {
  check_causal(f);
  if (!std::isfinite(alpha.re) || !std::isfinite(alpha.im)) throw DomainError("non-finite order");
  if (alpha.is_zero()) return f;

  TimeSignal out = f;
  const double scale = std::max(f.max_abs(), 1e-300);
  if (alpha.re > 0.0) {
    ProductRule rule(alpha.value(), f.dt, f.size());
    out.samples = product_integrate(f.samples, rule, exec);
    return out;
  }

  // Negative orders: integrate to a positive order, then differentiate k times.
  const bool integer_order = alpha.im == 0.0 && std::floor(alpha.re) == alpha.re;
  const int k = integer_order ? static_cast<int>(-alpha.re) : static_cast<int>(std::floor(-alpha.re)) + 1;
  if (std::abs(f.samples.front()) > 1e-10 * scale) out.flag("endpoint: f does not vanish at grid start");
  if (!integer_order) {
    ProductRule rule(alpha.value() + static_cast<double>(k), f.dt, f.size());
    out.samples = product_integrate(f.samples, rule, exec);
  }
  for (int i = 0; i < k; ++i) out.samples = fd_derivative(out.samples, f.dt);
  return out;
}

cplx frac_symbol(FracOrder alpha, double tau) {
  if (tau == 0.0) throw DomainError("frac_symbol: tau = 0 is the singular point");
  const double pi = std::numbers::pi;
  const cplx a = alpha.value();
  if (tau > 0.0) return std::exp(-cplx(0, pi / 2) * a) * std::pow(cplx(tau), -a);
  return std::exp(cplx(0, pi / 2) * a) * std::pow(cplx(-tau), -a);
}

cplx frac_symbol(FracOrder alpha, cplx tau) {
  if (tau.imag() == 0.0) return frac_symbol(alpha, tau.real());
  if (tau.imag() > 0.0) throw DomainError("frac_symbol: continuation defined for Im tau < 0");
  // With p = i tau (Re p > 0): e^{-i pi a/2} (tau)^{-a} = p^{-a}.
  return std::exp(-alpha.value() * std::log(cplx(0, 1) * tau));
}

TimeSignal frac_integrate_spectral(const TimeSignal& f, FracOrder alpha) {
  if (!f.causal) throw DomainError("frac_integrate_spectral needs a causal signal");
  if (alpha.is_zero()) return f;
  TimeSignal out = f;
  const double scale = std::max(f.max_abs(), 1e-300);
  if (std::abs(f.samples.back()) > 1e-8 * scale) out.flag("padding: signal does not decay at grid end");
  CausalTransform tr(f.size(), f.dt);
  auto spec = tr.forward(f.samples);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const cplx tau = -cplx(0, 1) * tr.p()[k];  // tau - i eps
    spec[k] *= frac_symbol(alpha, tau);
  }
  out.samples = tr.inverse(std::move(spec));
  return out;
}

SpaceTimeField x_frac_integrate(const SpaceTimeField& v, cplx beta, Side side, Exec exec) {
  const std::size_t n = v.x.n;
  ProductRule rule(beta, v.x.step, n + 1);
  const auto c = rule.toeplitz(n);
  const std::size_t k = next_pow2(2 * n);
  std::vector<cplx> ck(k, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    // c_d sits at d mod k; index 0 of c holds d = -1.
    const std::size_t pos = (i == 0) ? k - 1 : i - 1;
    ck[pos] = c[i];
  }
  fft_inplace(ck, -1);
  for (auto& z : ck) z /= static_cast<double>(k);

  SpaceTimeField out(v.x, v.t);
  out.flags = v.flags;
  auto slice = [&](std::size_t t) {
    std::vector<cplx> buf(k, 0.0);
    const cplx* src = &v.values[t * n];
    for (std::size_t j = 0; j < n; ++j) buf[j] = side == Side::left ? src[j] : src[n - 1 - j];
    fft_inplace(buf, -1);
    for (std::size_t q = 0; q < k; ++q) buf[q] *= ck[q];
    fft_inplace(buf, +1);
    cplx* dst = &out.values[t * n];
    for (std::size_t j = 0; j < n; ++j) dst[side == Side::left ? j : n - 1 - j] = buf[j];
  };
  const auto total = static_cast<long long>(v.t.n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long t = 0; t < total; ++t) slice(static_cast<std::size_t>(t));
  } else {
    for (long long t = 0; t < total; ++t) slice(static_cast<std::size_t>(t));
  }
  return out;
}

}  // namespace kdv
