#include "kdv/numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace kdv {

namespace {

struct PlanKey {
  std::size_t n;
  int sign;
  bool operator<(const PlanKey& o) const { return n != o.n ? n < o.n : sign < o.sign; }
};

struct PlanCache {
  std::mutex mu;
  std::map<PlanKey, fftw_plan> plans;

  ~PlanCache() {
    for (auto& kv : plans) fftw_destroy_plan(kv.second);
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    // Planning needs scratch arrays; execution later uses the new-array API.
    auto* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(PlanKey{n, sign}, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

}  // namespace

void fft_inplace(cplx* data, std::size_t n, int sign) {
  if (n == 0) return;
  fftw_plan p = plan_cache().get(n, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

std::vector<double> fft_frequencies(std::size_t n, double period) {
  std::vector<double> w(n);
  const double base = 2.0 * std::numbers::pi / period;
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<long long>(k);
    const long long signed_k = (k < n / 2) ? kk : kk - static_cast<long long>(n);
    w[k] = base * static_cast<double>(signed_k);
  }
  return w;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

cplx cgamma(cplx z) {
  if (z.imag() == 0.0) return std::tgamma(z.real());
  if (z.real() < 0.5) {
    const double pi = std::numbers::pi;
    return pi / (std::sin(pi * z) * cgamma(1.0 - z));
  }
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

cplx crgamma(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return 1.0 / cgamma(z);
}

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> rules;
  std::lock_guard<std::mutex> lock(mu);
  auto it = rules.find(n);
  if (it != rules.end()) return *it->second;

  auto rule = std::make_unique<GaussRule>();
  rule->x.resize(n);
  rule->w.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * z * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule->x[i] = -z;
    rule->x[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule->w[i] = w;
    rule->w[n - 1 - i] = w;
  }
  const GaussRule& ref = *rule;
  rules.emplace(n, std::move(rule));
  return ref;
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

std::array<std::array<double, 4>, 4> cubic_lagrange(const std::array<int, 4>& o) {
  std::array<std::array<double, 4>, 4> c{};
  for (int i = 0; i < 4; ++i) {
    std::array<double, 4> poly{1.0, 0.0, 0.0, 0.0};
    double denom = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      std::array<double, 4> next{};
      for (int k = 3; k >= 1; --k) next[k] = poly[k - 1] - o[j] * poly[k];
      next[0] = -o[j] * poly[0];
      poly = next;
      denom *= o[i] - o[j];
    }
    for (int k = 0; k < 4; ++k) c[i][k] = poly[k] / denom;
  }
  return c;
}

std::vector<double> fd_weights(const std::vector<double>& xs, double x0, int deriv) {
  // Fornberg's recursion for finite-difference weights on arbitrary nodes.
  const std::size_t n = xs.size();
  const auto m = static_cast<std::size_t>(deriv);
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

cplx poly_fit_derivative(const std::vector<double>& xs, const std::vector<cplx>& ys, double at,
                         int deriv) {
  const auto w = fd_weights(xs, at, deriv);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += w[i] * ys[i];
  return acc;
}

cplx lagrange_sample(const std::vector<cplx>& v, double start, double step, double t,
                     std::size_t order, bool zero_outside) {
  const auto n = static_cast<long long>(v.size());
  const double s = (t - start) / step;
  const auto half = static_cast<long long>(order / 2);
  long long lo = static_cast<long long>(std::floor(s)) - half + 1;
  if (order % 2 == 1) lo = static_cast<long long>(std::llround(s)) - half;
  if (!zero_outside) lo = std::clamp(lo, 0LL, n - static_cast<long long>(order));
  cplx acc = 0.0;
  for (std::size_t i = 0; i < order; ++i) {
    const long long k = lo + static_cast<long long>(i);
    cplx vk = 0.0;
    if (k >= 0 && k < n) vk = v[static_cast<std::size_t>(k)];
    if (vk == 0.0) continue;
    double basis = 1.0;
    for (std::size_t j = 0; j < order; ++j) {
      if (j == i) continue;
      const double kj = static_cast<double>(lo + static_cast<long long>(j));
      basis *= (s - kj) / (static_cast<double>(k) - kj);
    }
    acc += basis * vk;
  }
  return acc;
}

std::vector<cplx> fd_derivative(const std::vector<cplx>& v, double h) {
  const std::size_t n = v.size();
  std::vector<cplx> d(n);
  if (n < 6) throw DomainError("fd_derivative needs at least 6 samples");
  static const std::vector<double> w0 = fd_weights({0, 1, 2, 3, 4}, 0.0, 1);
  static const std::vector<double> w1 = fd_weights({-1, 0, 1, 2, 3}, 0.0, 1);
  auto apply = [&](const std::vector<double>& w, std::size_t base, int dir) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const std::size_t idx = dir > 0 ? base + k : base - k;
      acc += w[k] * v[idx];
    }
    return acc / (dir > 0 ? h : -h);
  };
  d[0] = apply(w0, 0, +1);
  d[1] = apply(w1, 0, +1);
  d[n - 1] = apply(w0, n - 1, -1);
  d[n - 2] = apply(w1, n - 1, -1);
  for (std::size_t i : {std::size_t{2}, n - 3})
    d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
  for (std::size_t i = 3; i + 3 < n; ++i)
    d[i] = (-v[i - 3] + 9.0 * v[i - 2] - 45.0 * v[i - 1] + 45.0 * v[i + 1] - 9.0 * v[i + 2] + v[i + 3]) / (60.0 * h);
  return d;
}

}  // namespace kdv
