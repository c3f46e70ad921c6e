#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "kdv/types.hpp"

namespace kdv {

/// In-place unnormalized DFT via FFTW. sign = -1 forward, +1 backward.
/// Plans are cached per (size, sign) and built with FFTW_ESTIMATE so that
/// repeated runs take the same code path and give identical bits.
void fft_inplace(cplx* data, std::size_t n, int sign);
inline void fft_inplace(std::vector<cplx>& v, int sign) { fft_inplace(v.data(), v.size(), sign); }

/// Angular frequencies of an n-point DFT on a period of length `period`,
/// in FFT order (0, 1, ..., n/2-1, -n/2, ..., -1) * 2*pi/period.
std::vector<double> fft_frequencies(std::size_t n, double period);

std::size_t next_pow2(std::size_t n);

/// Gamma function for complex argument (Lanczos with reflection).
cplx cgamma(cplx z);
/// 1/Gamma, which is entire (zero at the poles of Gamma).
cplx crgamma(cplx z);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(std::size_t n);

/// Integrate f over [a, b] with `panels` equal panels of an n-point Gauss rule.
template <class F>
auto gauss_integrate(F&& f, double a, double b, std::size_t panels, std::size_t n = 16) {
  const GaussRule& g = gauss_legendre(n);
  const double h = (b - a) / static_cast<double>(panels);
  decltype(f(a)) acc{};
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    decltype(f(a)) part{};
    for (std::size_t i = 0; i < n; ++i) part += g.w[i] * f(mid + 0.5 * h * g.x[i]);
    acc += 0.5 * h * part;
  }
  return acc;
}

/// Lagrange interpolation on a uniform grid with `order` points centred at t.
/// Samples outside [0, n) are taken as zero when `zero_outside` is set,
/// otherwise the stencil is shifted to stay inside the grid.
cplx lagrange_sample(const std::vector<cplx>& v, double start, double step, double t,
                     std::size_t order, bool zero_outside);

/// Derivative of order `deriv` at point `at` of the polynomial through
/// (xs[i], ys[i]). Used for one-sided extrapolation of traces.
cplx poly_fit_derivative(const std::vector<double>& xs, const std::vector<cplx>& ys, double at,
                         int deriv);

/// Finite-difference derivative of uniformly spaced samples: sixth-order
/// centred in the interior, fourth-order within three nodes of either end.
std::vector<cplx> fd_derivative(const std::vector<cplx>& v, double h);

/// Monomial coefficients c[i][k] of the cubic Lagrange basis on four integer nodes:
/// l_i(s) = sum_k c[i][k] s^k.
std::array<std::array<double, 4>, 4> cubic_lagrange(const std::array<int, 4>& nodes);

/// C-infinity transition: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);

/// Weights of the `deriv`-th derivative at x0 for nodes xs (Fornberg).
std::vector<double> fd_weights(const std::vector<double>& xs, double x0, int deriv);

}  // namespace kdv
