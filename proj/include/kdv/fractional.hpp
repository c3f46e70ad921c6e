#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "kdv/types.hpp"

namespace kdv {

/// Kernel execution mode. `serial` is the reference path kept for testing and
/// benchmarking; both paths perform the same arithmetic in the same order.
enum class Exec { parallel, serial };

/// Product-integration weights for \int (t_n - s)^{beta-1}/Gamma(beta) f(s) ds on a
/// uniform grid, where f is replaced on each panel by its cubic interpolant.
/// Panel [t_j, t_{j+1}] at distance D = n - j uses one of three stencils:
/// interior (j-1..j+2), start (j..j+3) or end (j-2..j+1).
class ProductRule {
 public:
  enum Stencil { interior = 0, start = 1, end = 2 };

  ProductRule(cplx beta, double h, std::size_t max_distance);

  cplx beta() const { return beta_; }
  std::size_t max_distance() const { return max_d_; }
  const std::array<cplx, 4>& weights(Stencil s, std::size_t distance) const {
    return w_[static_cast<std::size_t>(s)][distance];
  }

  /// Coefficients c_d for d = -1 .. n-1 (stored at index d + 1) such that the
  /// integral from the first node to x_i equals sum_m c_{i-m} v_m when every panel
  /// uses the interior stencil and samples beyond the grid are zero.
  std::vector<cplx> toeplitz(std::size_t n) const;

 private:
  cplx beta_;
  std::size_t max_d_;
  std::array<std::vector<std::array<cplx, 4>>, 3> w_;
};

/// I_alpha f for causal f, any complex alpha. Re alpha > 0 by product
/// integration; otherwise through I_alpha = d^k/dt^k I_{alpha+k}.
TimeSignal frac_integrate(const TimeSignal& f, FracOrder alpha, Exec exec = Exec::parallel);

/// Fourier multiplier of convolution with t_+^{alpha-1}/Gamma(alpha):
/// e^{-i pi alpha/2} (tau - i0)^{-alpha}. Rejects tau = 0.
cplx frac_symbol(FracOrder alpha, double tau);

/// Continuation of the symbol to the lower half plane (Im tau < 0),
/// which equals p^{-alpha} with p = i tau.
cplx frac_symbol(FracOrder alpha, cplx tau);

/// Independent realization of I_alpha through the symbol on a damped,
/// zero-padded periodic extension.
TimeSignal frac_integrate_spectral(const TimeSignal& f, FracOrder alpha);

enum class Side { left, right };

/// Riemann-Liouville integral in x of every time slice:
/// left:  \int_{-inf}^x (x-y)^{beta-1}/Gamma(beta) v(y) dy
/// right: \int_x^{inf}  (y-x)^{beta-1}/Gamma(beta) v(y) dy
/// using the same cubic product rule as frac_integrate (Toeplitz form via FFT).
/// Values outside the box are taken as zero.
SpaceTimeField x_frac_integrate(const SpaceTimeField& v, cplx beta, Side side,
                                Exec exec = Exec::parallel);

}  // namespace kdv
