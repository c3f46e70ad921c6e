#pragma once

#include <cstddef>
#include <vector>

#include "kdv/types.hpp"

namespace kdv {

/// Damped discrete Fourier transform of causal samples on a zero-padded
/// period. Mode k carries the Laplace variable p_k = eps + i tau_k, so a
/// causal convolution operator with Laplace symbol m(p) is applied by
/// multiplying the spectrum by m(p_k). The damping factor e^{-eps P} = e^{-damping}
/// suppresses the periodic wrap-around.
class CausalTransform {
 public:
  CausalTransform(std::size_t samples, double dt, double pad_factor = 4.0, double damping = 30.0);

  std::size_t length() const { return k_; }
  std::size_t samples() const { return m_; }
  double dt() const { return dt_; }
  double eps() const { return eps_; }
  double period() const { return dt_ * static_cast<double>(k_); }
  const std::vector<cplx>& p() const { return p_; }

  /// Approximates G(p_k) = \int_0^\infty g(t) e^{-p_k t} dt.
  std::vector<cplx> forward(const std::vector<cplx>& g) const;

  /// Inverse of forward(), returning the first samples() values.
  std::vector<cplx> inverse(std::vector<cplx> spectrum) const;

  /// Same as inverse() but writes into out[n * stride]; spectrum is overwritten.
  void inverse_into(std::vector<cplx>& spectrum, cplx* out, std::size_t stride) const;

 private:
  std::size_t m_;
  std::size_t k_;
  double dt_;
  double eps_;
  std::vector<cplx> p_;
  std::vector<double> damp_;
  std::vector<double> undamp_;
};

}  // namespace kdv
