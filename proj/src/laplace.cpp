#include "kdv/laplace.hpp"

#include <cmath>

#include "kdv/numerics.hpp"

namespace kdv {

CausalTransform::CausalTransform(std::size_t samples, double dt, double pad_factor, double damping)
    : m_(samples), dt_(dt) {
  if (samples < 2 || !(dt > 0.0)) throw DomainError("CausalTransform: need >= 2 samples and dt > 0");
  k_ = next_pow2(static_cast<std::size_t>(std::ceil(pad_factor * static_cast<double>(samples))));
  eps_ = damping / period();
  const auto tau = fft_frequencies(k_, period());
  p_.resize(k_);
  for (std::size_t k = 0; k < k_; ++k) p_[k] = {eps_, tau[k]};
  damp_.resize(m_);
  undamp_.resize(m_);
  for (std::size_t n = 0; n < m_; ++n) {
    const double t = dt_ * static_cast<double>(n);
    damp_[n] = std::exp(-eps_ * t);
    undamp_[n] = std::exp(eps_ * t) / period();
  }
}

std::vector<cplx> CausalTransform::forward(const std::vector<cplx>& g) const {
  if (g.size() > m_) throw DomainError("CausalTransform: signal longer than the transform grid");
  std::vector<cplx> buf(k_, 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) buf[n] = g[n] * damp_[n] * dt_;
  fft_inplace(buf, -1);
  return buf;
}

std::vector<cplx> CausalTransform::inverse(std::vector<cplx> spectrum) const {
  std::vector<cplx> out(m_);
  inverse_into(spectrum, out.data(), 1);
  return out;
}

void CausalTransform::inverse_into(std::vector<cplx>& spectrum, cplx* out, std::size_t stride) const {
  if (spectrum.size() != k_) throw DomainError("CausalTransform: spectrum length mismatch");
  fft_inplace(spectrum, +1);
  for (std::size_t n = 0; n < m_; ++n) out[n * stride] = spectrum[n] * undamp_[n];
}

}  // namespace kdv
