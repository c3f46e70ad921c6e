#pragma once

#include <vector>

#include "kdv/fractional.hpp"
#include "kdv/laplace.hpp"
#include "kdv/types.hpp"

namespace kdv {

/// L_-^lambda lives on the left (rapid decay for x < 0, polynomial tail for x > 0),
/// L_+^lambda on the right.
enum class Sign { minus, plus };

struct FamilyOptions {
  /// The polynomially decaying side is multiplied by a smooth window that
  /// falls from 1 to 0 between taper_start*H and taper_end*H from the box
  /// centre, H the box half-width. Setting taper_start >= 1 disables it.
  double taper_start = 0.6;
  double taper_end = 0.95;
  /// Extra length added beyond the box on the decaying side when forming the
  /// x-integral of L_-^lambda, whose dispersive tail at x -> -inf is slow.
  double extension = 0.0;
};

/// Boundary forcing operators realized through their Laplace transfer
/// functions in t. For Re p > 0 and rho = p^{1/3},
///   L0 f  ->  e^{-rho x} F(p)                                (x > 0)
///             (w1 e^{w1 rho x} - w1^2 e^{w2 rho x}) F(p)     (x < 0)
/// with w1 = e^{i pi/3}, w2 = e^{-i pi/3}. Every field is produced per x node
/// by an inverse damped FFT, so x needs no periodicity.
class ForcingEngine {
 public:
  ForcingEngine(const Axis& x, const Axis& t, FamilyOptions opt = {});

  const Axis& x() const { return x_; }
  const Axis& t() const { return t_; }
  const CausalTransform& transform() const { return tr_; }
  const std::vector<cplx>& rho() const { return rho_; }

  /// Laplace samples F(p_k) of a causal signal on this time axis.
  std::vector<cplx> spectrum(const TimeSignal& f) const;
  /// Time samples of a spectrum on this time axis.
  TimeSignal signal(std::vector<cplx> spec) const;
  /// Multiplies a spectrum by p^{-alpha} = rho^{-3 alpha}, i.e. applies I_alpha.
  std::vector<cplx> frac(const std::vector<cplx>& spec, FracOrder alpha) const;

  /// d_x^deriv L0 applied to the signal with spectrum F (one-sided
  /// derivative values at every node; nodes never sit on x = 0).
  SpaceTimeField L0(const std::vector<cplx>& F, int deriv = 0, Exec exec = Exec::parallel) const;
  SpaceTimeField Lm1(const std::vector<cplx>& F, Exec exec = Exec::parallel) const;
  SpaceTimeField family(const std::vector<cplx>& F, FracOrder lambda, Sign sign,
                        Exec exec = Exec::parallel) const;

  /// The family on an arbitrary axis lying entirely on its rapidly decaying
  /// side (x <= 0 for minus, x >= 0 for plus); no x-integral is involved.
  SpaceTimeField family_easy(const std::vector<cplx>& F, FracOrder lambda, Sign sign, const Axis& xs,
                             Exec exec = Exec::parallel) const;

  /// Value of the family's transfer function on its rapidly decaying side.
  cplx family_multiplier(FracOrder lambda, Sign sign, double x, std::size_t k) const;

 private:
  template <class M>
  SpaceTimeField transfer(const Axis& x, const std::vector<cplx>& F, M&& mult, Exec exec) const;
  double taper(double x) const;

  Axis x_;
  Axis t_;
  FamilyOptions opt_;
  CausalTransform tr_;
  std::vector<cplx> rho_;
};

SpaceTimeField forcing_L0(const TimeSignal& f, const Axis& x, const Axis& t);
SpaceTimeField forcing_Lm1(const TimeSignal& f, const Axis& x, const Axis& t);
/// Rejects Re lambda <= -3.
SpaceTimeField forcing_family(const TimeSignal& f, FracOrder lambda, Sign sign, const Axis& x,
                              const Axis& t, FamilyOptions opt = {});

/// Coefficient of f(t) in the trace at x = 0: 2 sin(pi lambda/3 + pi/6) for
/// minus, e^{i pi lambda} for plus.
cplx family_trace_coefficient(FracOrder lambda, Sign sign);
/// For minus: d_x L_-^lambda f(0^-, t) = coefficient * I_{-1/3} f(t),
/// coefficient 2 sin(pi lambda/3 - pi/6).
cplx family_slope_coefficient(FracOrder lambda);

/// Independent kernel realization
///   L0 f(x,t) = 9 \int_0^{t^{1/3}} u A(x/u) q(t - u^3) du,  q = I_{-2/3} f,
/// and its first two x-derivatives. Slow; used for cross-checks at points.
class L0Kernel {
 public:
  explicit L0Kernel(const TimeSignal& f);
  cplx eval(double x, double t, int deriv = 0) const;
  const TimeSignal& q() const { return q_; }

 private:
  cplx q_at(double t) const;
  TimeSignal q_;
};

/// One-sided limit at x = at of d_x^deriv of every time slice, by polynomial
/// extrapolation through the `nodes` nearest grid points on the given side.
TimeSignal side_limit(const SpaceTimeField& u, double at, Side side, int deriv, std::size_t nodes = 6);

struct JumpResult {
  cplx value;
  /// Difference between the estimates from 6 and 7 extrapolation nodes.
  double spread = 0.0;
  bool resolved = true;
};

/// lim_{x->0+} - lim_{x->0-} of d_x^deriv u at time t (t must be a grid time).
JumpResult jump_size(const SpaceTimeField& u, double t, int deriv = 2);

/// u = L0 h + L^{-1} h: zero initial data and zero trace at x = 0, but
/// nonzero for x < 0.
SpaceTimeField nonuniqueness_witness(const TimeSignal& h, const Axis& x, const Axis& t);

}  // namespace kdv
