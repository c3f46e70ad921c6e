#pragma once

#include <utility>
#include <vector>

#include "kdv/fractional.hpp"
#include "kdv/types.hpp"

namespace kdv {

/// Spectral tail fraction above which results carry an aliasing flag.
inline constexpr double kAliasTol = 1e-10;

/// Periodic Fourier data of a profile: angular frequencies in FFT order.
std::vector<double> box_wavenumbers(const Axis& x);

/// Fraction of l2 mass in the top third of the spectrum.
double spectral_tail_fraction(const std::vector<cplx>& spectrum);

/// Evaluates the trigonometric interpolant of `spectrum` (unnormalized DFT of
/// samples on axis x) or its `deriv`-th derivative at an arbitrary point.
cplx spectral_eval(const std::vector<cplx>& spectrum, const Axis& x, double at, int deriv = 0);

/// e^{-t d_x^3} phi through the multiplier e^{i t xi^3}.
SpatialProfile airy_group(const SpatialProfile& phi, double t);

/// Kernel realization \int t^{-1/3} A((x-y) t^{-1/3}) phi(y) dy on the same grid.
SpatialProfile airy_group_kernel(const SpatialProfile& phi, double t, Exec exec = Exec::parallel);

/// e^{-t d_x^3} phi on every slice of the time axis.
SpaceTimeField airy_group_field(const SpatialProfile& phi, const Axis& t);

/// Time traces at fixed x of e^{-t d_x^3} phi (first) and of its x-derivative (second).
std::pair<TimeSignal, TimeSignal> airy_group_trace(const SpatialProfile& phi, double x, const Axis& t);

/// Trace of d_x^deriv of the field at point x, slice by slice.
TimeSignal spectral_trace(const SpaceTimeField& u, double x, int deriv = 0);

/// Spectral x-derivative of every slice. Modes with |k| above band * n/2 are
/// dropped (band = 2/3 gives the usual dealiasing of a quadratic product).
SpaceTimeField spectral_dx(const SpaceTimeField& u, int deriv = 1, double band = 1.0);

/// D w(t_n) = \int_0^{t_n} e^{-(t_n - t') d_x^3} w(t') dt' for every n, by a
/// fourth-order exponential integrator (cubic interpolation of w per panel,
/// exact propagation of each Fourier mode).
SpaceTimeField duhamel_field(const SpaceTimeField& w, Exec exec = Exec::parallel);

/// D w at one grid time t.
SpatialProfile duhamel(const SpaceTimeField& w, double t);

}  // namespace kdv
