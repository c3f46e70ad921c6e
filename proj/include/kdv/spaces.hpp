#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdv/types.hpp"

namespace kdv {

struct NormParams {
  double s = 0.0;
  double b = 0.0;
  double alpha = 0.6;
};

/// (\int <xi>^{2s} |phi^(xi)|^2 dxi / 2pi)^{1/2} with phi^ the box Fourier
/// transform; s = 0 gives the plain discrete L2 norm sqrt(dx sum |phi|^2).
double sobolev_norm(const SpatialProfile& phi, double s);

struct SpaceTimeNorms {
  double xsb = 0.0;
  double dalpha = 0.0;
  double ysb = 0.0;
  std::vector<std::string> flags;
};

/// X_{s,b}: weight <xi>^{2s} <tau - xi^3>^{2b}
/// D_alpha: weight <tau>^{2 alpha} restricted to |xi| <= 1
/// Y_{s,b}: weight <tau>^{2s/3} <tau - xi^3>^{2b}
/// on the space-time box transform u^(xi, tau) = dx dt sum u e^{-i(x xi + t tau)}.
SpaceTimeNorms xsb_norm(const SpaceTimeField& u, const NormParams& p);

struct ProbeGrid {
  std::size_t n = 256;
  std::size_t m = 128;
  double length = 64.0;
  double period = 8.0;
};

struct ProbeReport {
  NormParams params;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  ProbeGrid grid;
  double max_ratio = 0.0;
  double max_ratio_y = 0.0;
  /// Ratio quantiles at levels 0.1, 0.5, 0.9, 1.0.
  std::vector<double> quantiles;
  std::vector<double> quantiles_y;
  std::vector<std::string> flags;

  std::string to_json() const;
};

/// Random band-limited pairs (u, v): ratios ||d_x(uv)||_{X_{s,-b}} / (|u| |v|)
/// and the Y_{s,-b} variant, where |u| = ||u||_{X_{s,b}} + ||u||_{D_alpha}.
/// Fourier coefficients are complex Gaussians on |k| <= n/8, |m| <= m/8 with
/// standard deviation <xi>^{-s-1} <tau - xi^3>^{-b-1}; each mode draws from a
/// generator seeded by (seed, trial, k, m), so refining the grid keeps the
/// coefficients of modes already present.
ProbeReport bilinear_probe(std::size_t count, const NormParams& p, std::uint64_t seed,
                           const ProbeGrid& grid = {});

enum class Compatibility { pass, fail, not_required };
const char* to_string(Compatibility c);

/// phi(at) = f(0) is required for 1/2 < s < 3/2. Rejects s = 1/2.
Compatibility check_compatibility(const SpatialProfile& phi, const TimeSignal& f, double s,
                                  double at = 0.0, double tol = 1e-8);

/// Smooth time cutoff: 1 on [0, t_flat], 0 from t_flat + ramp on, C-infinity.
TimeSignal theta_cutoff(const Axis& t, double t_flat, double ramp);

}  // namespace kdv
