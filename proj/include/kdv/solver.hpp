#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdv/forcing.hpp"
#include "kdv/types.hpp"

namespace kdv {

enum class Problem { right, left, segment };
const char* to_string(Problem p);
/// "right", "left" or "segment"; throws DomainError otherwise.
Problem parse_problem(const std::string& name);

/// Orders of the forcing operators: lambda1, lambda2 for L_- at the right end
/// of a left half-line or segment, lambda3 for L_+ at the left end.
struct LambdaChoice {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
};

/// lambda1, lambda2 at the centre -/+ a quarter width of
/// [max(s-1, -1), min(s+1/2, 1/2)]; lambda3 = max(s-1, -0.9) capped at
/// min(1/2, s+1/2) - 0.05.
LambdaChoice default_lambdas(double s);

/// Throws DomainError unless the orders used by `p` satisfy
/// s-1 <= lambda < s+1/2, -1 < lambda < 1/2 and, for two orders,
/// |sin(pi (lambda2 - lambda1)/3)| >= 1e-3.
void check_lambdas(Problem p, const LambdaChoice& lam, double s);

/// Throws DomainError unless -3/4 < s < 3/2 and s != 1/2.
void check_sobolev_index(double s);

struct BoundaryData {
  Problem problem = Problem::right;
  /// u(0, t) for right and segment.
  std::optional<TimeSignal> f;
  /// u(0, t) for left, u(L, t) for segment.
  std::optional<TimeSignal> g1;
  /// d_x u at the same point as g1.
  std::optional<TimeSignal> g2;
  double L = 0.0;
};

/// Throws DomainError if the signals present do not match the problem type.
void check_boundary_data(const BoundaryData& d);

struct GridConfig {
  double half_width = 50.0;
  std::size_t n = 2048;
  double T = 1.0;
  /// Samples on [0, T]; the solver's time axis continues to 2T.
  std::size_t m = 1024;
};

/// Staggered box [-half_width, half_width).
Axis solver_x_axis(const GridConfig& g);
/// 2m - 1 samples on [0, 2T] with step T/(m - 1), so t = T is sample m - 1.
Axis solver_t_axis(const GridConfig& g);

struct SolverConfig {
  Problem problem = Problem::right;
  double s = 0.0;
  double b = 0.45;
  double alpha = 0.6;
  std::optional<double> lambda1;
  std::optional<double> lambda2;
  std::optional<double> lambda3;
  GridConfig grid;
  double L = 10.0;
  double L_min = 4.0;
  /// Smallness threshold for the data in the surrogate norm.
  double delta = 0.05;
  /// Picard stops once the increment falls below tol times the first one.
  double tol = 1e-8;
  std::size_t max_iter = 60;
  double trace_tol = 1e-4;
  double residual_tol = 1e-4;
  /// Length of the cutoff's fall from 1 to 0, in units of T (at most 1).
  double theta_ramp = 1.0;
  bool nonlinear = true;
  /// Solve the problem scaled by this factor in (0, 1] and map back.
  std::optional<double> scale;
  std::string preset = "gauss-small";
  std::string phi_path;
  std::string f_path;
  std::string g1_path;
  std::string g2_path;
  std::uint64_t seed = 0;

  LambdaChoice lambdas() const;
};

/// Physical interval (lo, hi); infinite ends stand for half-lines.
struct Region {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
};

Region physical_region(Problem p, double L);

/// Replaces the samples outside a physical region by a smooth continuation of
/// the samples inside it: at distance d beyond an end, chi(d/w) p(x) where p is
/// the quintic through the six physical nodes nearest that end and chi a
/// smooth cutoff equal to 1 for d < w/2 and 0 for d >= w. Only data next to the
/// boundary enters, so mass far inside the region is never amplified.
class Extension {
 public:
  Extension(const Axis& x, Region r, double max_width = 1.0);

  void apply(const cplx* in, cplx* out) const;
  SpaceTimeField apply(const SpaceTimeField& u) const;
  SpatialProfile apply(const SpatialProfile& u) const;

  bool physical(std::size_t j) const { return j >= first_ && j < last_; }
  std::size_t first() const { return first_; }
  std::size_t last() const { return last_; }
  double width() const { return width_; }

 private:
  struct Tap {
    std::size_t target;
    std::size_t source;
    double weight;
  };
  Axis x_;
  std::size_t first_ = 0;
  std::size_t last_ = 0;
  double width_ = 0.0;
  std::vector<Tap> taps_;
};

/// Samples amp * g(scale * t) on the axis t: zero before the signal starts,
/// its last value after it ends, 6-point interpolation in between.
TimeSignal resample_signal(const TimeSignal& g, const Axis& t, double scale = 1.0, double amp = 1.0);
/// Samples amp * phi(scale * x) on the axis x, zero outside the profile.
SpatialProfile resample_profile(const SpatialProfile& phi, const Axis& x, double scale = 1.0,
                                double amp = 1.0);

/// exp(4/T^2 - 1/(t (T - t))) on (0, T), zero elsewhere; peak 1 at T/2.
TimeSignal bump_signal(const Axis& t, double T, double amp = 1.0);

struct Preset {
  BoundaryData data;
  SpatialProfile phi;
};

/// "zero", "gauss-small" (amplitude 0.01), "gauss-large" (amplitude 1),
/// "gauss-only" (boundary data zero) and "bump-only" (phi zero, amplitude 0.01).
/// phi is a Gaussian of width w centred at x0 (right: 12, 2; left: -12, 2;
/// segment: L/2, min(2, L/10)); boundary signals are amplitude * bump on (0, T).
Preset make_preset(const std::string& name, const SolverConfig& cfg);

struct TraceError {
  std::string name;
  double error = 0.0;
};

struct SegmentDiagnostics {
  /// max over Laplace frequencies of |(E_L^{-1} K_L)_{33}|.
  double contraction = 0.0;
  std::size_t neumann_terms = 0;
  /// Relative difference between the Neumann sum and a direct 3x3 solve.
  double neumann_vs_direct = 0.0;
  /// ||L0 f(L, .)||_inf / ||f||_inf for the preset bump f.
  double bump_ratio = 0.0;
};

struct SolveResult {
  SpaceTimeField u;
  Region region;
  LambdaChoice lambdas;
  std::size_t iterations = 0;
  std::vector<double> increments;
  std::vector<double> contraction_factors;
  double fixed_point_residual = 0.0;
  std::vector<TraceError> trace_errors;
  double initial_trace_error = 0.0;
  double pde_residual = 0.0;
  double data_norm = 0.0;
  double solution_norm = 0.0;
  std::optional<SegmentDiagnostics> segment;
  std::vector<std::string> flags;

  double max_trace_error() const;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::vector<double> factors)
      : std::runtime_error(what), factors_(std::move(factors)) {}
  const std::vector<double>& factors() const { return factors_; }

 private:
  std::vector<double> factors_;
};

/// Picard iteration for one of the three problems. The nonlinear source of
/// the map is -1/2 theta D d_x E[w^2] with E the polynomial continuation from
/// the physical region; on the physical region the fixed point does not
/// depend on the extension.
class IbvpSolver {
 public:
  IbvpSolver(BoundaryData data, const SpatialProfile& phi, const SolverConfig& cfg);

  const Axis& x() const { return x_; }
  const Axis& t() const { return t_; }
  const Region& region() const { return region_; }
  const LambdaChoice& lambdas() const { return lam_; }
  std::size_t horizon() const { return horizon_; }
  const TimeSignal& theta() const { return theta_; }
  const SpatialProfile& phi() const { return phi_; }

  /// The map Lambda. With full = false only the physical nodes are filled.
  SpaceTimeField apply(const SpaceTimeField& w, bool full = true) const;

  /// max_t ||w(t)||_{H^s} + ||w||_{l2}, both over the physical region and t <= T.
  double surrogate_norm(const SpaceTimeField& w) const;

  SolveResult solve() const;

  /// Trace errors, initial trace error and PDE residual of a field on this grid.
  void diagnose(const SpaceTimeField& u, SolveResult& r) const;

 private:
  struct Boundary {
    std::vector<cplx> h1, h2, h3;
  };
  Boundary boundary_spectra(const SpaceTimeField* d) const;
  void add_forcing(const Boundary& b, SpaceTimeField& u, bool full) const;
  TimeSignal cut(const TimeSignal& g) const;
  void note(const std::string& what) const;

  SolverConfig cfg_;
  BoundaryData data_;
  Axis x_;
  Axis t_;
  std::size_t horizon_ = 0;
  Region region_;
  LambdaChoice lam_;
  Extension ext_;
  TimeSignal theta_;
  SpatialProfile phi_;
  SpaceTimeField group_;
  TimeSignal f_, g1_, g2_;
  ForcingEngine engine_;
  ForcingEngine shifted_;
  mutable std::optional<SegmentDiagnostics> seg_;
  mutable std::vector<std::string> notes_;
};

/// Picard solve of the problem described by the data; see IbvpSolver.
SolveResult picard_solve(const BoundaryData& data, const SpatialProfile& phi, const SolverConfig& cfg);

/// Lambda for the right half-line at one iterate.
SpaceTimeField lambda_map_right(const SpaceTimeField& w, const SpatialProfile& phi, const TimeSignal& f,
                                double lambda, const SolverConfig& cfg);
/// Lambda for the left half-line at one iterate.
SpaceTimeField lambda_map_left(const SpaceTimeField& w, const SpatialProfile& phi, const TimeSignal& g1,
                               const TimeSignal& g2, const LambdaChoice& lam, const SolverConfig& cfg);

struct SegmentBoundary {
  TimeSignal h1, h2, h3;
  SegmentDiagnostics diagnostics;
};

/// Solves, per Laplace frequency, for the densities h1, h2 (of L_- placed at
/// x = L) and h3 (of L_+ at x = 0) of the linear segment problem with zero
/// initial data: u(0) = f, u(L) = g1, d_x u(L) = g2. E_L is inverted exactly
/// and (I + E_L^{-1} K_L)^{-1} by its Neumann series; throws DomainError when
/// the series does not contract, advising a larger L.
SegmentBoundary segment_boundary_solve(const TimeSignal& f, const TimeSignal& g1, const TimeSignal& g2,
                                       const LambdaChoice& lam, double L, const Axis& t);

/// ||L0 f(L, .)||_inf / ||f||_inf.
double kl_bump_ratio(const TimeSignal& f, double L);

struct ScaledProblem {
  BoundaryData data;
  SpatialProfile phi;
  double lambda = 1.0;
};

/// phi(x) = l^2 phi~(l x), f(t) = l^2 f~(l^3 t), g1 = l^2 g1~(l^3 t),
/// g2 = l^3 g2~(l^3 t), L = L~/l, sampled on the solver grids of cfg.
ScaledProblem scale_data(const BoundaryData& data, const SpatialProfile& phi, double lambda,
                         const SolverConfig& cfg);

/// u~(x, t) = l^{-2} u(x/l, t/l^3) for t <= T, on the axes scaled accordingly.
SpaceTimeField unscale_solution(const SpaceTimeField& u, double lambda, double T);

/// Solves the problem scaled by lambda and maps the result back: the field
/// covers t <= lambda^3 T on the correspondingly shrunk box, and the region
/// and boundary point are those of the original problem.
SolveResult scaled_solve(const BoundaryData& data, const SpatialProfile& phi, const SolverConfig& cfg,
                         double lambda);

/// l^{3/2} max(1, l^s): the factor bounding ||phi||_{H^s} / ||phi~||_{H^s}.
double scaling_norm_factor(double lambda, double s);

/// Quadrature weights for \int_lo^hi g dx from samples on x: fourth-order
/// Gregory weights on the interior nodes plus exact integration of the local
/// quintic interpolant over the partial cells at finite ends.
std::vector<double> region_weights(const Axis& x, Region r);

struct EnergyCheck {
  double mass_start = 0.0;
  double mass_end = 0.0;
  double flux = 0.0;
  /// |mass_end - mass_start - flux| / max(mass_start, mass_end, |flux|).
  double residual = 0.0;
  std::vector<std::string> flags;
};

/// d/dt \int_region u^2 = F(lo) - F(hi) with F = 2 u u_xx - u_x^2 + (2/3) u^3
/// (the cubic term only with `cubic`), integrated over [0, T]. Boundary
/// values come from one-sided extrapolation on the physical side.
EnergyCheck energy_identity_check(const SpaceTimeField& u, Region r, double T, bool cubic = false);
EnergyCheck energy_identity_check(const SpaceTimeField& u, Side side, double T);

/// max |u_t + u_xxx (+ u u_x)| / max |u_t| over nodes of [lo, hi] at least
/// five steps from either end, for times in [3 dt, T]; fourth-order
/// differences in t, sixth-order in x.
double pde_residual(const SpaceTimeField& u, double lo, double hi, double T, bool nonlinear);

}  // namespace kdv
