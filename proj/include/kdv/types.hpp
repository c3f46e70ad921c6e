#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdv {

using cplx = std::complex<double>;

/// Thrown for violated preconditions (bad orders, non-causal input, bad grids).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Complex order of a fractional integral or of a forcing operator.
struct FracOrder {
  double re = 0.0;
  double im = 0.0;

  FracOrder() = default;
  FracOrder(double r, double i = 0.0) : re(r), im(i) {}

  cplx value() const { return {re, im}; }
  bool is_zero() const { return re == 0.0 && im == 0.0; }
  bool is_real() const { return im == 0.0; }
};

/// Uniform 1-D sampling: node i sits at start + i*step.
struct Axis {
  double start = 0.0;
  double step = 1.0;
  std::size_t n = 0;

  double at(std::size_t i) const { return start + step * static_cast<double>(i); }
  double end() const { return at(n - 1); }
};

/// Uniformly sampled function of t. `causal` means it vanishes for t < 0.
struct TimeSignal {
  std::vector<cplx> samples;
  double t0 = 0.0;
  double dt = 1.0;
  bool causal = true;
  std::vector<std::string> flags;

  TimeSignal() = default;
  TimeSignal(std::vector<cplx> s, double step, double start = 0.0, bool is_causal = true)
      : samples(std::move(s)), t0(start), dt(step), causal(is_causal) {}

  std::size_t size() const { return samples.size(); }
  double t(std::size_t n) const { return t0 + dt * static_cast<double>(n); }
  Axis axis() const { return {t0, dt, samples.size()}; }
  double max_abs() const;
  void flag(const std::string& what);
};

/// Samples of a function of x on a uniform grid (periodic embedding of width `pad`).
struct SpatialProfile {
  std::vector<cplx> samples;
  double x0 = 0.0;
  double dx = 1.0;
  double pad = 0.0;
  std::vector<std::string> flags;

  std::size_t size() const { return samples.size(); }
  double x(std::size_t j) const { return x0 + dx * static_cast<double>(j); }
  Axis axis() const { return {x0, dx, samples.size()}; }
  double max_abs() const;
  void flag(const std::string& what);
};

/// u(x_j, t_n) stored time-slice major: values[n * x.n + j].
struct SpaceTimeField {
  Axis x;
  Axis t;
  std::vector<cplx> values;
  std::vector<std::string> flags;

  SpaceTimeField() = default;
  SpaceTimeField(Axis xs, Axis ts) : x(xs), t(ts), values(xs.n * ts.n) {}

  cplx& operator()(std::size_t j, std::size_t n) { return values[n * x.n + j]; }
  const cplx& operator()(std::size_t j, std::size_t n) const { return values[n * x.n + j]; }

  SpatialProfile slice(std::size_t n) const;
  TimeSignal trace(std::size_t j) const;
  double max_abs() const;
  void flag(const std::string& what);
};

SpaceTimeField operator+(const SpaceTimeField& a, const SpaceTimeField& b);
SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b);
SpaceTimeField& operator+=(SpaceTimeField& a, const SpaceTimeField& b);
SpaceTimeField operator*(cplx c, const SpaceTimeField& a);

TimeSignal operator+(const TimeSignal& a, const TimeSignal& b);
TimeSignal operator-(const TimeSignal& a, const TimeSignal& b);
TimeSignal operator*(cplx c, const TimeSignal& a);

/// Staggered spatial grid on [-half_width, half_width): x = 0 falls midway between two nodes.
Axis staggered_axis(double half_width, std::size_t n);

/// n samples covering [0, t_end] inclusive.
Axis time_axis(double t_end, std::size_t n);

double sup_norm(const std::vector<cplx>& v);
double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace kdv
