#include "kdv/types.hpp"

#include <algorithm>
#include <cmath>

namespace kdv {

namespace {

void push_unique(std::vector<std::string>& flags, const std::string& what) {
  if (std::find(flags.begin(), flags.end(), what) == flags.end()) flags.push_back(what);
}

void check_same_shape(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (a.x.n != b.x.n || a.t.n != b.t.n) throw DomainError("field shapes differ");
}

void check_same_shape(const TimeSignal& a, const TimeSignal& b) {
  if (a.size() != b.size()) throw DomainError("signal lengths differ");
}

}  // namespace

double sup_norm(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

double sup_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double TimeSignal::max_abs() const { return sup_norm(samples); }
void TimeSignal::flag(const std::string& what) { push_unique(flags, what); }

double SpatialProfile::max_abs() const { return sup_norm(samples); }
void SpatialProfile::flag(const std::string& what) { push_unique(flags, what); }

SpatialProfile SpaceTimeField::slice(std::size_t n) const {
  SpatialProfile p;
  p.x0 = x.start;
  p.dx = x.step;
  p.samples.assign(values.begin() + static_cast<std::ptrdiff_t>(n * x.n),
                   values.begin() + static_cast<std::ptrdiff_t>((n + 1) * x.n));
  return p;
}

TimeSignal SpaceTimeField::trace(std::size_t j) const {
  TimeSignal s;
  s.t0 = t.start;
  s.dt = t.step;
  s.samples.resize(t.n);
  for (std::size_t n = 0; n < t.n; ++n) s.samples[n] = (*this)(j, n);
  return s;
}

double SpaceTimeField::max_abs() const { return sup_norm(values); }
void SpaceTimeField::flag(const std::string& what) { push_unique(flags, what); }

SpaceTimeField operator+(const SpaceTimeField& a, const SpaceTimeField& b) {
  SpaceTimeField r = a;
  r += b;
  return r;
}

SpaceTimeField& operator+=(SpaceTimeField& a, const SpaceTimeField& b) {
  check_same_shape(a, b);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
  for (const auto& f : b.flags) a.flag(f);
  return a;
}

SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b) {
  check_same_shape(a, b);
  SpaceTimeField r = a;
  for (std::size_t i = 0; i < a.values.size(); ++i) r.values[i] -= b.values[i];
  for (const auto& f : b.flags) r.flag(f);
  return r;
}

SpaceTimeField operator*(cplx c, const SpaceTimeField& a) {
  SpaceTimeField r = a;
  for (auto& v : r.values) v *= c;
  return r;
}

TimeSignal operator+(const TimeSignal& a, const TimeSignal& b) {
  check_same_shape(a, b);
  TimeSignal r = a;
  for (std::size_t i = 0; i < a.size(); ++i) r.samples[i] += b.samples[i];
  r.causal = a.causal && b.causal;
  return r;
}

TimeSignal operator-(const TimeSignal& a, const TimeSignal& b) {
  check_same_shape(a, b);
  TimeSignal r = a;
  for (std::size_t i = 0; i < a.size(); ++i) r.samples[i] -= b.samples[i];
  r.causal = a.causal && b.causal;
  return r;
}

TimeSignal operator*(cplx c, const TimeSignal& a) {
  TimeSignal r = a;
  for (auto& v : r.samples) v *= c;
  return r;
}

Axis staggered_axis(double half_width, std::size_t n) {
  if (n < 2 || n % 2 != 0) throw DomainError("staggered axis needs an even node count");
  const double dx = 2.0 * half_width / static_cast<double>(n);
  return {-half_width + 0.5 * dx, dx, n};
}

Axis time_axis(double t_end, std::size_t n) {
  if (n < 2 || !(t_end > 0.0)) throw DomainError("time axis needs n >= 2 and t_end > 0");
  return {0.0, t_end / static_cast<double>(n - 1), n};
}

}  // namespace kdv
