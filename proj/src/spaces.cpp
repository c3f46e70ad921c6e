#include "kdv/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "kdv/fractional.hpp"
#include "kdv/numerics.hpp"
#include "kdv/propagators.hpp"
#include "kdv/report.hpp"

namespace kdv {

namespace {

constexpr const char* kAliasFlag = "aliasing: spectral tail above tolerance";
constexpr const char* kRangeFlag = "outside proven range";

double bracket(double v) { return std::sqrt(1.0 + v * v); }

/// Forward 2-D DFT of values[n * nx + j] (x fastest), in place.
void fft2(std::vector<cplx>& v, std::size_t nx, std::size_t nt, int sign, Exec exec) {
  const auto rows = static_cast<std::ptrdiff_t>(nt);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t n = 0; n < rows; ++n) fft_inplace(&v[static_cast<std::size_t>(n) * nx], nx, sign);

  const auto cols = static_cast<std::ptrdiff_t>(nx);
#pragma omp parallel if (exec == Exec::parallel)
  {
    std::vector<cplx> col(nt);
#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < cols; ++j) {
      for (std::size_t n = 0; n < nt; ++n) col[n] = v[n * nx + static_cast<std::size_t>(j)];
      fft_inplace(col, sign);
      for (std::size_t n = 0; n < nt; ++n) v[n * nx + static_cast<std::size_t>(j)] = col[n];
    }
  }
}

/// Per-mode weights of the three norms on a fixed grid, FFT order, x fastest.
struct WeightTable {
  std::vector<double> xsb, dalpha, ysb;

  WeightTable(const Axis& x, const Axis& t, const NormParams& p)
      : xsb(x.n * t.n), dalpha(x.n * t.n), ysb(x.n * t.n) {
    const auto xi = box_wavenumbers(x);
    const auto tau = box_wavenumbers(t);
    for (std::size_t m = 0; m < t.n; ++m) {
      const double wt = std::pow(bracket(tau[m]), 2 * p.s / 3);
      const double wd = std::pow(bracket(tau[m]), 2 * p.alpha);
      for (std::size_t k = 0; k < x.n; ++k) {
        const double mod = std::pow(bracket(tau[m] - xi[k] * xi[k] * xi[k]), 2 * p.b);
        const std::size_t i = m * x.n + k;
        xsb[i] = std::pow(bracket(xi[k]), 2 * p.s) * mod;
        ysb[i] = wt * mod;
        dalpha[i] = std::abs(xi[k]) <= 1.0 ? wd : 0.0;
      }
    }
  }
};

/// Norms of a field from its unnormalized 2-D DFT. Rows are summed in a
/// fixed order so the result does not depend on the thread count.
SpaceTimeNorms norms_from_spectrum(const std::vector<cplx>& spec, const Axis& x, const Axis& t,
                                   const WeightTable& w, Exec exec) {
  const std::size_t nx = x.n, nt = t.n;
  std::vector<double> px(nt), pd(nt), py(nt);
  const auto rows = static_cast<std::ptrdiff_t>(nt);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::ptrdiff_t m = 0; m < rows; ++m) {
    const std::size_t base = static_cast<std::size_t>(m) * nx;
    double a = 0.0, d = 0.0, y = 0.0;
    for (std::size_t k = 0; k < nx; ++k) {
      const double e = std::norm(spec[base + k]);
      a += w.xsb[base + k] * e;
      d += w.dalpha[base + k] * e;
      y += w.ysb[base + k] * e;
    }
    px[static_cast<std::size_t>(m)] = a;
    pd[static_cast<std::size_t>(m)] = d;
    py[static_cast<std::size_t>(m)] = y;
  }
  // |u^|^2 with u^ = dx dt DFT, divided by the box area.
  const double scale = x.step * t.step / (static_cast<double>(nx) * static_cast<double>(nt));
  double a = 0.0, d = 0.0, y = 0.0;
  for (std::size_t m = 0; m < nt; ++m) {
    a += px[m];
    d += pd[m];
    y += py[m];
  }
  return {std::sqrt(a * scale), std::sqrt(d * scale), std::sqrt(y * scale), {}};
}

/// splitmix64 finalizer, used to give every Fourier mode its own stream.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool tail_too_large(const std::vector<cplx>& spec, std::size_t nx, std::size_t nt) {
  std::vector<cplx> kx(nx), kt(nt);
  for (std::size_t m = 0; m < nt; ++m)
    for (std::size_t k = 0; k < nx; ++k) {
      const double e = std::norm(spec[m * nx + k]);
      kx[k] += e;
      kt[m] += e;
    }
  // spectral_tail_fraction squares its input; feed square roots of the marginals.
  for (auto& v : kx) v = std::sqrt(v.real());
  for (auto& v : kt) v = std::sqrt(v.real());
  return spectral_tail_fraction(kx) > kAliasTol || spectral_tail_fraction(kt) > kAliasTol;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double sobolev_norm(const SpatialProfile& phi, double s) {
  const std::size_t n = phi.size();
  if (n == 0) return 0.0;
  std::vector<cplx> spec = phi.samples;
  fft_inplace(spec, -1);
  const auto xi = box_wavenumbers(phi.axis());
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += std::pow(bracket(xi[k]), 2 * s) * std::norm(spec[k]);
  return std::sqrt(acc * phi.dx / static_cast<double>(n));
}

SpaceTimeNorms xsb_norm(const SpaceTimeField& u, const NormParams& p) {
  std::vector<cplx> spec = u.values;
  fft2(spec, u.x.n, u.t.n, -1, Exec::parallel);
  SpaceTimeNorms out = norms_from_spectrum(spec, u.x, u.t, WeightTable(u.x, u.t, p), Exec::parallel);
  if (tail_too_large(spec, u.x.n, u.t.n)) out.flags.emplace_back(kAliasFlag);
  return out;
}

std::string ProbeReport::to_json() const {
  nlohmann::json j;
  j["params"] = {{"s", params.s}, {"b", params.b}, {"alpha", params.alpha}};
  j["seed"] = seed;
  j["count"] = count;
  j["gridSizes"] = {{"nx", grid.n}, {"nt", grid.m}, {"length", grid.length}, {"period", grid.period}};
  j["maxRatio"] = max_ratio;
  j["maxRatioY"] = max_ratio_y;
  const double levels[] = {0.1, 0.5, 0.9, 1.0};
  nlohmann::json q = nlohmann::json::array(), qy = nlohmann::json::array();
  for (std::size_t i = 0; i < quantiles.size(); ++i) q.push_back({{"level", levels[i]}, {"value", quantiles[i]}});
  for (std::size_t i = 0; i < quantiles_y.size(); ++i)
    qy.push_back({{"level", levels[i]}, {"value", quantiles_y[i]}});
  j["quantiles"] = q;
  j["quantilesY"] = qy;
  j["flags"] = flags;
  return dump_json(j);
}

ProbeReport bilinear_probe(std::size_t count, const NormParams& p, std::uint64_t seed,
                           const ProbeGrid& grid) {
  if (count == 0) throw DomainError("bilinear_probe needs count >= 1");
  if (grid.n < 16 || grid.m < 16) throw DomainError("bilinear_probe grid too small");
  ProbeReport rep;
  rep.params = p;
  rep.seed = seed;
  rep.count = count;
  rep.grid = grid;
  if (p.s <= -0.75) rep.flags.emplace_back(kRangeFlag);

  const Axis x{-0.5 * grid.length, grid.length / static_cast<double>(grid.n), grid.n};
  const Axis t{0.0, grid.period / static_cast<double>(grid.m), grid.m};
  const auto xi = box_wavenumbers(x);
  const auto tau = box_wavenumbers(t);
  const auto kb = static_cast<long>(grid.n / 8), mb = static_cast<long>(grid.m / 8);
  const WeightTable primal(x, t, p), dual(x, t, NormParams{p.s, -p.b, p.alpha});
  const std::size_t nx = grid.n, nt = grid.m;

  std::vector<double> ratio(count, 0.0), ratio_y(count, 0.0);
  std::vector<char> used(count, 0);
  const auto trials = static_cast<std::ptrdiff_t>(count);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t tr = 0; tr < trials; ++tr) {
    const auto trial = static_cast<std::uint64_t>(tr);
    std::vector<cplx> field[2];
    double size[2];
    for (int f = 0; f < 2; ++f) {
      std::vector<cplx> spec(nx * nt);
      for (long m = -mb; m <= mb; ++m)
        for (long k = -kb; k <= kb; ++k) {
          const std::size_t ki = k < 0 ? nx - static_cast<std::size_t>(-k) : static_cast<std::size_t>(k);
          const std::size_t mi = m < 0 ? nt - static_cast<std::size_t>(-m) : static_cast<std::size_t>(m);
          std::uint64_t key = mix(seed);
          for (std::uint64_t part : {trial, static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(k),
                                     static_cast<std::uint64_t>(m)})
            key = mix(key ^ part);
          std::mt19937_64 gen(key);
          std::normal_distribution<double> nd;
          const double sd = std::pow(bracket(xi[ki]), -p.s - 1) *
                            std::pow(bracket(tau[mi] - xi[ki] * xi[ki] * xi[ki]), -p.b - 1);
          const double re = nd(gen), im = nd(gen);
          spec[mi * nx + ki] = sd * cplx(re, im);
        }
      const SpaceTimeNorms nu = norms_from_spectrum(spec, x, t, primal, Exec::serial);
      size[f] = nu.xsb + nu.dalpha;
      fft2(spec, nx, nt, +1, Exec::serial);
      field[f] = std::move(spec);
    }
    if (size[0] == 0.0 || size[1] == 0.0) continue;

    // Spectral d_x of the pointwise product.
    std::vector<cplx> prod(nx * nt);
    const double inv = 1.0 / (static_cast<double>(nx) * static_cast<double>(nt));
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = field[0][i] * field[1][i] * inv * inv;
    fft2(prod, nx, nt, -1, Exec::serial);
    for (std::size_t m = 0; m < nt; ++m)
      for (std::size_t k = 0; k < nx; ++k) prod[m * nx + k] *= cplx(0, xi[k]);
    const SpaceTimeNorms nb = norms_from_spectrum(prod, x, t, dual, Exec::serial);
    const auto i = static_cast<std::size_t>(tr);
    ratio[i] = nb.xsb / (size[0] * size[1]);
    ratio_y[i] = nb.ysb / (size[0] * size[1]);
    used[i] = 1;
  }

  std::vector<double> r, ry;
  for (std::size_t i = 0; i < count; ++i)
    if (used[i]) {
      r.push_back(ratio[i]);
      ry.push_back(ratio_y[i]);
    }
  for (double q : {0.1, 0.5, 0.9, 1.0}) {
    rep.quantiles.push_back(quantile(r, q));
    rep.quantiles_y.push_back(quantile(ry, q));
  }
  rep.max_ratio = rep.quantiles.back();
  rep.max_ratio_y = rep.quantiles_y.back();
  return rep;
}

const char* to_string(Compatibility c) {
  switch (c) {
    case Compatibility::pass: return "pass";
    case Compatibility::fail: return "fail";
    case Compatibility::not_required: return "not-required";
  }
  return "unknown";
}

Compatibility check_compatibility(const SpatialProfile& phi, const TimeSignal& f, double s, double at,
                                  double tol) {
  if (s == 0.5) throw DomainError("s = 1/2 is excluded");
  if (s < 0.5) return Compatibility::not_required;
  if (phi.size() < 2 || f.size() < 1) throw DomainError("check_compatibility: empty data");
  const cplx at_phi = lagrange_sample(phi.samples, phi.x0, phi.dx, at, 6, false);
  const std::size_t n0 = f.t0 < 0.0 ? static_cast<std::size_t>(std::llround(-f.t0 / f.dt)) : 0;
  const cplx f0 = f.samples[std::min(n0, f.size() - 1)];
  return std::abs(at_phi - f0) <= tol ? Compatibility::pass : Compatibility::fail;
}

TimeSignal theta_cutoff(const Axis& t, double t_flat, double ramp) {
  if (!(ramp > 0.0)) throw DomainError("theta_cutoff needs ramp > 0");
  std::vector<cplx> v(t.n);
  for (std::size_t n = 0; n < t.n; ++n) v[n] = 1.0 - smooth_step((t.at(n) - t_flat) / ramp);
  return TimeSignal(std::move(v), t.step, t.start, t.start >= 0.0);
}

}  // namespace kdv
