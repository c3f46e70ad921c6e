#include "kdv/airy.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "kdv/numerics.hpp"
#include "kdv/types.hpp"

namespace kdv {

namespace {

constexpr double kPi = std::numbers::pi;
// 3^{-1/3}
const double kScale = std::cbrt(1.0 / 3.0);

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;
constexpr long double kAip0 = 0.258819403792806798405183560189203963L;  // -Ai'(0)

void maclaurin(double zd, double& ai, double& aip) {
  const long double z = zd;
  const long double z3 = z * z * z;
  long double f = 1.0L, g = z, fp = 0.0L, gp = 1.0L;
  long double tf = 1.0L, tg = z, tfp = z * z / 2.0L, tgp = 1.0L;
  fp = tfp;
  for (int k = 0; k < 200; ++k) {
    const long double kk = k;
    tf *= z3 / ((3 * kk + 2) * (3 * kk + 3));
    tg *= z3 / ((3 * kk + 3) * (3 * kk + 4));
    tgp *= z3 / ((3 * kk + 1) * (3 * kk + 3));
    if (k >= 1) tfp *= z3 / (3 * kk * (3 * kk + 2));
    f += tf;
    g += tg;
    gp += tgp;
    if (k >= 1) fp += tfp;
    const long double tiny = 1e-21L * (std::fabs(f) + std::fabs(g) + 1.0L);
    if (k > 3 && std::fabs(tf) < tiny && std::fabs(tg) < tiny && std::fabs(tfp) < tiny &&
        std::fabs(tgp) < tiny)
      break;
  }
  ai = static_cast<double>(kAi0 * f - kAip0 * g);
  aip = static_cast<double>(kAi0 * fp - kAip0 * gp);
}

// e^{zeta} K_nu(zeta) by the trapezoid rule on \int_0^\infty e^{-zeta(cosh t - 1)} cosh(nu t) dt.
double scaled_bessel_k(double nu, double zeta) {
  const double h = 0.05;
  double acc = 0.5;
  for (int i = 1; i < 4000; ++i) {
    const double t = h * i;
    const double s = std::sinh(0.5 * t);
    const double e = zeta * 2.0 * s * s;
    if (e > 50.0) break;
    acc += std::exp(-e) * std::cosh(nu * t);
  }
  return h * acc;
}

// Coefficients u_k of the large-argument expansions (DLMF 9.7).
double u_coef(int k) {
  double u = 1.0;
  for (int j = 1; j <= k; ++j) {
    const double jd = j;
    u *= (6 * jd - 5) * (6 * jd - 3) * (6 * jd - 1) / ((2 * jd - 1) * 216 * jd);
  }
  return u;
}

void asymptotic_positive(double z, double& ai, double& aip) {
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  double su = 0.0, sv = 0.0, pw = 1.0, last = 1e300;
  for (int k = 0; k < 60; ++k) {
    const double uk = u_coef(k);
    const double vk = k == 0 ? 1.0 : -(6.0 * k + 1) / (6.0 * k - 1) * uk;
    const double term = uk * pw;
    if (std::fabs(term) > last) break;
    last = std::fabs(term);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    su += sign * term;
    sv += sign * vk * pw;
    if (last < 1e-18) break;
    pw /= zeta;
  }
  const double e = std::exp(-zeta) / (2.0 * std::sqrt(kPi));
  const double q = std::pow(z, 0.25);
  ai = e / q * su;
  aip = -e * q * sv;
}

void asymptotic_negative(double x, double& ai, double& aip) {
  // x > 0, evaluates Ai(-x), Ai'(-x).
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double pe = 0.0, po = 0.0, qe = 0.0, qo = 0.0;
  double pw = 1.0, last = 1e300;
  for (int k = 0; k < 80; ++k) {
    const double uk = u_coef(k);
    const double vk = k == 0 ? 1.0 : -(6.0 * k + 1) / (6.0 * k - 1) * uk;
    const double term = uk * pw;
    if (std::fabs(term) > last) break;
    last = std::fabs(term);
    const int half = k / 2;
    const double sign = (half % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      pe += sign * term;
      qe += sign * vk * pw;
    } else {
      po += sign * term;
      qo += sign * vk * pw;
    }
    if (last < 1e-18) break;
    pw /= zeta;
  }
  const double ph = zeta - 0.25 * kPi;
  const double c = std::cos(ph), s = std::sin(ph);
  const double q = std::pow(x, 0.25);
  ai = (c * pe + s * po) / (std::sqrt(kPi) * q);
  aip = q * (s * qe - c * qo) / std::sqrt(kPi);
}

// Antiderivative F = P Ai' + Q Ai of Ai for |z| large, with F(+-inf) = 0 on
// the respective side.
double tail_asymptotic_antiderivative(double z) {
  double ai = 0.0, aip = 0.0;
  detail::airy_std(z, ai, aip);
  double p = 0.0, q = 0.0, c = 1.0, last = 1e300;
  for (int k = 0; k < 40; ++k) {
    const double e = 3.0 * k + 1.0;
    const double term = c / std::pow(z, e);
    if (std::fabs(term) > last) break;
    last = std::fabs(term);
    p += term;
    q += c * e / std::pow(z, e + 1.0);
    if (last < 1e-20) break;
    c *= (3.0 * k + 1.0) * (3.0 * k + 2.0);
  }
  return p * aip + q * ai;
}

double ai_only(double z) {
  double a = 0.0, ap = 0.0;
  detail::airy_std(z, a, ap);
  return a;
}

}  // namespace

namespace detail {

void airy_std(double z, double& ai, double& aip) {
  if (!std::isfinite(z)) throw DomainError("airy: non-finite argument");
  if (z >= -8.0 && z <= 2.0) {
    maclaurin(z, ai, aip);
  } else if (z > 2.0 && z <= 12.0) {
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    const double e = std::exp(-zeta);
    ai = std::sqrt(z / 3.0) / kPi * e * scaled_bessel_k(1.0 / 3.0, zeta);
    aip = -z / (kPi * std::sqrt(3.0)) * e * scaled_bessel_k(2.0 / 3.0, zeta);
  } else if (z > 12.0) {
    if (z > 150.0) {
      ai = 0.0;
      aip = 0.0;
      return;
    }
    asymptotic_positive(z, ai, aip);
  } else {
    asymptotic_negative(-z, ai, aip);
  }
}

double airy_std_tail(double z) {
  if (!std::isfinite(z)) throw DomainError("airy_integral_tail: non-finite argument");
  if (z > 20.0) return -tail_asymptotic_antiderivative(z);
  if (z < -20.0) return 1.0 - tail_asymptotic_antiderivative(z);
  if (z >= 0.0) {
    // Integrate forward until the integrand is negligible.
    const double width = 40.0 / std::sqrt(std::max(z, 1.0));
    const auto panels = static_cast<std::size_t>(std::ceil(width / 0.25));
    return gauss_integrate(ai_only, z, z + width, panels, 16);
  }
  const auto panels = static_cast<std::size_t>(std::ceil(-z / 0.25));
  return 1.0 / 3.0 + gauss_integrate(ai_only, z, 0.0, panels, 16);
}

}  // namespace detail

AiryValue airy(double x) {
  if (!std::isfinite(x)) throw DomainError("airy: non-finite argument");
  double ai = 0.0, aip = 0.0;
  detail::airy_std(kScale * x, ai, aip);
  return {kScale * ai, kScale * kScale * aip, x};
}

double airy_integral_tail(double x) {
  // \int_x^\infty 3^{-1/3} Ai(3^{-1/3} y) dy = \int_{3^{-1/3} x}^\infty Ai.
  return detail::airy_std_tail(kScale * x);
}

double airy_mellin_left(double lambda) {
  if (!(lambda > 0.0 && lambda < 0.25)) throw DomainError("airy_mellin_left: lambda must lie in (0, 1/4)");
  return std::tgamma(lambda) * std::tgamma((1.0 - lambda) / 3.0) *
         std::cos(2.0 * kPi * lambda / 3.0 - kPi / 6.0) / (3.0 * kPi);
}

double airy_mellin_right(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("airy_mellin_right: lambda must be positive");
  // Gamma((1-l)/3) cos(pi l/3 + pi/6) = Gamma(z) sin(pi z) with z = (1-l)/3,
  // and Gamma(z) sin(pi z) = pi / Gamma(1-z). This removes the poles at l = 1, 4, 7, ...
  return std::tgamma(lambda) / (3.0 * std::tgamma((2.0 + lambda) / 3.0));
}

namespace {

// \int_0^1 x^{l-1} g(x) dx with x = y^{1/l}, which removes the endpoint singularity.
double near_origin(double lambda, double (*g)(double)) {
  const double inv = 1.0 / lambda;
  return inv * gauss_integrate([&](double y) { return g(std::pow(y, inv)); }, 0.0, 1.0, 64, 16);
}

double a_left(double x) { return airy(-x).a; }
double a_right(double x) { return airy(x).a; }

}  // namespace

double airy_mellin_left_quadrature(double lambda) {
  if (!(lambda > 0.0 && lambda < 0.25)) throw DomainError("airy_mellin_left: lambda must lie in (0, 1/4)");
  // A(-x) oscillates with phase 2 x^{3/2} / (3 sqrt 3); split at its half-periods.
  const double c = 2.0 / (3.0 * std::sqrt(3.0));
  auto point = [&](double k) { return std::pow((k * kPi - 0.25 * kPi) / c, 2.0 / 3.0); };
  auto piece = [&](double a, double b) {
    return gauss_integrate([&](double x) { return std::pow(x, lambda - 1.0) * a_left(x); }, a, b, 4, 16);
  };
  std::size_t k0 = 1;
  while (point(static_cast<double>(k0)) <= 1.0) ++k0;
  double head = near_origin(lambda, a_left) + piece(1.0, point(static_cast<double>(k0)));
  constexpr std::size_t kTerms = 48;
  std::vector<double> sums(kTerms);
  double acc = head;
  for (std::size_t i = 0; i < kTerms; ++i) {
    const double k = static_cast<double>(k0 + i);
    acc += piece(point(k), point(k + 1.0));
    sums[i] = acc;
  }
  for (std::size_t level = 0; level + 1 < kTerms; ++level)
    for (std::size_t i = 0; i + 1 < kTerms - level; ++i) sums[i] = 0.5 * (sums[i] + sums[i + 1]);
  return sums[0];
}

double airy_mellin_right_quadrature(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("airy_mellin_right: lambda must be positive");
  const double tail = gauss_integrate([&](double x) { return std::pow(x, lambda - 1.0) * a_right(x); }, 1.0,
                                      40.0, 156, 16);
  return near_origin(lambda, a_right) + tail;
}

}  // namespace kdv
