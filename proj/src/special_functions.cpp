#include "thinscan/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "thinscan/error.hpp"
#include "thinscan/quadrature.hpp"

namespace thinscan::special {

namespace {

constexpr double kSeriesLimit = 12.0;

// Ascending series sum_k (-1)^k (t/2)^(2k+nu) / (k! (k+nu)!). Terms peak
// around exp(|t|), so extended precision keeps the cancellation below 1e-15.
double bessel_series(int nu, double t) {
  const long double half = static_cast<long double>(t) / 2.0L;
  long double term = 1.0L;
  for (int k = 1; k <= nu; ++k) term *= half / k;
  long double sum = term;
  const long double q = -half * half;
  for (int k = 0; k < 500; ++k) {
    term *= q / (static_cast<long double>(k + 1) * (k + 1 + nu));
    sum += term;
    if (std::fabs(term) <= 1e-21L * std::fabs(sum) || term == 0.0L) break;
  }
  return static_cast<double>(sum);
}

// Miller's algorithm for x >= kSeriesLimit. Runs J_{k-1} = (2k/x) J_k - J_{k+1}
// downward from an index far above max(nu, x) where J is negligible.
double bessel_miller(int nu, double x) {
  const double top = std::max(static_cast<double>(nu), x);
  int start = static_cast<int>(top + 20.0 + std::sqrt(40.0 * top));
  start += start % 2;
  constexpr double kBig = 1e250;
  constexpr double kRescale = 1e-250;

  double next = 0.0;  // J_{k+1}
  double cur = 1e-30; // J_k
  double norm = 0.0;  // J_0 + 2 sum J_{2k}
  double wanted = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = (2.0 * k / x) * cur - next;
    next = cur;
    cur = prev;
    if (std::abs(cur) > kBig) {
      cur *= kRescale;
      next *= kRescale;
      norm *= kRescale;
      wanted *= kRescale;
    }
    if (k - 1 == nu) wanted = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
  }
  norm += cur;  // J_0 term
  return wanted / norm;
}

double bessel_positive(int nu, double x) {
  if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
  if (x < kSeriesLimit) return bessel_series(nu, x);
  return bessel_miller(nu, x);
}

double j0(double t) { return bessel_j(BesselOrder(0), t); }
double j1(double t) { return bessel_j(BesselOrder(1), t); }

void require_interval(double a, double b, const char* what) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || a > b)
    throw DomainError(std::string(what) + ": need 0 <= a <= b < inf");
}

}  // namespace

BesselOrder::BesselOrder(int nu) : nu_(nu) {
  if (nu < 0) throw DomainError("BesselOrder: nu must be >= 0");
}

double bessel_j(BesselOrder order, double t) {
  if (!std::isfinite(t)) throw DomainError("bessel_j: non-finite argument");
  const int nu = order.value();
  const double v = bessel_positive(nu, std::abs(t));
  return (t < 0.0 && nu % 2 == 1) ? -v : v;
}

double bessel_j_asymptotic(BesselOrder order, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("bessel_j_asymptotic: need t > 0");
  using std::numbers::pi;
  return std::sqrt(2.0 / (pi * t)) * std::cos(t - order.value() * pi / 2.0 - pi / 4.0);
}

PhiParams::PhiParams(double t, double omega) : t_(t), omega_(omega) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("PhiParams: t must be >= 0");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("PhiParams: omega must be > 0");
}

double phi(const PhiParams& params) {
  const double s = params.omega() * params.t();
  const double a = j0(s);
  const double b = j1(s);
  return params.omega() * (a * a + b * b);
}

double phi_hat(double t, double omega, int n) {
  if (n < 1) throw std::invalid_argument("phi_hat: n must be >= 1 (use phi for n = 0)");
  return std::pow(omega, n) * phi(PhiParams(t, omega));
}

double j0_squared_integral(double a, double b) {
  require_interval(a, b, "j0_squared_integral");
  auto r = quad::integrate([](double t) { const double v = j0(t); return v * v; }, a, b, 1e-12);
  return r.value;
}

double j1_squared_integral(double a, double b) {
  require_interval(a, b, "j1_squared_integral");
  auto r = quad::integrate([](double t) { const double v = j1(t); return v * v; }, a, b, 1e-12);
  return r.value;
}

PsiTerms psi_terms(double t, double omega_K, double omega_1, int s) {
  if (!(t > 0.0)) throw DomainError("psi_terms: t must be > 0");
  if (!(omega_1 > 0.0) || omega_1 > omega_K) throw DomainError("psi_terms: need 0 < omega_1 <= omega_K");
  if (s < 1) throw DomainError("psi_terms: s must be >= 1");

  const double a_K = j0(omega_K * t), b_K = j1(omega_K * t);
  const double a_1 = j0(omega_1 * t), b_1 = j1(omega_1 * t);
  const double two_s1 = 2.0 * s + 1.0;

  PsiTerms out{};
  out.psi1 = std::pow(omega_K, 2 * s + 2) / (4.0 * s + 2.0) * (a_K * a_K + b_K * b_K) -
             std::pow(omega_1, 2 * s + 2) / (4.0 * s + 2.0) * (a_1 * a_1 + b_1 * b_1);
  out.psi2 = static_cast<double>(s) * s / (two_s1 * t * t) *
             (std::pow(omega_K, 2 * s) * a_K * a_K - std::pow(omega_1, 2 * s) * a_1 * a_1);
  out.psi3 = s * std::pow(omega_K, 2 * s + 1) / (two_s1 * t) * a_K * b_K -
             s * std::pow(omega_1, 2 * s + 1) / (two_s1 * t) * a_1 * b_1;
  return out;
}

double first_j1_maximum() {
  // J1'(t) = J0(t) - J1(t)/t changes sign from + to - on (1, 2.5).
  auto deriv = [](double t) { return j0(t) - j1(t) / t; };
  double lo = 1.0, hi = 2.5;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (deriv(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::complex<double> oscillatory_bessel_integral(double a, double b, BesselOrder order,
                                                 double tail_tol) {
  if (!(a >= 0.0) || !(b > a)) throw DomainError("oscillatory_bessel_integral: need 0 <= a < b");
  const int nu = order.value();
  const double step = std::numbers::pi / b;
  auto re = [&](double t) { return std::cos(a * t) * bessel_j(BesselOrder(nu), b * t); };
  auto im = [&](double t) { return std::sin(a * t) * bessel_j(BesselOrder(nu), b * t); };

  std::vector<std::complex<double>> partial;  // partial[j-1] = integral over [0, T_j]
  std::complex<double> running{0.0, 0.0};
  auto extend_to = [&](std::size_t n) {
    while (partial.size() < n) {
      const double lo = step * static_cast<double>(partial.size());
      const double hi = lo + step;
      running += std::complex<double>(quad::integrate(re, lo, hi, 1e-13).value, quad::integrate(im, lo, hi, 1e-13).value);
      partial.push_back(running);
    }
  };
  // Mean of the partial integrals over the upper half of the cutoffs; the
  // early, far-from-converged partial sums are excluded from the average.
  auto window_mean = [&](std::size_t n) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = n / 2; j < n; ++j) acc += partial[j];
    return acc / static_cast<double>(n - n / 2);
  };

  std::size_t n = 32;
  extend_to(n);
  std::complex<double> prev = window_mean(n);
  for (int round = 0; round < 12; ++round) {
    n *= 2;
    extend_to(n);
    const std::complex<double> cur = window_mean(n);
    if (std::abs(cur - prev) < tail_tol) return cur;
    prev = cur;
  }
  throw NumericalError("oscillatory_bessel_integral: Cesaro mean did not settle");
}

std::complex<double> oscillatory_bessel_integral_closed_form(double a, double b, BesselOrder order) {
  if (!(a >= 0.0) || !(b > a)) throw DomainError("oscillatory_bessel_integral_closed_form: need 0 <= a < b");
  const double angle = order.value() * std::asin(a / b);
  return std::complex<double>(std::cos(angle), std::sin(angle)) / std::sqrt(b * b - a * a);
}

}  // namespace thinscan::special
