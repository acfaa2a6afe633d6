#pragma once

#include <complex>

namespace thinscan::special {

// Non-negative integer order of a Bessel function of the first kind.
class BesselOrder {
 public:
  explicit BesselOrder(int nu);
  int value() const noexcept { return nu_; }

 private:
  int nu_;
};

// J_nu(t) for integer nu >= 0 and finite t.
//
// |t| < 12 uses the ascending power series summed in extended precision;
// larger |t| uses Miller's downward recurrence normalized by
// J_0 + 2 sum_k J_2k = 1. Absolute error stays below 1e-12 for |t| <= 200
// and nu <= 20. Throws DomainError for non-finite t.
double bessel_j(BesselOrder order, double t);

// Leading large-argument form sqrt(2/(pi t)) cos(t - nu pi/2 - pi/4).
// Analysis aid only. Throws DomainError for t <= 0.
double bessel_j_asymptotic(BesselOrder order, double t);

// Distance t = |z - x_m| and angular frequency omega.
class PhiParams {
 public:
  PhiParams(double t, double omega);
  double t() const noexcept { return t_; }
  double omega() const noexcept { return omega_; }

 private:
  double t_;
  double omega_;
};

// omega (J0(omega t)^2 + J1(omega t)^2); lies in (0, omega], equal to omega
// only at t = 0.
double phi(const PhiParams& params);

// omega^(n+1) (J0(omega t)^2 + J1(omega t)^2) = omega^n phi(t, omega).
// n must be >= 1; the unweighted case is phi().
double phi_hat(double t, double omega, int n);

// Integral of J0(t)^2 over [a, b], 0 <= a <= b, by adaptive quadrature with
// absolute error <= 1e-10.
double j0_squared_integral(double a, double b);

// Integral of J1(t)^2 over [a, b], same contract as j0_squared_integral.
double j1_squared_integral(double a, double b);

// Closed-form terms of the odd-weight (n = 2s+1) recurrence expansion.
struct PsiTerms {
  double psi1;
  double psi2;
  double psi3;
};

// Requires t > 0, 0 < omega_1 <= omega_K and s >= 1.
PsiTerms psi_terms(double t, double omega_K, double omega_1, int s);

// Location of the first maximum of J1 (first zero of J1' = J0 - J1/t),
// found by bisection on (1, 2.5).
double first_j1_maximum();

// Integral over [0, inf) of exp(i a t) J_nu(b t) dt for 0 <= a < b.
//
// The integral converges only conditionally. Partial integrals are taken at
// cutoffs T_j = j pi / b and their running (Cesaro) mean is accumulated until
// two successive doublings of the cutoff agree to `tail_tol`.
std::complex<double> oscillatory_bessel_integral(double a, double b, BesselOrder order,
                                                 double tail_tol = 1e-4);

// Tabulated closed form of the same integral:
// (cos(nu asin(a/b)) + i sin(nu asin(a/b))) / sqrt(b^2 - a^2).
std::complex<double> oscillatory_bessel_integral_closed_form(double a, double b, BesselOrder order);

}  // namespace thinscan::special
