#pragma once

#include <Eigen/Core>

#include <vector>

#include "igo/matfun.hpp"

namespace igo {

/// Dense real polynomial with coefficients stored in ascending degree order.
struct RealPolynomial {
  Eigen::VectorXd coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  /// Horner evaluation.
  double operator()(double x) const;

  /// Drops trailing coefficients below rel_tol * max|coeff|.
  RealPolynomial trimmed(double rel_tol = 1e-12) const;
};

/// Li_{-k}(z) for k >= 0 and |z| < 1, evaluated from the closed rational
/// form with Eulerian-number coefficients (exact integers up to k = 20).
double polylog_neg(int k, double z);

/// Series evaluation of Li_{-k}(z); independent cross-check path.
double polylog_neg_series(int k, double z);

/// phi(y) = 1/(e^y - 1), y > 0.
double phi_value(double y);

/// phi^{(k)}(y) = (-1)^k Li_{-k}(e^{-y}), y > 0.
double phi_derivative(int k, double y);

/// psi(x) = x e^x / (e^x - 1)^2, x > 0.
double psi_value(double x);

/// Psi_k(x) = (-1)^k psi^{(k)}(x) = x Li_{-k-1}(e^{-x}) - k Li_{-k}(e^{-x}).
double psi_capital(int k, double x);

/// Series evaluation sum_j j^k (x j - k) e^{-jx}; cross-check path,
/// accurate for x >= 0.5.
double psi_capital_series(int k, double x);

/// Riemann zeta at integer s >= 2 via Euler-Maclaurin acceleration.
double zeta_int(int s);

/// C_m = (2 pi)^m / (2 (m-1) zeta(m)), m >= 2.
double c_constant(int m);

/// xbar(k) = 2 pi / (2 k zeta(k+1))^{1/(k+1)}; Psi_k > 0 on [0, xbar(k)).
double psi_positivity_threshold(int k);

/// Global lower bound -2k * k! * zeta(k+1) / (2 pi)^{k+1} for Psi_k.
double psi_lower_bound(int k);

/// Bound polynomial of degree 3k+5 whose positivity on [0, k] certifies
/// Psi_k > 0 there; constant term (4 pi^2)^{k+2} > 0.
RealPolynomial build_pk_polynomial(int k);

/// Refined bound polynomial of degree 5k+9 (tail truncated past |l| = 2);
/// constant term (64 pi^4)^{k+2} > 0.
RealPolynomial build_qk_polynomial(int k);

/// Sign-change scan over a uniform grid followed by bisection to 1e-10.
/// Even-multiplicity roots between grid points are missed.
std::vector<double> real_roots(const RealPolynomial& p, double lo, double hi,
                               int grid_points);

/// phi as an analytic function on (0, inf) with all derivative orders.
AnalyticFunction phi_function();

/// psi as an analytic function on (0, inf) with all derivative orders.
AnalyticFunction psi_function();

}  // namespace igo
