#include "igo/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace igo {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Eulerian number triangle A(n, i), exact in 64-bit through n = 20.
const std::vector<std::vector<std::int64_t>>& eulerian_triangle() {
  static const std::vector<std::vector<std::int64_t>> table = [] {
    std::vector<std::vector<std::int64_t>> t(21);
    t[0] = {1};
    for (int n = 1; n <= 20; ++n) {
      t[n].assign(n, 0);
      const auto& prev = t[n - 1];
      for (int i = 0; i < n; ++i) {
        std::int64_t left =
            (i < static_cast<int>(prev.size())) ? prev[i] : 0;
        std::int64_t up =
            (i > 0 && i - 1 < static_cast<int>(prev.size())) ? prev[i - 1] : 0;
        t[n][i] = (i + 1) * left + static_cast<std::int64_t>(n - i) * up;
      }
    }
    return t;
  }();
  return table;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Polynomial helpers on ascending-order coefficient vectors.
Eigen::VectorXd poly_mul(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Eigen::VectorXd poly_pow(const Eigen::VectorXd& a, int n) {
  Eigen::VectorXd out(1);
  out[0] = 1.0;
  for (int i = 0; i < n; ++i) out = poly_mul(out, a);
  return out;
}

Eigen::VectorXd poly_add(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(std::max(a.size(), b.size()));
  out.head(a.size()) += a;
  out.head(b.size()) += b;
  return out;
}

// 2 Re[(x - 2 pi k l i)(x - 2 pi l i)^{k+2}] expanded over real coefficients.
Eigen::VectorXd conjugate_pair_numerator(int k, int l) {
  using cd = std::complex<double>;
  const cd w(0.0, -2.0 * kPi * l);
  std::vector<cd> pow_part(k + 3);  // (x + w)^{k+2}, ascending in x
  // binomial coefficients C(k+2, j)
  std::vector<double> binom(k + 3, 0.0);
  binom[0] = 1.0;
  for (int n = 1; n <= k + 2; ++n)
    for (int j = n; j >= 1; --j) binom[j] += binom[j - 1];
  for (int j = 0; j <= k + 2; ++j)
    pow_part[j] = binom[j] * std::pow(w, static_cast<double>(k + 2 - j));

  const cd w_front(0.0, -2.0 * kPi * k * l);  // multiply by (x + w_front)
  std::vector<cd> full(k + 4, cd(0.0, 0.0));
  for (int j = 0; j <= k + 2; ++j) {
    full[j + 1] += pow_part[j];
    full[j] += w_front * pow_part[j];
  }
  Eigen::VectorXd out(k + 4);
  for (int j = 0; j <= k + 3; ++j) out[j] = 2.0 * full[j].real();
  return out;
}

const double kBernoulli[] = {1.0 / 6,    -1.0 / 30,    1.0 / 42,    -1.0 / 30,
                             5.0 / 66,   -691.0 / 2730, 7.0 / 6,    -3617.0 / 510};

}  // namespace

double RealPolynomial::operator()(double x) const {
  double acc = 0.0;
  for (Eigen::Index i = coeffs.size() - 1; i >= 0; --i) acc = acc * x + coeffs[i];
  return acc;
}

RealPolynomial RealPolynomial::trimmed(double rel_tol) const {
  if (coeffs.size() == 0) return *this;
  const double scale = coeffs.cwiseAbs().maxCoeff();
  Eigen::Index last = 0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    if (std::abs(coeffs[i]) > rel_tol * scale) last = i;
  return RealPolynomial{coeffs.head(last + 1)};
}

double polylog_neg(int k, double z) {
  if (k < 0) throw std::invalid_argument("polylog_neg: order k must be >= 0");
  if (!(std::abs(z) < 1.0))
    throw std::domain_error("polylog_neg: |z| must be < 1");
  if (z == 0.0) return 0.0;
  if (k == 0) return z / (1.0 - z);
  if (k <= 20) {
    const auto& row = eulerian_triangle()[k];
    // numerator sum_{i=0}^{k-1} A(k,i) z^{k-i} evaluated as z * Horner
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc = acc * z + static_cast<double>(row[i]);
    return acc * z / std::pow(1.0 - z, k + 1);
  }
  return polylog_neg_series(k, z);
}

double polylog_neg_series(int k, double z) {
  if (k < 0) throw std::invalid_argument("polylog_neg_series: k must be >= 0");
  if (!(std::abs(z) < 1.0))
    throw std::domain_error("polylog_neg_series: |z| must be < 1");
  double sum = 0.0;
  double term = z;  // j = 1
  for (long j = 1; j < 2000000; ++j) {
    sum += term;
    const double ratio = std::pow((j + 1.0) / j, k) * z;
    term *= ratio;
    if (std::abs(term) < 1e-17 * std::abs(sum) && std::abs(ratio) < 1.0) break;
  }
  return sum;
}

double phi_value(double y) {
  if (!(y > 0)) throw std::domain_error("phi_value: y must be > 0");
  return 1.0 / std::expm1(y);
}

double phi_derivative(int k, double y) {
  if (!(y > 0)) throw std::domain_error("phi_derivative: y must be > 0");
  if (k < 0) throw std::invalid_argument("phi_derivative: k must be >= 0");
  if (k == 0) return phi_value(y);
  const double li = polylog_neg(k, std::exp(-y));
  return (k % 2 == 0) ? li : -li;
}

double psi_value(double x) {
  if (!(x > 0)) throw std::domain_error("psi_value: x must be > 0");
  const double u = std::expm1(-x);  // e^{-x} - 1
  return x * (1.0 + u) / (u * u);
}

double psi_capital(int k, double x) {
  if (k < 1) throw std::invalid_argument("psi_capital: k must be >= 1");
  if (!(x > 0)) throw std::domain_error("psi_capital: x must be > 0");
  const double z = std::exp(-x);
  return x * polylog_neg(k + 1, z) - k * polylog_neg(k, z);
}

double psi_capital_series(int k, double x) {
  if (k < 1) throw std::invalid_argument("psi_capital_series: k must be >= 1");
  if (!(x > 0)) throw std::domain_error("psi_capital_series: x must be > 0");
  const double q = std::exp(-x);
  double sum = 0.0;
  double w = q;  // e^{-jx}
  for (long j = 1; j <= 100000; ++j) {
    const double term = std::pow(static_cast<double>(j), k) * (x * j - k) * w;
    sum += term;
    if (j * x > 40.0 && std::abs(term) < 1e-16 * std::abs(sum)) break;
    w *= q;
  }
  return sum;
}

double zeta_int(int s) {
  if (s < 2) throw std::invalid_argument("zeta_int: s must be >= 2");
  constexpr int kN = 16;
  double sum = 0.0;
  for (int j = 1; j < kN; ++j) sum += std::pow(static_cast<double>(j), -s);
  const double n = kN;
  sum += 0.5 * std::pow(n, -s);
  sum += std::pow(n, 1.0 - s) / (s - 1.0);
  // Euler-Maclaurin tail: B_{2i}/(2i)! * s(s+1)...(s+2i-2) * n^{-s-2i+1}
  double rising = static_cast<double>(s);  // product of (s + r)
  double fact = 2.0;                       // (2i)!
  for (int i = 1; i <= 8; ++i) {
    sum += kBernoulli[i - 1] / fact * rising * std::pow(n, -s - 2.0 * i + 1.0);
    if (i < 8) {
      rising *= (s + 2.0 * i - 1.0) * (s + 2.0 * i);
      fact *= (2.0 * i + 1.0) * (2.0 * i + 2.0);
    }
  }
  return sum;
}

double c_constant(int m) {
  if (m < 2) throw std::invalid_argument("c_constant: m must be >= 2");
  return std::pow(2.0 * kPi, m) / (2.0 * (m - 1) * zeta_int(m));
}

double psi_positivity_threshold(int k) {
  if (k < 1)
    throw std::invalid_argument("psi_positivity_threshold: k must be >= 1");
  return 2.0 * kPi / std::pow(2.0 * k * zeta_int(k + 1), 1.0 / (k + 1));
}

double psi_lower_bound(int k) {
  if (k < 1) throw std::invalid_argument("psi_lower_bound: k must be >= 1");
  return -2.0 * k * factorial(k) * zeta_int(k + 1) / std::pow(2.0 * kPi, k + 1);
}

RealPolynomial build_pk_polynomial(int k) {
  if (k < 1) throw std::invalid_argument("build_pk_polynomial: k must be >= 1");
  const double ck =
      2.0 * k * (zeta_int(k + 1) - 1.0) / std::pow(2.0 * kPi, k + 1);
  Eigen::VectorXd circle(3);
  circle << 4.0 * kPi * kPi, 0.0, 1.0;  // x^2 + 4 pi^2
  const Eigen::VectorXd base = poly_pow(circle, k + 2);
  Eigen::VectorXd xk1 = Eigen::VectorXd::Zero(k + 2);
  xk1[k + 1] = 1.0;
  Eigen::VectorXd out = poly_add(base, -ck * poly_mul(xk1, base));
  out = poly_add(out, poly_mul(xk1, conjugate_pair_numerator(k, 1)));
  return RealPolynomial{out};
}

RealPolynomial build_qk_polynomial(int k) {
  if (k < 1) throw std::invalid_argument("build_qk_polynomial: k must be >= 1");
  const double cbar = 2.0 * k *
                      (zeta_int(k + 1) - 1.0 - std::pow(2.0, -k - 1.0)) /
                      std::pow(2.0 * kPi, k + 1);
  Eigen::VectorXd c1(3), c2(3);
  c1 << 4.0 * kPi * kPi, 0.0, 1.0;    // x^2 + 4 pi^2
  c2 << 16.0 * kPi * kPi, 0.0, 1.0;   // x^2 + 16 pi^2
  const Eigen::VectorXd b1 = poly_pow(c1, k + 2);
  const Eigen::VectorXd b2 = poly_pow(c2, k + 2);
  const Eigen::VectorXd both = poly_mul(b1, b2);
  Eigen::VectorXd xk1 = Eigen::VectorXd::Zero(k + 2);
  xk1[k + 1] = 1.0;
  Eigen::VectorXd out = poly_add(both, -cbar * poly_mul(xk1, both));
  out = poly_add(out, poly_mul(poly_mul(xk1, conjugate_pair_numerator(k, 1)), b2));
  out = poly_add(out, poly_mul(poly_mul(xk1, conjugate_pair_numerator(k, 2)), b1));
  return RealPolynomial{out};
}

std::vector<double> real_roots(const RealPolynomial& p, double lo, double hi,
                               int grid_points) {
  if (!(hi > lo)) throw std::invalid_argument("real_roots: need hi > lo");
  if (grid_points < 2)
    throw std::invalid_argument("real_roots: need grid_points >= 2");
  const double step = (hi - lo) / (grid_points - 1);
  std::vector<double> roots;
  double x_prev = lo;
  double v_prev = p(lo);
  for (int i = 1; i < grid_points; ++i) {
    const double x = lo + i * step;
    const double v = p(x);
    if (v_prev == 0.0) {
      roots.push_back(x_prev);
    } else if (v != 0.0 && std::signbit(v) != std::signbit(v_prev)) {
      double a = x_prev, b = x;
      double fa = v_prev;
      for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = p(mid);
        if (fm == 0.0 || std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x_prev = x;
    v_prev = v;
  }
  if (v_prev == 0.0) roots.push_back(x_prev);
  std::sort(roots.begin(), roots.end());
  return roots;
}

AnalyticFunction phi_function() {
  AnalyticFunction f;
  f.value = [](double x) { return phi_value(x); };
  f.derivative = [](int k, double x) { return phi_derivative(k, x); };
  return f;
}

AnalyticFunction psi_function() {
  AnalyticFunction f;
  f.value = [](double x) { return psi_value(x); };
  f.derivative = [](int k, double x) {
    if (k == 0) return psi_value(x);
    const double v = psi_capital(k, x);
    return (k % 2 == 0) ? v : -v;
  };
  return f;
}

}  // namespace igo
