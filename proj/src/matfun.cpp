#include "igo/matfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "igo/model.hpp"

namespace igo {

namespace {

// Divided-difference table over canonical (sorted, group-collapsed) nodes.
// Returns T with T[L][i] = f[x_i, ..., x_{i+L}].
std::vector<std::vector<double>> dd_table(const AnalyticFunction& f,
                                          const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> t(n);
  t[0].resize(n);
  for (int i = 0; i < n; ++i) t[0][i] = f.value(x[i]);
  double fact = 1.0;
  for (int len = 1; len < n; ++len) {
    fact *= len;
    t[len].resize(n - len);
    for (int i = 0; i + len < n; ++i) {
      const double span = x[i + len] - x[i];
      if (span == 0.0) {
        if (f.max_order < len)
          throw std::domain_error(
              "divided_difference: derivative of order " + std::to_string(len) +
              " unavailable for repeated node");
        t[len][i] = f.derivative(len, x[i]) / fact;
      } else {
        t[len][i] = (t[len - 1][i + 1] - t[len - 1][i]) / span;
      }
    }
  }
  return t;
}

}  // namespace

AnalyticFunction exp_function() {
  AnalyticFunction f;
  f.value = [](double x) { return std::exp(x); };
  f.derivative = [](int, double x) { return std::exp(x); };
  return f;
}

AnalyticFunction scaled_function(const AnalyticFunction& f, double xi) {
  if (xi == 0.0) throw std::invalid_argument("scaled_function: xi must be nonzero");
  AnalyticFunction g;
  g.max_order = f.max_order;
  g.value = [f, xi](double x) { return f.value(xi * x); };
  g.derivative = [f, xi](int k, double x) {
    return std::pow(xi, k) * f.derivative(k, xi * x);
  };
  return g;
}

std::vector<double> NodeMultiset::canonical() const {
  std::vector<double> x = nodes;
  std::sort(x.begin(), x.end());
  if (x.empty()) return x;
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double tol = confluence_tolerance * scale;
  // transitive closure over adjacent gaps; replace groups by their mean
  std::size_t start = 0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    if (i == x.size() || x[i] - x[i - 1] > tol) {
      double mean = std::accumulate(x.begin() + start, x.begin() + i, 0.0) /
                    (i - start);
      for (std::size_t j = start; j < i; ++j) x[j] = mean;
      start = i;
    }
  }
  return x;
}

int NodeMultiset::max_multiplicity() const {
  const std::vector<double> x = canonical();
  int best = 0, run = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    run = (i > 0 && x[i] == x[i - 1]) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

double divided_difference(const AnalyticFunction& f, const NodeMultiset& nodes) {
  if (nodes.nodes.empty())
    throw std::invalid_argument("divided_difference: empty node list");
  const std::vector<double> x = nodes.canonical();
  if (nodes.max_multiplicity() - 1 > f.max_order)
    throw std::domain_error("divided_difference: required derivative order " +
                            std::to_string(nodes.max_multiplicity() - 1) +
                            " unavailable");
  return dd_table(f, x).back().front();
}

Eigen::MatrixXd opitz_matrix_function(const AnalyticFunction& f,
                                      const Eigen::VectorXd& diag,
                                      double confluence_tolerance) {
  const Eigen::Index m = diag.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      NodeMultiset run;
      run.confluence_tolerance = confluence_tolerance;
      run.nodes.assign(diag.data() + j, diag.data() + i + 1);
      out(i, j) = divided_difference(f, run);
    }
  }
  return out;
}

Eigen::MatrixXd bidiagonal_matrix_function(const AnalyticFunction& f,
                                           const Eigen::VectorXd& diag,
                                           const Eigen::VectorXd& sub,
                                           double confluence_tolerance) {
  const Eigen::Index m = diag.size();
  if (sub.size() != m - 1)
    throw std::invalid_argument("bidiagonal_matrix_function: need m-1 subdiagonal entries");
  Eigen::MatrixXd out = opitz_matrix_function(f, diag, confluence_tolerance);
  for (Eigen::Index i = 0; i < m; ++i) {
    double gain = 1.0;
    for (Eigen::Index j = i; j >= 0; --j) {
      out(i, j) *= gain;
      if (j > 0) gain *= sub[j - 1];
    }
  }
  return out;
}

namespace {

bool exactly_lower_triangular(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != 0.0) return false;
  return true;
}

// Solve p X = q, using a pivot-free triangular solve when both sides keep the
// exact lower-triangular pattern. This preserves structural zeros exactly.
Eigen::MatrixXd solve_for(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                          bool triangular) {
  if (triangular)
    return p.triangularView<Eigen::Lower>().solve(q);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(p).solve(q);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  const Eigen::Index n = m.rows();
  if (n == 0) return m;

  // Pade(13) coefficients.
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};

  const bool tri = exactly_lower_triangular(m);
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  Eigen::MatrixXd a = m;
  const double theta13 = 5.371920351148152;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    a /= std::pow(2.0, squarings);
  }

  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a4 * a2;
  const Eigen::MatrixXd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
           b[3] * a2 + b[1] * ident);
  const Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                            b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

  Eigen::MatrixXd r = solve_for(v - u, v + u, tri);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Eigen::MatrixXd resolvent_theta(const StateSpace& space, double xi) {
  if (!(xi > 0)) throw std::domain_error("resolvent_theta: xi must be > 0");
  const Eigen::Index n = space.order();
  Eigen::MatrixXd m = matrix_exponential(-xi * space.A);
  const bool tri = exactly_lower_triangular(m);
  m -= Eigen::MatrixXd::Identity(n, n);
  if (tri) {
    // e^{-xi A} is triangular with diagonal e^{-xi A_ii}; recompute the
    // shifted diagonal through expm1 to avoid cancellation for small xi A_ii.
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = std::expm1(-xi * space.A(i, i));
  }
  return solve_for(m, Eigen::MatrixXd::Identity(n, n), tri);
}

}  // namespace igo
