#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <vector>

namespace igo {

struct StateSpace;

/// A scalar function together with derivatives of every order it supports.
/// derivative(0, x) must agree with value(x).
struct AnalyticFunction {
  std::function<double(double)> value;
  std::function<double(int, double)> derivative;
  int max_order = std::numeric_limits<int>::max();
};

AnalyticFunction exp_function();

/// f_xi(x) = f(xi * x); derivatives pick up the factor xi^k.
AnalyticFunction scaled_function(const AnalyticFunction& f, double xi);

/// Interpolation nodes with repetitions. Nodes whose pairwise gaps fall
/// within confluence_tolerance * max(1, max|node|) are grouped (transitive
/// closure over the sorted sequence) and treated as exactly coincident.
struct NodeMultiset {
  std::vector<double> nodes;
  double confluence_tolerance = 1e-9;

  /// Sorted copy with every grouped node replaced by its group mean.
  std::vector<double> canonical() const;

  /// Largest group size; DD of n nodes needs derivatives up to this - 1.
  int max_multiplicity() const;
};

/// k-th order divided difference f[x_0,...,x_k]. Distinct nodes follow the
/// standard recursion; fully repeated nodes give f^{(k)}(x)/k!; mixed runs
/// recurse over the sorted sequence with the confluent rule on equal
/// endpoints.
double divided_difference(const AnalyticFunction& f, const NodeMultiset& nodes);

/// f(L) for the lower-bidiagonal L with the given diagonal and unit
/// subdiagonal: entry (i, j), i >= j, is f[diag_j,...,diag_i]; entries above
/// the diagonal are exactly zero.
Eigen::MatrixXd opitz_matrix_function(const AnalyticFunction& f,
                                      const Eigen::VectorXd& diag,
                                      double confluence_tolerance = 1e-9);

/// f(L) for lower-bidiagonal L with arbitrary subdiagonal `sub`:
/// entry (i, j) = sub_j * ... * sub_{i-1} * f[diag_j,...,diag_i].
Eigen::MatrixXd bidiagonal_matrix_function(const AnalyticFunction& f,
                                           const Eigen::VectorXd& diag,
                                           const Eigen::VectorXd& sub,
                                           double confluence_tolerance = 1e-9);

/// e^M by scaling and squaring with a degree-13 Pade core. Exactly
/// lower-triangular inputs keep their zero pattern exactly.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m);

/// Theta(xi) = (e^{-xi A} - I)^{-1} for xi > 0 and Hurwitz A, computed by a
/// direct linear solve. Nonnegative with positive diagonal; off-diagonal
/// entries are structurally zero exactly where no directed walk exists.
Eigen::MatrixXd resolvent_theta(const StateSpace& space, double xi);

}  // namespace igo
