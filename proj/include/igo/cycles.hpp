#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "igo/model.hpp"

namespace igo {

/// Closed interval guaranteed to contain every root of y = R(y).
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

enum class RMethod { LinearSolve, DividedDifference };

/// r(xi) = C (e^{-xi A} - I)^{-1} B, strictly positive for xi > 0.
/// LinearSolve goes through the matrix exponential and a direct solve;
/// DividedDifference evaluates (-xi)^{m-1} gbar phi[xi a_1,...,xi a_m].
/// Throws std::overflow_error when e^{xi max a_i} is not representable.
double r_of_xi(const StateSpace& space, double xi,
               RMethod method = RMethod::LinearSolve);

/// r'(xi) = (-xi)^{m-2} gbar psi[xi a_1,...,xi a_m].
double r_derivative(const StateSpace& space, double xi);

/// R(y) = F(y) r(Phi(y)); returns +inf when r overflows (tiny Phi(y)).
double equation_of_periods(const IgoModel& model, double y);

/// [F1 min r, F2 max r] over xi in [Phi1, Phi2]. Monotone shortcut when
/// m <= 10 or (m-1)/min_i a_i <= Phi1; otherwise grid scan plus
/// golden-section refinement.
Bracket root_bracket(const IgoModel& model);

struct CycleResiduals {
  double equation_of_periods = 0.0;  // |y* - R(y*)|
  double fixed_point = 0.0;          // max-norm of Q(x*) - x*
};

/// A 1-cycle: root y* of the equation of periods together with the fixed
/// point, period, impulse weight and orbital stability classification.
struct CycleReport {
  double y_star = 0.0;
  double period = 0.0;
  Eigen::VectorXd fixed_point;
  double jump_weight = 0.0;
  double spectral_radius = 0.0;
  bool stable = false;
  CycleResiduals residuals;
};

struct FindCyclesOptions {
  std::optional<std::pair<double, double>> window;
  int scan_points = 10001;
  double tol = 1e-12;
};

/// Scans y - R(y) for sign changes over the bracket (or the explicit
/// window), bisects each to tol, refines near-misses, deduplicates roots
/// closer than 10 tol, and reports each cycle sorted by y*. With the
/// default bracket an empty result throws (existence is guaranteed).
std::vector<CycleReport> find_all_cycles(const IgoModel& model,
                                         const FindCyclesOptions& options = {});

/// x = F(y*) (e^{-Phi(y*) A} - I)^{-1} B for a root y* of y = R(y).
/// Requires |y* - R(y*)| <= 1e-8 max(1, y*).
Eigen::VectorXd fixed_point_from_y(const IgoModel& model, double y_star);

/// Q(x) = e^{Phi(Cx) A} (x + F(Cx) B). Input must be entrywise >= 0.
Eigen::VectorXd return_map(const IgoModel& model, const Eigen::VectorXd& x);

/// Q'(x) = e^{A Phi(Cx)} (I + F'(Cx) B C) + Phi'(Cx) A Q(x) C.
Eigen::MatrixXd return_map_jacobian(const IgoModel& model,
                                    const Eigen::VectorXd& x);

struct StabilityResult {
  double spectral_radius = 0.0;
  bool stable = false;
  bool converged = true;
};

/// Spectral radius by full eigensolve; stable iff it is < 1 (Schur).
StabilityResult classify_stability(const Eigen::MatrixXd& jacobian);

struct UniquenessCertificate {
  bool guaranteed = false;
  std::vector<std::string> reasons;
};

/// Certifies 1-cycle uniqueness: Phi non-decreasing and F non-increasing,
/// together with m <= 10, or (m-1)/min_i a_i <= Phi1, or
/// sup Phi' <= C_m / (gbar F(0)).
UniquenessCertificate uniqueness_certificate(const IgoModel& model);

nlohmann::json to_json(const CycleReport& report);

}  // namespace igo
