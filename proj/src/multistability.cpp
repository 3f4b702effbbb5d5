#include "igo/multistability.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "igo/cycles.hpp"
#include "igo/specfun.hpp"

namespace igo {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

IgoModel construct_multistable(const MultistableRecipe& recipe) {
  if (recipe.m < 2)
    throw std::invalid_argument("construct_multistable: m must be >= 2");
  if (!(recipe.v0 > 0))
    throw std::invalid_argument("construct_multistable: v0 must be > 0");
  if (!(recipe.y_star > 0))
    throw std::invalid_argument("construct_multistable: y_star must be > 0");
  if (!(recipe.sigma > 0))
    throw std::invalid_argument("construct_multistable: sigma must be > 0");
  if (!recipe.f_spec.non_increasing())
    throw std::invalid_argument("construct_multistable: f must be non-increasing");
  if (!(recipe.f_spec.lo > 0))
    throw std::invalid_argument("construct_multistable: f must have a positive lower bound");

  const int k = recipe.m - 1;
  const double psi_v0 = psi_capital(k, recipe.v0);
  if (!(psi_v0 < 0)) {
    std::ostringstream os;
    os << "construct_multistable: Psi_" << k << "(" << recipe.v0
       << ") = " << psi_v0 << " >= 0";
    throw std::invalid_argument(os.str());
  }

  // gbar = (-1)^{m-1} 2^{m-1} (m-1)! y* / (phi^{(m-1)}(v0) F(y*)); the sign
  // factor cancels against the complete monotonicity of phi, so gbar > 0.
  const double f_at_star = recipe.f_spec.value(recipe.y_star);
  const double phi_d = phi_derivative(k, recipe.v0);
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double gbar =
      sign * std::pow(2.0, k) * factorial(k) * recipe.y_star / (phi_d * f_at_star);
  assert(gbar > 0);

  IgoModel model;
  model.m = recipe.m;
  model.a = Eigen::VectorXd::Constant(recipe.m, 2.0 * recipe.v0);
  model.g = Eigen::VectorXd::Constant(recipe.m - 1,
                                      std::pow(gbar, 1.0 / (recipe.m - 1)));
  model.phi = ModulationSpec::gaussian_cdf(0.0, 1.0, recipe.y_star,
                                           std::sqrt(recipe.sigma));
  model.f = recipe.f_spec;

  const double residual =
      std::abs(recipe.y_star - equation_of_periods(model, recipe.y_star));
  if (!(residual <= 1e-9 * std::max(1.0, recipe.y_star)))
    throw std::logic_error("construct_multistable: R(y*) = y* residual " +
                           std::to_string(residual) + " out of tolerance");
  return model;
}

MultistabilityDiagnostics multistability_diagnostics(const IgoModel& model,
                                                     double y_star) {
  const double residual = std::abs(y_star - equation_of_periods(model, y_star));
  if (!(residual <= 1e-8 * std::max(1.0, y_star)))
    throw std::invalid_argument(
        "multistability_diagnostics: y_star is not a root (residual " +
        std::to_string(residual) + ")");

  const StateSpace space = build_state_space(model);
  const double xi = model.phi.value(y_star);
  MultistabilityDiagnostics d;
  d.p1 = r_derivative(space, xi) * model.phi.derivative(y_star) *
         model.f.value(y_star);
  d.p2 = r_of_xi(space, xi) * model.f.derivative(y_star);
  d.slope = 1.0 - d.p1 - d.p2;
  return d;
}

double find_negative_psi_point(int m) {
  if (m < 2) throw std::invalid_argument("find_negative_psi_point: m must be >= 2");
  const int k = m - 1;
  const double hi = m + 5.0;
  const int n = 4000;
  double best_x = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    const double x = hi * i / n;
    const double v = psi_capital(k, x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  if (!(best < 0)) {
    std::ostringstream os;
    os << "find_negative_psi_point: Psi_" << k << " is nonnegative on (0, "
       << hi << "]";
    throw std::domain_error(os.str());
  }
  return best_x;
}

std::pair<double, double> suggested_window(const IgoModel& model,
                                           double y_star) {
  const MultistabilityDiagnostics d = multistability_diagnostics(model, y_star);
  const double width = model.phi.sigma;
  const double half = 10.0 * width * std::abs(d.p1);
  return {std::max(0.0, y_star - half), y_star + half};
}

nlohmann::json diagnostics_json(const IgoModel& model,
                                const MultistableRecipe& recipe) {
  const MultistabilityDiagnostics d =
      multistability_diagnostics(model, recipe.y_star);
  const auto window = suggested_window(model, recipe.y_star);
  nlohmann::json j;
  j["P1"] = d.p1;
  j["P2"] = d.p2;
  j["slope"] = d.slope;
  j["v0"] = recipe.v0;
  j["psi_value"] = psi_capital(recipe.m - 1, recipe.v0);
  j["suggested_window"] = {window.first, window.second};
  return j;
}

}  // namespace igo
