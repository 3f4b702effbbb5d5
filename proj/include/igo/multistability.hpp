#pragma once

#include <utility>

#include <json.hpp>

#include "igo/model.hpp"

namespace igo {

/// Inputs for the multistable-model constructor. `sigma` is the squared
/// width (variance) of the Gaussian CDF frequency modulation; the
/// constructed ModulationSpec carries the width sqrt(sigma).
struct MultistableRecipe {
  int m = 11;
  double v0 = 0.0;      // point with Psi_{m-1}(v0) < 0
  double y_star = 0.0;  // designed middle root
  double sigma = 0.0;   // Gaussian CDF squared width, > 0
  ModulationSpec f_spec = ModulationSpec::constant(1.0);
};

/// Builds an order-m model with at least three distinct 1-cycles for small
/// enough sigma: a_i = 2 v0, Phi the unit-range Gaussian CDF centered at
/// y_star, and equal gains g_i = gbar^{1/(m-1)} with
/// gbar = 2^{m-1} (m-1)! y* / (|phi^{(m-1)}(v0)| F(y*)).
/// Throws when Psi_{m-1}(v0) >= 0 or when f_spec violates its hypotheses.
IgoModel construct_multistable(const MultistableRecipe& recipe);

struct MultistabilityDiagnostics {
  double p1 = 0.0;     // r'(Phi(y*)) Phi'(y*) F(y*)
  double p2 = 0.0;     // r(Phi(y*)) F'(y*)
  double slope = 0.0;  // d/dy (y - R(y)) at y*; < 0 flags two flanking roots
};

/// Requires y_star to be a root of the equation of periods.
MultistabilityDiagnostics multistability_diagnostics(const IgoModel& model,
                                                     double y_star);

/// Grid minimizer of Psi_{m-1} over (0, m+5]; throws when the minimum is
/// nonnegative (no multistable construction exists for this order).
double find_negative_psi_point(int m);

/// Heuristic scan window [y* - 10 w P1, y* + 10 w P1] (w the Gaussian
/// width) expected to contain the flanking roots.
std::pair<double, double> suggested_window(const IgoModel& model, double y_star);

/// Sidecar diagnostics document: P1, P2, slope, v0, Psi_{m-1}(v0) and the
/// suggested window.
nlohmann::json diagnostics_json(const IgoModel& model,
                                const MultistableRecipe& recipe);

}  // namespace igo
