#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include <json.hpp>

namespace igo {

enum class ModulationKind { Constant, HillIncreasing, HillDecreasing, GaussianCdf };

/// Parametric modulation function with analytic value and derivative.
/// All kinds map [0, inf) into [lo, hi].
struct ModulationSpec {
  ModulationKind kind = ModulationKind::Constant;
  double lo = 1.0;
  double hi = 1.0;
  double h = 1.0;       // hill half-saturation, > 0
  double p = 1.0;       // hill exponent, >= 1
  double center = 0.0;  // gaussian_cdf location
  double sigma = 1.0;   // gaussian_cdf width (standard deviation), > 0

  double value(double y) const;
  double derivative(double y) const;

  /// sup over y >= 0 of the signed derivative (0 for non-increasing kinds).
  double sup_derivative() const;

  bool non_decreasing() const;
  bool non_increasing() const;

  static ModulationSpec constant(double v);
  static ModulationSpec hill_increasing(double lo, double hi, double h, double p);
  static ModulationSpec hill_decreasing(double lo, double hi, double h, double p);
  static ModulationSpec gaussian_cdf(double lo, double hi, double center, double sigma);
};

/// Order-m chain model under pulse-modulated feedback. Single source of
/// truth for the state-space matrices.
struct IgoModel {
  int m = 1;
  Eigen::VectorXd a;  // m positive decay rates
  Eigen::VectorXd g;  // m-1 positive chain gains
  ModulationSpec phi; // frequency modulation, output -> inter-jump time
  ModulationSpec f;   // amplitude modulation, output -> impulse weight

  double gbar() const { return g.size() ? g.prod() : 1.0; }
};

struct StateSpace {
  Eigen::MatrixXd A;     // lower bidiagonal: diag -a_i, subdiag g_i
  Eigen::VectorXd B;     // first coordinate vector
  Eigen::RowVectorXd C;  // last coordinate row
  Eigen::Index order() const { return A.rows(); }
};

/// Throws std::invalid_argument naming the offending field.
StateSpace build_state_space(const IgoModel& model);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<std::string> warnings;
  bool phi_non_decreasing = false;  // flags used by the uniqueness theorems
  bool f_non_increasing = false;
  bool all_passed() const;
};

/// Never throws; failures are reported, not thrown.
ValidationReport validate_model(const IgoModel& model);

/// True iff indices i, j exist with c_i > 0, b_j > 0 and i = j or a directed
/// walk i -> j in the graph of `a` (arc (i, j) present iff a_ij > 0,
/// self-arcs ignored). Breadth-first search.
bool check_reachability(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c);
bool check_reachability(const StateSpace& space);

nlohmann::json to_json(const ModulationSpec& spec);
ModulationSpec modulation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IgoModel& model);
IgoModel model_from_json(const nlohmann::json& j);

/// File I/O; parse problems surface as nlohmann::json exceptions or
/// std::runtime_error.
IgoModel load_model(const std::string& path);
void save_model(const IgoModel& model, const std::string& path);

nlohmann::json to_json(const ValidationReport& report);

}  // namespace igo
