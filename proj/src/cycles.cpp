#include "igo/cycles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "igo/matfun.hpp"
#include "igo/parallel.hpp"
#include "igo/specfun.hpp"

namespace igo {

namespace {

constexpr double kExpArgLimit = 700.0;  // e^x representable up to ~709

void require_positive_xi(double xi, const char* who) {
  if (!(xi > 0)) throw std::domain_error(std::string(who) + ": xi must be > 0");
}

void check_overflow(const Eigen::VectorXd& a, double xi, const char* who) {
  if (xi * a.maxCoeff() > kExpArgLimit)
    throw std::overflow_error(std::string(who) +
                              ": e^{xi max a_i} exceeds representable range");
}

// Divided-difference table of exp over the nodes xi * a_i in chain order,
// reused by every contiguous run. Valid when the nodes are either all
// coincident (confluent case) or pairwise separated beyond the tolerance;
// mixed near-coincidence falls back to per-run divided differences.
class ExpDdTable {
 public:
  ExpDdTable(const Eigen::VectorXd& nodes, double tol) : nodes_(nodes) {
    const int n = static_cast<int>(nodes.size());
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(nodes[i]));
    const double gap = tol * scale;

    std::vector<double> sorted(nodes.data(), nodes.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const bool all_equal = sorted.back() - sorted.front() <= gap;
    bool all_distinct = true;
    for (int i = 1; i < n; ++i)
      if (sorted[i] - sorted[i - 1] <= gap) all_distinct = false;

    if (all_equal) {
      mode_ = Mode::Confluent;
      rep_ = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
      exp_rep_ = std::exp(rep_);
      inv_factorial_.resize(n);
      double fact = 1.0;
      for (int l = 0; l < n; ++l) {
        if (l > 0) fact *= l;
        inv_factorial_[l] = 1.0 / fact;
      }
    } else if (all_distinct) {
      mode_ = Mode::Distinct;
      table_.resize(n);
      table_[0].resize(n);
      for (int i = 0; i < n; ++i) table_[0][i] = std::exp(nodes[i]);
      for (int len = 1; len < n; ++len) {
        table_[len].resize(n - len);
        for (int i = 0; i + len < n; ++i)
          table_[len][i] = (table_[len - 1][i + 1] - table_[len - 1][i]) /
                           (nodes[i + len] - nodes[i]);
      }
    } else {
      mode_ = Mode::General;
      tol_ = tol;
    }
  }

  // exp[nodes_j, ..., nodes_i] for j <= i
  double dd(int i, int j) const {
    switch (mode_) {
      case Mode::Confluent:
        return exp_rep_ * inv_factorial_[i - j];
      case Mode::Distinct:
        return table_[i - j][j];
      case Mode::General: {
        NodeMultiset run;
        run.confluence_tolerance = tol_;
        run.nodes.assign(nodes_.data() + j, nodes_.data() + i + 1);
        return divided_difference(exp_function(), run);
      }
    }
    return 0.0;
  }

 private:
  enum class Mode { Confluent, Distinct, General };
  Mode mode_ = Mode::General;
  Eigen::VectorXd nodes_;
  double rep_ = 0.0, exp_rep_ = 0.0, tol_ = 1e-9;
  std::vector<double> inv_factorial_;
  std::vector<std::vector<double>> table_;
};

// r(xi) through the triangular structure: build e^{-xi A} - I entrywise from
// exp divided differences, then forward-substitute (M x = e_1, r = x_m).
// O(m^2) per call; the workhorse for dense scans.
double r_chain_structured(const Eigen::VectorXd& a, const Eigen::VectorXd& g,
                          double xi) {
  const int m = static_cast<int>(a.size());
  check_overflow(a, xi, "r_of_xi");
  const Eigen::VectorXd nodes = xi * a;
  ExpDdTable dd(nodes, 1e-9);

  Eigen::VectorXd x(m);
  for (int i = 0; i < m; ++i) {
    double acc = (i == 0) ? 1.0 : 0.0;  // right-hand side e_1
    double gain = 1.0;
    for (int j = i - 1; j >= 0; --j) {
      gain *= -xi * g[j];
      acc -= gain * dd.dd(i, j) * x[j];
    }
    x[i] = acc / std::expm1(nodes[i]);
  }
  return x[m - 1];
}

double r_fast(const IgoModel& model, double xi) {
  return r_chain_structured(model.a, model.g, xi);
}

double phi_clamped(const IgoModel& model, double y) {
  // Phi(y) is positive for every y, but the gaussian_cdf tail underflows;
  // clamp so that r stays evaluable with the correct (divergent) trend.
  return std::max(model.phi.value(y), 1e-300);
}

double equation_of_periods_fast(const IgoModel& model, double y) {
  double r;
  try {
    r = r_fast(model, phi_clamped(model, y));
  } catch (const std::overflow_error&) {
    return std::numeric_limits<double>::infinity();
  }
  if (std::isnan(r)) return std::numeric_limits<double>::infinity();
  return model.f.value(y) * r;
}

// Extremal value of fn over [lo, hi], assuming unimodality there.
double golden_section(const std::function<double(double)>& fn, double lo,
                      double hi, bool maximize) {
  const double ratio = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < 100 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    const bool keep_left = maximize ? (fc > fd) : (fc < fd);
    if (keep_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = fn(d);
    }
  }
  return maximize ? std::max(fc, fd) : std::min(fc, fd);
}

}  // namespace

double r_of_xi(const StateSpace& space, double xi, RMethod method) {
  require_positive_xi(xi, "r_of_xi");
  const Eigen::Index m = space.order();
  const Eigen::VectorXd a = -space.A.diagonal();
  check_overflow(a, xi, "r_of_xi");

  if (method == RMethod::DividedDifference) {
    double gbar = 1.0;
    for (Eigen::Index i = 0; i + 1 < m; ++i) gbar *= space.A(i + 1, i);
    NodeMultiset nodes;
    nodes.nodes.assign(a.data(), a.data() + m);
    for (auto& v : nodes.nodes) v *= xi;
    const double dd = divided_difference(phi_function(), nodes);
    return std::pow(-xi, static_cast<double>(m - 1)) * gbar * dd;
  }

  const Eigen::MatrixXd e = matrix_exponential(-xi * space.A);
  Eigen::MatrixXd lhs = e - Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd x;
  bool tri = true;
  for (Eigen::Index i = 0; i < m && tri; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      if (lhs(i, j) != 0.0) { tri = false; break; }
  if (tri) {
    for (Eigen::Index i = 0; i < m; ++i) lhs(i, i) = std::expm1(-xi * space.A(i, i));
    x = lhs.triangularView<Eigen::Lower>().solve(space.B);
  } else {
    x = Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(space.B);
  }
  return space.C * x;
}

double r_derivative(const StateSpace& space, double xi) {
  require_positive_xi(xi, "r_derivative");
  const Eigen::Index m = space.order();
  const Eigen::VectorXd a = -space.A.diagonal();
  check_overflow(a, xi, "r_derivative");
  double gbar = 1.0;
  for (Eigen::Index i = 0; i + 1 < m; ++i) gbar *= space.A(i + 1, i);
  NodeMultiset nodes;
  nodes.nodes.assign(a.data(), a.data() + m);
  for (auto& v : nodes.nodes) v *= xi;
  const double dd = divided_difference(psi_function(), nodes);
  return std::pow(-xi, static_cast<double>(m - 2)) * gbar * dd;
}

double equation_of_periods(const IgoModel& model, double y) {
  if (y < 0) throw std::domain_error("equation_of_periods: y must be >= 0");
  const StateSpace space = build_state_space(model);
  double r;
  try {
    r = r_of_xi(space, phi_clamped(model, y), RMethod::LinearSolve);
  } catch (const std::overflow_error&) {
    return std::numeric_limits<double>::infinity();
  }
  if (std::isnan(r)) return std::numeric_limits<double>::infinity();
  return model.f.value(y) * r;
}

Bracket root_bracket(const IgoModel& model) {
  build_state_space(model);  // parameter validation
  const double xi_hi = model.phi.hi;
  const double xi_lo = std::max(model.phi.lo, 1e-9 * std::max(xi_hi, 1.0));
  const double min_a = model.a.minCoeff();

  double r_min, r_max;
  if (xi_lo >= xi_hi) {
    r_min = r_max = r_fast(model, xi_hi);
  } else if (model.m <= 10 || (model.m - 1) / min_a <= xi_lo) {
    // r decreasing on the whole interval
    r_min = r_fast(model, xi_hi);
    r_max = r_fast(model, xi_lo);
  } else {
    const int n = 1001;
    Eigen::VectorXd vals(n);
    int arg_min = 0, arg_max = 0;
    for (int i = 0; i < n; ++i) {
      const double xi = xi_lo + (xi_hi - xi_lo) * i / (n - 1);
      double v;
      try {
        v = r_fast(model, xi);
      } catch (const std::overflow_error&) {
        v = std::numeric_limits<double>::infinity();
      }
      vals[i] = v;
      if (v < vals[arg_min]) arg_min = i;
      if (v > vals[arg_max]) arg_max = i;
    }
    auto refine = [&](int idx, bool maximize) {
      const double step = (xi_hi - xi_lo) / (n - 1);
      const double a = std::max(xi_lo, xi_lo + (idx - 1) * step);
      const double b = std::min(xi_hi, xi_lo + (idx + 1) * step);
      auto fn = [&](double xi) {
        try {
          return r_fast(model, xi);
        } catch (const std::overflow_error&) {
          return std::numeric_limits<double>::infinity();
        }
      };
      return golden_section(fn, a, b, maximize);
    };
    r_min = std::min(vals[arg_min], refine(arg_min, false));
    r_max = std::max(vals[arg_max], refine(arg_max, true));
  }
  return Bracket{model.f.lo * r_min, model.f.hi * r_max};
}

Eigen::VectorXd fixed_point_from_y(const IgoModel& model, double y_star) {
  const double residual = std::abs(y_star - equation_of_periods(model, y_star));
  if (!(residual <= 1e-8 * std::max(1.0, y_star))) {
    std::ostringstream os;
    os << "fixed_point_from_y: y = " << y_star
       << " is not a root of the equation of periods (residual " << residual
       << ")";
    throw std::invalid_argument(os.str());
  }
  const StateSpace space = build_state_space(model);
  const Eigen::MatrixXd theta = resolvent_theta(space, phi_clamped(model, y_star));
  return model.f.value(y_star) * (theta * space.B);
}

Eigen::VectorXd return_map(const IgoModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.m)
    throw std::invalid_argument("return_map: state dimension mismatch");
  if ((x.array() < 0).any())
    throw std::domain_error("return_map: state must be entrywise >= 0");
  const StateSpace space = build_state_space(model);
  const double y = space.C * x;
  const double t = model.phi.value(y);
  const double lambda = model.f.value(y);
  return matrix_exponential(t * space.A) * (x + lambda * space.B);
}

Eigen::MatrixXd return_map_jacobian(const IgoModel& model,
                                    const Eigen::VectorXd& x) {
  if (x.size() != model.m)
    throw std::invalid_argument("return_map_jacobian: state dimension mismatch");
  const StateSpace space = build_state_space(model);
  const double y = space.C * x;
  const double t = model.phi.value(y);
  const double lambda = model.f.value(y);
  const Eigen::MatrixXd e = matrix_exponential(t * space.A);
  const Eigen::VectorXd q = e * (x + lambda * space.B);

  Eigen::MatrixXd jac = e;
  jac.col(model.m - 1) += model.f.derivative(y) * e.col(0) +
                          model.phi.derivative(y) * (space.A * q);
  return jac;
}

StabilityResult classify_stability(const Eigen::MatrixXd& jacobian) {
  if (jacobian.rows() != jacobian.cols())
    throw std::invalid_argument("classify_stability: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jacobian, false);
  StabilityResult res;
  res.converged = solver.info() == Eigen::Success;
  res.spectral_radius = solver.eigenvalues().cwiseAbs().maxCoeff();
  res.stable = res.spectral_radius < 1.0;
  return res;
}

std::vector<CycleReport> find_all_cycles(const IgoModel& model,
                                         const FindCyclesOptions& options) {
  double lo, hi;
  if (options.window) {
    lo = std::max(0.0, options.window->first);
    hi = options.window->second;
  } else {
    const Bracket b = root_bracket(model);
    const double margin = std::max(1e-9, 1e-9 * std::abs(b.hi));
    lo = std::max(0.0, b.lo - margin);
    hi = b.hi + margin;
  }
  if (!(hi > lo)) {
    const double margin = std::max(1e-9, 1e-9 * std::abs(lo));
    hi = lo + margin;
    lo = std::max(0.0, lo - margin);
  }

  const int n = std::max(options.scan_points, 2);
  const double step = (hi - lo) / (n - 1);
  std::vector<double> gap(n);
  parallel_for(n, [&](std::size_t i) {
    const double y = lo + step * static_cast<double>(i);
    gap[i] = y - equation_of_periods_fast(model, y);
  });

  auto bisect = [&](double a, double b, double ga) {
    while (b - a > options.tol * std::max(1.0, std::abs(a))) {
      const double mid = 0.5 * (a + b);
      const double gm = mid - equation_of_periods_fast(model, mid);
      if (gm == 0.0) return mid;
      if (std::signbit(gm) == std::signbit(ga)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  };

  std::vector<double> roots;
  auto scan_interval = [&](double a, double b, double ga, double gb) {
    if (ga == 0.0) {
      roots.push_back(a);
    } else if (gb != 0.0 && std::signbit(ga) != std::signbit(gb) &&
               std::isfinite(ga) && std::isfinite(gb)) {
      roots.push_back(bisect(a, b, ga));
    }
  };

  for (int i = 0; i + 1 < n; ++i) {
    const double a = lo + step * i;
    const double b = lo + step * (i + 1);
    scan_interval(a, b, gap[i], gap[i + 1]);
  }
  if (gap[n - 1] == 0.0) roots.push_back(hi);

  // A grid point may sit near a root pair without a sign change across the
  // coarse cells; rescan such neighborhoods at 100x resolution.
  for (int i = 1; i + 1 < n; ++i) {
    const double y = lo + step * i;
    if (!std::isfinite(gap[i]) ||
        std::abs(gap[i]) >= 1e-3 * std::max(1.0, std::abs(y)))
      continue;
    if ((gap[i - 1] < 0) != (gap[i] < 0) || (gap[i] < 0) != (gap[i + 1] < 0))
      continue;  // already handled by the main pass
    const double a0 = y - step, b0 = y + step;
    const int fine = 200;
    double prev_y = a0;
    double prev_g = gap[i - 1];
    for (int j = 1; j <= fine; ++j) {
      const double yj = a0 + (b0 - a0) * j / fine;
      const double gj = yj - equation_of_periods_fast(model, yj);
      scan_interval(prev_y, yj, prev_g, gj);
      prev_y = yj;
      prev_g = gj;
    }
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> unique_roots;
  for (double r : roots) {
    if (unique_roots.empty() ||
        r - unique_roots.back() > 10.0 * options.tol * std::max(1.0, std::abs(r)))
      unique_roots.push_back(r);
  }

  std::vector<CycleReport> reports;
  for (double y : unique_roots) {
    const double resid = std::abs(y - equation_of_periods(model, y));
    if (!(resid <= 1e-8 * std::max(1.0, y))) continue;  // scan artifact
    CycleReport rep;
    rep.y_star = y;
    rep.period = model.phi.value(y);
    rep.jump_weight = model.f.value(y);
    rep.fixed_point = fixed_point_from_y(model, y);
    const Eigen::VectorXd q = return_map(model, rep.fixed_point);
    rep.residuals.equation_of_periods = resid;
    rep.residuals.fixed_point = (q - rep.fixed_point).cwiseAbs().maxCoeff();
    const StabilityResult st =
        classify_stability(return_map_jacobian(model, rep.fixed_point));
    rep.spectral_radius = st.spectral_radius;
    rep.stable = st.stable;
    reports.push_back(std::move(rep));
  }

  if (reports.empty() && !options.window)
    throw std::logic_error(
        "find_all_cycles: no root found over the full bracket; a 1-cycle "
        "always exists, so this is an internal error");
  return reports;
}

UniquenessCertificate uniqueness_certificate(const IgoModel& model) {
  build_state_space(model);
  UniquenessCertificate cert;
  std::ostringstream os;

  const bool phi_mono = model.phi.non_decreasing();
  const bool f_mono = model.f.non_increasing();
  if (!phi_mono) cert.reasons.push_back("phi is not non-decreasing");
  if (!f_mono) cert.reasons.push_back("f is not non-increasing");
  if (!phi_mono || !f_mono) {
    cert.guaranteed = false;
    return cert;
  }

  if (model.m <= 10) {
    cert.guaranteed = true;
    cert.reasons.push_back("m <= 10");
    return cert;
  }

  const double min_a = model.a.minCoeff();
  const double sparse_lhs = (model.m - 1) / min_a;
  if (sparse_lhs <= model.phi.lo) {
    cert.guaranteed = true;
    os << "(m-1)/min(a) = " << sparse_lhs << " <= Phi1 = " << model.phi.lo;
    cert.reasons.push_back(os.str());
    return cert;
  }
  os << "(m-1)/min(a) = " << sparse_lhs << " > Phi1 = " << model.phi.lo;
  cert.reasons.push_back(os.str());
  os.str("");

  const double threshold = c_constant(model.m) / (model.gbar() * model.f.value(0.0));
  const double sup_phi_d = model.phi.sup_derivative();
  if (sup_phi_d <= threshold) {
    cert.guaranteed = true;
    os << "sup Phi' = " << sup_phi_d << " <= C_m/(gbar F(0)) = " << threshold;
    cert.reasons.push_back(os.str());
    return cert;
  }
  os << "sup Phi' = " << sup_phi_d << " > C_m/(gbar F(0)) = " << threshold;
  cert.reasons.push_back(os.str());
  cert.reasons.push_back("m = " + std::to_string(model.m) + " > 10");
  cert.guaranteed = false;
  return cert;
}

nlohmann::json to_json(const CycleReport& report) {
  nlohmann::json j;
  j["y_star"] = report.y_star;
  j["period"] = report.period;
  j["fixed_point"] = std::vector<double>(
      report.fixed_point.data(),
      report.fixed_point.data() + report.fixed_point.size());
  j["jump_weight"] = report.jump_weight;
  j["spectral_radius"] = report.spectral_radius;
  j["stable"] = report.stable;
  j["residuals"] = {{"equation_of_periods", report.residuals.equation_of_periods},
                    {"fixed_point", report.residuals.fixed_point}};
  return j;
}

}  // namespace igo
