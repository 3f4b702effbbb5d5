#include "igo/model.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace igo {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_cdf(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

std::string kind_name(ModulationKind k) {
  switch (k) {
    case ModulationKind::Constant: return "constant";
    case ModulationKind::HillIncreasing: return "hill_increasing";
    case ModulationKind::HillDecreasing: return "hill_decreasing";
    case ModulationKind::GaussianCdf: return "gaussian_cdf";
  }
  return "?";
}

ModulationKind kind_from_name(const std::string& s) {
  if (s == "constant") return ModulationKind::Constant;
  if (s == "hill_increasing") return ModulationKind::HillIncreasing;
  if (s == "hill_decreasing") return ModulationKind::HillDecreasing;
  if (s == "gaussian_cdf") return ModulationKind::GaussianCdf;
  throw std::runtime_error("unknown modulation kind: " + s);
}

}  // namespace

double ModulationSpec::value(double y) const {
  switch (kind) {
    case ModulationKind::Constant:
      return lo;
    case ModulationKind::HillIncreasing: {
      const double yp = std::pow(y, p);
      return lo + (hi - lo) * yp / (std::pow(h, p) + yp);
    }
    case ModulationKind::HillDecreasing: {
      const double hp = std::pow(h, p);
      return lo + (hi - lo) * hp / (hp + std::pow(y, p));
    }
    case ModulationKind::GaussianCdf:
      return lo + (hi - lo) * normal_cdf((y - center) / sigma);
  }
  return lo;
}

double ModulationSpec::derivative(double y) const {
  switch (kind) {
    case ModulationKind::Constant:
      return 0.0;
    case ModulationKind::HillIncreasing:
    case ModulationKind::HillDecreasing: {
      const double hp = std::pow(h, p);
      const double yp = std::pow(y, p);
      const double denom = (hp + yp) * (hp + yp);
      const double mag = (hi - lo) * p * hp * std::pow(y, p - 1.0) / denom;
      return kind == ModulationKind::HillIncreasing ? mag : -mag;
    }
    case ModulationKind::GaussianCdf: {
      const double t = (y - center) / sigma;
      return (hi - lo) * kInvSqrt2Pi * std::exp(-0.5 * t * t) / sigma;
    }
  }
  return 0.0;
}

double ModulationSpec::sup_derivative() const {
  switch (kind) {
    case ModulationKind::Constant:
    case ModulationKind::HillDecreasing:
      return 0.0;
    case ModulationKind::HillIncreasing: {
      if (p == 1.0) return (hi - lo) / h;  // maximum at y = 0
      const double s = std::pow((p - 1.0) / (p + 1.0), 1.0 / p);
      const double sp = std::pow(s, p);
      return (hi - lo) * (p / h) * std::pow(s, p - 1.0) / ((1.0 + sp) * (1.0 + sp));
    }
    case ModulationKind::GaussianCdf:
      return (hi - lo) * kInvSqrt2Pi / sigma;
  }
  return 0.0;
}

bool ModulationSpec::non_decreasing() const {
  return kind != ModulationKind::HillDecreasing;
}

bool ModulationSpec::non_increasing() const {
  return kind == ModulationKind::Constant || kind == ModulationKind::HillDecreasing;
}

ModulationSpec ModulationSpec::constant(double v) {
  ModulationSpec s;
  s.kind = ModulationKind::Constant;
  s.lo = s.hi = v;
  return s;
}

ModulationSpec ModulationSpec::hill_increasing(double lo, double hi, double h,
                                               double p) {
  ModulationSpec s;
  s.kind = ModulationKind::HillIncreasing;
  s.lo = lo;
  s.hi = hi;
  s.h = h;
  s.p = p;
  return s;
}

ModulationSpec ModulationSpec::hill_decreasing(double lo, double hi, double h,
                                               double p) {
  ModulationSpec s;
  s.kind = ModulationKind::HillDecreasing;
  s.lo = lo;
  s.hi = hi;
  s.h = h;
  s.p = p;
  return s;
}

ModulationSpec ModulationSpec::gaussian_cdf(double lo, double hi, double center,
                                            double sigma) {
  ModulationSpec s;
  s.kind = ModulationKind::GaussianCdf;
  s.lo = lo;
  s.hi = hi;
  s.center = center;
  s.sigma = sigma;
  return s;
}

StateSpace build_state_space(const IgoModel& model) {
  if (model.m < 1) throw std::invalid_argument("m: order must be >= 1");
  if (model.a.size() != model.m) {
    std::ostringstream os;
    os << "a: expected " << model.m << " entries, got " << model.a.size();
    throw std::invalid_argument(os.str());
  }
  if (model.g.size() != model.m - 1) {
    std::ostringstream os;
    os << "g: expected " << model.m - 1 << " entries, got " << model.g.size();
    throw std::invalid_argument(os.str());
  }
  for (int i = 0; i < model.m; ++i)
    if (!(model.a[i] > 0)) {
      std::ostringstream os;
      os << "a[" << i << "]: must be positive, got " << model.a[i];
      throw std::invalid_argument(os.str());
    }
  for (int i = 0; i + 1 < model.m; ++i)
    if (!(model.g[i] > 0)) {
      std::ostringstream os;
      os << "g[" << i << "]: must be positive, got " << model.g[i];
      throw std::invalid_argument(os.str());
    }

  StateSpace s;
  s.A = Eigen::MatrixXd::Zero(model.m, model.m);
  for (int i = 0; i < model.m; ++i) s.A(i, i) = -model.a[i];
  for (int i = 0; i + 1 < model.m; ++i) s.A(i + 1, i) = model.g[i];
  s.B = Eigen::VectorXd::Zero(model.m);
  s.B[0] = 1.0;
  s.C = Eigen::RowVectorXd::Zero(model.m);
  s.C[model.m - 1] = 1.0;
  return s;
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

ValidationReport validate_model(const IgoModel& model) {
  ValidationReport rep;
  auto add = [&](const std::string& name, bool ok, const std::string& detail) {
    rep.checks.push_back({name, ok, detail});
    return ok;
  };

  bool structure_ok = add("m >= 1", model.m >= 1, "");
  structure_ok &= add("len(a) == m", model.a.size() == model.m, "");
  structure_ok &= add("len(g) == m-1", model.g.size() == model.m - 1, "");

  {
    bool ok = true;
    std::string detail;
    for (Eigen::Index i = 0; i < model.a.size() && ok; ++i)
      if (!(model.a[i] > 0)) {
        ok = false;
        detail = "a[" + std::to_string(i) + "] = " + std::to_string(model.a[i]);
      }
    add("a > 0", ok, detail);
  }
  {
    bool ok = true;
    std::string detail;
    for (Eigen::Index i = 0; i < model.g.size() && ok; ++i)
      if (!(model.g[i] > 0)) {
        ok = false;
        detail = "g[" + std::to_string(i) + "] = " + std::to_string(model.g[i]);
      }
    add("g > 0", ok, detail);
  }

  auto check_spec = [&](const ModulationSpec& s, const std::string& tag,
                        const std::string& lo_name) {
    bool params_ok = true;
    std::string detail;
    if (s.kind == ModulationKind::HillIncreasing ||
        s.kind == ModulationKind::HillDecreasing) {
      if (!(s.h > 0)) { params_ok = false; detail = tag + ".h must be > 0"; }
      if (!(s.p >= 1)) { params_ok = false; detail = tag + ".p must be >= 1"; }
    }
    if (s.kind == ModulationKind::GaussianCdf && !(s.sigma > 0)) {
      params_ok = false;
      detail = tag + ".sigma must be > 0";
    }
    if (s.kind == ModulationKind::Constant && s.lo != s.hi) {
      params_ok = false;
      detail = tag + ": constant kind requires lo == hi";
    }
    add(tag + " parameters valid", params_ok, detail);
    add(tag + " bounds ordered", s.lo <= s.hi && std::isfinite(s.hi),
        params_ok ? "" : detail);

    // Positivity of the declared lower bound. The gaussian_cdf kind attains
    // its lower bound only in the limit, so a zero `lo` is flagged as a
    // warning instead of a failure.
    if (s.kind == ModulationKind::GaussianCdf && !(s.lo > 0)) {
      add(lo_name + " > 0", true,
          "declared lower bound not positive; gaussian_cdf infimum is "
          "approached only as y -> -inf");
      rep.warnings.push_back(
          tag + ": infimum of the modulation value on [0, inf) can be "
          "arbitrarily close to " + std::to_string(s.lo) +
          "; the positive lower bound holds only on compact output ranges");
    } else {
      add(lo_name + " > 0", s.lo > 0, "");
    }
    return params_ok;
  };

  const bool phi_ok = check_spec(model.phi, "phi", "Phi1");
  const bool f_ok = check_spec(model.f, "f", "F1");

  // Sampled bound compliance over [0, 10 * phi.hi]; the analytic per-kind
  // forms already guarantee this, sampling is a redundant safety net.
  if (structure_ok && phi_ok && f_ok) {
    const double y_max = 10.0 * model.phi.hi;
    const int n = 10001;
    bool phi_in = true, f_in = true;
    std::string phi_detail, f_detail;
    for (int i = 0; i < n; ++i) {
      const double y = y_max * i / (n - 1);
      const double pv = model.phi.value(y);
      const double fv = model.f.value(y);
      const double tol = 1e-12;
      if (pv < model.phi.lo - tol || pv > model.phi.hi + tol) {
        phi_in = false;
        phi_detail = "phi(" + std::to_string(y) + ") = " + std::to_string(pv);
      }
      if (fv < model.f.lo - tol || fv > model.f.hi + tol) {
        f_in = false;
        f_detail = "f(" + std::to_string(y) + ") = " + std::to_string(fv);
      }
    }
    add("phi within declared bounds on grid", phi_in, phi_detail);
    add("f within declared bounds on grid", f_in, f_detail);
  }

  rep.phi_non_decreasing = model.phi.non_decreasing();
  rep.f_non_increasing = model.f.non_increasing();
  return rep;
}

bool check_reachability(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n || c.size() != n)
    throw std::invalid_argument("check_reachability: dimension mismatch");

  for (Eigen::Index i = 0; i < n; ++i)
    if (c[i] > 0 && b[i] > 0) return true;

  // BFS over arcs (i, j) present iff a_ij > 0, self-arcs ignored.
  for (Eigen::Index start = 0; start < n; ++start) {
    if (!(c[start] > 0)) continue;
    std::vector<bool> seen(n, false);
    std::deque<Eigen::Index> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const Eigen::Index i = queue.front();
      queue.pop_front();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i || seen[j] || !(a(i, j) > 0)) continue;
        if (b[j] > 0) return true;
        seen[j] = true;
        queue.push_back(j);
      }
    }
  }
  return false;
}

bool check_reachability(const StateSpace& space) {
  return check_reachability(space.A, space.B, space.C.transpose());
}

nlohmann::json to_json(const ModulationSpec& spec) {
  nlohmann::json j;
  j["kind"] = kind_name(spec.kind);
  j["lo"] = spec.lo;
  j["hi"] = spec.hi;
  if (spec.kind == ModulationKind::HillIncreasing ||
      spec.kind == ModulationKind::HillDecreasing) {
    j["h"] = spec.h;
    j["p"] = spec.p;
  }
  if (spec.kind == ModulationKind::GaussianCdf) {
    j["center"] = spec.center;
    j["sigma"] = spec.sigma;
  }
  return j;
}

ModulationSpec modulation_from_json(const nlohmann::json& j) {
  ModulationSpec s;
  s.kind = kind_from_name(j.at("kind").get<std::string>());
  s.lo = j.at("lo").get<double>();
  s.hi = j.at("hi").get<double>();
  if (s.kind == ModulationKind::HillIncreasing ||
      s.kind == ModulationKind::HillDecreasing) {
    s.h = j.at("h").get<double>();
    s.p = j.at("p").get<double>();
  }
  if (s.kind == ModulationKind::GaussianCdf) {
    s.center = j.at("center").get<double>();
    s.sigma = j.at("sigma").get<double>();
  }
  return s;
}

nlohmann::json to_json(const IgoModel& model) {
  nlohmann::json j;
  j["m"] = model.m;
  j["a"] = std::vector<double>(model.a.data(), model.a.data() + model.a.size());
  j["g"] = std::vector<double>(model.g.data(), model.g.data() + model.g.size());
  j["phi"] = to_json(model.phi);
  j["f"] = to_json(model.f);
  return j;
}

IgoModel model_from_json(const nlohmann::json& j) {
  IgoModel m;
  m.m = j.at("m").get<int>();
  const auto a = j.at("a").get<std::vector<double>>();
  const auto g = j.at("g").get<std::vector<double>>();
  m.a = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  m.g = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
  m.phi = modulation_from_json(j.at("phi"));
  m.f = modulation_from_json(j.at("f"));
  return m;
}

IgoModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

void save_model(const IgoModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << to_json(model).dump(2) << "\n";
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["passed"] = c.passed;
    if (!c.detail.empty()) cj["detail"] = c.detail;
    j["checks"].push_back(cj);
  }
  j["warnings"] = report.warnings;
  j["flags"] = {{"phi_non_decreasing", report.phi_non_decreasing},
                {"f_non_increasing", report.f_non_increasing}};
  j["all_passed"] = report.all_passed();
  return j;
}

}  // namespace igo
