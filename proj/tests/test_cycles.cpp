#include <doctest.h>

#include <cmath>
#include <random>

#include "igo/cycles.hpp"
#include "igo/matfun.hpp"
#include "igo/multistability.hpp"
#include "igo/specfun.hpp"

using namespace igo;

namespace {

IgoModel constant_model(int m, double phi = 1.0, double f = 1.0) {
  IgoModel model;
  model.m = m;
  model.a = Eigen::VectorXd::Constant(m, 1.0);
  model.g = Eigen::VectorXd::Constant(std::max(m - 1, 0), 1.0);
  model.phi = ModulationSpec::constant(phi);
  model.f = ModulationSpec::constant(f);
  return model;
}

IgoModel random_monotone_model(int m, std::mt19937& rng) {
  std::uniform_real_distribution<double> adist(0.3, 2.5);
  std::uniform_real_distribution<double> gdist(0.4, 2.0);
  std::uniform_real_distribution<double> lodist(0.4, 1.0);
  std::uniform_real_distribution<double> spandist(0.2, 1.5);
  std::uniform_real_distribution<double> hdist(0.5, 3.0);
  std::uniform_real_distribution<double> pdist(1.0, 3.0);
  std::uniform_int_distribution<int> kind(0, 1);

  IgoModel model;
  model.m = m;
  model.a.resize(m);
  model.g.resize(m - 1);
  for (int i = 0; i < m; ++i) model.a[i] = adist(rng);
  for (int i = 0; i + 1 < m; ++i) model.g[i] = gdist(rng);

  const double plo = lodist(rng);
  model.phi = kind(rng) ? ModulationSpec::hill_increasing(
                              plo, plo + spandist(rng), hdist(rng), pdist(rng))
                        : ModulationSpec::constant(plo + 0.5);
  const double flo = lodist(rng);
  model.f = kind(rng) ? ModulationSpec::hill_decreasing(
                            flo, flo + spandist(rng), hdist(rng), pdist(rng))
                      : ModulationSpec::constant(flo + 0.2);
  return model;
}

IgoModel example_611() {
  MultistableRecipe recipe;
  recipe.m = 11;
  recipe.v0 = 8.64;
  recipe.y_star = 2.0;
  recipe.sigma = 2.0e-4;
  recipe.f_spec = ModulationSpec::constant(1.0);
  return construct_multistable(recipe);
}

}  // namespace

TEST_CASE("r and r' in the scalar case") {
  const StateSpace s = build_state_space(constant_model(1));
  for (double xi : {0.3, 1.0, 2.7}) {
    const double expected = 1.0 / std::expm1(xi);
    CHECK(r_of_xi(s, xi, RMethod::LinearSolve) ==
          doctest::Approx(expected).epsilon(1e-13));
    CHECK(r_of_xi(s, xi, RMethod::DividedDifference) ==
          doctest::Approx(expected).epsilon(1e-13));
  }
  const double e = std::exp(1.0);
  CHECK(r_derivative(s, 1.0) ==
        doctest::Approx(-e / ((e - 1) * (e - 1))).epsilon(1e-12));
  CHECK_THROWS_AS(r_of_xi(s, 0.0), std::domain_error);
  CHECK_THROWS_AS(r_of_xi(s, 1e6), std::overflow_error);
}

TEST_CASE("r dual-path agreement across orders") {
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> adist(0.3, 2.5);
  std::uniform_real_distribution<double> gdist(0.4, 2.0);
  std::uniform_real_distribution<double> xidist(0.3, 2.0);
  for (int m = 1; m <= 12; ++m) {
    for (int rep = 0; rep < 4; ++rep) {
      IgoModel model = constant_model(m);
      for (int i = 0; i < m; ++i) model.a[i] = adist(rng);
      for (int i = 0; i + 1 < m; ++i) model.g[i] = gdist(rng);
      const StateSpace s = build_state_space(model);
      const double xi = xidist(rng);
      const double lin = r_of_xi(s, xi, RMethod::LinearSolve);
      const double dd = r_of_xi(s, xi, RMethod::DividedDifference);
      CHECK(lin > 0.0);
      CHECK(lin == doctest::Approx(dd).epsilon(1e-9));
    }
  }
}

TEST_CASE("r' matches finite differences and is negative for m <= 10") {
  std::mt19937 rng(607);
  std::uniform_real_distribution<double> adist(0.4, 2.0);
  for (int m : {1, 2, 4, 6}) {
    IgoModel model = constant_model(m);
    for (int i = 0; i < m; ++i) model.a[i] = adist(rng);
    const StateSpace s = build_state_space(model);
    for (double xi : {0.5, 1.1, 1.9}) {
      const double h = 1e-5 * xi;
      const double fd = (r_of_xi(s, xi + h) - r_of_xi(s, xi - h)) / (2 * h);
      CHECK(r_derivative(s, xi) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
  for (int m = 1; m <= 10; ++m) {
    IgoModel model = constant_model(m);
    for (int i = 0; i < m; ++i) model.a[i] = adist(rng);
    const StateSpace s = build_state_space(model);
    for (int i = 1; i <= 25; ++i)
      CHECK(r_derivative(s, 0.1 + (5.0 - 0.1) * i / 25.0) < 0.0);
  }
}

TEST_CASE("r' upper bound gbar / C_m") {
  std::mt19937 rng(608);
  std::uniform_real_distribution<double> adist(0.4, 2.0);
  std::uniform_real_distribution<double> xidist(0.2, 3.0);
  for (int m = 2; m <= 13; ++m) {
    IgoModel model = constant_model(m);
    for (int i = 0; i < m; ++i) model.a[i] = adist(rng);
    const StateSpace s = build_state_space(model);
    const double cap = model.gbar() / c_constant(m);
    for (int rep = 0; rep < 10; ++rep)
      CHECK(r_derivative(s, xidist(rng)) < cap);
  }
}

TEST_CASE("equation of periods") {
  SUBCASE("constant modulation is flat") {
    IgoModel model = constant_model(3, 1.3, 0.7);
    const double expected =
        0.7 * r_of_xi(build_state_space(model), 1.3, RMethod::LinearSolve);
    for (double y : {0.0, 0.5, 2.0, 100.0})
      CHECK(equation_of_periods(model, y) ==
            doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("fixed point of the constructed order-11 model") {
    const IgoModel model = example_611();
    CHECK(equation_of_periods(model, 2.0) ==
          doctest::Approx(2.0).epsilon(1e-10));
    const StateSpace s = build_state_space(model);
    CHECK(r_of_xi(s, 0.5, RMethod::LinearSolve) ==
          doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("non-increasing for a monotone order-3 model") {
    IgoModel model = constant_model(3);
    model.phi = ModulationSpec::hill_increasing(0.8, 2.0, 1.5, 2.0);
    model.f = ModulationSpec::hill_decreasing(0.5, 1.5, 1.0, 2.0);
    double prev = equation_of_periods(model, 0.0);
    for (int i = 1; i <= 60; ++i) {
      const double cur = equation_of_periods(model, 6.0 * i / 60.0);
      CHECK(cur <= prev * (1 + 1e-12));
      prev = cur;
    }
  }
}

TEST_CASE("root bracket") {
  SUBCASE("degenerate interval for the scalar constant model") {
    const Bracket b = root_bracket(constant_model(1));
    const double v = 1.0 / std::expm1(1.0);
    CHECK(b.lo == doctest::Approx(v).epsilon(1e-13));
    CHECK(b.hi == doctest::Approx(v).epsilon(1e-13));
  }
  SUBCASE("monotone shortcut endpoints") {
    IgoModel model = constant_model(3);
    model.phi = ModulationSpec::hill_increasing(0.8, 2.0, 1.5, 2.0);
    model.f = ModulationSpec::hill_decreasing(0.5, 1.5, 1.0, 2.0);
    const StateSpace s = build_state_space(model);
    const Bracket b = root_bracket(model);
    CHECK(b.lo == doctest::Approx(0.5 * r_of_xi(s, 2.0)).epsilon(1e-9));
    CHECK(b.hi == doctest::Approx(1.5 * r_of_xi(s, 0.8)).epsilon(1e-9));
    CHECK(b.lo > 0.0);
    CHECK(b.lo <= b.hi);
  }
  SUBCASE("contains all roots of the multistable example") {
    const Bracket b = root_bracket(example_611());
    CHECK(b.lo <= 1.9998);
    CHECK(b.hi >= 2.0003);
  }
}

TEST_CASE("find_all_cycles") {
  SUBCASE("single cycle of the scalar constant model") {
    const auto reports = find_all_cycles(constant_model(1));
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].y_star ==
          doctest::Approx(1.0 / std::expm1(1.0)).epsilon(1e-10));
    CHECK(reports[0].period == 1.0);
    CHECK(reports[0].jump_weight == 1.0);
    CHECK(reports[0].fixed_point[0] ==
          doctest::Approx(1.0 / std::expm1(1.0)).epsilon(1e-10));
    CHECK(reports[0].stable);  // Q'(x) = e^{-1} < 1
    CHECK(reports[0].residuals.equation_of_periods < 1e-10);
    CHECK(reports[0].residuals.fixed_point < 1e-10);
  }
  SUBCASE("three cycles of the constructed order-11 model") {
    FindCyclesOptions opts;
    opts.window = {{1.999, 2.001}};
    opts.scan_points = 40001;
    const auto reports = find_all_cycles(example_611(), opts);
    REQUIRE(reports.size() == 3);
    CHECK(std::abs(reports[0].y_star - 1.9998234) < 1e-6);
    CHECK(std::abs(reports[1].y_star - 2.0000000) < 1e-6);
    CHECK(std::abs(reports[2].y_star - 2.0002739) < 1e-6);
    const IgoModel model = example_611();
    for (const auto& rep : reports) {
      CHECK_FALSE(rep.stable);
      CHECK((rep.fixed_point.array() > 0).all());
      CHECK(rep.fixed_point[10] == doctest::Approx(rep.y_star).epsilon(1e-9));
      CHECK(rep.period >= model.phi.lo);
      CHECK(rep.period <= model.phi.hi);
    }
  }
  SUBCASE("monotone models have exactly one cycle") {
    std::mt19937 rng(4711);
    for (int m = 1; m <= 8; ++m) {
      const IgoModel model = random_monotone_model(m, rng);
      const auto reports = find_all_cycles(model);
      REQUIRE(reports.size() == 1);
      CHECK(reports[0].residuals.equation_of_periods < 1e-8);
      CHECK((reports[0].fixed_point.array() > 0).all());
    }
  }
}

TEST_CASE("fixed points from roots") {
  SUBCASE("scalar") {
    const Eigen::VectorXd x =
        fixed_point_from_y(constant_model(1), 1.0 / std::expm1(1.0));
    CHECK(x[0] == doctest::Approx(1.0 / std::expm1(1.0)).epsilon(1e-12));
  }
  SUBCASE("rejects non-roots") {
    CHECK_THROWS_AS(fixed_point_from_y(constant_model(1), 0.9),
                    std::invalid_argument);
  }
  SUBCASE("published middle fixed point") {
    const Eigen::VectorXd x = fixed_point_from_y(example_611(), 2.0);
    const double expected[] = {0.00018, 0.00200, 0.01135, 0.04287,
                               0.12155, 0.27608, 0.52400, 0.85724,
                               1.24048, 1.62906, 2.0};
    for (int i = 0; i < 11; ++i) CHECK(std::abs(x[i] - expected[i]) < 5e-5);
  }
}

TEST_CASE("return map and its Jacobian") {
  SUBCASE("scalar value") {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd q = return_map(constant_model(1), zero);
    CHECK(q[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  }
  SUBCASE("fixed points are preserved") {
    std::mt19937 rng(2001);
    const IgoModel model = random_monotone_model(4, rng);
    const auto reports = find_all_cycles(model);
    REQUIRE(reports.size() == 1);
    const Eigen::VectorXd q = return_map(model, reports[0].fixed_point);
    CHECK((q - reports[0].fixed_point).cwiseAbs().maxCoeff() <=
          1e-8 * reports[0].fixed_point.cwiseAbs().maxCoeff());
  }
  SUBCASE("positivity and input validation") {
    std::mt19937 rng(2002);
    const IgoModel model = random_monotone_model(2, rng);
    Eigen::VectorXd x(2);
    x << 0.3, 1.7;
    CHECK((return_map(model, x).array() > 0).all());
    x[1] = -0.1;
    CHECK_THROWS_AS(return_map(model, x), std::domain_error);
  }
  SUBCASE("constant modulation gives Q' = e^{A T}") {
    const IgoModel model = constant_model(3, 1.4, 0.8);
    const Eigen::MatrixXd expected =
        matrix_exponential(1.4 * build_state_space(model).A);
    Eigen::VectorXd x1(3), x2(3);
    x1 << 0.5, 0.1, 0.9;
    x2 << 2.0, 1.0, 0.2;
    CHECK(return_map_jacobian(model, x1).isApprox(expected, 1e-13));
    CHECK(return_map_jacobian(model, x2).isApprox(expected, 1e-13));
  }
  SUBCASE("Jacobian matches central differences") {
    std::mt19937 rng(2003);
    std::uniform_real_distribution<double> xdist(0.2, 2.0);
    for (int rep = 0; rep < 6; ++rep) {
      const IgoModel model = random_monotone_model(3, rng);
      Eigen::VectorXd x(3);
      for (int i = 0; i < 3; ++i) x[i] = xdist(rng);
      const Eigen::MatrixXd jac = return_map_jacobian(model, x);
      Eigen::MatrixXd fd(3, 3);
      const double h = 1e-6;
      for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd plus = x, minus = x;
        plus[j] += h;
        minus[j] -= h;
        fd.col(j) =
            (return_map(model, plus) - return_map(model, minus)) / (2 * h);
      }
      CHECK((jac - fd).cwiseAbs().maxCoeff() <=
            1e-5 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("stability classification") {
  CHECK(classify_stability(0.5 * Eigen::MatrixXd::Identity(3, 3))
            .spectral_radius == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(classify_stability(0.5 * Eigen::MatrixXd::Identity(3, 3)).stable);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = -2.0;
  d(1, 1) = 0.3;
  const StabilityResult res = classify_stability(d);
  CHECK(res.spectral_radius == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(res.stable);
}

TEST_CASE("uniqueness certificate branches") {
  SUBCASE("low order monotone model") {
    IgoModel model = constant_model(3);
    model.phi = ModulationSpec::hill_increasing(0.8, 2.0, 1.5, 2.0);
    const UniquenessCertificate cert = uniqueness_certificate(model);
    CHECK(cert.guaranteed);
    REQUIRE_FALSE(cert.reasons.empty());
    CHECK(cert.reasons[0] == "m <= 10");
  }
  SUBCASE("order-11 model with sparse impulses") {
    IgoModel model = constant_model(11);
    model.a = Eigen::VectorXd::Constant(11, 10.0);
    model.phi = ModulationSpec::hill_increasing(1.0, 2.0, 1.5, 2.0);
    const UniquenessCertificate cert = uniqueness_certificate(model);
    CHECK(cert.guaranteed);
    bool mentions_sparse = false;
    for (const auto& r : cert.reasons)
      if (r.find("(m-1)/min(a)") != std::string::npos) mentions_sparse = true;
    CHECK(mentions_sparse);
  }
  SUBCASE("order-11 model with a small frequency slope") {
    IgoModel model = constant_model(11);
    model.phi = ModulationSpec::hill_increasing(1.0, 3.0, 2.0, 2.0);
    const UniquenessCertificate cert = uniqueness_certificate(model);
    CHECK(cert.guaranteed);
    bool mentions_slope = false;
    for (const auto& r : cert.reasons)
      if (r.find("sup Phi'") != std::string::npos) mentions_slope = true;
    CHECK(mentions_slope);

    // Theorem conclusion: y - R(y) strictly increasing
    double prev = 0.0 - equation_of_periods(model, 0.0);
    for (int i = 1; i <= 50; ++i) {
      const double y = 5.0 * i / 50.0;
      const double cur = y - equation_of_periods(model, y);
      CHECK(cur > prev);
      prev = cur;
    }
  }
  SUBCASE("the multistable example is not certified") {
    const UniquenessCertificate cert = uniqueness_certificate(example_611());
    CHECK_FALSE(cert.guaranteed);
    bool slope_reason = false;
    for (const auto& r : cert.reasons)
      if (r.find("sup Phi'") != std::string::npos &&
          r.find(">") != std::string::npos)
        slope_reason = true;
    CHECK(slope_reason);
  }
  SUBCASE("non-monotone modulation is rejected outright") {
    IgoModel model = constant_model(2);
    model.phi = ModulationSpec::hill_decreasing(0.5, 1.5, 1.0, 2.0);
    const UniquenessCertificate cert = uniqueness_certificate(model);
    CHECK_FALSE(cert.guaranteed);
    CHECK(cert.reasons[0].find("phi") != std::string::npos);
  }
}

TEST_CASE("sign structure of y - R(y) at the bracket ends") {
  std::mt19937 rng(31337);
  for (int rep = 0; rep < 10; ++rep) {
    const IgoModel model = random_monotone_model(2 + rep % 5, rng);
    const Bracket b = root_bracket(model);
    const double margin = 1e-7 * std::max(1.0, b.hi);
    const double at_lo = (b.lo - margin) - equation_of_periods(model, b.lo - margin);
    const double at_hi = (b.hi + margin) - equation_of_periods(model, b.hi + margin);
    CHECK(at_lo <= 0.0);
    CHECK(at_hi >= 0.0);
  }
}

TEST_CASE("cycle report JSON shape") {
  const auto reports = find_all_cycles(constant_model(1));
  const nlohmann::json j = to_json(reports[0]);
  CHECK(j.contains("y_star"));
  CHECK(j.contains("period"));
  CHECK(j.contains("fixed_point"));
  CHECK(j.contains("jump_weight"));
  CHECK(j.contains("spectral_radius"));
  CHECK(j.contains("stable"));
  CHECK(j["residuals"].contains("equation_of_periods"));
  CHECK(j["residuals"].contains("fixed_point"));
  CHECK(j["fixed_point"].size() == 1);
}
