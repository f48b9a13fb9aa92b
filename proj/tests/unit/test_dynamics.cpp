#include "doctest.h"

#include <cmath>

#include "brinkmann/catalog.hpp"
#include "brinkmann/dynamics.hpp"
#include "brinkmann/errors.hpp"
#include "brinkmann/sampling.hpp"

using namespace brinkmann;

namespace {

ChartPoint at(std::vector<double> c) {
  ChartPoint p;
  p.coords = std::move(c);
  return p;
}

double circle_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, 1.0 - d);
}

double suspension_lambda() { return (3.0 + std::sqrt(5.0)) / 2.0; }

}  // namespace

TEST_CASE("V-flow on the Rosen torus is a translation in v") {
  const auto rt = build("rosen_torus");
  const auto p = at({0.3, 0.2, 0.4, 0.7});
  FlowOptions o;
  const auto f = integrate_flow(rt, rt.V(), p, 2.35, o);
  CHECK(f.point.coords[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(circle_distance(f.point.coords[1], 0.55) < 1e-10);
  CHECK(f.point.coords[2] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK((f.jacobian - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(f.deck_letters >= 2);
}

TEST_CASE("minkowski d/dv is a straight line") {
  const auto m = build("minkowski");
  const auto f = integrate_flow(m, m.V(), at({0.1, -0.5, 0.2, 0.3}), 7.0);
  CHECK(f.point.coords[1] == doctest::Approx(6.5).epsilon(1e-12));
  CHECK((f.jacobian - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("suspension twist stretches by lambda per period") {
  const auto s = build("suspension_anosov");
  const double lambda = suspension_lambda();
  const auto f = integrate_flow(s, s.V(), at({0.1, 0.2, 0.3}), 10.0);
  const double norm = operator_norm(f.jacobian);
  CHECK(std::abs(norm / std::pow(lambda, 10) - 1.0) < 0.02);
  // the contracting direction shrinks by the same factor
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.jacobian);
  CHECK(std::abs(svd.singularValues().minCoeff() * std::pow(lambda, 10) - 1.0) < 0.02);
}

TEST_CASE("flow group law on the Rosen torus") {
  const auto rt = build("rosen_torus");
  const auto X = VectorField::parse({"0.3", "sin(2*pi*z1)", "cos(2*pi*v)+0.5", "0.2*sin(2*pi*u)"}, rt.spec().coords);
  auto rng = trial_stream(21, 0);
  for (int i = 0; i < 5; ++i) {
    const auto p = at({uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)});
    const double s = uniform(rng, 0.5, 3.0);
    const double t = uniform(rng, 0.5, 3.0);
    const auto whole = integrate_flow(rt, X, p, s + t);
    const auto first = integrate_flow(rt, X, p, t);
    const auto second = integrate_flow(rt, X, first.point, s);
    for (int k = 0; k < 4; ++k) CHECK(circle_distance(whole.point.coords[k], second.point.coords[k]) < 1e-7);
    const Eigen::MatrixXd chained = second.jacobian * first.jacobian;
    CHECK((chained - whole.jacobian).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + whole.jacobian.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("Killing flows preserve the Gram matrix") {
  const auto m = build("minkowski");
  const auto rot = VectorField::parse({"0", "0", "-x2", "x1"}, m.spec().coords);
  const auto boost = VectorField::parse({"u", "-v", "0", "0"}, m.spec().coords);
  const std::vector<double> origin(4, 0.0);
  const auto gv = m.metric().values(origin);
  const Eigen::MatrixXd G = Eigen::Map<const Eigen::MatrixXd>(gv.data(), 4, 4);
  for (const auto* X : {&rot, &boost}) {
    const auto f = integrate_flow(m, *X, at({0.2, 0.1, 0.5, -0.3}), 1.7);
    const Eigen::MatrixXd pulled = f.jacobian.transpose() * G * f.jacobian;
    CHECK((pulled - G).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("equicontinuity classification") {
  SUBCASE("rosen V is bounded") {
    const auto rt = build("rosen_torus");
    const auto r = equicontinuity_diagnostic(rt, rt.V(), 20, 50.0, 1);
    CHECK(r.classification == FlowClass::Bounded);
    CHECK(r.failures == 0);
    CHECK(r.max_log_norm < 1e-10);
  }
  SUBCASE("suspension V grows at log lambda") {
    const auto s = build("suspension_anosov");
    const auto r = equicontinuity_diagnostic(s, s.V(), 20, 20.0, 1);
    CHECK(r.classification == FlowClass::ExponentialGrowth);
    CHECK(r.fitted_rate == doctest::Approx(std::log(suspension_lambda())).epsilon(0.05));
  }
  SUBCASE("timelike translation on minkowski is bounded") {
    const auto m = build("minkowski");
    const auto X = VectorField::parse({"1", "-1", "0", "0"}, m.spec().coords);
    CHECK(equicontinuity_diagnostic(m, X, 10, 20.0, 3).classification == FlowClass::Bounded);
  }
  SUBCASE("verdict does not depend on the sample count") {
    const auto s = build("suspension_anosov");
    const auto rt = build("rosen_torus");
    CHECK(equicontinuity_diagnostic(s, s.V(), 50, 20.0, 5).classification ==
          equicontinuity_diagnostic(s, s.V(), 200, 20.0, 5).classification);
    CHECK(equicontinuity_diagnostic(rt, rt.V(), 50, 20.0, 5).classification ==
          equicontinuity_diagnostic(rt, rt.V(), 200, 20.0, 5).classification);
  }
  SUBCASE("report times cover the horizon") {
    const auto rt = build("rosen_torus");
    EquicontinuityOptions o;
    o.grid = 40;
    const auto r = equicontinuity_diagnostic(rt, rt.V(), 4, 10.0, 2, o);
    REQUIRE(r.times.size() == 41);
    CHECK(r.times.front() == 0.0);
    CHECK(r.times.back() == doctest::Approx(10.0));
    CHECK(r.mean_log_norm.size() == r.times.size());
  }
}

TEST_CASE("leaving the domain is a DomainError") {
  const auto hp = build("half_plane");
  const auto X = VectorField::constant({0.0, -1.0});
  CHECK_THROWS_AS(integrate_flow(hp, X, at({0.5, 1.0}), 100.0), DomainError);
}
