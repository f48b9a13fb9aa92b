#include "doctest.h"

#include <cmath>
#include <limits>

#include "brinkmann/catalog.hpp"
#include "brinkmann/errors.hpp"
#include "brinkmann/spec.hpp"
#include "brinkmann/verify.hpp"

using namespace brinkmann;
using nlohmann::json;

namespace {

ChartPoint at(std::vector<double> c) {
  ChartPoint p;
  p.coords = std::move(c);
  return p;
}

TangentVec vec(const ChartPoint& p, std::vector<double> c) { return TangentVec{std::move(c), p}; }

Spacetime from_document(json doc) { return Spacetime(load_spacetime_json(doc)); }

// Flat 2du dv + dx^2 with a prescribed null field; no quotient.
Spacetime flat_with_V(const std::vector<std::string>& V) {
  return from_document({{"name", "flat"},
                        {"chart_kind", "brinkmann"},
                        {"coordinates", {"u", "v", "x1"}},
                        {"coefficients", json::object()},
                        {"V", V},
                        {"flags", {{"claims_brinkmann", false}, {"claims_compact_quotient", false}}},
                        {"sample_box", {{"lower", {-1, -1, -1}}, {"upper", {1, 1, 1}}}}});
}

// Minkowski in the chart (u, w, x) with v = exp(w), so V = d/dv = exp(-w) d/dw.
Spacetime exponential_chart() {
  return from_document({{"name", "minkowski_exp"},
                        {"chart_kind", "general"},
                        {"coordinates", {"u", "w", "x"}},
                        {"coefficients", {{"g_u_w", "exp(w)"}, {"g_x_x", "1"}}},
                        {"V", {"0", "exp(-w)", "0"}},
                        {"flags", {{"claims_brinkmann", true}, {"claims_compact_quotient", false}}},
                        {"sample_box", {{"lower", {-1, -1, -1}}, {"upper", {1, 1, 1}}}}});
}

const CheckResult& check_named(const BrinkmannCertificate& c, const std::string& name) {
  for (const auto& r : c.checks)
    if (r.name == name) return r;
  FAIL("missing check " << name);
  return c.checks.front();
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("certificates of the catalog") {
  for (const auto& k : catalog_keys()) {
    const auto s = build(k);
    if (!s.has_V()) continue;
    CAPTURE(k);
    const auto c = brinkmann_certificate(s);
    CHECK(c.checks.size() == 3);
    if (s.claims_brinkmann()) {
      CHECK(c.pass);
      CHECK(c.max_nabla_V < 1e-8);
      CHECK(c.max_g_VV < 1e-8);
      CHECK(c.max_d_alpha < 1e-8);
    }
  }
  SUBCASE("clifton_pohl_3d: null Killing, not parallel") {
    const auto c = brinkmann_certificate(build("clifton_pohl_3d"));
    CHECK_FALSE(c.pass);
    CHECK_FALSE(check_named(c, "parallel").pass);
    CHECK(c.max_nabla_V > 0.1);
    CHECK(check_named(c, "null").pass);
    CHECK(c.max_g_VV < 1e-12);
    CHECK(c.max_killing < 1e-8);
  }
  SUBCASE("suspension field is not null") {
    const auto c = brinkmann_certificate(build("suspension_anosov"));
    CHECK_FALSE(check_named(c, "null").pass);
    CHECK(c.max_g_VV == doctest::Approx(1.0));
  }
}

TEST_CASE("certificate residuals against hand-computed fields") {
  SUBCASE("x d/dv: not parallel, not closed") {
    const auto c = brinkmann_certificate(flat_with_V({"0", "x1", "0"}));
    CHECK(c.max_nabla_V == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.max_d_alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.max_killing == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.max_g_VV == 0.0);
    CHECK_FALSE(c.pass);
  }
  SUBCASE("u d/dv: closed but not parallel") {
    const auto c = brinkmann_certificate(flat_with_V({"0", "u", "0"}));
    CHECK(c.max_nabla_V == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.max_d_alpha < 1e-14);
    CHECK(c.max_killing == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(check_named(c, "closed").pass);
    CHECK_FALSE(check_named(c, "parallel").pass);
  }
  SUBCASE("parallel field in a curved chart") {
    const auto c = brinkmann_certificate(exponential_chart());
    CHECK(c.pass);
    CHECK(c.max_nabla_V < 1e-12);
  }
  SUBCASE("no V") {
    CHECK_THROWS_AS(brinkmann_certificate(build("clifton_pohl")), Error);
  }
}

TEST_CASE("totally geodesic surfaces in a pp-wave") {
  const auto pp = build("pp_wave", {{"H", "z1^3"}, {"n", "2"}});
  const auto p = at({0.1, 0.2, 0.3, -0.2});
  SUBCASE("V-planes") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto Q = random_transverse_to_V(pp, p, seed);
      const auto S = totally_geodesic_surface(pp, p, Q);
      CHECK(S.max_second_fundamental_form < 1e-6);
      CHECK(S.max_induced_curvature < 1e-6);
      REQUIRE(S.points.size() == 21u * 21u);
      // V = d/dv: each tau column is the sigma-geodesic shifted in v
      for (int i = 0; i < S.rows; ++i) {
        const auto& base = S.points[static_cast<std::size_t>(i * S.cols)].coords;
        const auto& last = S.points[static_cast<std::size_t>(i * S.cols + S.cols - 1)].coords;
        CHECK(last[1] - base[1] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(last[2] - base[2]) < 1e-12);
      }
      CHECK(std::isnan(S.second_fundamental_form.front()));
    }
  }
  SUBCASE("control planes bend") {
    int bent = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto [q1, q2] = random_control_plane(pp, p, seed);
      const auto S = ruled_surface(pp, p, q1, q2);
      if (S.max_second_fundamental_form > 1e-3) ++bent;
    }
    CHECK(bent == 5);
  }
  SUBCASE("grid refinement stays below the h^2 bound") {
    const auto Q = random_transverse_to_V(pp, p, 3);
    for (int m : {11, 21, 41}) {
      const double h = 1.0 / (m - 1);
      const auto S = totally_geodesic_surface(pp, p, Q, {}, {m, m});
      CHECK(S.max_second_fundamental_form <= 1e-4 * h * h);
    }
  }
  SUBCASE("Q parallel to V is rejected") {
    CHECK_THROWS_AS(totally_geodesic_surface(pp, p, vec(p, {0, 2, 0, 0})), Error);
  }
}

TEST_CASE("ruled surfaces in flat space are planes") {
  const auto m = build("minkowski");
  const auto p = at({0.1, 0.2, 0.3, 0.4});
  const auto S = ruled_surface(m, p, vec(p, {0.3, 0.1, 1, 0}), vec(p, {0, 0.5, 0.2, 1}));
  CHECK(S.max_second_fundamental_form < 1e-9);
  CHECK(S.max_induced_curvature < 1e-6);
  const auto& corner = S.points.back().coords;
  CHECK(dist(corner, {0.1 + 0.3, 0.2 + 0.1 + 0.5, 0.3 + 1 + 0.2, 0.4 + 1}) < 1e-9);
}

TEST_CASE("frames on E") {
  const auto rt = build("rosen_torus");
  const auto p = at({0.25, 0.1, 0.2, 0.3});
  const auto f = coordinate_frame_on_E(rt, p);
  REQUIRE(f.vectors.size() == 2);
  const auto c = check_frame(rt, f);
  CHECK(c.max_g_eV < 1e-14);
  CHECK(c.gram_residual < 1e-14);
  // g_11 = 2 + sin(pi/2) = 3 at u = 1/4
  CHECK(f.vectors[0].components[2] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(frame_on_E(rt, p, {{0, 1, 0, 0}, {0, 0, 1, 0}}), Error);
  CHECK_THROWS_AS(coordinate_frame_on_E(build("clifton_pohl"), at({1.5, 0.3})), Error);
}

TEST_CASE("frame transport along V") {
  SUBCASE("rosen torus") {
    const auto rt = build("rosen_torus");
    const auto f = coordinate_frame_on_E(rt, at({0.6, 0.4, 0.5, 0.5}));
    const auto r = frame_transport_along_V(rt, f, 3.7);
    CHECK(r.horizontality_residual < 1e-10);
    CHECK(r.check.gram_residual < 1e-10);
  }
  SUBCASE("curved chart of flat space") {
    const auto s = exponential_chart();
    const auto f = frame_on_E(s, at({0.2, 0.1, 0.3}), {{0.4, 0.3, 1.0}});
    const auto r = frame_transport_along_V(s, f, 1.5);
    CHECK(r.horizontality_residual < 1e-9);
    CHECK(r.check.gram_residual < 1e-9);
    // the orbit of V through (u, w) reaches v = exp(w) + t
    CHECK(r.frame.base.coords[1] == doctest::Approx(std::log(std::exp(0.1) + 1.5)).epsilon(1e-10));
  }
  SUBCASE("u-dependent pp-wave, forward and back") {
    const auto pp = build("pp_wave", {{"H", "u*z1^2 - z2^2"}, {"n", "2"}});
    const auto f = coordinate_frame_on_E(pp, at({0.3, 0.0, 0.5, -0.4}));
    const auto fwd = frame_transport_along_V(pp, f, 1.3);
    CHECK(fwd.horizontality_residual < 1e-10);
    CHECK(fwd.check.gram_residual < 1e-10);
    const auto back = frame_transport_along_V(pp, fwd.frame, -1.3);
    CHECK(dist(back.frame.base.coords, f.base.coords) < 1e-10);
    for (std::size_t i = 0; i < f.vectors.size(); ++i)
      CHECK(dist(back.frame.vectors[i].components, f.vectors[i].components) < 1e-10);
  }
}

TEST_CASE("pp-wave Ricci and the transverse Laplacian") {
  SUBCASE("harmonic profile is Ricci flat") {
    const auto r = ppwave_ricci_harmonic("z1^2 - z2^2 + u*z1*z2", 2, 50, 4);
    CHECK(r.max_ricci_residual < 1e-10);
    CHECK(r.ratio_samples == 0);
    CHECK(r.points.size() == 50);
  }
  SUBCASE("Ric_uu = -Laplacian H") {
    const auto r = ppwave_ricci_harmonic("z1^2 + sin(z2)*u + z3^4", 3, 50, 1);
    CHECK(r.ratio_samples > 40);
    CHECK(r.ratio_min == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(r.ratio_max == doctest::Approx(-1.0).epsilon(1e-8));
    // hand oracle for the Laplacian: 2 - u sin(z2) + 12 z3^2
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto& q = r.points[i];
      CHECK(r.laplacian[i] == doctest::Approx(2.0 - q[0] * std::sin(q[2]) + 12.0 * q[3] * q[3]).epsilon(1e-10));
    }
  }
  SUBCASE("needs two transverse dimensions") {
    CHECK_THROWS_AS(ppwave_ricci_harmonic("z1^2", 1), Error);
  }
}

TEST_CASE("transverse norm growth") {
  const auto rt = build("rosen_torus");
  NormGrowthOptions o;
  o.window_samples = 20;
  const auto fit = norm_growth_bound(rt, {1.0, 10.0}, 5, o);
  CHECK(fit.fitted);
  CHECK(fit.C > 0.0);
  CHECK(std::isfinite(fit.C));
  CHECK(fit.violations == 0);
  CHECK(fit.trials.size() == 10);
  o.fixed_C = fit.C;
  const auto check = norm_growth_bound(rt, {100.0}, 5, o);
  CHECK_FALSE(check.fitted);
  CHECK(check.C == fit.C);
  CHECK(check.violations == 0);
}

TEST_CASE("flat Rosen torus has no norm growth") {
  const auto flat = build("rosen_torus", {{"alpha", "1,0;0,1"}});
  const auto r = norm_growth_bound(flat, {1.0, 10.0}, 3);
  CHECK(r.C < 1e-9);
  CHECK(r.violations == 0);
}

TEST_CASE("norm growth needs a compact Rosen quotient") {
  CHECK_THROWS_AS(norm_growth_bound(build("pp_wave"), {1.0}, 1), Error);
  CHECK_THROWS_AS(norm_growth_bound(build("suspension_anosov"), {1.0}, 1), Error);
}
