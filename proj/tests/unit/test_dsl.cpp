#include "doctest.h"

#include <cmath>
#include <random>
#include <string>

#include "brinkmann/errors.hpp"
#include "brinkmann/expr.hpp"
#include "brinkmann/sampling.hpp"
#include "brinkmann/spec.hpp"

using namespace brinkmann;
using dsl::EvalMode;
using dsl::eval_expr;
using dsl::parse_expr;

namespace {

const std::vector<std::string> kCoords = {"u", "v", "x1"};

// Random smooth expression over x1, x2 with bounded arguments.
std::string random_expr(std::mt19937_64& rng, int depth) {
  const auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  if (depth == 0 || pick(4) == 0) {
    switch (pick(3)) {
      case 0: return "x1";
      case 1: return "x2";
      default: return std::to_string(1 + pick(5)) + "." + std::to_string(pick(10));
    }
  }
  const std::string a = random_expr(rng, depth - 1);
  const std::string b = random_expr(rng, depth - 1);
  switch (pick(9)) {
    case 0: return "(" + a + ") + (" + b + ")";
    case 1: return "(" + a + ") - (" + b + ")";
    case 2: return "(" + a + ") * (" + b + ")";
    case 3: return "(" + a + ") / (2 + sin(" + b + "))";
    case 4: return "sin(" + a + ")";
    case 5: return "cos(" + a + ")";
    case 6: return "exp(tanh(" + a + "))";
    case 7: return "sqrt(1 + (" + a + ")^2)";
    default: return "-(" + a + ")^2";
  }
}

}  // namespace

TEST_CASE("arithmetic and precedence") {
  const auto e = parse_expr("2*u + sin(x1)", kCoords);
  const double x[] = {0.5, 0.0, 0.0};
  CHECK(eval_expr(e, x).value == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<std::string> c = {"x"};
  const double two[] = {2.0};
  CHECK(eval_expr(parse_expr("-x^2", c), two).value == -4.0);
  CHECK(eval_expr(parse_expr("2^3^2", c), two).value == 512.0);
  CHECK(eval_expr(parse_expr("8/2/2", c), two).value == 2.0);
  CHECK(eval_expr(parse_expr("1 - 2 - 3", c), two).value == -4.0);
  CHECK(eval_expr(parse_expr("x^-1", c), two).value == 0.5);
  CHECK(eval_expr(parse_expr("2*pi", c), two).value == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("dual mode gives exact partials") {
  const auto e = parse_expr("x1^2", kCoords);
  const double x[] = {0.0, 0.0, 3.0};
  const auto j = eval_expr(e, x, EvalMode::all_partials());
  CHECK(j.value == 9.0);
  REQUIRE(j.partials.size() == 3);
  CHECK(j.partials[2] == 6.0);
  CHECK(j.partials[0] == 0.0);

  const std::vector<std::string> c = {"x1", "x2"};
  const auto cp = parse_expr("1/(x1*x1 + x2*x2)", c);
  const double p[] = {1.0, 0.0};
  const auto jc = eval_expr(cp, p, EvalMode::all_partials());
  CHECK(jc.value == 1.0);
  CHECK(jc.partials[0] == -2.0);
  CHECK(jc.partials[1] == 0.0);
}

TEST_CASE("directional dual mode only fills requested directions") {
  const std::vector<std::string> c = {"x1", "x2"};
  const auto e = parse_expr("x1*x2", c);
  const double p[] = {2.0, 3.0};
  const auto j = eval_expr(e, p, EvalMode{true, {1}});
  CHECK(j.partials[1] == 2.0);
  CHECK(j.partials[0] == 0.0);
}

TEST_CASE("constants have zero partials") {
  const auto e = parse_expr("7", kCoords);
  const double x[] = {0.3, -1.0, 2.0};
  const auto j = eval_expr(e, x, EvalMode::all_partials());
  CHECK(j.value == 7.0);
  for (double d : j.partials) CHECK(d == 0.0);
}

TEST_CASE("syntax errors carry byte offsets") {
  try {
    parse_expr("2*+u", kCoords);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse_expr("(u", kCoords), ParseError);
  CHECK_THROWS_AS(parse_expr("u u", kCoords), ParseError);
  CHECK_THROWS_AS(parse_expr("", kCoords), ParseError);
  CHECK_THROWS_AS(parse_expr("sin u", kCoords), ParseError);
}

TEST_CASE("unknown identifiers are named") {
  try {
    parse_expr("u + w7", kCoords);
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifierError& e) {
    CHECK(e.name() == "w7");
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse_expr("foo(u)", kCoords), UnknownIdentifierError);
}

TEST_CASE("evaluation errors") {
  const std::vector<std::string> c = {"x1", "x2"};
  const double origin[] = {0.0, 0.0};
  CHECK_THROWS_AS(eval_expr(parse_expr("1/(x1*x1 + x2*x2)", c), origin), EvalError);
  CHECK_THROWS_AS(eval_expr(parse_expr("log(x1)", c), origin), EvalError);
  const double neg[] = {-1.0, 0.0};
  CHECK_THROWS_AS(eval_expr(parse_expr("sqrt(x1)", c), neg), EvalError);
  CHECK_THROWS_AS(eval_expr(parse_expr("x1^0.5", c), neg), EvalError);
  CHECK(eval_expr(parse_expr("x1^3", c), neg).value == -1.0);
}

TEST_CASE("print and re-parse round trip on random expressions") {
  const std::vector<std::string> c = {"x1", "x2"};
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 1000; ++i) {
    const auto e = parse_expr(random_expr(rng, 4), c);
    const auto back = parse_expr(e.to_string(), c);
    REQUIRE(e.structurally_equal(back));
  }
}

TEST_CASE("dual partials match central differences on random expressions") {
  const std::vector<std::string> c = {"x1", "x2"};
  std::mt19937_64 rng(777);
  const double h = 1e-6;
  for (int i = 0; i < 300; ++i) {
    const auto e = parse_expr(random_expr(rng, 3), c);
    double p[] = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
    const auto j = eval_expr(e, p, EvalMode::all_partials());
    for (int k = 0; k < 2; ++k) {
      double hi[] = {p[0], p[1]};
      double lo[] = {p[0], p[1]};
      hi[k] += h;
      lo[k] -= h;
      const double fd = (eval_expr(e, hi).value - eval_expr(e, lo).value) / (2 * h);
      CHECK(std::abs(fd - j.partials[static_cast<std::size_t>(k)]) <=
            1e-6 * std::max(1.0, std::abs(j.partials[static_cast<std::size_t>(k)])));
    }
  }
}

TEST_CASE("spec documents") {
  SUBCASE("minkowski 3d has constant coefficients") {
    const auto spec = load_spacetime_spec(R"J({"chart_kind": "brinkmann", "coordinates": ["u","v","x1"],
                                              "coefficients": {}})J");
    const auto g = build_metric_field(spec);
    const double x[] = {0.3, 0.1, -2.0};
    const auto vals = g.values(x);
    CHECK(vals == std::vector<double>{0, 1, 0, 1, 0, 0, 0, 0, 1});
  }
  SUBCASE("rosen exp(2u)J") {
    const auto spec = load_spacetime_spec(R"J({"chart_kind": "rosen", "coordinates": ["u","v","x1"],
                                              "coefficients": {"g_11": "exp(2*u)"}})J");
    const double x[] = {0.0, 0.0, 0.0};
    CHECK(build_metric_field(spec).values(x)[8] == 1.0);
  }
  SUBCASE("rosen rejects H") {
    try {
      load_spacetime_spec(R"J({"chart_kind": "rosen", "coordinates": ["u","v","x1"],
                              "coefficients": {"H": "u"}})J");
      FAIL("expected a schema violation");
    } catch (const SchemaError& e) {
      CHECK(e.path() == "/coefficients/H");
      CHECK(std::string(e.what()).find("'H'") != std::string::npos);
    }
  }
  SUBCASE("v dependence rejected") {
    CHECK_THROWS_AS(load_spacetime_spec(R"J({"chart_kind": "brinkmann", "coordinates": ["u","v","x1"],
                                            "coefficients": {"H": "v*x1"}})J"),
                    SchemaError);
  }
  SUBCASE("parse errors carry the field path") {
    try {
      load_spacetime_spec(R"J({"chart_kind": "brinkmann", "coordinates": ["u","v","x1"],
                              "coefficients": {"H": "2*+u"}})J");
      FAIL("expected a schema violation");
    } catch (const SchemaError& e) {
      CHECK(e.path() == "/coefficients/H");
    }
  }
  SUBCASE("non-invertible deck") {
    CHECK_THROWS_AS(load_spacetime_spec(R"J({"chart_kind": "general", "coordinates": ["x","y"],
                                            "coefficients": {"g_x_y": "1"},
                                            "deck": [{"linear": [[1,0],[0,0]], "translation": [0,0]}]})J"),
                    SchemaError);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(load_spacetime_spec(R"J({"chart_kind": "brinkmann", "coordinates": ["u","v","x1"],
                                            "coefficients": {"g_22": "1"}})J"),
                    SchemaError);
    CHECK_THROWS_AS(load_spacetime_spec(R"J({"chart_kind": "general", "coordinates": ["x","y"],
                                            "coefficients": {}, "V": ["1"]})J"),
                    SchemaError);
  }
  SUBCASE("unknown fields and bad coordinate names") {
    CHECK_THROWS_AS(load_spacetime_spec(R"J({"chart_kind": "general", "coordinates": ["x","y"],
                                            "coefficients": {}, "extra": 1})J"),
                    SchemaError);
    CHECK_THROWS_AS(load_spacetime_spec(R"J({"chart_kind": "general", "coordinates": ["x","sin"],
                                            "coefficients": {}})J"),
                    SchemaError);
    CHECK_THROWS_AS(load_spacetime_spec(R"J({"chart_kind": "brinkmann", "coordinates": ["v","u","x1"],
                                            "coefficients": {}})J"),
                    SchemaError);
  }
}
