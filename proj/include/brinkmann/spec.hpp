#pragma once

// Spacetime specification documents (JSON) and their validation.
//
// Coefficient keys:
//   brinkmann  "H" (g_uu), "W_i" (coefficient of du dx^i, so g_{u x_i} = W_i / 2),
//              "g_ij" (transverse block, 1-based). Omitted transverse entries
//              default to the identity; g_uv = 1 is implicit.
//   rosen      "g_ij" only; g_uv = 1 is implicit.
//   general    "g_<a>_<b>" with coordinate names; omitted entries are 0.
// Brinkmann and Rosen coordinates are (u, v, transverse...), and no
// coefficient may depend on v.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "brinkmann/expr.hpp"
#include "brinkmann/geometry.hpp"

namespace brinkmann {

struct AffineMapSpec {
  Eigen::MatrixXd linear;
  Eigen::VectorXd translation;
};

/// One step of the reduction into the fundamental domain.
struct DomainReducer {
  enum class Kind { Shell, Slab, Lattice };
  Kind kind = Kind::Lattice;
  std::vector<int> axes;        // Shell: the two scaled axes; Slab: one axis; Lattice: translated axes
  std::vector<int> generators;  // deck generator indices (one for Shell/Slab)
  double ratio = 2.0;           // Shell: homothety ratio, domain 1 <= max|x_axes| < ratio
  double period = 1.0;          // Slab: domain 0 <= x_axis < period
};

struct CoefficientSpec {
  std::string key;
  std::string text;
  dsl::Expr expr;
};

struct SpacetimeSpec {
  std::string name;
  std::string description;
  ChartKind chart_kind = ChartKind::General;
  int dimension = 0;
  std::vector<std::string> coords;
  std::vector<CoefficientSpec> coefficients;
  std::vector<std::string> domain_text;
  std::vector<dsl::Expr> domain;  // each must be > 0
  std::vector<AffineMapSpec> deck;
  std::vector<DomainReducer> fundamental_domain;
  std::optional<std::vector<std::string>> v_text;
  std::optional<std::vector<dsl::Expr>> v_field;
  bool claims_brinkmann = false;
  bool claims_compact_quotient = false;
  bool check_deck_isometry = true;
  std::vector<double> sample_lower;
  std::vector<double> sample_upper;
  nlohmann::json document;
};

/// Validates and compiles a spacetime document. Throws SchemaError with the
/// JSON path of the offending field, ParseError for bad expressions.
SpacetimeSpec load_spacetime_json(const nlohmann::json& document);
SpacetimeSpec load_spacetime_spec(std::string_view text);

MetricField build_metric_field(const SpacetimeSpec& spec);

}  // namespace brinkmann
