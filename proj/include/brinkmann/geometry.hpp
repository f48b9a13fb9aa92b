#pragma once

// Chart-level pseudo-Riemannian primitives: metric evaluation with exact
// derivatives, Christoffel symbols, covariant derivatives and curvature.
//
// Index conventions (all arrays are row-major):
//   Gamma^c_ab      gamma[(c * n + a) * n + b]
//   R^d_abc         riemann[((d * n + a) * n + b) * n + c]
//                   = d_b Gamma^d_ca - d_c Gamma^d_ba + Gamma^d_be Gamma^e_ca - Gamma^d_ce Gamma^e_ba
//   Ric_ac          = R^b_abc

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "brinkmann/dual.hpp"
#include "brinkmann/expr.hpp"

namespace brinkmann {

enum class ChartKind { Brinkmann, Rosen, General };

const char* to_string(ChartKind kind);

struct ChartPoint {
  std::vector<double> coords;

  int dim() const { return static_cast<int>(coords.size()); }
};

struct TangentVec {
  std::vector<double> components;
  ChartPoint base;
};

struct MetricSample {
  Eigen::MatrixXd matrix;
  int negative_count = 0;
  int positive_count = 0;

  /// One sign differs from all others; either overall sign convention.
  bool lorentzian() const {
    const auto n = matrix.rows();
    return (negative_count == 1 && positive_count == n - 1) || (positive_count == 1 && negative_count == n - 1);
  }
};

/// Metric values and exact first partials at a point.
struct MetricJet {
  int n = 0;
  std::vector<double> g;   // g_ab
  std::vector<double> dg;  // d_c g_ab at (c * n + a) * n + b
};

struct ChristoffelAt {
  int n = 0;
  std::vector<double> gamma;

  double operator()(int c, int a, int b) const { return gamma[static_cast<std::size_t>((c * n + a) * n + b)]; }
};

struct CurvatureAt {
  int n = 0;
  std::vector<double> riemann;
  Eigen::MatrixXd ricci;

  double operator()(int d, int a, int b, int c) const {
    return riemann[static_cast<std::size_t>(((d * n + a) * n + b) * n + c)];
  }
  /// max |R^d_abc + R^d_bca + R^d_cab|
  double bianchi_residual() const;
  /// R_dabc = g_de R^e_abc
  std::vector<double> lowered(const Eigen::MatrixXd& g) const;
};

/// Symmetric bilinear form field on a chart, given by compiled coefficient
/// expressions. Brinkmann and Rosen charts order coordinates (u, v, x1, ...)
/// and keep g_uv = 1, g_vv = g_vi = 0, which gives an exact block inverse.
class MetricField {
 public:
  struct Entry {
    int a = 0;
    int b = 0;
    dsl::Program program;
    double scale = 1.0;
  };

  MetricField() = default;
  MetricField(ChartKind kind, int dim, std::vector<Entry> entries, std::vector<dsl::Program> domain);

  int dim() const { return dim_; }
  ChartKind kind() const { return kind_; }

  /// All domain constraints (expressions required to be > 0) hold at x.
  bool contains(std::span<const double> x) const;
  /// Smallest constraint value at x (+inf without constraints).
  double domain_margin(std::span<const double> x) const;
  void require_inside(std::span<const double> x) const;

  template <class T>
  void evaluate(std::span<const T> x, std::span<T> g) const;

  std::vector<double> values(std::span<const double> x) const;
  MetricJet jet(std::span<const double> x) const;

  /// Inverse metric; uses the exact block formula on Brinkmann/Rosen charts.
  template <class T>
  std::vector<T> inverse_of(std::span<const T> g) const;

  /// Throws DegeneracyError when |det g| < 1e-12 (max |g_ab|)^n; on null
  /// charts the test applies to the transverse block.
  void check_nondegenerate(std::span<const double> g) const;

  double inner(std::span<const double> x, std::span<const double> a, std::span<const double> b) const;

 private:
  ChartKind kind_ = ChartKind::General;
  int dim_ = 0;
  std::vector<Entry> entries_;
  std::vector<dsl::Program> domain_;
};

/// Smooth vector field on a chart with exact Jacobian.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const std::vector<dsl::Expr>& components);

  static VectorField constant(const std::vector<double>& components);
  static VectorField coordinate(int index, int dim);
  static VectorField parse(const std::vector<std::string>& components, const std::vector<std::string>& coords);

  int dim() const { return static_cast<int>(programs_.size()); }
  bool empty() const { return programs_.empty(); }
  bool is_constant() const;

  std::vector<double> value(std::span<const double> x) const;
  /// jac[c * n + a] = d_a X^c
  void value_and_jacobian(std::span<const double> x, std::span<double> value, std::span<double> jac) const;

 private:
  std::vector<dsl::Program> programs_;
};

MetricSample eval_metric(const MetricField& field, const ChartPoint& p);

ChristoffelAt christoffel(const MetricField& field, const ChartPoint& p);
/// Allocation-light variant used by the integrators; `gamma` has n^3 entries.
void christoffel_into(const MetricField& field, std::span<const double> x, std::span<double> gamma);

/// (nabla_X Y)^c = X^a d_a Y^c + Gamma^c_ab X^a Y^b at p.
TangentVec covariant_derivative(const MetricField& field, const VectorField& x, const VectorField& y,
                                const ChartPoint& p);

CurvatureAt curvature(const MetricField& field, const ChartPoint& p);

}  // namespace brinkmann
