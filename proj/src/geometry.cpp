#include "brinkmann/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brinkmann/errors.hpp"
#include "brinkmann/linalg.hpp"

namespace brinkmann {

namespace {

std::size_t idx2(int n, int a, int b) { return static_cast<std::size_t>(a * n + b); }
std::size_t idx3(int n, int c, int a, int b) { return static_cast<std::size_t>((c * n + a) * n + b); }

template <class T>
std::vector<T> seed_variables(std::span<const double> x, int n) {
  std::vector<T> vars(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) vars[static_cast<std::size_t>(i)] = make_variable<T>(x[static_cast<std::size_t>(i)], i, n);
  return vars;
}

/// Gamma^c_ab from the inverse metric and first partials (dg at (c,a,b) = d_c g_ab).
template <class T>
void christoffel_from(int n, std::span<const T> ginv, std::span<const T> dg, std::span<T> gamma) {
  thread_local std::vector<T> lowered;
  lowered.assign(static_cast<std::size_t>(n * n * n), T(0.0));
  for (int d = 0; d < n; ++d) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const T v = 0.5 * (dg[idx3(n, a, b, d)] + dg[idx3(n, b, a, d)] - dg[idx3(n, d, a, b)]);
        lowered[idx3(n, d, a, b)] = v;
        lowered[idx3(n, d, b, a)] = v;
      }
    }
  }
  for (int c = 0; c < n; ++c) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        T acc(0.0);
        for (int d = 0; d < n; ++d) {
          const T& gi = ginv[idx2(n, c, d)];
          if (value_of(gi) == 0.0 && std::is_same_v<T, double>) continue;
          acc = acc + gi * lowered[idx3(n, d, a, b)];
        }
        gamma[idx3(n, c, a, b)] = acc;
        gamma[idx3(n, c, b, a)] = acc;
      }
    }
  }
}

}  // namespace

const char* to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::Brinkmann:
      return "brinkmann";
    case ChartKind::Rosen:
      return "rosen";
    case ChartKind::General:
      return "general";
  }
  return "general";
}

double CurvatureAt::bianchi_residual() const {
  double worst = 0.0;
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          worst = std::max(worst, std::abs((*this)(d, a, b, c) + (*this)(d, b, c, a) + (*this)(d, c, a, b)));
  return worst;
}

std::vector<double> CurvatureAt::lowered(const Eigen::MatrixXd& g) const {
  std::vector<double> out(riemann.size(), 0.0);
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double acc = 0.0;
          for (int e = 0; e < n; ++e) acc += g(d, e) * (*this)(e, a, b, c);
          out[static_cast<std::size_t>(((d * n + a) * n + b) * n + c)] = acc;
        }
  return out;
}

// ---------------------------------------------------------------------------
// MetricField

MetricField::MetricField(ChartKind kind, int dim, std::vector<Entry> entries, std::vector<dsl::Program> domain)
    : kind_(kind), dim_(dim), entries_(std::move(entries)), domain_(std::move(domain)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw DomainError("metric dimension out of range");
}

bool MetricField::contains(std::span<const double> x) const { return domain_margin(x) > 0.0; }

double MetricField::domain_margin(std::span<const double> x) const {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& c : domain_) {
    double v = 0.0;
    try {
      v = c.eval<double>(x);
    } catch (const EvalError&) {
      return -1.0;
    }
    if (!std::isfinite(v)) return -1.0;
    margin = std::min(margin, v);
  }
  return margin;
}

void MetricField::require_inside(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw DomainError("point has wrong dimension");
  if (!domain_.empty() && !contains(x)) throw DomainError("point outside the chart domain");
}

template <class T>
void MetricField::evaluate(std::span<const T> x, std::span<T> g) const {
  std::fill(g.begin(), g.end(), T(0.0));
  for (const Entry& e : entries_) {
    T v = e.program.is_constant() ? T(e.program.constant_value()) : e.program.eval<T>(x);
    if (e.scale != 1.0) v = e.scale * v;
    g[idx2(dim_, e.a, e.b)] = g[idx2(dim_, e.a, e.b)] + v;
    if (e.a != e.b) g[idx2(dim_, e.b, e.a)] = g[idx2(dim_, e.a, e.b)];
  }
}

template void MetricField::evaluate<double>(std::span<const double>, std::span<double>) const;
template void MetricField::evaluate<Dual1>(std::span<const Dual1>, std::span<Dual1>) const;
template void MetricField::evaluate<Dual2>(std::span<const Dual2>, std::span<Dual2>) const;

std::vector<double> MetricField::values(std::span<const double> x) const {
  require_inside(x);
  std::vector<double> g(static_cast<std::size_t>(dim_ * dim_));
  evaluate<double>(x, g);
  return g;
}

MetricJet MetricField::jet(std::span<const double> x) const {
  require_inside(x);
  const int n = dim_;
  const auto vars = seed_variables<Dual1>(x, n);
  std::vector<Dual1> g(static_cast<std::size_t>(n * n));
  evaluate<Dual1>(vars, g);
  MetricJet out;
  out.n = n;
  out.g.resize(static_cast<std::size_t>(n * n));
  out.dg.resize(static_cast<std::size_t>(n * n * n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Dual1& v = g[idx2(n, a, b)];
      out.g[idx2(n, a, b)] = v.v;
      for (int c = 0; c < n; ++c) out.dg[idx3(n, c, a, b)] = c < v.n ? v.d[static_cast<std::size_t>(c)] : 0.0;
    }
  return out;
}

template <class T>
std::vector<T> MetricField::inverse_of(std::span<const T> g) const {
  const int n = dim_;
  if (kind_ == ChartKind::General || n < 2) return linalg::inverse<T>(g, n);
  // g = [[H, 1, w^T], [1, 0, 0], [w, 0, h]]  =>
  // g^-1 = [[0, 1, 0], [1, -H + w^T h^-1 w, -(h^-1 w)^T], [0, -h^-1 w, h^-1]]
  const int m = n - 2;
  std::vector<T> inv(static_cast<std::size_t>(n * n), T(0.0));
  inv[idx2(n, 0, 1)] = T(1.0);
  inv[idx2(n, 1, 0)] = T(1.0);
  T vv = -g[idx2(n, 0, 0)];
  if (m > 0) {
    std::vector<T> h(static_cast<std::size_t>(m * m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) h[idx2(m, i, j)] = g[idx2(n, i + 2, j + 2)];
    const std::vector<T> hinv = linalg::inverse<T>(h, m);
    std::vector<T> hw(static_cast<std::size_t>(m), T(0.0));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) hw[static_cast<std::size_t>(i)] = hw[static_cast<std::size_t>(i)] + hinv[idx2(m, i, j)] * g[idx2(n, 0, j + 2)];
    for (int i = 0; i < m; ++i) {
      vv = vv + g[idx2(n, 0, i + 2)] * hw[static_cast<std::size_t>(i)];
      inv[idx2(n, 1, i + 2)] = -hw[static_cast<std::size_t>(i)];
      inv[idx2(n, i + 2, 1)] = -hw[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) inv[idx2(n, i + 2, j + 2)] = hinv[idx2(m, i, j)];
    }
  }
  inv[idx2(n, 1, 1)] = vv;
  return inv;
}

template std::vector<double> MetricField::inverse_of<double>(std::span<const double>) const;
template std::vector<Dual1> MetricField::inverse_of<Dual1>(std::span<const Dual1>) const;

void MetricField::check_nondegenerate(std::span<const double> g) const {
  // On null charts det g = -det h exactly, so only the transverse block h matters.
  const int skip = kind_ == ChartKind::General ? 0 : 2;
  const int m = dim_ - skip;
  for (double v : g)
    if (!std::isfinite(v)) throw DegeneracyError("metric is not finite");
  if (m == 0) return;
  std::vector<double> block(static_cast<std::size_t>(m * m));
  double scale = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double v = g[idx2(dim_, i + skip, j + skip)];
      block[static_cast<std::size_t>(i * m + j)] = v;
      scale = std::max(scale, std::abs(v));
    }
  const double det = linalg::determinant(block, m);
  if (!std::isfinite(det) || std::abs(det) < 1e-12 * std::pow(scale, m) || scale == 0.0) {
    throw DegeneracyError("degenerate metric (|det| = " + std::to_string(std::abs(det)) + ")");
  }
}

double MetricField::inner(std::span<const double> x, std::span<const double> a, std::span<const double> b) const {
  const std::vector<double> g = values(x);
  double acc = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) acc += g[idx2(dim_, i, j)] * a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
  return acc;
}

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(const std::vector<dsl::Expr>& components) {
  programs_.reserve(components.size());
  for (const auto& e : components) programs_.emplace_back(e);
}

VectorField VectorField::constant(const std::vector<double>& components) {
  std::vector<dsl::Expr> exprs;
  exprs.reserve(components.size());
  for (double c : components) exprs.push_back(dsl::Expr::constant(c, {}));
  VectorField f(exprs);
  return f;
}

VectorField VectorField::coordinate(int index, int dim) {
  std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
  c.at(static_cast<std::size_t>(index)) = 1.0;
  return constant(c);
}

VectorField VectorField::parse(const std::vector<std::string>& components, const std::vector<std::string>& coords) {
  std::vector<dsl::Expr> exprs;
  exprs.reserve(components.size());
  for (const auto& s : components) exprs.push_back(dsl::parse_expr(s, coords));
  return VectorField(exprs);
}

bool VectorField::is_constant() const {
  return std::all_of(programs_.begin(), programs_.end(), [](const dsl::Program& p) { return p.is_constant(); });
}

std::vector<double> VectorField::value(std::span<const double> x) const {
  std::vector<double> out(programs_.size());
  for (std::size_t c = 0; c < programs_.size(); ++c)
    out[c] = programs_[c].is_constant() ? programs_[c].constant_value() : programs_[c].eval<double>(x);
  return out;
}

void VectorField::value_and_jacobian(std::span<const double> x, std::span<double> value, std::span<double> jac) const {
  const int n = dim();
  std::fill(jac.begin(), jac.end(), 0.0);
  if (is_constant()) {
    for (int c = 0; c < n; ++c) value[static_cast<std::size_t>(c)] = programs_[static_cast<std::size_t>(c)].constant_value();
    return;
  }
  const auto vars = seed_variables<Dual1>(x, n);
  for (int c = 0; c < n; ++c) {
    const auto& p = programs_[static_cast<std::size_t>(c)];
    if (p.is_constant()) {
      value[static_cast<std::size_t>(c)] = p.constant_value();
      continue;
    }
    const Dual1 r = p.eval<Dual1>(vars);
    value[static_cast<std::size_t>(c)] = r.v;
    for (int a = 0; a < r.n; ++a) jac[idx2(n, c, a)] = r.d[static_cast<std::size_t>(a)];
  }
}

// ---------------------------------------------------------------------------
// Operations

MetricSample eval_metric(const MetricField& field, const ChartPoint& p) {
  const std::vector<double> g = field.values(p.coords);
  field.check_nondegenerate(g);
  const int n = field.dim();
  MetricSample s;
  s.matrix = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(g.data(), n, n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.matrix, Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) {
    if (eig.eigenvalues()(i) < 0.0) ++s.negative_count;
    if (eig.eigenvalues()(i) > 0.0) ++s.positive_count;
  }
  return s;
}

void christoffel_into(const MetricField& field, std::span<const double> x, std::span<double> gamma) {
  const int n = field.dim();
  const auto nn = static_cast<std::size_t>(n * n);
  field.require_inside(x);
  thread_local std::vector<Dual1> vars, g;
  thread_local std::vector<double> gv, dg;
  vars.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) vars[static_cast<std::size_t>(i)] = make_variable<Dual1>(x[static_cast<std::size_t>(i)], i, n);
  g.resize(nn);
  field.evaluate<Dual1>(vars, g);
  gv.resize(nn);
  dg.assign(nn * static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Dual1& v = g[idx2(n, a, b)];
      gv[idx2(n, a, b)] = v.v;
      for (int c = 0; c < v.n; ++c) dg[idx3(n, c, a, b)] = v.d[static_cast<std::size_t>(c)];
    }
  field.check_nondegenerate(gv);
  const std::vector<double> ginv = field.inverse_of<double>(gv);
  christoffel_from<double>(n, ginv, dg, gamma);
}

ChristoffelAt christoffel(const MetricField& field, const ChartPoint& p) {
  ChristoffelAt out;
  out.n = field.dim();
  out.gamma.assign(static_cast<std::size_t>(out.n * out.n * out.n), 0.0);
  christoffel_into(field, p.coords, out.gamma);
  return out;
}

TangentVec covariant_derivative(const MetricField& field, const VectorField& x, const VectorField& y,
                                const ChartPoint& p) {
  const int n = field.dim();
  if (x.dim() != n || y.dim() != n) throw DomainError("vector field dimension does not match the metric");
  const ChristoffelAt gam = christoffel(field, p);
  const std::vector<double> xv = x.value(p.coords);
  std::vector<double> yv(static_cast<std::size_t>(n)), jac(static_cast<std::size_t>(n * n));
  y.value_and_jacobian(p.coords, yv, jac);
  TangentVec out;
  out.base = p;
  out.components.assign(static_cast<std::size_t>(n), 0.0);
  for (int c = 0; c < n; ++c) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
      acc += xv[static_cast<std::size_t>(a)] * jac[idx2(n, c, a)];
      for (int b = 0; b < n; ++b) acc += gam(c, a, b) * xv[static_cast<std::size_t>(a)] * yv[static_cast<std::size_t>(b)];
    }
    out.components[static_cast<std::size_t>(c)] = acc;
  }
  return out;
}

CurvatureAt curvature(const MetricField& field, const ChartPoint& p) {
  const int n = field.dim();
  field.require_inside(p.coords);
  const auto vars = seed_variables<Dual2>(p.coords, n);
  std::vector<Dual2> g(static_cast<std::size_t>(n * n));
  field.evaluate<Dual2>(vars, g);

  // Outer layer: value part carries (g, dg), derivative parts carry (dg, ddg).
  std::vector<Dual1> gv(static_cast<std::size_t>(n * n));
  std::vector<Dual1> dg(static_cast<std::size_t>(n * n * n), Dual1(0.0));
  std::vector<double> plain(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Dual2& v = g[idx2(n, a, b)];
      gv[idx2(n, a, b)] = v.v;
      plain[idx2(n, a, b)] = v.v.v;
      for (int c = 0; c < v.n; ++c) dg[idx3(n, c, a, b)] = v.d[static_cast<std::size_t>(c)];
    }
  field.check_nondegenerate(plain);
  const std::vector<Dual1> ginv = field.inverse_of<Dual1>(gv);
  std::vector<Dual1> gam(static_cast<std::size_t>(n * n * n));
  christoffel_from<Dual1>(n, ginv, dg, gam);

  auto G = [&](int c, int a, int b) -> double { return gam[idx3(n, c, a, b)].v; };
  auto dG = [&](int e, int c, int a, int b) -> double {
    const Dual1& v = gam[idx3(n, c, a, b)];
    return e < v.n ? v.d[static_cast<std::size_t>(e)] : 0.0;
  };

  CurvatureAt out;
  out.n = n;
  out.riemann.assign(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = b + 1; c < n; ++c) {
          double r = dG(b, d, c, a) - dG(c, d, b, a);
          for (int e = 0; e < n; ++e) r += G(d, b, e) * G(e, c, a) - G(d, c, e) * G(e, b, a);
          out.riemann[static_cast<std::size_t>(((d * n + a) * n + b) * n + c)] = r;
          out.riemann[static_cast<std::size_t>(((d * n + a) * n + c) * n + b)] = -r;
        }
  out.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int b = 0; b < n; ++b) acc += out(b, a, b, c);
      out.ricci(a, c) = acc;
    }
  // Symmetrize away rounding; the exact Ricci tensor of a Levi-Civita connection is symmetric.
  out.ricci = 0.5 * (out.ricci + out.ricci.transpose()).eval();
  return out;
}

}  // namespace brinkmann
