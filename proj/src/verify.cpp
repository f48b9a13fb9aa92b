#include "brinkmann/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brinkmann/catalog.hpp"
#include "brinkmann/dynamics.hpp"
#include "brinkmann/errors.hpp"
#include "brinkmann/ode.hpp"
#include "brinkmann/sampling.hpp"

namespace brinkmann {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Vec = std::vector<double>;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double gdot(const Vec& g, int n, std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += a[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i * n + j)] * b[static_cast<std::size_t>(j)];
  return s;
}

/// Max |(nabla_a V)^c| at x.
double nabla_V_at(const Spacetime& s, std::span<const double> x) {
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  Vec gamma(un * un * un), v(un), jac(un * un);
  christoffel_into(s.metric(), x, gamma);
  s.V().value_and_jacobian(x, v, jac);
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      double acc = jac[static_cast<std::size_t>(c * n + a)];
      for (int b = 0; b < n; ++b) acc += gamma[static_cast<std::size_t>((c * n + a) * n + b)] * v[static_cast<std::size_t>(b)];
      worst = std::max(worst, std::abs(acc));
    }
  return worst;
}

/// Vector Z with g(Z, V) = 1, used to project into V^perp.
Vec transversal(const Vec& g, int n, const Vec& V) {
  Vec alpha(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) alpha[static_cast<std::size_t>(a)] += g[static_cast<std::size_t>(a * n + b)] * V[static_cast<std::size_t>(b)];
  int k = 0;
  for (int a = 1; a < n; ++a)
    if (std::abs(alpha[static_cast<std::size_t>(a)]) > std::abs(alpha[static_cast<std::size_t>(k)])) k = a;
  if (std::abs(alpha[static_cast<std::size_t>(k)]) < 1e-12) throw Error("V is zero or g(V, .) vanishes");
  Vec z(static_cast<std::size_t>(n), 0.0);
  z[static_cast<std::size_t>(k)] = 1.0 / alpha[static_cast<std::size_t>(k)];
  return z;
}

void project_to_V_perp(const Vec& g, int n, const Vec& V, const Vec& Z, Vec& w) {
  const double a = gdot(g, n, w, V);
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] -= a * Z[static_cast<std::size_t>(i)];
}

/// Runs y' = rhs(y) and records y at each of the ascending `times`.
std::vector<Vec> integrate_to_grid(const DormandPrince45::Rhs& rhs, Vec y0, const Vec& times, const OdeOptions& opt,
                                   const char* what) {
  DormandPrince45 dp(rhs, opt);
  dp.reset(0.0, std::move(y0));
  std::vector<Vec> out;
  out.reserve(times.size());
  for (double t : times) {
    while (dp.t() < t) {
      if (dp.step(t) == DormandPrince45::Status::StepTooSmall)
        throw DomainError(std::string(what) + " failed at parameter " + std::to_string(dp.t()) + ": " + dp.last_error());
    }
    out.push_back(dp.y());
  }
  return out;
}

OdeOptions surface_ode() { return OdeOptions{1e-12, 1e-14, 1e-14, 0.05, 0.0}; }

Vec linspace(double length, int count) {
  Vec t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) t[static_cast<std::size_t>(i)] = length * i / (count - 1);
  return t;
}

/// Geodesic from x0 with velocity q, transporting y along it. Returns rows
/// (x, xdot, Y) at the sigma grid.
std::vector<Vec> geodesic_with_transport(const Spacetime& s, const Vec& x0, const Vec& q, const Vec& y, const Vec& sigma) {
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  Vec state(x0);
  state.insert(state.end(), q.begin(), q.end());
  state.insert(state.end(), y.begin(), y.end());
  Vec gamma(un * un * un);
  auto rhs = [&s, n, un, gamma](double, std::span<const double> st, std::span<double> d) mutable {
    const auto x = st.subspan(0, un);
    if (!s.metric().contains(x)) throw DomainError("geodesic left the chart domain");
    geodesic_rhs(s, st.subspan(0, 2 * un), d.subspan(0, 2 * un), gamma);
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          acc += gamma[static_cast<std::size_t>((c * n + a) * n + b)] * st[un + static_cast<std::size_t>(a)] *
                 st[2 * un + static_cast<std::size_t>(b)];
      d[2 * un + static_cast<std::size_t>(c)] = -acc;
    }
  };
  return integrate_to_grid(rhs, state, sigma, surface_ode(), "geodesic");
}

std::vector<Vec> geodesic_points(const Spacetime& s, const Vec& x0, const Vec& q, const Vec& tau) {
  const auto un = static_cast<std::size_t>(s.dim());
  Vec state(x0);
  state.insert(state.end(), q.begin(), q.end());
  Vec gamma(un * un * un);
  auto rhs = [&s, un, gamma](double, std::span<const double> st, std::span<double> d) mutable {
    if (!s.metric().contains(st.subspan(0, un))) throw DomainError("geodesic left the chart domain");
    geodesic_rhs(s, st, d, gamma);
  };
  auto rows = integrate_to_grid(rhs, state, tau, surface_ode(), "geodesic");
  for (auto& r : rows) r.resize(un);
  return rows;
}

std::vector<Vec> flow_points(const Spacetime& s, const VectorField& X, const Vec& x0, const Vec& tau) {
  const auto un = static_cast<std::size_t>(s.dim());
  auto rhs = [&s, &X, un](double, std::span<const double> st, std::span<double> d) {
    if (!s.metric().contains(st)) throw DomainError("flow left the chart domain");
    const auto v = X.value(st);
    std::copy(v.begin(), v.end(), d.begin());
  };
  auto rows = integrate_to_grid(rhs, x0, tau, surface_ode(), "flow");
  for (auto& r : rows) r.resize(un);
  return rows;
}

/// Normal part of w relative to span{x1, x2}, measured in a complement
/// spanned by the g-orthogonal complement of the plane where it is
/// transverse, filled up with coordinate vectors (degenerate planes).
class NormalProjector {
 public:
  NormalProjector(const Vec& g, int n, const Vec& x1, const Vec& x2) : n_(n) {
    Eigen::MatrixXd G = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(g.data(), n, n);
    Eigen::MatrixXd T(n, 2);
    for (int i = 0; i < n; ++i) {
      T(i, 0) = x1[static_cast<std::size_t>(i)];
      T(i, 1) = x2[static_cast<std::size_t>(i)];
    }
    Eigen::MatrixXd constraint = T.transpose() * G;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(constraint);
    Eigen::MatrixXd kernel = lu.kernel();

    basis_.resize(n, n);
    Eigen::MatrixXd ortho(n, n);
    int count = 0;
    auto offer = [&](Eigen::VectorXd c) {
      if (count == n) return;
      const double len = c.norm();
      if (len == 0.0) return;
      c /= len;
      Eigen::VectorXd r = c;
      for (int k = 0; k < count; ++k) r -= ortho.col(k).dot(r) * ortho.col(k);
      if (r.norm() < 1e-6) return;
      basis_.col(count) = c;
      ortho.col(count) = r / r.norm();
      ++count;
    };
    offer(T.col(0));
    offer(T.col(1));
    if (count < 2) throw Error("surface tangents are linearly dependent");
    for (int k = 0; k < kernel.cols(); ++k) offer(kernel.col(k));
    for (int k = 0; k < n; ++k) offer(Eigen::VectorXd::Unit(n, k));
    qr_.compute(basis_);
  }

  double normal_norm(const Vec& w) const {
    const Eigen::VectorXd c = qr_.solve(Eigen::Map<const Eigen::VectorXd>(w.data(), n_));
    Eigen::VectorXd normal = Eigen::VectorXd::Zero(n_);
    for (int k = 2; k < n_; ++k) normal += c(k) * basis_.col(k);
    return normal.norm();
  }

 private:
  int n_;
  Eigen::MatrixXd basis_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
};

/// R(X, Y) Z with R^d_abc Z^a X^b Y^c.
Vec curvature_apply(const CurvatureAt& R, const Vec& X, const Vec& Y, const Vec& Z) {
  const int n = R.n;
  Vec out(static_cast<std::size_t>(n), 0.0);
  for (int d = 0; d < n; ++d) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
      if (Z[static_cast<std::size_t>(a)] == 0.0) continue;
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          acc += R(d, a, b, c) * Z[static_cast<std::size_t>(a)] * X[static_cast<std::size_t>(b)] * Y[static_cast<std::size_t>(c)];
    }
    out[static_cast<std::size_t>(d)] = acc;
  }
  return out;
}

// Fourth-order central stencils.
constexpr double kD1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
constexpr double kD2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};

SurfacePatch analyze(const Spacetime& s, std::vector<Vec> points, const Vec& sigma, const Vec& tau) {
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  SurfacePatch patch;
  patch.rows = static_cast<int>(sigma.size());
  patch.cols = static_cast<int>(tau.size());
  patch.sigma = sigma;
  patch.tau = tau;
  const int rows = patch.rows, cols = patch.cols;
  const double hs = sigma[1] - sigma[0];
  const double ht = tau[1] - tau[0];
  const auto cells = static_cast<std::size_t>(rows * cols);
  patch.frame_sigma.resize(cells);
  patch.frame_tau.resize(cells);
  patch.second_fundamental_form.assign(cells, kNaN);
  patch.induced_curvature.assign(cells, kNaN);
  patch.points.resize(cells);
  auto at = [&](int i, int j) -> const Vec& { return points[static_cast<std::size_t>(i * cols + j)]; };
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const auto idx = static_cast<std::size_t>(i * cols + j);
      patch.points[idx].coords = at(i, j);
      patch.frame_sigma[idx].base = patch.points[idx];
      patch.frame_tau[idx].base = patch.points[idx];
      patch.frame_sigma[idx].components.assign(un, kNaN);
      patch.frame_tau[idx].components.assign(un, kNaN);
    }

  const int b = patch.border;
  Vec gamma(un * un * un);
  for (int i = b; i < rows - b; ++i)
    for (int j = b; j < cols - b; ++j) {
      Vec xs(un, 0.0), xt(un, 0.0), ss(un, 0.0), tt(un, 0.0), st(un, 0.0);
      for (int k = 0; k < 5; ++k) {
        const Vec& ps = at(i + k - 2, j);
        const Vec& pt = at(i, j + k - 2);
        for (std::size_t c = 0; c < un; ++c) {
          xs[c] += kD1[k] * ps[c] / hs;
          ss[c] += kD2[k] * ps[c] / (hs * hs);
          xt[c] += kD1[k] * pt[c] / ht;
          tt[c] += kD2[k] * pt[c] / (ht * ht);
        }
        for (int l = 0; l < 5; ++l) {
          const Vec& pm = at(i + k - 2, j + l - 2);
          const double w = kD1[k] * kD1[l] / (hs * ht);
          if (w == 0.0) continue;
          for (std::size_t c = 0; c < un; ++c) st[c] += w * pm[c];
        }
      }
      const Vec& x = at(i, j);
      christoffel_into(s.metric(), x, gamma);
      auto nabla = [&](const Vec& second, const Vec& a, const Vec& bb) {
        Vec r = second;
        for (int c = 0; c < n; ++c)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
              r[static_cast<std::size_t>(c)] += gamma[static_cast<std::size_t>((c * n + p) * n + q)] *
                                                a[static_cast<std::size_t>(p)] * bb[static_cast<std::size_t>(q)];
        return r;
      };
      const NormalProjector proj(s.metric().values(x), n, xs, xt);
      const double II = std::max({proj.normal_norm(nabla(ss, xs, xs)), proj.normal_norm(nabla(st, xs, xt)),
                                  proj.normal_norm(nabla(tt, xt, xt))});
      const CurvatureAt R = curvature(s.metric(), ChartPoint{x});
      const double K = std::max(norm2(curvature_apply(R, xs, xt, xs)), norm2(curvature_apply(R, xs, xt, xt)));

      const auto idx = static_cast<std::size_t>(i * cols + j);
      patch.frame_sigma[idx].components = xs;
      patch.frame_tau[idx].components = xt;
      patch.second_fundamental_form[idx] = II;
      patch.induced_curvature[idx] = K;
      patch.max_second_fundamental_form = std::max(patch.max_second_fundamental_form, II);
      patch.max_induced_curvature = std::max(patch.max_induced_curvature, K);
    }
  return patch;
}

void check_grid(const SurfaceExtent& e, const SurfaceGrid& g) {
  if (g.m < 5 || g.k < 5) throw Error("surface grid needs at least 5 nodes per direction");
  if (!(e.geodesic_length > 0.0) || !(e.flow_time > 0.0)) throw Error("surface extents must be positive");
}

bool parallel_vectors(const Vec& a, const Vec& b) {
  const double na = norm2(a), nb = norm2(b);
  if (na == 0.0 || nb == 0.0) return true;
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::abs(std::abs(dot) / (na * nb) - 1.0) < 1e-12;
}

}  // namespace

BrinkmannCertificate brinkmann_certificate(const Spacetime& s, int samples) {
  if (samples < 1) throw Error("certificate needs at least one sample");
  const VectorField& V = s.V();
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  BrinkmannCertificate cert;
  cert.spacetime = s.name();
  Vec gamma(un * un * un), v(un), jac(un * un);
  std::uint64_t index = 1;
  const std::uint64_t limit = 1000ULL * static_cast<std::uint64_t>(samples);
  while (cert.samples < samples && index < limit) {
    const auto x = s.sample_box_point(halton_point(index++, n));
    if (!s.metric().contains(x)) continue;
    ++cert.samples;
    const MetricJet jet = s.metric().jet(x);
    christoffel_into(s.metric(), x, gamma);
    V.value_and_jacobian(x, v, jac);
    auto G = [&](int a, int b) { return jet.g[static_cast<std::size_t>(a * n + b)]; };
    auto dG = [&](int c, int a, int b) { return jet.dg[static_cast<std::size_t>((c * n + a) * n + b)]; };
    auto dV = [&](int c, int a) { return jac[static_cast<std::size_t>(c * n + a)]; };
    auto Vc = [&](int c) { return v[static_cast<std::size_t>(c)]; };

    double gvv = 0.0;
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        double nab = dV(c, a);
        for (int b = 0; b < n; ++b) nab += gamma[static_cast<std::size_t>((c * n + a) * n + b)] * Vc(b);
        cert.max_nabla_V = std::max(cert.max_nabla_V, std::abs(nab));
        gvv += G(a, c) * Vc(a) * Vc(c);
      }
    cert.max_g_VV = std::max(cert.max_g_VV, std::abs(gvv));

    // d_a alpha_b with alpha_b = g_bc V^c
    std::vector<double> dalpha(un * un, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) acc += dG(a, b, c) * Vc(c) + G(b, c) * dV(c, a);
        dalpha[static_cast<std::size_t>(a * n + b)] = acc;
      }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        cert.max_d_alpha = std::max(cert.max_d_alpha, std::abs(dalpha[static_cast<std::size_t>(a * n + b)] -
                                                               dalpha[static_cast<std::size_t>(b * n + a)]));
        double lie = 0.0;
        for (int c = 0; c < n; ++c) lie += Vc(c) * dG(c, a, b) + G(c, b) * dV(c, a) + G(a, c) * dV(c, b);
        cert.max_killing = std::max(cert.max_killing, std::abs(lie));
      }
  }
  if (cert.samples < samples) throw Error("could not place certificate samples inside the domain");
  constexpr double tol = 1e-8;
  cert.checks = {{"parallel", cert.max_nabla_V, tol, cert.max_nabla_V < tol},
                 {"null", cert.max_g_VV, tol, cert.max_g_VV < tol},
                 {"closed", cert.max_d_alpha, tol, cert.max_d_alpha < tol}};
  cert.pass = std::all_of(cert.checks.begin(), cert.checks.end(), [](const CheckResult& c) { return c.pass; });
  return cert;
}

SurfacePatch totally_geodesic_surface(const Spacetime& s, const ChartPoint& p, const TangentVec& Q, SurfaceExtent extent,
                                      SurfaceGrid grid) {
  check_grid(extent, grid);
  const int n = s.dim();
  if (p.dim() != n || static_cast<int>(Q.components.size()) != n) throw Error("surface seed has the wrong dimension");
  s.metric().require_inside(p.coords);
  const Vec v = s.V().value(p.coords);
  if (parallel_vectors(Q.components, v)) throw Error("Q is parallel to V");
  if (nabla_V_at(s, p.coords) > 1e-8) throw Error("V is not parallel at the surface seed");

  const Vec sigma = linspace(extent.geodesic_length, grid.m);
  const Vec tau = linspace(extent.flow_time, grid.k);
  const auto base = geodesic_points(s, p.coords, Q.components, sigma);
  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(grid.m * grid.k));
  for (const auto& x : base) {
    auto row = flow_points(s, s.V(), x, tau);
    points.insert(points.end(), row.begin(), row.end());
  }
  return analyze(s, std::move(points), sigma, tau);
}

SurfacePatch ruled_surface(const Spacetime& s, const ChartPoint& p, const TangentVec& q1, const TangentVec& q2,
                           SurfaceExtent extent, SurfaceGrid grid) {
  check_grid(extent, grid);
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  if (p.dim() != n || static_cast<int>(q1.components.size()) != n || static_cast<int>(q2.components.size()) != n)
    throw Error("surface seed has the wrong dimension");
  s.metric().require_inside(p.coords);
  if (parallel_vectors(q1.components, q2.components)) throw Error("surface directions are parallel");

  const Vec sigma = linspace(extent.geodesic_length, grid.m);
  const Vec tau = linspace(extent.flow_time, grid.k);
  const auto base = geodesic_with_transport(s, p.coords, q1.components, q2.components, sigma);
  std::vector<Vec> points;
  points.reserve(static_cast<std::size_t>(grid.m * grid.k));
  for (const auto& row : base) {
    const Vec x(row.begin(), row.begin() + n);
    const Vec y(row.begin() + 2 * static_cast<std::ptrdiff_t>(un), row.end());
    auto line = geodesic_points(s, x, y, tau);
    points.insert(points.end(), line.begin(), line.end());
  }
  return analyze(s, std::move(points), sigma, tau);
}

FrameOnE frame_on_E(const Spacetime& s, const ChartPoint& p, const std::vector<std::vector<double>>& candidates) {
  const int n = s.dim();
  if (n < 3) throw Error("E = V^perp / V is trivial in dimension < 3");
  const Vec g = s.metric().values(p.coords);
  const Vec V = s.V().value(p.coords);
  const Vec Z = transversal(g, n, V);
  FrameOnE f;
  f.base = p;
  for (const auto& cand : candidates) {
    if (static_cast<int>(f.vectors.size()) == n - 2) break;
    if (static_cast<int>(cand.size()) != n) throw Error("frame candidate has the wrong dimension");
    Vec w = cand;
    project_to_V_perp(g, n, V, Z, w);
    for (const auto& e : f.vectors) {
      const double c = gdot(g, n, w, e.components);
      for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] -= c * e.components[static_cast<std::size_t>(i)];
    }
    const double q = gdot(g, n, w, w);
    if (q < -1e-10) throw Error("metric is not positive on V^perp / V");
    if (q < 1e-10 * std::max(1.0, std::pow(norm2(cand), 2))) continue;
    for (double& c : w) c /= std::sqrt(q);
    f.vectors.push_back(TangentVec{w, p});
  }
  if (static_cast<int>(f.vectors.size()) != n - 2) throw Error("frame candidates do not span V^perp / V");
  return f;
}

FrameOnE coordinate_frame_on_E(const Spacetime& s, const ChartPoint& p) {
  const int n = s.dim();
  std::vector<std::vector<double>> cands;
  for (int k = 2; k < n + 2; ++k) {
    Vec e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(k % n)] = 1.0;
    cands.push_back(e);
  }
  return frame_on_E(s, p, cands);
}

FrameCheck check_frame(const Spacetime& s, const FrameOnE& f) {
  const int n = s.dim();
  const Vec g = s.metric().values(f.base.coords);
  const Vec V = s.V().value(f.base.coords);
  FrameCheck c;
  for (std::size_t i = 0; i < f.vectors.size(); ++i) {
    c.max_g_eV = std::max(c.max_g_eV, std::abs(gdot(g, n, f.vectors[i].components, V)));
    for (std::size_t j = 0; j < f.vectors.size(); ++j) {
      const double want = i == j ? 1.0 : 0.0;
      c.gram_residual = std::max(c.gram_residual, std::abs(gdot(g, n, f.vectors[i].components, f.vectors[j].components) - want));
    }
  }
  return c;
}

FrameTransportResult frame_transport_along_V(const Spacetime& s, const FrameOnE& f, double t, double rel_tol) {
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  const VectorField& V = s.V();
  if (f.base.dim() != n) throw Error("frame base has the wrong dimension");
  if (!std::isfinite(t)) throw Error("transport time must be finite");
  // Backward transport runs forward along -V.
  const double sign = t < 0.0 ? -1.0 : 1.0;
  VectorField flow_field = V;
  if (sign < 0.0) {
    std::vector<std::string> neg;
    for (const auto& c : *s.spec().v_text) neg.push_back("-(" + c + ")");
    flow_field = VectorField::parse(neg, s.spec().coords);
  }
  if (!(rel_tol > 0.0)) throw Error("tolerance must be positive");
  s.metric().require_inside(f.base.coords);
  const std::size_t k = f.vectors.size();

  Vec state(f.base.coords);
  for (const auto& e : f.vectors) {
    if (e.components.size() != un) throw Error("frame vector has the wrong dimension");
    state.insert(state.end(), e.components.begin(), e.components.end());
  }
  Vec gamma(un * un * un);
  auto rhs = [&s, &flow_field, n, un, k, gamma](double, std::span<const double> st, std::span<double> d) mutable {
    const auto x = st.subspan(0, un);
    if (!s.metric().contains(x)) throw DomainError("V-orbit left the chart domain");
    const auto v = flow_field.value(x);
    christoffel_into(s.metric(), x, gamma);
    std::copy(v.begin(), v.end(), d.begin());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t off = un * (i + 1);
      for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            acc += gamma[static_cast<std::size_t>((c * n + a) * n + b)] * v[static_cast<std::size_t>(a)] *
                   st[off + static_cast<std::size_t>(b)];
        d[off + static_cast<std::size_t>(c)] = -acc;
      }
    }
  };
  const OdeOptions opt{rel_tol, rel_tol * 1e-2, 1e-14, 0.1, 0.0};
  const double span = std::abs(t);
  Vec end = span > 0.0 ? integrate_to_grid(rhs, state, {span}, opt, "frame transport").front() : state;

  FlowOptions fo;
  fo.ode = opt;
  fo.normalize = false;
  const FlowState flow = integrate_flow(s, flow_field, f.base, span, fo);

  FrameTransportResult r;
  r.frame.base.coords.assign(end.begin(), end.begin() + n);
  r.pushforward.base = flow.point;
  const Vec g = s.metric().values(r.frame.base.coords);
  const Vec Vend = V.value(r.frame.base.coords);
  const Vec Z = transversal(g, n, Vend);
  const double vv = std::pow(norm2(Vend), 2);
  for (std::size_t i = 0; i < k; ++i) {
    Vec e(end.begin() + static_cast<std::ptrdiff_t>(un * (i + 1)), end.begin() + static_cast<std::ptrdiff_t>(un * (i + 2)));
    project_to_V_perp(g, n, Vend, Z, e);
    const Eigen::VectorXd pushed = flow.jacobian * Eigen::Map<const Eigen::VectorXd>(f.vectors[i].components.data(), n);
    Vec p(pushed.data(), pushed.data() + n);
    Vec diff(un);
    double dv = 0.0;
    for (std::size_t c = 0; c < un; ++c) {
      diff[c] = e[c] - p[c];
      dv += diff[c] * Vend[c];
    }
    const double lambda = vv > 0.0 ? dv / vv : 0.0;
    for (std::size_t c = 0; c < un; ++c) diff[c] -= lambda * Vend[c];
    r.horizontality_residual = std::max(r.horizontality_residual, norm2(diff));
    r.frame.vectors.push_back(TangentVec{e, r.frame.base});
    r.pushforward.vectors.push_back(TangentVec{p, flow.point});
  }
  r.check = check_frame(s, r.frame);
  return r;
}

RicciHarmonicReport ppwave_ricci_harmonic(const std::string& H, int n, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error("need at least one sample");
  if (n < 2) throw Error("need at least two transverse coordinates");
  const Spacetime s = build("pp_wave", {{"H", H}, {"n", std::to_string(n)}});
  const int dim = n + 2;
  std::vector<std::string> coords = s.spec().coords;
  const dsl::Program prog(dsl::parse_expr(H, coords));

  RicciHarmonicReport r;
  r.H = H;
  r.n = n;
  r.seed = seed;
  r.ratio_min = std::numeric_limits<double>::infinity();
  r.ratio_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    auto rng = trial_stream(seed, static_cast<std::uint64_t>(i));
    Vec x(static_cast<std::size_t>(dim), 0.0);
    x[0] = uniform(rng, -1.0, 1.0);
    for (int k = 2; k < dim; ++k) x[static_cast<std::size_t>(k)] = uniform(rng, -1.0, 1.0);
    Vec pt{x[0]};
    pt.insert(pt.end(), x.begin() + 2, x.end());
    r.points.push_back(pt);

    const CurvatureAt R = curvature(s.metric(), ChartPoint{x});
    const double ric = R.ricci.cwiseAbs().maxCoeff();
    std::vector<Dual2> vars(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) vars[static_cast<std::size_t>(k)] = make_variable<Dual2>(x[static_cast<std::size_t>(k)], k, dim);
    const Dual2 h = prog.eval<Dual2>(vars);
    double lap = 0.0;
    if (h.n > 0)
      for (int k = 2; k < dim; ++k) lap += h.d[static_cast<std::size_t>(k)].d[static_cast<std::size_t>(k)];

    r.ricci_norm.push_back(ric);
    r.ricci_uu.push_back(R.ricci(0, 0));
    r.laplacian.push_back(lap);
    r.max_ricci_residual = std::max(r.max_ricci_residual, ric);
    r.max_laplacian_residual = std::max(r.max_laplacian_residual, std::abs(lap));
    if (std::abs(lap) > 1e-12) {
      const double q = R.ricci(0, 0) / lap;
      r.ratio_min = std::min(r.ratio_min, q);
      r.ratio_max = std::max(r.ratio_max, q);
      ++r.ratio_samples;
    }
  }
  if (r.ratio_samples == 0) r.ratio_min = r.ratio_max = 0.0;
  return r;
}

NormGrowthReport norm_growth_bound(const Spacetime& s, const std::vector<double>& speeds, int trials,
                                   const NormGrowthOptions& options) {
  if (s.chart_kind() != ChartKind::Rosen) throw Error("norm growth bound needs a Rosen chart");
  if (!s.claims_compact_quotient()) throw Error("norm growth bound needs a compact quotient");
  if (trials < 1 || speeds.empty()) throw Error("need at least one trial and one speed");
  if (!(options.epsilon > 0.0) || options.window_samples < 2) throw Error("invalid norm growth window");
  for (double sp : speeds)
    if (!(sp > 0.0)) throw Error("speeds must be positive");
  const int n = s.dim();
  const int m = n - 2;

  NormGrowthReport rep;
  rep.epsilon = options.epsilon;
  const auto count = static_cast<int>(speeds.size()) * trials;
  rep.trials.resize(static_cast<std::size_t>(count));
  // Ratio samples kept for the violation pass: (t, r).
  std::vector<std::vector<std::pair<double, double>>> curves(static_cast<std::size_t>(count));

  parallel_for(count, options.jobs, [&](int job) {
    const double speed = speeds[static_cast<std::size_t>(job / trials)];
    const auto index = static_cast<std::uint64_t>(job % trials);
    auto rng = trial_stream(options.seed, index);
    Vec unit(static_cast<std::size_t>(n));
    for (double& u : unit) u = uniform(rng, 0.0, 1.0);
    const auto dir = random_direction(rng, m);

    GeodesicState init;
    init.point.coords = s.sample_box_point(unit);
    init.velocity.components.assign(static_cast<std::size_t>(n), 0.0);
    init.velocity.components[0] = 1.0;
    for (int i = 0; i < m; ++i) init.velocity.components[static_cast<std::size_t>(i + 2)] = speed * dir[static_cast<std::size_t>(i)];
    init.velocity.base = init.point;

    const double T = options.epsilon / speed;
    IntegratorConfig cfg = options.config;
    cfg.record_samples = true;
    cfg.max_step = T / options.window_samples;
    cfg.min_step = std::min(cfg.min_step, cfg.max_step * 1e-6);
    const Trajectory tr = integrate_geodesic(s, init, T, cfg);

    NormGrowthTrial& out = rep.trials[static_cast<std::size_t>(job)];
    out.speed = speed;
    out.index = index;
    out.max_slope = -std::numeric_limits<double>::infinity();
    auto transverse = [&](const TangentVec& v) {
      return norm2(std::span<const double>(v.components).subspan(2));
    };
    const double r0 = transverse(init.velocity);
    auto& curve = curves[static_cast<std::size_t>(job)];
    for (const auto& smp : tr.samples) {
      const double t = smp.affine_param - init.affine_param;
      if (t <= 0.0) continue;
      const double r = transverse(smp.velocity) / r0;
      curve.emplace_back(t, r);
      out.max_slope = std::max(out.max_slope, (r - 1.0) / t);
      out.max_ratio = std::max(out.max_ratio, r);
    }
    if (tr.termination.kind != VerdictKind::CompleteUpTo) out.max_slope = std::numeric_limits<double>::infinity();
  });

  if (options.fixed_C >= 0.0) {
    rep.C = options.fixed_C;
    rep.fitted = false;
  } else {
    rep.C = 0.0;
    for (const auto& t : rep.trials) rep.C = std::max(rep.C, t.max_slope);
  }
  for (std::size_t j = 0; j < rep.trials.size(); ++j) {
    auto& t = rep.trials[j];
    for (const auto& [time, r] : curves[j])
      if (r > 1.0 + options.envelope_factor * rep.C * time + 1e-10) t.violation = true;
    if (!std::isfinite(t.max_slope)) t.violation = true;
    if (t.violation) ++rep.violations;
  }
  return rep;
}

TangentVec random_transverse_to_V(const Spacetime& s, const ChartPoint& p, std::uint64_t seed) {
  const int n = s.dim();
  const Vec g = s.metric().values(p.coords);
  const Vec V = s.V().value(p.coords);
  const Vec Z = transversal(g, n, V);
  auto rng = trial_stream(seed, 0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec w = random_direction(rng, n);
    project_to_V_perp(g, n, V, Z, w);
    const double q = gdot(g, n, w, w);
    if (q < 1e-3 * std::pow(norm2(w), 2)) continue;
    for (double& c : w) c /= std::sqrt(q);
    return TangentVec{w, p};
  }
  throw Error("could not sample a spacelike vector orthogonal to V");
}

std::pair<TangentVec, TangentVec> random_control_plane(const Spacetime& s, const ChartPoint& p, std::uint64_t seed) {
  const int n = s.dim();
  const Vec g = s.metric().values(p.coords);
  const Vec V = s.has_V() ? s.V().value(p.coords) : Vec{};
  auto rng = trial_stream(seed, 1);
  auto spacelike = [&](const Vec* against) -> Vec {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Vec w = random_direction(rng, n);
      if (against) {
        const double c = gdot(g, n, w, *against);
        for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] -= c * (*against)[static_cast<std::size_t>(i)];
      }
      const double len = norm2(w);
      if (gdot(g, n, w, w) < 0.1 * len * len) continue;
      for (double& c : w) c /= len;
      return w;
    }
    throw Error("could not sample a spacelike direction");
  };
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Vec a = spacelike(nullptr);
    const Vec b = spacelike(&a);
    if (!V.empty()) {
      Eigen::MatrixXd P(n, 2);
      for (int i = 0; i < n; ++i) {
        P(i, 0) = a[static_cast<std::size_t>(i)];
        P(i, 1) = b[static_cast<std::size_t>(i)];
      }
      const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(V.data(), n);
      const Eigen::VectorXd res = v - P * P.colPivHouseholderQr().solve(v);
      if (res.norm() < 1e-3 * v.norm()) continue;
    }
    return {TangentVec{a, p}, TangentVec{b, p}};
  }
  throw Error("could not sample a plane avoiding V");
}

}  // namespace brinkmann
