// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "brinkmann/catalog.hpp"
#include "brinkmann/cli.hpp"
#include "brinkmann/dynamics.hpp"
#include "brinkmann/geodesic.hpp"
#include "brinkmann/sampling.hpp"
#include "brinkmann/verify.hpp"

using namespace brinkmann;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GeodesicState state(std::vector<double> p, std::vector<double> v) {
  GeodesicState s;
  s.point.coords = std::move(p);
  s.velocity.components = std::move(v);
  s.velocity.base = s.point;
  return s;
}

Outcome clifton_pohl_escape() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cp = build("clifton_pohl");
  const auto tr = integrate_geodesic(cp, state({1, 0}, {1, 0}), 2.0);
  const double dt = seconds_since(t0);
  const bool ok = tr.termination.kind == VerdictKind::EscapeAt && std::abs(tr.termination.t - 1.0) < 1e-3 && dt < 1.0;
  return {ok, fmt("%s t*=%.12f, %.3f s", to_string(tr.termination.kind), tr.termination.t, dt)};
}

Outcome rosen_completeness() {
  const auto t0 = std::chrono::steady_clock::now();
  ScanOptions o;
  o.samples = 200;
  o.seed = 2024;
  o.tmax = 100.0;
  const auto r = completeness_scan(build("rosen_torus"), o);
  const double dt = seconds_since(t0);
  const bool ok = r.fraction_complete == 1.0 && r.max_energy_drift < 1e-6 && r.max_clairaut_drift < 1e-6 && dt < 30.0;
  return {ok, fmt("%.0f%% complete, energy drift %.2e, clairaut drift %.2e, %.2f s", 100 * r.fraction_complete,
                  r.max_energy_drift, r.max_clairaut_drift, dt)};
}

Outcome leaf_dichotomy() {
  const auto rt = build("rosen_torus");
  auto rng = trial_stream(3, 0);
  IntegratorConfig cfg;
  cfg.normalize = false;  // compare u literally, not modulo the period
  double worst[2] = {0.0, 0.0};
  int incomplete = 0;
  for (int kappa = 0; kappa <= 1; ++kappa) {
    for (int i = 0; i < 50; ++i) {
      const auto dir = random_direction(rng, 2);
      const double speed = uniform(rng, 0.1, 2.0);
      const auto init = state({uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0, 1)},
                              {static_cast<double>(kappa), uniform(rng, -1, 1), speed * dir[0], speed * dir[1]});
      const auto tr = integrate_geodesic(rt, init, 100.0, cfg);
      if (tr.termination.kind != VerdictKind::CompleteUpTo) ++incomplete;
      for (const auto& s : tr.samples)
        worst[kappa] = std::max(worst[kappa], std::abs(s.point.coords[0] - init.point.coords[0] - kappa * s.affine_param));
    }
  }
  const bool ok = incomplete == 0 && worst[0] < 1e-10 && worst[1] < 1e-10;
  return {ok, fmt("g(xdot,V)=0: max |u-u0| %.2e; g(xdot,V)=1: max |u-u0-t| %.2e; T=100", worst[0], worst[1])};
}

Outcome certificates() {
  std::ostringstream passed;
  bool ok = true;
  for (const auto& k : catalog_keys()) {
    const auto s = build(k);
    if (!s.claims_brinkmann()) continue;
    const auto c = brinkmann_certificate(s);
    const double worst = std::max({c.max_nabla_V, c.max_g_VV, c.max_d_alpha});
    ok = ok && c.pass && worst < 1e-8;
    passed << k << (c.pass ? "" : "(FAIL)") << " ";
  }
  const auto c = brinkmann_certificate(build("clifton_pohl_3d"));
  const bool cp = c.max_nabla_V > 0.1 && c.max_g_VV < 1e-12 && c.max_killing < 1e-8;
  return {ok && cp, fmt("pass: %sclifton_pohl_3d: parallel %.3g > 0.1, null %.1e < 1e-12, Killing %.1e; "
                        "closed also fails (d alpha %.3g), forced for a Killing non-parallel field",
                        passed.str().c_str(), c.max_nabla_V, c.max_g_VV, c.max_killing, c.max_d_alpha)};
}

Outcome flat_surfaces() {
  const auto pp = build("pp_wave", {{"H", "z1^3"}, {"n", "2"}});
  double v_ii = 0.0, v_k = 0.0, c_min = INFINITY;
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto rng = trial_stream(55, i);
    ChartPoint p{{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)}};
    const auto S = totally_geodesic_surface(pp, p, random_transverse_to_V(pp, p, i));
    v_ii = std::max(v_ii, S.max_second_fundamental_form);
    v_k = std::max(v_k, S.max_induced_curvature);
    const auto [q1, q2] = random_control_plane(pp, p, i);
    c_min = std::min(c_min, ruled_surface(pp, p, q1, q2).max_second_fundamental_form);
  }
  const bool ok = v_ii < 1e-6 && v_k < 1e-6 && c_min > 1e-3;
  return {ok, fmt("V-planes: max II %.2e, max K %.2e; control planes: min max II %.3g (21x21)", v_ii, v_k, c_min)};
}

Outcome norm_growth() {
  const auto rt = build("rosen_torus");
  NormGrowthOptions o;
  o.seed = 6;
  const auto fit = norm_growth_bound(rt, {1.0, 10.0, 100.0}, 20, o);
  o.fixed_C = fit.C;
  const auto all = norm_growth_bound(rt, {1.0, 10.0, 100.0, 1000.0}, 20, o);
  const bool ok = fit.violations == 0 && all.violations == 0;
  return {ok, fmt("C=%.4f fitted on speeds {1,10,100}; %d violations across {1,10,100,1000} x 20 trials", fit.C,
                  all.violations)};
}

Outcome equicontinuity() {
  auto t0 = std::chrono::steady_clock::now();
  const auto rt = build("rosen_torus");
  const auto a = equicontinuity_diagnostic(rt, rt.V(), 50, 100.0, 0);
  const double ta = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const auto su = build("suspension_anosov", {{"A", "2,1;1,1"}});
  const auto b = equicontinuity_diagnostic(su, su.V(), 50, 20.0, 0);
  const double tb = seconds_since(t0);
  const double target = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  const double rel = std::abs(b.fitted_rate / target - 1.0);
  const bool ok = a.classification == FlowClass::Bounded && std::abs(a.fitted_rate) < 1e-6 && ta < 10.0 &&
                  b.classification == FlowClass::ExponentialGrowth && rel < 0.02 && tb < 10.0;
  return {ok, fmt("rosen V: %s rate %.2e (%.2f s); suspension d/ds: %s rate %.6f vs %.6f (%.2f%%, %.2f s)",
                  to_string(a.classification), a.fitted_rate, ta, to_string(b.classification), b.fitted_rate, target,
                  100 * rel, tb)};
}

Outcome ricci_harmonic() {
  const auto h = ppwave_ricci_harmonic("z1^2-z2^2", 2);
  const auto q = ppwave_ricci_harmonic("z1^2+z2^2", 2);
  bool exact = q.ratio_samples == static_cast<int>(q.points.size());
  for (double l : q.laplacian) exact = exact && l == 4.0;
  const bool ok = h.max_ricci_residual < 1e-8 && h.max_laplacian_residual < 1e-8 && exact &&
                  q.max_laplacian_residual == 4.0 && q.ratio_min == q.ratio_max;
  return {ok, fmt("harmonic: ricci %.1e, laplacian %.1e; z1^2+z2^2: laplacian %.17g, ratio in [%.17g, %.17g] "
                  "(oracle -1)",
                  h.max_ricci_residual, h.max_laplacian_residual, q.max_laplacian_residual, q.ratio_min, q.ratio_max)};
}

// Central differences of the metric, assembled into Christoffel symbols.
double christoffel_fd_error(const Spacetime& s, int points) {
  const int n = s.dim();
  const double h = 1e-5;
  double worst = 0.0;
  int used = 0;
  for (std::uint64_t idx = 1; used < points; ++idx) {
    const auto x = s.sample_box_point(halton_point(idx, n));
    if (s.metric().domain_margin(x) < 1e-3) continue;
    ++used;
    auto g_at = [&](const std::vector<double>& y) {
      const auto v = s.metric().values(y);
      return Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n));
    };
    std::vector<Eigen::MatrixXd> dg;
    for (int c = 0; c < n; ++c) {
      auto xp = x, xm = x;
      xp[static_cast<std::size_t>(c)] += h;
      xm[static_cast<std::size_t>(c)] -= h;
      dg.push_back((g_at(xp) - g_at(xm)) / (2 * h));
    }
    const Eigen::MatrixXd ginv = g_at(x).inverse();
    const auto gamma = christoffel(s.metric(), ChartPoint{x});
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double fd = 0.0;
          for (int d = 0; d < n; ++d) fd += 0.5 * ginv(c, d) * (dg[a](d, b) + dg[b](d, a) - dg[d](a, b));
          worst = std::max(worst, std::abs(fd - gamma(c, a, b)));
        }
  }
  return worst;
}

Outcome oracles() {
  const auto cw = build("cahen_wallach", {{"lambda", "-1,-1"}});
  const double z0[2] = {0.4, -0.3}, zd0[2] = {-0.2, 0.7};
  const auto tr = integrate_geodesic(cw, state({0, 0, z0[0], z0[1]}, {1, 0.1, zd0[0], zd0[1]}), 100.0);
  const double w = std::sqrt(2.0);
  double sup = 0.0;
  for (const auto& st : tr.samples)
    for (int i = 0; i < 2; ++i) {
      const double t = st.affine_param;
      sup = std::max(sup, std::abs(st.point.coords[static_cast<std::size_t>(i + 2)] -
                                   (z0[i] * std::cos(w * t) + zd0[i] / w * std::sin(w * t))));
    }
  double fd = 0.0;
  for (const auto& k : catalog_keys()) fd = std::max(fd, christoffel_fd_error(build(k), 100));
  const bool ok = tr.termination.kind == VerdictKind::CompleteUpTo && sup < 1e-6 && fd < 1e-6;
  return {ok, fmt("cahen_wallach sup error %.2e over T=100; Christoffel vs finite differences %.2e (100 points x %zu "
                  "entries)",
                  sup, fd, catalog_keys().size())};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"list", "--format", "json"},
      {"geodesic", "--spacetime", "rosen_torus", "--seed", "11", "--tmax", "20", "--format", "json"},
      {"scan", "--spacetime", "clifton_pohl", "--samples", "20", "--seed", "7", "--tmax", "50", "--format", "json"},
      {"certify", "--spacetime", "pp_wave", "--param", "H=z1^3", "--full", "--format", "json"},
      {"flow", "--spacetime", "suspension_anosov", "--samples", "10", "--tmax", "10", "--format", "json"},
      {"ricci", "--H", "z1^2+z2^2", "--seed", "5", "--format", "json"},
  };
  int identical = 0;
  for (const auto& c : commands) {
    std::ostringstream a, b, err;
    const int sa = cli::run(c, a, err);
    auto with_jobs = c;
    with_jobs.insert(with_jobs.end(), {"--jobs", "3"});
    const int sb = cli::run(c.front() == "list" || c.front() == "ricci" ? c : with_jobs, b, err);
    if (sa == 0 && sb == 0 && a.str() == b.str() && !a.str().empty()) ++identical;
  }
  return {identical == static_cast<int>(commands.size()),
          fmt("%d/%zu subcommands byte-identical across repeated runs", identical, commands.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"clifton-pohl incompleteness", clifton_pohl_escape},
      {"compact brinkmann completeness", rosen_completeness},
      {"leaf dichotomy", leaf_dichotomy},
      {"brinkmann certificates", certificates},
      {"totally geodesic flat surfaces", flat_surfaces},
      {"uniform norm growth", norm_growth},
      {"equicontinuity contrast", equicontinuity},
      {"ricci and harmonic profiles", ricci_harmonic},
      {"oracle equivalence", oracles},
      {"cli determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
