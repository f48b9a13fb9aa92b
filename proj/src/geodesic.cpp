#include "brinkmann/geodesic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "brinkmann/errors.hpp"
#include "brinkmann/ode.hpp"
#include "brinkmann/sampling.hpp"

namespace brinkmann {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  bool ok = false;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit f;
  const std::size_t n = xs.size();
  if (n < 3) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / static_cast<double>(n));
  f.ok = true;
  return f;
}

struct BlowupFit {
  double exponent = 0.0;
  double t_est = 0.0;
  bool ok = false;
};

// Fits speed ~ (t_est - t)^p on the tail of the run, scanning t_est over
// decades beyond the last accepted parameter.
BlowupFit fit_blowup(const std::vector<double>& ts, const std::vector<double>& speeds, double h_hint) {
  BlowupFit out;
  if (ts.size() < 8) return out;
  const double t_first = ts.front();
  const double t_last = ts.back();
  const double start = t_last - 0.25 * (t_last - t_first);
  std::vector<double> tail_t, tail_s;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] >= start && speeds[i] > 0.0) {
      tail_t.push_back(ts[i]);
      tail_s.push_back(std::log(speeds[i]));
    }
  if (tail_t.size() < 8) return out;
  double best = INFINITY;
  std::vector<double> xs(tail_t.size());
  for (int j = 0; j <= 64; ++j) {
    const double t_est = t_last + h_hint * std::pow(10.0, j / 4.0);
    for (std::size_t i = 0; i < tail_t.size(); ++i) xs[i] = std::log(t_est - tail_t[i]);
    const LineFit f = fit_line(xs, tail_s);
    if (f.ok && f.rms < best) {
      best = f.rms;
      out.exponent = f.slope;
      out.t_est = t_est;
      out.ok = true;
    }
  }
  return out;
}

double growth_exponent(const std::vector<double>& ts, const std::vector<double>& speeds, double t0, double T) {
  std::vector<double> xs, ys;
  const double lo = std::max(1e-3 * T, 1e-12);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double dt = ts[i] - t0;
    if (dt >= lo && speeds[i] > 0.0) {
      xs.push_back(std::log(dt));
      ys.push_back(std::log(speeds[i]));
    }
  }
  const LineFit f = fit_line(xs, ys);
  return f.ok ? f.slope : 0.0;
}

double metric_inner(const std::vector<double>& g, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * a[i] * b[j];
  return s;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw Error("integrator tolerances must be positive");
  if (!(min_step > 0.0) || !(min_step < max_step)) throw Error("integrator steps must satisfy 0 < min_step < max_step");
  if (!(blowup_speed > 0.0)) throw Error("blowup_speed must be positive");
  if (max_deck_word < 1) throw Error("max_deck_word must be at least 1");
  if (!(max_displacement > 0.0)) throw Error("max_displacement must be positive");
}

const char* to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::CompleteUpTo: return "CompleteUpTo";
    case VerdictKind::EscapeAt: return "EscapeAt";
    case VerdictKind::LeftDomain: return "LeftDomain";
    case VerdictKind::IntegratorFailure: return "IntegratorFailure";
  }
  return "?";
}

void geodesic_rhs(const Spacetime& s, std::span<const double> y, std::span<double> dy, std::span<double> gamma) {
  const int n = s.dim();
  const auto x = y.subspan(0, static_cast<std::size_t>(n));
  const auto xd = y.subspan(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  christoffel_into(s.metric(), x, gamma);
  for (int c = 0; c < n; ++c) {
    dy[static_cast<std::size_t>(c)] = xd[static_cast<std::size_t>(c)];
    double acc = 0.0;
    const double* gc = gamma.data() + static_cast<std::size_t>(c * n * n);
    for (int a = 0; a < n; ++a) {
      const double xa = xd[static_cast<std::size_t>(a)];
      if (xa == 0.0) continue;
      double row = 0.0;
      for (int b = 0; b < n; ++b) row += gc[a * n + b] * xd[static_cast<std::size_t>(b)];
      acc += xa * row;
    }
    dy[static_cast<std::size_t>(n + c)] = -acc;
  }
  if (s.chart_kind() != ChartKind::General) {
    const double scale = 1.0 + std::pow(norm2(xd), 2);
    if (std::abs(dy[static_cast<std::size_t>(n)]) > 1e-12 * scale)
      throw Error("u-acceleration does not vanish on a null chart");
  }
}

std::vector<double> geodesic_rhs(const Spacetime& s, const GeodesicState& state) {
  const int n = s.dim();
  if (state.point.dim() != n || static_cast<int>(state.velocity.components.size()) != n)
    throw Error("geodesic state has the wrong dimension");
  std::vector<double> y(state.point.coords);
  y.insert(y.end(), state.velocity.components.begin(), state.velocity.components.end());
  std::vector<double> dy(y.size()), gamma(static_cast<std::size_t>(n * n * n));
  geodesic_rhs(s, y, dy, gamma);
  return dy;
}

Trajectory integrate_geodesic(const Spacetime& s, const GeodesicState& init, double T, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(T > 0.0)) throw Error("integration horizon must be positive");
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  if (init.point.dim() != n || init.velocity.components.size() != un)
    throw Error("initial state has dimension " + std::to_string(init.point.dim()) + ", expected " + std::to_string(n));
  for (double c : init.point.coords)
    if (!std::isfinite(c)) throw DomainError("initial point is not finite");
  s.metric().require_inside(init.point.coords);

  std::vector<double> y(init.point.coords);
  y.insert(y.end(), init.velocity.components.begin(), init.velocity.components.end());
  Trajectory traj;
  const bool normalize = cfg.normalize && s.has_fundamental_domain();
  if (normalize)
    traj.deck_letters += s.normalize_in_place(std::span<double>(y.data(), un), std::span<double>(y.data() + n, un), {},
                                              nullptr, cfg.max_deck_word);

  const bool has_v = s.has_V();
  auto invariants = [&](std::span<const double> state, double& energy, double& clairaut) {
    const auto x = state.subspan(0, un);
    const auto xd = state.subspan(un, un);
    const std::vector<double> g = s.metric().values(x);
    energy = metric_inner(g, xd, xd);
    clairaut = 0.0;
    if (has_v) {
      const std::vector<double> v = s.V().value(x);
      clairaut = metric_inner(g, xd, v);
    }
  };
  invariants(y, traj.initial_energy, traj.initial_clairaut);
  traj.drift.has_clairaut = has_v;

  std::vector<double> gamma(un * un * un);
  bool domain_hit = false;
  OdeOptions opt;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol;
  opt.min_step = cfg.min_step;
  opt.max_step = cfg.max_step;
  DormandPrince45 dp(
      [&](double, std::span<const double> state, std::span<double> d) {
        try {
          geodesic_rhs(s, state, d, gamma);
        } catch (const DomainError&) {
          domain_hit = true;
          throw;
        }
      },
      opt);

  const double t0 = init.affine_param;
  const double t_end = t0 + T;
  dp.reset(t0, y);

  std::vector<double> ts{t0}, speeds{norm2(std::span<const double>(y.data() + n, un))};
  auto record = [&](double t, std::span<const double> state) {
    if (!cfg.record_samples) return;
    GeodesicState g;
    g.point.coords.assign(state.begin(), state.begin() + n);
    g.velocity.components.assign(state.begin() + n, state.end());
    g.velocity.base = g.point;
    g.affine_param = t;
    traj.samples.push_back(std::move(g));
  };
  record(t0, y);

  auto finish = [&](VerdictKind kind, double t, std::string detail) {
    traj.termination.kind = kind;
    traj.termination.t = t;
    traj.termination.detail = std::move(detail);
    traj.termination.final_speed = speeds.back();
  };

  auto cap_step = [&] {
    if (!normalize) return;
    double vmax = 0.0;
    for (std::size_t i = 0; i < un; ++i) vmax = std::max(vmax, std::abs(y[un + i]));
    dp.set_max_step(vmax > 0.0 ? std::min(cfg.max_step, cfg.max_displacement / vmax) : cfg.max_step);
  };
  cap_step();

  for (;;) {
    domain_hit = false;
    const auto status = dp.step(t_end);
    if (status == DormandPrince45::Status::StepTooSmall) {
      const double t = dp.t();
      const BlowupFit fit = fit_blowup(ts, speeds, std::max(dp.next_step(), cfg.min_step));
      traj.termination.blowup_exponent = fit.exponent;
      traj.termination.extrapolated_t = fit.ok ? fit.t_est : t;
      if (speeds.back() > cfg.blowup_speed && fit.ok && fit.exponent < -0.5) {
        finish(VerdictKind::EscapeAt, t, "step collapse with speed blow-up");
      } else if (domain_hit || dp.last_failure() == DormandPrince45::Failure::RhsError) {
        finish(domain_hit ? VerdictKind::LeftDomain : VerdictKind::IntegratorFailure, t, dp.last_error());
      } else {
        finish(VerdictKind::IntegratorFailure, t, "step collapse without speed blow-up");
      }
      break;
    }
    y = dp.y();
    if (normalize) {
      try {
        const int letters = s.normalize_in_place(std::span<double>(y.data(), un), std::span<double>(y.data() + n, un),
                                                 {}, nullptr, cfg.max_deck_word);
        if (letters > 0) {
          traj.deck_letters += letters;
          dp.replace_state(y);
        }
      } catch (const Error& e) {
        finish(VerdictKind::IntegratorFailure, dp.t(), e.what());
        break;
      }
    }
    const double t = dp.t();
    double energy = 0.0, clairaut = 0.0;
    invariants(y, energy, clairaut);
    traj.drift.energy = std::max(traj.drift.energy, std::abs(energy - traj.initial_energy));
    if (has_v) traj.drift.clairaut = std::max(traj.drift.clairaut, std::abs(clairaut - traj.initial_clairaut));
    ts.push_back(t);
    speeds.push_back(norm2(std::span<const double>(y.data() + n, un)));
    record(t, y);
    cap_step();
    if (t >= t_end) {
      finish(VerdictKind::CompleteUpTo, t_end, "");
      break;
    }
    if (dp.accepted_steps() >= cfg.max_steps) {
      finish(VerdictKind::IntegratorFailure, t, "step budget exhausted");
      break;
    }
  }
  traj.accepted_steps = dp.accepted_steps();
  traj.rejected_steps = dp.rejected_steps();
  traj.max_speed = *std::max_element(speeds.begin(), speeds.end());
  traj.growth_exponent = growth_exponent(ts, speeds, t0, T);
  return traj;
}

GeodesicState default_initial_condition(const Spacetime& s, std::uint64_t seed, std::uint64_t index) {
  auto rng = trial_stream(seed, index);
  const int n = s.dim();
  GeodesicState st;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> unit(static_cast<std::size_t>(n));
    for (double& u : unit) u = uniform(rng, 0.0, 1.0);
    auto p = s.sample_box_point(unit);
    if (s.metric().domain_margin(p) > 1e-3) {
      st.point.coords = std::move(p);
      break;
    }
  }
  if (st.point.coords.empty()) throw DomainError("no sample-box point inside the domain");
  st.velocity.components = random_direction(rng, n);
  st.velocity.base = st.point;
  return st;
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  jobs = std::max(1, std::min(resolve_jobs(jobs), count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

ScanReport completeness_scan(const Spacetime& s, const ScanOptions& options) {
  if (options.samples < 1) throw Error("scan needs at least one sample");
  if (!(options.tmax > 0.0)) throw Error("scan horizon must be positive");
  options.config.validate();
  ScanReport report;
  report.spacetime = s.name();
  report.seed = options.seed;
  report.tmax = options.tmax;
  report.records.resize(static_cast<std::size_t>(options.samples));
  IntegratorConfig cfg = options.config;
  cfg.record_samples = false;
  const InitialSampler sampler = options.sampler ? options.sampler : InitialSampler(default_initial_condition);

  parallel_for(options.samples, options.jobs, [&](int i) {
    ScanRecord& r = report.records[static_cast<std::size_t>(i)];
    r.index = static_cast<std::uint64_t>(i);
    r.init = sampler(s, options.seed, r.index);
    try {
      r.trajectory = integrate_geodesic(s, r.init, options.tmax, cfg);
    } catch (const Error& e) {
      r.trajectory.termination.kind = VerdictKind::IntegratorFailure;
      r.trajectory.termination.t = r.init.affine_param;
      r.trajectory.termination.detail = e.what();
    }
  });

  int complete = 0;
  for (const ScanRecord& r : report.records) {
    const Trajectory& t = r.trajectory;
    report.max_growth_exponent = std::max(report.max_growth_exponent, t.growth_exponent);
    if (t.termination.kind == VerdictKind::CompleteUpTo) {
      ++complete;
      report.max_energy_drift = std::max(report.max_energy_drift, t.drift.energy);
      report.max_clairaut_drift = std::max(report.max_clairaut_drift, t.drift.clairaut);
    }
    if (t.termination.kind == VerdictKind::EscapeAt) report.escapes.emplace_back(r.index, t.termination.t);
  }
  report.fraction_complete = static_cast<double>(complete) / options.samples;
  return report;
}

MechanicalForm mechanical_form(const Spacetime& s, double u, std::span<const double> x, std::span<const double> xdot,
                               int kappa) {
  if (s.chart_kind() == ChartKind::General)
    throw Error("mechanical form needs a brinkmann or rosen chart, '" + s.name() + "' is general");
  if (kappa != 0 && kappa != 1) throw Error("geodesic class g(gammadot, V) must be 0 or 1");
  const int n = s.dim();
  const int m = n - 2;
  if (static_cast<int>(x.size()) != m || static_cast<int>(xdot.size()) != m)
    throw Error("transverse point and velocity need " + std::to_string(m) + " components");
  ChartPoint p;
  p.coords.assign(static_cast<std::size_t>(n), 0.0);
  p.coords[0] = u;
  for (int i = 0; i < m; ++i) p.coords[static_cast<std::size_t>(i + 2)] = x[static_cast<std::size_t>(i)];
  const ChristoffelAt g = christoffel(s.metric(), p);
  MechanicalForm f;
  f.A = Eigen::MatrixXd::Zero(m, m);
  f.B = Eigen::VectorXd::Zero(m);
  f.connection = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < m; ++i) {
      f.A(k, i) = -2.0 * kappa * g(k + 2, i + 2, 0);
      for (int j = 0; j < m; ++j)
        f.connection(k) -= g(k + 2, i + 2, j + 2) * xdot[static_cast<std::size_t>(i)] * xdot[static_cast<std::size_t>(j)];
    }
    f.B(k) = -kappa * g(k + 2, 0, 0);
  }
  return f;
}

}  // namespace brinkmann
