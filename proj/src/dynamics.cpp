#include "brinkmann/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "brinkmann/errors.hpp"
#include "brinkmann/geodesic.hpp"
#include "brinkmann/sampling.hpp"

namespace brinkmann {

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

const char* to_string(FlowClass c) { return c == FlowClass::Bounded ? "Bounded" : "ExponentialGrowth"; }

FlowState integrate_flow(const Spacetime& s, const VectorField& field, const ChartPoint& p, double T,
                         const FlowOptions& options, const std::vector<double>& output_times,
                         const FlowObserver& observer) {
  const int n = s.dim();
  const auto un = static_cast<std::size_t>(n);
  if (field.dim() != n) throw Error("vector field has " + std::to_string(field.dim()) + " components, expected " + std::to_string(n));
  if (p.dim() != n) throw Error("start point has the wrong dimension");
  if (!(T >= 0.0)) throw Error("flow time must be nonnegative");
  s.metric().require_inside(p.coords);

  std::vector<double> y(un + un * un, 0.0);
  std::copy(p.coords.begin(), p.coords.end(), y.begin());
  for (std::size_t i = 0; i < un; ++i) y[un + i * un + i] = 1.0;

  FlowState out;
  const bool normalize = options.normalize && s.has_fundamental_domain();
  auto do_normalize = [&](std::vector<double>& state) {
    if (!normalize) return 0;
    const int letters = s.normalize_in_place(std::span<double>(state.data(), un), {},
                                             std::span<double>(state.data() + un, un * un), nullptr,
                                             options.max_deck_word);
    out.deck_letters += letters;
    return letters;
  };
  do_normalize(y);

  std::vector<double> value(un), jac(un * un);
  bool domain_hit = false;
  DormandPrince45 dp(
      [&](double, std::span<const double> st, std::span<double> d) {
        const auto x = st.subspan(0, un);
        if (!s.metric().contains(x)) {
          domain_hit = true;
          throw DomainError("flow left the chart domain");
        }
        field.value_and_jacobian(x, value, jac);
        for (std::size_t i = 0; i < un; ++i) d[i] = value[i];
        const double* J = st.data() + un;
        double* dJ = d.data() + un;
        for (std::size_t r = 0; r < un; ++r)
          for (std::size_t c = 0; c < un; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < un; ++k) acc += jac[r * un + k] * J[k * un + c];
            dJ[r * un + c] = acc;
          }
      },
      options.ode);
  dp.reset(0.0, y);

  auto snapshot = [&](double t) {
    out.time = t;
    out.point.coords.assign(y.begin(), y.begin() + n);
    out.jacobian = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        y.data() + n, n, n);
  };
  auto cap_step = [&] {
    if (!normalize) return;
    double vmax = 0.0;
    const auto v = field.value(std::span<const double>(y.data(), un));
    for (double c : v) vmax = std::max(vmax, std::abs(c));
    dp.set_max_step(vmax > 0.0 ? std::min(options.ode.max_step, options.max_displacement / vmax) : options.ode.max_step);
  };

  std::vector<double> targets;
  for (double t : output_times)
    if (t > 0.0 && t <= T) targets.push_back(t);
  const std::size_t observed = targets.size();
  if (targets.empty() || targets.back() < T) targets.push_back(T);
  std::size_t next_output = 0;
  while (next_output < targets.size()) {
    const double target = targets[next_output];
    if (dp.t() >= target) {
      snapshot(target);
      if (observer && next_output < observed) observer(out);
      ++next_output;
      continue;
    }
    cap_step();
    domain_hit = false;
    if (dp.step(target) == DormandPrince45::Status::StepTooSmall)
      throw DomainError("flow integration failed at t = " + std::to_string(dp.t()) + ": " +
                        (domain_hit ? std::string("orbit left the chart domain") : dp.last_error()));
    y = dp.y();
    if (do_normalize(y) > 0) dp.replace_state(y);
  }
  snapshot(T);
  return out;
}

EquicontinuityReport equicontinuity_diagnostic(const Spacetime& s, const VectorField& field, int samples, double T,
                                               std::uint64_t seed, const EquicontinuityOptions& options) {
  if (samples < 1) throw Error("diagnostic needs at least one sample");
  if (!(T > 0.0)) throw Error("diagnostic horizon must be positive");
  if (options.grid < 2) throw Error("diagnostic grid needs at least two intervals");
  const int n = s.dim();
  EquicontinuityReport report;
  report.bounded_margin = options.bounded_margin;
  for (int k = 0; k <= options.grid; ++k) report.times.push_back(T * k / options.grid);
  const std::vector<double> outputs(report.times.begin() + 1, report.times.end());
  report.samples.resize(static_cast<std::size_t>(samples));

  parallel_for(samples, options.jobs, [&](int i) {
    EquicontinuitySample& smp = report.samples[static_cast<std::size_t>(i)];
    auto rng = trial_stream(seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 10000 && smp.start.coords.empty(); ++attempt) {
      std::vector<double> unit(static_cast<std::size_t>(n));
      for (double& u : unit) u = uniform(rng, 0.0, 1.0);
      auto p = s.sample_box_point(unit);
      if (s.metric().domain_margin(p) > 1e-3) smp.start.coords = std::move(p);
    }
    if (smp.start.coords.empty()) {
      smp.failure = "no start point inside the domain";
      return;
    }
    try {
      std::vector<double> curve{0.0};
      integrate_flow(s, field, smp.start, T, options.flow, outputs,
                     [&](const FlowState& st) { curve.push_back(std::log(operator_norm(st.jacobian))); });
      curve.resize(report.times.size(), curve.back());
      smp.log_norms = std::move(curve);
    } catch (const Error& e) {
      smp.failure = e.what();
    }
  });

  report.mean_log_norm.assign(report.times.size(), 0.0);
  int ok = 0;
  for (const auto& smp : report.samples) {
    if (smp.log_norms.empty()) {
      ++report.failures;
      continue;
    }
    ++ok;
    for (std::size_t k = 0; k < smp.log_norms.size(); ++k) {
      report.mean_log_norm[k] += smp.log_norms[k];
      report.max_log_norm = std::max(report.max_log_norm, smp.log_norms[k]);
    }
  }
  if (ok > 0)
    for (double& v : report.mean_log_norm) v /= ok;

  double mx = 0.0, my = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < report.times.size(); ++k)
    if (report.times[k] >= T / 2) {
      mx += report.times[k];
      my += report.mean_log_norm[k];
      ++count;
    }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < report.times.size(); ++k)
    if (report.times[k] >= T / 2) {
      sxx += (report.times[k] - mx) * (report.times[k] - mx);
      sxy += (report.times[k] - mx) * (report.mean_log_norm[k] - my);
    }
  report.fitted_rate = sxx > 0.0 ? sxy / sxx : 0.0;
  const bool bounded = ok > 0 && report.max_log_norm < std::log1p(options.bounded_margin);
  report.classification = bounded ? FlowClass::Bounded : FlowClass::ExponentialGrowth;
  return report;
}

}  // namespace brinkmann
