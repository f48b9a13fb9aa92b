#include "brinkmann/transport.hpp"

#include <algorithm>
#include <cmath>

#include "brinkmann/errors.hpp"

namespace brinkmann {

SampledCurve::SampledCurve(std::vector<double> params, std::vector<std::vector<double>> points,
                           std::vector<std::vector<double>> velocities)
    : params_(std::move(params)), points_(std::move(points)), velocities_(std::move(velocities)) {
  if (params_.size() < 2 || points_.size() != params_.size() || velocities_.size() != params_.size()) {
    throw DomainError("sampled curve needs at least two consistent samples");
  }
  if (!std::is_sorted(params_.begin(), params_.end()) ||
      std::adjacent_find(params_.begin(), params_.end()) != params_.end()) {
    throw DomainError("sampled curve parameters must be strictly increasing");
  }
}

CurveSample SampledCurve::operator()(double t) const {
  t = std::clamp(t, params_.front(), params_.back());
  auto it = std::upper_bound(params_.begin(), params_.end(), t);
  std::size_t i = it == params_.begin() ? 0 : static_cast<std::size_t>(it - params_.begin()) - 1;
  if (i + 1 >= params_.size()) i = params_.size() - 2;
  const double h = params_[i + 1] - params_[i];
  const double s = (t - params_[i]) / h;
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  const double d00 = (6 * s * s - 6 * s) / h, d10 = 3 * s * s - 4 * s + 1;
  const double d01 = (-6 * s * s + 6 * s) / h, d11 = 3 * s * s - 2 * s;
  const auto& p0 = points_[i];
  const auto& p1 = points_[i + 1];
  const auto& v0 = velocities_[i];
  const auto& v1 = velocities_[i + 1];
  CurveSample out;
  out.point.resize(p0.size());
  out.velocity.resize(p0.size());
  for (std::size_t k = 0; k < p0.size(); ++k) {
    out.point[k] = h00 * p0[k] + h10 * h * v0[k] + h01 * p1[k] + h11 * h * v1[k];
    out.velocity[k] = d00 * p0[k] + d10 * v0[k] + d01 * p1[k] + d11 * v1[k];
  }
  return out;
}

TransportResult parallel_transport(const MetricField& field, const Curve& curve, double t0, double t1,
                                   std::span<const TangentVec> initial, OdeOptions options) {
  const int n = field.dim();
  const std::size_t count = initial.size();
  std::vector<double> state;
  state.reserve(count * static_cast<std::size_t>(n));
  for (const auto& v : initial) {
    if (v.components.size() != static_cast<std::size_t>(n)) throw DomainError("transported vector has wrong dimension");
    state.insert(state.end(), v.components.begin(), v.components.end());
  }
  const double direction = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> gamma(static_cast<std::size_t>(n * n * n));

  // Integrate in s = direction * t so the solver always runs forward.
  auto rhs = [&](double s, std::span<const double> y, std::span<double> dy) {
    const CurveSample c = curve(direction * s);
    christoffel_into(field, c.point, gamma);
    for (std::size_t k = 0; k < count; ++k) {
      const double* v = y.data() + k * static_cast<std::size_t>(n);
      double* dv = dy.data() + k * static_cast<std::size_t>(n);
      for (int cc = 0; cc < n; ++cc) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a) {
          const double xa = c.velocity[static_cast<std::size_t>(a)];
          if (xa == 0.0) continue;
          for (int b = 0; b < n; ++b) acc += gamma[static_cast<std::size_t>((cc * n + a) * n + b)] * xa * v[b];
        }
        dv[cc] = -direction * acc;
      }
    }
  };

  auto gram = [&](double t, std::span<const double> y) {
    const CurveSample c = curve(t);
    const std::vector<double> g = field.values(c.point);
    std::vector<double> out(count * count, 0.0);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < count; ++j) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            acc += g[static_cast<std::size_t>(a * n + b)] * y[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)] *
                   y[j * static_cast<std::size_t>(n) + static_cast<std::size_t>(b)];
        out[i * count + j] = acc;
      }
    return out;
  };

  const std::vector<double> gram0 = gram(t0, state);
  TransportResult result;
  DormandPrince45 solver(rhs, options);
  const double s0 = direction * t0;
  const double s1 = direction * t1;
  solver.reset(s0, state);
  while (solver.t() < s1) {
    if (solver.step(s1) != DormandPrince45::Status::Accepted) {
      throw TransportError(direction * solver.t(), "parallel transport step collapse: " + solver.last_error());
    }
    const std::vector<double> gr = gram(direction * solver.t(), solver.y());
    for (std::size_t k = 0; k < gr.size(); ++k) result.gram_drift = std::max(result.gram_drift, std::abs(gr[k] - gram0[k]));
  }
  const CurveSample end = curve(t1);
  for (std::size_t k = 0; k < count; ++k) {
    TangentVec v;
    v.base.coords = end.point;
    v.components.assign(solver.y().begin() + static_cast<std::ptrdiff_t>(k * static_cast<std::size_t>(n)),
                        solver.y().begin() + static_cast<std::ptrdiff_t>((k + 1) * static_cast<std::size_t>(n)));
    result.vectors.push_back(std::move(v));
  }
  return result;
}

TangentVec parallel_transport(const MetricField& field, const Curve& curve, double t0, double t1,
                              const TangentVec& v0) {
  return parallel_transport(field, curve, t0, t1, std::span<const TangentVec>(&v0, 1)).vectors.front();
}

}  // namespace brinkmann
