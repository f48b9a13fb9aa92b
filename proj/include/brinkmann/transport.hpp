#pragma once

// Parallel transport along chart curves.

#include <functional>
#include <span>
#include <vector>

#include "brinkmann/geometry.hpp"
#include "brinkmann/ode.hpp"

namespace brinkmann {

struct CurveSample {
  std::vector<double> point;
  std::vector<double> velocity;
};

/// Parameterized chart curve returning position and velocity.
using Curve = std::function<CurveSample(double)>;

/// C^1 curve through samples (parameter, point, velocity), cubic Hermite
/// between consecutive samples. Velocity is the derivative of the interpolant.
class SampledCurve {
 public:
  SampledCurve(std::vector<double> params, std::vector<std::vector<double>> points,
               std::vector<std::vector<double>> velocities);

  CurveSample operator()(double t) const;
  double front() const { return params_.front(); }
  double back() const { return params_.back(); }

 private:
  std::vector<double> params_;
  std::vector<std::vector<double>> points_;
  std::vector<std::vector<double>> velocities_;
};

inline OdeOptions transport_defaults() {
  OdeOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-14;
  o.min_step = 1e-13;
  o.max_step = 0.1;
  return o;
}

struct TransportResult {
  std::vector<TangentVec> vectors;
  /// max over the run of |g(v_i, v_j)(t) - g(v_i, v_j)(t0)|
  double gram_drift = 0.0;
};

/// Solves dv^c/dt + Gamma^c_ab(x(t)) xdot^a v^b = 0 for every vector in
/// `initial` along curve(t), t from t0 to t1. Throws TransportError on step
/// collapse.
TransportResult parallel_transport(const MetricField& field, const Curve& curve, double t0, double t1,
                                   std::span<const TangentVec> initial, OdeOptions options = transport_defaults());

TangentVec parallel_transport(const MetricField& field, const Curve& curve, double t0, double t1,
                              const TangentVec& v0);

}  // namespace brinkmann
