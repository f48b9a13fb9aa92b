#pragma once

// Flows of vector fields on quotients, their deck-corrected variational
// flows, and the equicontinuity diagnostic.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "brinkmann/geometry.hpp"
#include "brinkmann/ode.hpp"
#include "brinkmann/spacetime.hpp"

namespace brinkmann {

struct FlowState {
  ChartPoint point;
  Eigen::MatrixXd jacobian;  // d(phi^t) in fundamental-domain coordinates
  double time = 0.0;
  long deck_letters = 0;
};

struct FlowOptions {
  OdeOptions ode{1e-10, 1e-12, 1e-12, 0.5, 0.0};
  bool normalize = true;
  int max_deck_word = 64;
  double max_displacement = 0.5;  // per-step chart displacement cap while normalizing
};

/// Observer called at each requested output time.
using FlowObserver = std::function<void(const FlowState&)>;

/// Integrates xdot = X(x) with J' = DX(x) J, J(0) = I, normalizing into the
/// fundamental domain after each step (J is left-multiplied by the deck
/// derivative). `output_times` (ascending, within (0, T]) are visited
/// exactly. Throws DomainError when the orbit leaves the chart domain.
FlowState integrate_flow(const Spacetime& s, const VectorField& field, const ChartPoint& p, double T,
                         const FlowOptions& options = {}, const std::vector<double>& output_times = {},
                         const FlowObserver& observer = {});

double operator_norm(const Eigen::MatrixXd& m);

enum class FlowClass { Bounded, ExponentialGrowth };

const char* to_string(FlowClass c);

struct EquicontinuitySample {
  ChartPoint start;
  std::vector<double> log_norms;  // one per report time; empty on failure
  std::string failure;
};

struct EquicontinuityOptions {
  int grid = 200;  // output intervals over [0, T]
  double bounded_margin = 0.01;
  int jobs = 0;
  FlowOptions flow;
};

struct EquicontinuityReport {
  std::vector<double> times;
  std::vector<EquicontinuitySample> samples;
  std::vector<double> mean_log_norm;  // over successful samples
  double max_log_norm = 0.0;
  double fitted_rate = 0.0;  // slope of mean_log_norm on [T/2, T]
  double bounded_margin = 0.01;
  FlowClass classification = FlowClass::Bounded;
  int failures = 0;
};

/// Samples start points uniformly in the sample box (seeded), integrates the
/// variational flow of `field` and classifies it as Bounded iff
/// max log |J| < log(1 + bounded_margin) over the horizon.
EquicontinuityReport equicontinuity_diagnostic(const Spacetime& s, const VectorField& field, int samples, double T,
                                               std::uint64_t seed, const EquicontinuityOptions& options = {});

}  // namespace brinkmann
