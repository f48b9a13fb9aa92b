#pragma once

// Geodesic equations, adaptive integration with deck normalization,
// completeness probing and the mechanical-system reduction.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "brinkmann/geometry.hpp"
#include "brinkmann/spacetime.hpp"

namespace brinkmann {

struct GeodesicState {
  ChartPoint point;
  TangentVec velocity;
  double affine_param = 0.0;
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double min_step = 1e-12;
  double max_step = 1.0;
  double blowup_speed = 1e8;  // Euclidean chart speed in the fundamental domain
  int max_deck_word = 64;
  bool normalize = true;       // deck normalization after every accepted step
  double max_displacement = 1.0;  // per-step chart displacement cap while normalizing
  bool record_samples = true;  // keep every accepted state in the trajectory
  long max_steps = 2'000'000;

  /// Throws Error unless 0 < min_step < max_step and tolerances are positive.
  void validate() const;
};

enum class VerdictKind { CompleteUpTo, EscapeAt, LeftDomain, IntegratorFailure };

const char* to_string(VerdictKind kind);

struct CompletenessVerdict {
  VerdictKind kind = VerdictKind::CompleteUpTo;
  double t = 0.0;  // T for CompleteUpTo, t_star otherwise
  // Escape evidence: speed ~ (t_est - t)^exponent.
  double blowup_exponent = 0.0;
  double extrapolated_t = 0.0;
  double final_speed = 0.0;
  std::string detail;
};

struct ConservedDrift {
  double energy = 0.0;    // max |g(xdot, xdot)(t) - g(xdot, xdot)(0)|
  double clairaut = 0.0;  // max |g(xdot, V)(t) - g(xdot, V)(0)|, 0 without V
  bool has_clairaut = false;
};

struct Trajectory {
  std::vector<GeodesicState> samples;
  ConservedDrift drift;
  CompletenessVerdict termination;
  double initial_energy = 0.0;
  double initial_clairaut = 0.0;
  /// Slope of log |xdot|_ref against log t over the run (t >= 1e-3 T).
  double growth_exponent = 0.0;
  double max_speed = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  long deck_letters = 0;
};

/// y = (x, xdot) of length 2n; writes (xdot, -Gamma(xdot, xdot)). On
/// Brinkmann and Rosen charts throws Error if the u-acceleration exceeds
/// 1e-12 (1 + |xdot|^2). `gamma` is workspace of n^3 doubles.
void geodesic_rhs(const Spacetime& s, std::span<const double> y, std::span<double> dy, std::span<double> gamma);
std::vector<double> geodesic_rhs(const Spacetime& s, const GeodesicState& state);

/// Integrates from `init` up to affine parameter init.affine_param + T.
/// Throws DomainError if the initial point is outside the chart domain;
/// every later failure becomes the termination verdict.
Trajectory integrate_geodesic(const Spacetime& s, const GeodesicState& init, double T,
                              const IntegratorConfig& cfg = {});

/// Default sampler: point uniform in the sample box (inside the domain),
/// velocity a uniform unit direction. Deterministic in (seed, index).
GeodesicState default_initial_condition(const Spacetime& s, std::uint64_t seed, std::uint64_t index);

using InitialSampler = std::function<GeodesicState(const Spacetime&, std::uint64_t seed, std::uint64_t index)>;

struct ScanOptions {
  int samples = 100;
  std::uint64_t seed = 0;
  double tmax = 100.0;
  IntegratorConfig config;
  int jobs = 0;  // 0 selects the available parallelism
  InitialSampler sampler;
};

struct ScanRecord {
  std::uint64_t index = 0;
  GeodesicState init;
  Trajectory trajectory;  // samples are not kept
};

struct ScanReport {
  std::string spacetime;
  std::uint64_t seed = 0;
  double tmax = 0.0;
  std::vector<ScanRecord> records;
  double fraction_complete = 0.0;
  std::vector<std::pair<std::uint64_t, double>> escapes;  // (index, t_star)
  double max_growth_exponent = 0.0;
  double max_energy_drift = 0.0;
  double max_clairaut_drift = 0.0;
};

ScanReport completeness_scan(const Spacetime& s, const ScanOptions& options);

/// Coefficients of the transverse geodesic equation
///   xddot = A xdot + B + connection,  connection^k = -Gamma(h_u)^k_ij xdot^i xdot^j,
/// for a geodesic with g(gammadot, V) = kappa in {0, 1} at chart parameter u.
struct MechanicalForm {
  Eigen::MatrixXd A;  // A(k, i) = -2 kappa Gamma^k_{iu}
  Eigen::VectorXd B;  // B_k = -kappa Gamma^k_{uu}
  Eigen::VectorXd connection;
};

MechanicalForm mechanical_form(const Spacetime& s, double u, std::span<const double> x, std::span<const double> xdot,
                               int kappa);

/// Runs `count` independent tasks on a pool of `jobs` threads; task i writes
/// only its own outputs.
void parallel_for(int count, int jobs, const std::function<void(int)>& task);

/// Worker count: `requested` if positive, else hardware concurrency.
int resolve_jobs(int requested);

}  // namespace brinkmann
