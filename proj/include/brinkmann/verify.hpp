#pragma once

// Brinkmann-structure certificates and the geometric constructions built on
// a parallel null field: totally geodesic surfaces, frame transport on
// E = V^perp / V, the pp-wave Ricci/Laplacian check and the norm-growth fit.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "brinkmann/geodesic.hpp"
#include "brinkmann/geometry.hpp"
#include "brinkmann/spacetime.hpp"

namespace brinkmann {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct BrinkmannCertificate {
  std::string spacetime;
  int samples = 0;
  double max_nabla_V = 0.0;  // max |(nabla_a V)^c|
  double max_g_VV = 0.0;     // max |g(V, V)|
  double max_d_alpha = 0.0;  // max |d_a alpha_b - d_b alpha_a|, alpha = g(V, .)
  double max_killing = 0.0;  // max |(L_V g)_ab|, informational
  std::vector<CheckResult> checks;  // parallel, null, closed; tolerance 1e-8
  bool pass = false;
};

/// Evaluates the residuals at `samples` Halton points of the sample box that
/// lie in the domain. Throws Error when the spacetime has no V.
BrinkmannCertificate brinkmann_certificate(const Spacetime& s, int samples = 128);

struct SurfacePatch {
  int rows = 0;  // sigma nodes (geodesic parameter)
  int cols = 0;  // tau nodes (V-flow or ruling parameter)
  std::vector<double> sigma;
  std::vector<double> tau;
  std::vector<ChartPoint> points;          // row-major, rows x cols
  std::vector<TangentVec> frame_sigma;     // finite-difference tangents, NaN at the border
  std::vector<TangentVec> frame_tau;
  std::vector<double> second_fundamental_form;  // NaN where not computed
  std::vector<double> induced_curvature;        // NaN where not computed
  double max_second_fundamental_form = 0.0;
  double max_induced_curvature = 0.0;
  int border = 2;  // nodes per side without a full finite-difference stencil
};

struct SurfaceExtent {
  double geodesic_length = 1.0;
  double flow_time = 1.0;
};

struct SurfaceGrid {
  int m = 21;  // sigma nodes
  int k = 21;  // tau nodes
};

/// Image of the geodesic tangent to Q at p under the flow of V. Throws Error
/// if Q is parallel to V(p) or V is not parallel at p, DomainError when the
/// construction leaves the chart.
SurfacePatch totally_geodesic_surface(const Spacetime& s, const ChartPoint& p, const TangentVec& Q,
                                      SurfaceExtent extent = {}, SurfaceGrid grid = {});

/// Ruled control surface (sigma, tau) -> exp_{gamma(sigma)}(tau Y(sigma)),
/// gamma the geodesic tangent to q1 and Y the parallel transport of q2.
SurfacePatch ruled_surface(const Spacetime& s, const ChartPoint& p, const TangentVec& q1, const TangentVec& q2,
                           SurfaceExtent extent = {}, SurfaceGrid grid = {});

/// Representatives e_i in V^perp of a g_E-orthonormal basis of V^perp / V.
struct FrameOnE {
  ChartPoint base;
  std::vector<TangentVec> vectors;
};

/// Orthonormal frame of E at p built from the coordinate basis.
FrameOnE coordinate_frame_on_E(const Spacetime& s, const ChartPoint& p);
/// Orthonormal frame of E at p from candidate vectors (Gram-Schmidt in g_E).
FrameOnE frame_on_E(const Spacetime& s, const ChartPoint& p, const std::vector<std::vector<double>>& candidates);

struct FrameCheck {
  double max_g_eV = 0.0;      // max |g(e_i, V)|
  double gram_residual = 0.0; // max |g(e_i, e_j) - delta_ij|
};

FrameCheck check_frame(const Spacetime& s, const FrameOnE& f);

struct FrameTransportResult {
  FrameOnE frame;        // parallel transported and reprojected into V^perp
  FrameOnE pushforward;  // d(phi^t) e_i
  double horizontality_residual = 0.0;  // max_i dist(transported - pushed, R V)
  FrameCheck check;
};

FrameTransportResult frame_transport_along_V(const Spacetime& s, const FrameOnE& f, double t,
                                             double rel_tol = 1e-12);

struct RicciHarmonicReport {
  std::string H;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> points;  // (u, z) samples
  std::vector<double> ricci_norm;           // max |Ric_ab|
  std::vector<double> ricci_uu;
  std::vector<double> laplacian;            // Laplacian_z H
  double max_ricci_residual = 0.0;
  double max_laplacian_residual = 0.0;
  double ratio_min = 0.0;  // Ric_uu / Laplacian over samples with |Laplacian| > 1e-12
  double ratio_max = 0.0;
  int ratio_samples = 0;
};

RicciHarmonicReport ppwave_ricci_harmonic(const std::string& H, int n, int samples = 100, std::uint64_t seed = 0);

struct NormGrowthOptions {
  double epsilon = 0.1;
  int window_samples = 50;
  std::uint64_t seed = 0;
  /// Use this C instead of fitting (e.g. a C fitted at other speeds).
  double fixed_C = -1.0;
  double envelope_factor = 1.05;
  int jobs = 0;
  IntegratorConfig config{1e-12, 1e-14, 1e-16, 1.0, 1e8, 64, false, 1.0, false, 20'000'000};
};

struct NormGrowthTrial {
  double speed = 0.0;
  std::uint64_t index = 0;
  double max_slope = 0.0;  // max over the window of (r(t) - 1)/t
  double max_ratio = 0.0;
  bool violation = false;
};

struct NormGrowthReport {
  double epsilon = 0.1;
  double C = 0.0;
  bool fitted = true;
  int violations = 0;
  std::vector<NormGrowthTrial> trials;
};

/// For each speed s0 and trial, starts a g(gammadot, V) = 1 geodesic with
/// transverse speed s0 in a seeded direction, samples r(t) = |xdot(t)|/|xdot(0)|
/// (Euclidean transverse chart norm) on [0, epsilon/s0] and fits
/// C = max (r - 1)/t. Violations: r(t) > 1 + factor C t.
NormGrowthReport norm_growth_bound(const Spacetime& s, const std::vector<double>& speeds, int trials,
                                   const NormGrowthOptions& options = {});

/// Random spacelike pair (g-orthogonal, Euclidean unit length) spanning a plane that does not
/// contain V; used for control surfaces.
std::pair<TangentVec, TangentVec> random_control_plane(const Spacetime& s, const ChartPoint& p, std::uint64_t seed);
/// Random spacelike unit vector g-orthogonal to V(p), not parallel to V.
TangentVec random_transverse_to_V(const Spacetime& s, const ChartPoint& p, std::uint64_t seed);

}  // namespace brinkmann
