#pragma once

// Deterministic sampling: Halton points for certificates, seeded streams
// for per-trial initial conditions.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace brinkmann {

/// Radical-inverse Halton point (bases 2, 3, 5, ...) with the given index,
/// coordinates in [0, 1). Index 0 is skipped by callers that want no zeros.
std::vector<double> halton_point(std::uint64_t index, int dim);

/// Independent stream for trial `index` under `seed`; identical for any
/// worker count or scheduling order.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t index);

double uniform(std::mt19937_64& rng, double lo, double hi);
double standard_normal(std::mt19937_64& rng);
/// Uniform direction on the unit sphere of the given dimension.
std::vector<double> random_direction(std::mt19937_64& rng, int dim);

/// Maps a unit-cube point into the box [lower, upper].
std::vector<double> scale_to_box(std::span<const double> unit, std::span<const double> lower,
                                 std::span<const double> upper);

}  // namespace brinkmann
