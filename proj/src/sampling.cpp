#include "brinkmann/sampling.hpp"

#include <cmath>

namespace brinkmann {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

}  // namespace

std::vector<double> halton_point(std::uint64_t index, int dim) {
  std::vector<double> p(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) p[static_cast<std::size_t>(i)] = radical_inverse(index, kPrimes[i % 12]);
  return p;
}

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform(rng, 0.0, 1.0);
  while (u1 <= 0.0) u1 = uniform(rng, 0.0, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<double> random_direction(std::mt19937_64& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  while (norm < 1e-12) {
    norm = 0.0;
    for (double& c : v) {
      c = standard_normal(rng);
      norm += c * c;
    }
  }
  norm = std::sqrt(norm);
  for (double& c : v) c /= norm;
  return v;
}

std::vector<double> scale_to_box(std::span<const double> unit, std::span<const double> lower,
                                 std::span<const double> upper) {
  std::vector<double> p(unit.size());
  for (std::size_t i = 0; i < unit.size(); ++i) p[i] = lower[i] + (upper[i] - lower[i]) * unit[i];
  return p;
}

}  // namespace brinkmann
