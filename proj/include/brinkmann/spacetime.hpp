#pragma once

// Compiled spacetimes: metric, distinguished field, deck group and
// normalization into a fundamental domain.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "brinkmann/geometry.hpp"
#include "brinkmann/spec.hpp"

namespace brinkmann {

/// Affine deck transformation x -> L x + t. Its derivative is L.
class DeckTransform {
 public:
  DeckTransform(Eigen::MatrixXd linear, Eigen::VectorXd translation);

  int dim() const { return static_cast<int>(translation_.size()); }
  const Eigen::MatrixXd& linear() const { return linear_; }
  const Eigen::MatrixXd& derivative() const { return linear_; }
  const Eigen::VectorXd& translation() const { return translation_; }
  const Eigen::MatrixXd& inverse_linear() const { return inverse_linear_; }
  bool is_translation() const { return translation_only_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  void apply_inverse(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_inverse(std::span<const double> x) const;

  /// out = L v (or L^-1 v).
  void push(std::span<const double> v, std::span<double> out, bool inverse = false) const;

 private:
  Eigen::MatrixXd linear_;
  Eigen::VectorXd translation_;
  Eigen::MatrixXd inverse_linear_;
  std::vector<double> l_;    // row-major copies for the hot path
  std::vector<double> li_;
  bool translation_only_ = false;
};

/// Product of generator powers, applied left to right.
struct DeckWord {
  std::vector<std::pair<int, int>> letters;  // (generator, power)

  int length() const;
  bool empty() const { return letters.empty(); }
  std::string to_string() const;
};

struct Normalized {
  ChartPoint point;
  std::vector<TangentVec> vectors;
  DeckWord word;
  Eigen::MatrixXd derivative;
};

class Spacetime {
 public:
  /// Compiles `spec` and checks that every deck generator is an isometry
  /// (sampled pullback residual < 1e-9); throws SchemaError otherwise.
  explicit Spacetime(SpacetimeSpec spec);

  const std::string& name() const { return spec_.name; }
  const SpacetimeSpec& spec() const { return spec_; }
  const MetricField& metric() const { return metric_; }
  int dim() const { return spec_.dimension; }
  ChartKind chart_kind() const { return spec_.chart_kind; }

  bool has_V() const { return !v_.empty(); }
  /// Throws Error when the spacetime has no distinguished field.
  const VectorField& V() const;

  const std::vector<DeckTransform>& deck() const { return deck_; }
  bool claims_brinkmann() const { return spec_.claims_brinkmann; }
  bool claims_compact_quotient() const { return spec_.claims_compact_quotient; }

  bool has_fundamental_domain() const { return !spec_.fundamental_domain.empty(); }
  bool in_fundamental_domain(std::span<const double> x) const;

  /// Image of p in the fundamental domain with pushed-forward vectors.
  /// Throws DeckError when the word would exceed max_word letters.
  Normalized normalize(const ChartPoint& p, const std::vector<TangentVec>& vectors, int max_word = 64) const;

  /// Hot-path variant. `vectors` holds consecutive n-vectors; when
  /// `derivative` is non-empty (n*n row-major) it is left-multiplied by the
  /// word's derivative. Returns the word length.
  int normalize_in_place(std::span<double> x, std::span<double> vectors, std::span<double> derivative,
                         DeckWord* word, int max_word = 64) const;

  /// Max over generators of |g_p - L^T g_{phi(p)} L| at sampled points.
  double deck_isometry_residual(int samples = 20) const;
  /// Max over generators of |phi^-1(phi(p)) - p| and |phi(phi^-1(p)) - p|.
  double deck_inverse_residual(int samples = 100, std::uint64_t seed = 0) const;

  /// Signature at the base point, checked once at construction.
  const MetricSample& base_signature() const { return base_signature_; }

  /// Sample point from the unit cube mapped into the sample box.
  std::vector<double> sample_box_point(std::span<const double> unit) const;

 private:
  void check_signature();
  void apply_power(int generator, int power, std::span<double> x, std::span<double> vectors,
                   std::span<double> derivative) const;

  SpacetimeSpec spec_;
  MetricField metric_;
  MetricSample base_signature_;
  VectorField v_;
  std::vector<DeckTransform> deck_;
  std::vector<std::vector<double>> lattice_inverse_;  // per reducer, B^-1 row-major (lattice only)
};

}  // namespace brinkmann
