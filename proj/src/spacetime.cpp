#include "brinkmann/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "brinkmann/errors.hpp"
#include "brinkmann/sampling.hpp"

namespace brinkmann {

namespace {

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows() * m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  return out;
}

void matvec(const std::vector<double>& m, std::span<const double> v, std::span<double> out) {
  const std::size_t n = v.size();
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += m[r * n + c] * v[c];
    out[r] = s;
  }
}

}  // namespace

DeckTransform::DeckTransform(Eigen::MatrixXd linear, Eigen::VectorXd translation)
    : linear_(std::move(linear)), translation_(std::move(translation)) {
  const auto n = translation_.size();
  if (linear_.rows() != n || linear_.cols() != n) throw DeckError("deck map dimensions do not match");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(linear_);
  if (!lu.isInvertible()) throw DeckError("deck map is not invertible");
  inverse_linear_ = lu.inverse();
  l_ = row_major(linear_);
  li_ = row_major(inverse_linear_);
  translation_only_ = (linear_ - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0;
}

void DeckTransform::apply(std::span<const double> x, std::span<double> out) const {
  double tmp[kMaxDim];
  const std::size_t n = x.size();
  matvec(l_, x, std::span<double>(tmp, n));
  for (std::size_t i = 0; i < n; ++i) out[i] = tmp[i] + translation_(static_cast<Eigen::Index>(i));
}

void DeckTransform::apply_inverse(std::span<const double> x, std::span<double> out) const {
  double tmp[kMaxDim];
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] - translation_(static_cast<Eigen::Index>(i));
  matvec(li_, std::span<const double>(tmp, n), out);
}

std::vector<double> DeckTransform::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  apply(x, out);
  return out;
}

std::vector<double> DeckTransform::apply_inverse(std::span<const double> x) const {
  std::vector<double> out(x.size());
  apply_inverse(x, out);
  return out;
}

void DeckTransform::push(std::span<const double> v, std::span<double> out, bool inverse) const {
  double tmp[kMaxDim];
  const std::size_t n = v.size();
  matvec(inverse ? li_ : l_, v, std::span<double>(tmp, n));
  std::copy(tmp, tmp + n, out.begin());
}

int DeckWord::length() const {
  int total = 0;
  for (const auto& [g, p] : letters) total += std::abs(p);
  return total;
}

std::string DeckWord::to_string() const {
  std::string out;
  for (const auto& [g, p] : letters) {
    if (!out.empty()) out += ' ';
    out += "g" + std::to_string(g) + "^" + std::to_string(p);
  }
  return out;
}

Spacetime::Spacetime(SpacetimeSpec spec) : spec_(std::move(spec)) {
  metric_ = build_metric_field(spec_);
  if (spec_.v_field) v_ = VectorField(*spec_.v_field);
  for (const AffineMapSpec& m : spec_.deck) deck_.emplace_back(m.linear, m.translation);
  for (const DomainReducer& r : spec_.fundamental_domain) {
    if (r.kind != DomainReducer::Kind::Lattice) {
      lattice_inverse_.emplace_back();
      continue;
    }
    const auto k = static_cast<Eigen::Index>(r.axes.size());
    Eigen::MatrixXd basis(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i)
        basis(i, j) = deck_[static_cast<std::size_t>(r.generators[static_cast<std::size_t>(j)])].translation()(
            r.axes[static_cast<std::size_t>(i)]);
    lattice_inverse_.push_back(row_major(basis.inverse()));
  }
  check_signature();
  if (!spec_.check_deck_isometry) return;
  const double residual = deck_isometry_residual();
  if (!(residual < 1e-9)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", residual);
    throw SchemaError("/deck", std::string("deck transform is not an isometry (pullback residual ") + buf + ")");
  }
}

void Spacetime::check_signature() {
  const int n = dim();
  for (std::uint64_t idx = 1; idx < 1000; ++idx) {
    const auto p = sample_box_point(halton_point(idx, n));
    if (!metric_.contains(p)) continue;
    base_signature_ = eval_metric(metric_, ChartPoint{p});
    if (!base_signature_.lorentzian())
      throw SchemaError("/coefficients", "metric is not Lorentzian at the base point (signature " +
                                             std::to_string(base_signature_.negative_count) + "," +
                                             std::to_string(base_signature_.positive_count) + ")");
    return;
  }
  throw SchemaError("/domain", "no sample-box point lies inside the domain");
}

const VectorField& Spacetime::V() const {
  if (v_.empty()) throw Error("spacetime '" + spec_.name + "' has no distinguished vector field");
  return v_;
}

bool Spacetime::in_fundamental_domain(std::span<const double> x) const {
  for (std::size_t ri = 0; ri < spec_.fundamental_domain.size(); ++ri) {
    const DomainReducer& r = spec_.fundamental_domain[ri];
    switch (r.kind) {
      case DomainReducer::Kind::Shell: {
        const double m = std::max(std::abs(x[static_cast<std::size_t>(r.axes[0])]),
                                  std::abs(x[static_cast<std::size_t>(r.axes[1])]));
        if (!(m >= 1.0 && m < r.ratio)) return false;
        break;
      }
      case DomainReducer::Kind::Slab: {
        const double s = x[static_cast<std::size_t>(r.axes[0])];
        if (!(s >= 0.0 && s < r.period)) return false;
        break;
      }
      case DomainReducer::Kind::Lattice: {
        const std::size_t k = r.axes.size();
        for (std::size_t i = 0; i < k; ++i) {
          double c = 0.0;
          for (std::size_t j = 0; j < k; ++j)
            c += lattice_inverse_[ri][i * k + j] * x[static_cast<std::size_t>(r.axes[j])];
          if (!(c >= 0.0 && c < 1.0)) return false;
        }
        break;
      }
    }
  }
  return true;
}

void Spacetime::apply_power(int generator, int power, std::span<double> x, std::span<double> vectors,
                            std::span<double> derivative) const {
  if (power == 0) return;
  const DeckTransform& g = deck_[static_cast<std::size_t>(generator)];
  const std::size_t n = x.size();
  if (g.is_translation()) {
    for (std::size_t i = 0; i < n; ++i) x[i] += power * g.translation()(static_cast<Eigen::Index>(i));
    return;
  }
  const bool inverse = power < 0;
  double col[kMaxDim];
  for (int rep = 0; rep < std::abs(power); ++rep) {
    if (inverse) g.apply_inverse(x, x);
    else g.apply(x, x);
    for (std::size_t off = 0; off + n <= vectors.size(); off += n) g.push(vectors.subspan(off, n), vectors.subspan(off, n), inverse);
    if (!derivative.empty()) {
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) col[r] = derivative[r * n + c];
        g.push(std::span<const double>(col, n), std::span<double>(col, n), inverse);
        for (std::size_t r = 0; r < n; ++r) derivative[r * n + c] = col[r];
      }
    }
  }
}

int Spacetime::normalize_in_place(std::span<double> x, std::span<double> vectors, std::span<double> derivative,
                                  DeckWord* word, int max_word) const {
  int total = 0;
  auto record = [&](int generator, int power) {
    if (power == 0) return;
    total += std::abs(power);
    if (total > max_word)
      throw DeckError("deck normalization needs more than " + std::to_string(max_word) + " letters");
    apply_power(generator, power, x, vectors, derivative);
    if (word) word->letters.emplace_back(generator, power);
  };
  for (double c : x)
    if (!std::isfinite(c)) throw DeckError("cannot normalize a non-finite point");

  for (std::size_t ri = 0; ri < spec_.fundamental_domain.size(); ++ri) {
    const DomainReducer& r = spec_.fundamental_domain[ri];
    switch (r.kind) {
      case DomainReducer::Kind::Shell: {
        const auto a = static_cast<std::size_t>(r.axes[0]);
        const auto b = static_cast<std::size_t>(r.axes[1]);
        for (int pass = 0; pass < 4; ++pass) {
          const double m = std::max(std::abs(x[a]), std::abs(x[b]));
          if (m == 0.0) throw DeckError("the shell centre has no fundamental-domain representative");
          if (m >= 1.0 && m < r.ratio) break;
          const double k = std::floor(std::log(m) / std::log(r.ratio));
          if (std::abs(k) > max_word) throw DeckError("deck normalization needs more than " + std::to_string(max_word) + " letters");
          record(r.generators[0], k == 0.0 ? (m < 1.0 ? 1 : -1) : -static_cast<int>(k));
        }
        break;
      }
      case DomainReducer::Kind::Slab: {
        const auto a = static_cast<std::size_t>(r.axes[0]);
        for (int pass = 0; pass < 3; ++pass) {
          if (x[a] >= 0.0 && x[a] < r.period) break;
          const double k = std::floor(x[a] / r.period);
          if (std::abs(k) > max_word) throw DeckError("deck normalization needs more than " + std::to_string(max_word) + " letters");
          record(r.generators[0], k == 0.0 ? 1 : -static_cast<int>(k));
        }
        break;
      }
      case DomainReducer::Kind::Lattice: {
        const std::size_t k = r.axes.size();
        for (int pass = 0; pass < 3; ++pass) {
          bool inside = true;
          for (std::size_t i = 0; i < k; ++i) {
            double c = 0.0;
            for (std::size_t j = 0; j < k; ++j)
              c += lattice_inverse_[ri][i * k + j] * x[static_cast<std::size_t>(r.axes[j])];
            if (c >= 0.0 && c < 1.0) continue;
            inside = false;
            const double f = std::floor(c);
            if (std::abs(f) > max_word) throw DeckError("deck normalization needs more than " + std::to_string(max_word) + " letters");
            record(r.generators[i], f == 0.0 ? 1 : -static_cast<int>(f));
          }
          if (inside) break;
        }
        break;
      }
    }
  }
  return total;
}

Normalized Spacetime::normalize(const ChartPoint& p, const std::vector<TangentVec>& vectors, int max_word) const {
  const int n = dim();
  if (p.dim() != n) throw Error("point has dimension " + std::to_string(p.dim()) + ", expected " + std::to_string(n));
  std::vector<double> x = p.coords;
  std::vector<double> vs;
  for (const TangentVec& v : vectors) {
    if (static_cast<int>(v.components.size()) != n) throw Error("tangent vector has the wrong dimension");
    vs.insert(vs.end(), v.components.begin(), v.components.end());
  }
  std::vector<double> d(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i * n + i)] = 1.0;
  Normalized out;
  normalize_in_place(x, vs, d, &out.word, max_word);
  out.point.coords = x;
  for (std::size_t k = 0; k < vectors.size(); ++k)
    out.vectors.push_back({std::vector<double>(vs.begin() + static_cast<std::ptrdiff_t>(k * n),
                                               vs.begin() + static_cast<std::ptrdiff_t>((k + 1) * n)),
                           out.point});
  out.derivative = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(d.data(), n, n);
  return out;
}

double Spacetime::deck_isometry_residual(int samples) const {
  const int n = dim();
  double worst = 0.0;
  for (const DeckTransform& g : deck_) {
    int used = 0;
    for (std::uint64_t idx = 1; used < samples && idx < static_cast<std::uint64_t>(samples) * 50; ++idx) {
      const auto unit = halton_point(idx, n);
      const auto p = sample_box_point(unit);
      const auto q = g.apply(p);
      if (!metric_.contains(p) || !metric_.contains(q)) continue;
      ++used;
      const auto gp = metric_.values(p);
      const auto gq = metric_.values(q);
      const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mp(gp.data(), n, n);
      const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mq(gq.data(), n, n);
      const Eigen::MatrixXd pulled = g.linear().transpose() * mq * g.linear();
      const double scale = std::max(1.0, mp.cwiseAbs().maxCoeff());
      worst = std::max(worst, (pulled - mp).cwiseAbs().maxCoeff() / scale);
    }
  }
  return worst;
}

double Spacetime::deck_inverse_residual(int samples, std::uint64_t seed) const {
  const int n = dim();
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto rng = trial_stream(seed, static_cast<std::uint64_t>(s));
    std::vector<double> unit(static_cast<std::size_t>(n));
    for (double& u : unit) u = uniform(rng, 0.0, 1.0);
    const auto p = sample_box_point(unit);
    for (const DeckTransform& g : deck_) {
      const auto a = g.apply_inverse(g.apply(p));
      const auto b = g.apply(g.apply_inverse(p));
      for (int i = 0; i < n; ++i) {
        const double scale = std::max(1.0, std::abs(p[static_cast<std::size_t>(i)]));
        worst = std::max(worst, std::abs(a[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]) / scale);
        worst = std::max(worst, std::abs(b[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]) / scale);
      }
    }
  }
  return worst;
}

std::vector<double> Spacetime::sample_box_point(std::span<const double> unit) const {
  return scale_to_box(unit, spec_.sample_lower, spec_.sample_upper);
}

}  // namespace brinkmann
