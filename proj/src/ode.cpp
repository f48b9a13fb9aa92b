#include "brinkmann/ode.hpp"

#include <algorithm>
#include <cmath>

#include "brinkmann/errors.hpp"

namespace brinkmann {

namespace {

// Dormand & Prince (1980) coefficients, dense output after Hairer's DOPRI5.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

DormandPrince45::DormandPrince45(Rhs rhs, OdeOptions options) : rhs_(std::move(rhs)), opt_(options) {}

void DormandPrince45::reset(double t, std::vector<double> y) {
  n_ = y.size();
  t_ = t;
  t_prev_ = t;
  y_ = std::move(y);
  y_prev_ = y_;
  for (auto& k : k_) k.assign(n_, 0.0);
  for (auto& c : cont_) c.assign(n_, 0.0);
  tmp_.assign(n_, 0.0);
  ynew_.assign(n_, 0.0);
  err_.assign(n_, 0.0);
  rhs_(t_, y_, k_[0]);
  if (h_ <= 0.0) h_ = opt_.initial_step > 0.0 ? opt_.initial_step : initial_step_size();
  h_ = std::min(h_, opt_.max_step);
  last_rejected_ = false;
}

double DormandPrince45::error_norm(std::span<const double> err, std::span<const double> y0,
                                   std::span<const double> y1) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sc = opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return n_ == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(n_));
}

double DormandPrince45::initial_step_size() const {
  double d0 = 0.0, d1n = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
    d0 += (y_[i] / sc) * (y_[i] / sc);
    d1n += (k_[0][i] / sc) * (k_[0][i] / sc);
  }
  d0 = std::sqrt(d0 / std::max<std::size_t>(n_, 1));
  d1n = std::sqrt(d1n / std::max<std::size_t>(n_, 1));
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, opt_.max_step);
  std::vector<double> y1(n_), f1(n_);
  for (std::size_t i = 0; i < n_; ++i) y1[i] = y_[i] + h0 * k_[0][i];
  double d2 = 0.0;
  try {
    rhs_(t_ + h0, y1, f1);
    for (std::size_t i = 0; i < n_; ++i) {
      const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
      d2 += ((f1[i] - k_[0][i]) / sc) * ((f1[i] - k_[0][i]) / sc);
    }
    d2 = std::sqrt(d2 / std::max<std::size_t>(n_, 1)) / h0;
  } catch (const Error&) {
    return std::max(opt_.min_step, h0 * 1e-3);
  }
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::max(opt_.min_step, std::min({100.0 * h0, h1, opt_.max_step}));
}

DormandPrince45::Status DormandPrince45::step(double t_limit) {
  const std::size_t n = n_;
  auto& k1 = k_[0];
  auto& k2 = k_[1];
  auto& k3 = k_[2];
  auto& k4 = k_[3];
  auto& k5 = k_[4];
  auto& k6 = k_[5];
  auto& k7 = k_[6];
  for (;;) {
    const double remaining = t_limit - t_;
    double h = std::min(h_, opt_.max_step);
    bool final_step = false;
    if (h >= remaining) {
      h = remaining;
      final_step = true;
    }
    if (h < opt_.min_step && !final_step) return Status::StepTooSmall;

    bool ok = true;
    try {
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h * a21 * k1[i];
      rhs_(t_ + c2 * h, tmp_, k2);
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
      rhs_(t_ + c3 * h, tmp_, k3);
      for (std::size_t i = 0; i < n; ++i) tmp_[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      rhs_(t_ + c4 * h, tmp_, k4);
      for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs_(t_ + c5 * h, tmp_, k5);
      for (std::size_t i = 0; i < n; ++i)
        tmp_[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      rhs_(t_ + h, tmp_, k6);
      for (std::size_t i = 0; i < n; ++i)
        ynew_[i] = y_[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      rhs_(t_ + h, ynew_, k7);
    } catch (const Error& e) {
      ok = false;
      last_failure_ = Failure::RhsError;
      last_error_ = e.what();
    }

    double err = 0.0;
    if (ok) {
      for (std::size_t i = 0; i < n; ++i)
        err_[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = error_norm(err_, y_, ynew_);
      if (!std::isfinite(err)) {
        ok = false;
        last_failure_ = Failure::ErrorEstimate;
      } else if (err > 1.0) {
        ok = false;
        last_failure_ = Failure::ErrorEstimate;
      }
    }
    if (ok && acceptor_ && !acceptor_(t_ + h, ynew_)) {
      ok = false;
      last_failure_ = Failure::Vetoed;
      err = -1.0;
    }

    if (!ok) {
      ++rejected_;
      if (last_failure_ == Failure::ErrorEstimate && std::isfinite(err) && err > 0.0) {
        h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      } else {
        h_ = h * 0.25;
      }
      last_rejected_ = true;
      continue;
    }

    // Accepted: build dense output, advance, FSAL.
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = ynew_[i] - y_[i];
      const double bspl = h * k1[i] - ydiff;
      cont_[0][i] = y_[i];
      cont_[1][i] = ydiff;
      cont_[2][i] = bspl;
      cont_[3][i] = ydiff - h * k7[i] - bspl;
      cont_[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    y_prev_ = y_;
    t_prev_ = t_;
    t_ = final_step ? t_limit : t_ + h;
    std::swap(y_, ynew_);
    std::swap(k1, k7);
    ++accepted_;
    last_failure_ = Failure::None;

    double factor = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    if (last_rejected_) factor = std::min(factor, 1.0);
    last_rejected_ = false;
    // Do not let a short final step shrink the working step size.
    if (!final_step || factor * h > h_) h_ = std::min(opt_.max_step, factor * h);
    return Status::Accepted;
  }
}

void DormandPrince45::dense(double t, std::span<double> out) const {
  const double h = t_ - t_prev_;
  if (h == 0.0) {
    std::copy(y_.begin(), y_.end(), out.begin());
    return;
  }
  const double theta = (t - t_prev_) / h;
  const double theta1 = 1.0 - theta;
  for (std::size_t i = 0; i < n_; ++i) {
    out[i] = cont_[0][i] +
             theta * (cont_[1][i] + theta1 * (cont_[2][i] + theta * (cont_[3][i] + theta1 * cont_[4][i])));
  }
}

std::vector<double> DormandPrince45::dense(double t) const {
  std::vector<double> out(n_);
  dense(t, out);
  return out;
}

}  // namespace brinkmann
