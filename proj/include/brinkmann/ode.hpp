#pragma once

// Adaptive Dormand-Prince 5(4) integrator with FSAL and 4th-order dense output.

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace brinkmann {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double min_step = 1e-12;
  double max_step = 1.0;
  double initial_step = 0.0;  // 0 selects a step automatically
};

class DormandPrince45 {
 public:
  using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
  /// Optional veto on a trial step; returning false rejects it and halves the step.
  using Acceptor = std::function<bool(double t_new, std::span<const double> y_new)>;

  enum class Status { Accepted, StepTooSmall };
  enum class Failure { None, ErrorEstimate, RhsError, Vetoed };

  DormandPrince45(Rhs rhs, OdeOptions options);

  /// Restarts at (t, y). Evaluates the right-hand side once; errors propagate.
  void reset(double t, std::vector<double> y);

  /// Replaces the state at the current time (e.g. after a deck normalization).
  void replace_state(std::vector<double> y) { reset(t_, std::move(y)); }

  void set_acceptor(Acceptor acceptor) { acceptor_ = std::move(acceptor); }
  /// Caps subsequent steps (never below min_step).
  void set_max_step(double h) { opt_.max_step = std::max(h, opt_.min_step); }

  /// Takes one accepted step that does not pass `t_limit`, retrying with
  /// smaller steps as needed.
  Status step(double t_limit);

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& y_prev() const { return y_prev_; }
  double last_step() const { return t_ - t_prev_; }
  /// Step size that will be tried next.
  double next_step() const { return h_; }
  Failure last_failure() const { return last_failure_; }
  const std::string& last_error() const { return last_error_; }
  long accepted_steps() const { return accepted_; }
  long rejected_steps() const { return rejected_; }

  /// Dense output over the last accepted step, t in [t_prev(), t()].
  void dense(double t, std::span<double> out) const;
  std::vector<double> dense(double t) const;

 private:
  double initial_step_size() const;
  double error_norm(std::span<const double> err, std::span<const double> y0, std::span<const double> y1) const;

  Rhs rhs_;
  OdeOptions opt_;
  Acceptor acceptor_;
  std::size_t n_ = 0;
  double t_ = 0.0;
  double t_prev_ = 0.0;
  double h_ = 0.0;
  bool last_rejected_ = false;
  std::vector<double> y_, y_prev_;
  std::vector<double> k_[7];
  std::vector<double> tmp_, ynew_, err_;
  std::vector<double> cont_[5];
  Failure last_failure_ = Failure::None;
  std::string last_error_;
  long accepted_ = 0;
  long rejected_ = 0;
};

}  // namespace brinkmann
