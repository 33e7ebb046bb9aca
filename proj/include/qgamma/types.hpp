#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qgamma {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series or iteration could not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Target value lies outside the range of the function being inverted.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

enum class Branch { SubUnit, Classical, SuperUnit };

/// Deformation parameter q > 0 tagged with the branch of the q-gamma
/// definition that applies to it.
class QParam {
 public:
  explicit QParam(double q);

  double value() const noexcept { return q_; }
  Branch branch() const noexcept { return branch_; }

  /// ln q, cached.
  double log_q() const noexcept { return log_q_; }

  /// 1/q; SuperUnit maps to SubUnit and vice versa.
  QParam reciprocal() const { return QParam(1.0 / q_); }

 private:
  double q_;
  double log_q_;
  Branch branch_;
};

/// Value with an absolute error bound.
struct Eval {
  double value = 0.0;
  double err = 0.0;

  Eval operator+(const Eval& o) const { return {value + o.value, err + o.err}; }
  Eval operator-(const Eval& o) const { return {value - o.value, err + o.err}; }
  Eval operator-() const { return {-value, err}; }
  /// Scaling by an exact-enough constant; err picks up one rounding.
  Eval scaled(double k) const;
};

/// Controls series truncation. For the q-series the tail bound is required
/// to fall below target_tol relative to the partial sum; for monotone
/// inversion target_tol is the absolute forward-residual bound.
struct TruncationPolicy {
  double target_tol = 1e-16;
  std::size_t max_terms = 10'000'000;

  /// Default policy with max_terms taken from QGAMMA_MAX_TERMS if set.
  static TruncationPolicy from_env();
  void validate() const;
};

std::string to_string(Branch b);

}  // namespace qgamma
