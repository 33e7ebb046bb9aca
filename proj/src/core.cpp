#include "qgamma/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qgamma/classical.hpp"

namespace qgamma {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Inflation applied to tail bounds so their own rounding cannot make them
// optimistic.
constexpr double kTailSafety = 1.0 + 1e-10;

/// Neumaier-compensated running sum that also accumulates per-term error.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  double term_err = 0.0;

  void add(double t, double t_err) {
    const double s = sum + t;
    if (std::abs(sum) >= std::abs(t))
      comp += (sum - s) + t;
    else
      comp += (t - s) + sum;
    sum = s;
    term_err += t_err;
  }
  double value() const { return sum + comp; }
  double rounding() const { return term_err + 2.0 * kEps * std::abs(value()); }
};

[[noreturn]] void fail_terms(const char* what, const TruncationPolicy& pol) {
  throw ConvergenceError(std::string(what) + ": tolerance not reached within " +
                         std::to_string(pol.max_terms) + " terms");
}

/// sum_{n>=m} n^k r^n for 0 <= r < 1; one_minus_r passed in for accuracy.
double power_tail(int k, double m, double r_pow_m, double r, double one_minus_r) {
  const double a = 1.0 / one_minus_r;
  switch (k) {
    case 0: return r_pow_m * a;
    case 1: return r_pow_m * (m * a + r * a * a);
    default: return r_pow_m * (m * m * a + 2.0 * m * r * a * a + r * (1.0 + r) * a * a * a);
  }
}

/// n^k r/(1-r)^{k+1} style closed form of sum_{n>=1} n^k r^n with
/// r = q^y; used to move arguments below 1 up by one unit:
/// S_k(y) = S_k(y+1) + shift_term(k, y).
Eval shift_term(int k, double y, double log_q) {
  const double u = y * log_q;
  const double r = std::exp(u);
  const double d = -std::expm1(u);
  double v = 0.0;
  switch (k) {
    case 0: v = r / d; break;
    case 1: v = r / (d * d); break;
    default: v = r * (1.0 + r) / (d * d * d); break;
  }
  return {v, (std::abs(u) + 3.0 * (k + 2)) * kEps * v};
}

/// Shared loop for ln(a;q)_inf given a term generator.
template <class Term, class Tail>
Eval sum_log_product(const TruncationPolicy& pol, const char* what, Term term, Tail tail) {
  Accumulator acc;
  for (std::size_t n = 0; n < pol.max_terms; ++n) {
    const Eval t = term(static_cast<double>(n));
    acc.add(t.value, t.err);
    const double bound = tail(static_cast<double>(n + 1)) * kTailSafety;
    if (bound <= pol.target_tol * std::abs(acc.value()) || bound == 0.0)
      return {acc.value(), bound + acc.rounding()};
  }
  fail_terms(what, pol);
}

}  // namespace

namespace detail {

void require_series_regime(const QParam& qp) {
  const double q = qp.value();
  if (qp.branch() == Branch::Classical)
    throw DomainError("series branch requested for q = 1");
  if (q > 1.0 - kNearOneBand && q < 1.0 + kNearOneBand)
    throw DomainError("q = " + std::to_string(q) +
                      " is too close to 1 for the series branches; use the "
                      "classical branch (q = 1)");
}

void require_positive_x(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("x must be a finite positive number");
}

}  // namespace detail

Eval log_q_pochhammer(double a, const QParam& qp, const TruncationPolicy& pol) {
  pol.validate();
  if (qp.branch() != Branch::SubUnit)
    throw DomainError("log_q_pochhammer requires 0 < q < 1");
  detail::require_series_regime(qp);
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("log_q_pochhammer requires 0 <= a < 1");
  if (a == 0.0) return {0.0, 0.0};
  const double lq = qp.log_q();
  const double one_minus_q = -std::expm1(lq);
  return sum_log_product(
      pol, "log_q_pochhammer",
      [&](double n) {
        const double w = a * std::exp(n * lq);
        const double t = std::log1p(-w);
        return Eval{t, (n * std::abs(lq) + 4.0) * kEps * 2.0 * std::abs(t)};
      },
      [&](double n) {
        const double w = a * std::exp(n * lq);
        return w / ((1.0 - w) * one_minus_q);
      });
}

Eval log_q_pochhammer_pow(double y, const QParam& qp, const TruncationPolicy& pol) {
  pol.validate();
  if (qp.branch() != Branch::SubUnit)
    throw DomainError("log_q_pochhammer_pow requires 0 < q < 1");
  detail::require_series_regime(qp);
  detail::require_positive_x(y);
  const double lq = qp.log_q();
  const double one_minus_q = -std::expm1(lq);
  return sum_log_product(
      pol, "log_q_pochhammer",
      [&](double n) {
        const double u = (y + n) * lq;
        if (u > -std::numbers::ln2) {
          const double t = std::log(-std::expm1(u));
          return Eval{t, 4.0 * kEps * (1.0 + std::abs(t))};
        }
        const double t = std::log1p(-std::exp(u));
        return Eval{t, (std::abs(u) + 4.0) * kEps * 2.0 * std::abs(t)};
      },
      [&](double n) {
        const double w = std::exp((y + n) * lq);
        return w / (-std::expm1((y + n) * lq) * one_minus_q);
      });
}

Eval q_lambert_sum(double x, const QParam& qp, int k, const TruncationPolicy& pol) {
  pol.validate();
  if (qp.branch() != Branch::SubUnit)
    throw DomainError("q_lambert_sum requires 0 < q < 1");
  detail::require_series_regime(qp);
  detail::require_positive_x(x);
  if (k < 0 || k > 2) throw DomainError("q_lambert_sum supports k in {0,1,2}");
  const double lq = qp.log_q();

  Accumulator shift;
  double y = x;
  while (y < 1.0) {
    const Eval s = shift_term(k, y, lq);
    shift.add(s.value, s.err);
    y += 1.0;
  }

  const double r = std::exp(y * lq);
  const double one_minus_r = -std::expm1(y * lq);
  Accumulator acc;
  for (std::size_t i = 1; i <= pol.max_terms; ++i) {
    const double n = static_cast<double>(i);
    const double u = n * y * lq;
    const double t = std::pow(n, k) * std::exp(u) / -std::expm1(n * lq);
    acc.add(t, (std::abs(u) + 6.0) * kEps * t);
    const double m = n + 1.0;
    const double bound = power_tail(k, m, std::exp(m * y * lq), r, one_minus_r) /
                         -std::expm1(m * lq) * kTailSafety;
    if (bound <= pol.target_tol * acc.value()) {
      const double v = acc.value() + shift.value();
      return {v, bound + acc.rounding() + shift.rounding() + kEps * v};
    }
  }
  fail_terms("q_lambert_sum", pol);
}

Eval lngamma_q(double x, const QParam& qp, const TruncationPolicy& pol) {
  detail::require_positive_x(x);
  switch (qp.branch()) {
    case Branch::Classical:
      return classical::lgamma(x);
    case Branch::SuperUnit: {
      const Eval base = lngamma_q(x, qp.reciprocal(), pol);
      const double quad = 0.5 * (x - 1.0) * (x - 2.0) * qp.log_q();
      const double v = base.value + quad;
      return {v, base.err + 3.0 * kEps * (std::abs(quad) + std::abs(v))};
    }
    case Branch::SubUnit:
      break;
  }
  detail::require_series_regime(qp);
  const Eval p1 = log_q_pochhammer_pow(1.0, qp, pol);
  const Eval px = log_q_pochhammer_pow(x, qp, pol);
  const double l1 = std::log1p(-qp.value());
  const double lin = (1.0 - x) * l1;
  const double v = p1.value - px.value + lin;
  const double round = 2.0 * kEps * (std::abs(lin) + std::abs(p1.value) +
                                     std::abs(px.value) + std::abs(v));
  return {v, p1.err + px.err + round};
}

Eval psi_q(double x, const QParam& qp, const TruncationPolicy& pol) {
  detail::require_positive_x(x);
  switch (qp.branch()) {
    case Branch::Classical:
      return classical::digamma(x);
    case Branch::SuperUnit: {
      const Eval base = psi_q(x, qp.reciprocal(), pol);
      const double lin = (x - 1.5) * qp.log_q();
      const double v = base.value + lin;
      return {v, base.err + 2.0 * kEps * (std::abs(lin) + std::abs(v))};
    }
    case Branch::SubUnit:
      break;
  }
  const Eval s = q_lambert_sum(x, qp, 0, pol);
  const double lq = qp.log_q();
  const double l1 = std::log1p(-qp.value());
  const double series = lq * s.value;
  const double v = series - l1;
  return {v, std::abs(lq) * s.err +
                 2.0 * kEps * (std::abs(series) + std::abs(l1) + std::abs(v))};
}

Eval psi_q_deriv(double x, const QParam& qp, int k, const TruncationPolicy& pol) {
  detail::require_positive_x(x);
  if (k != 1 && k != 2) throw DomainError("psi_q_deriv supports k in {1,2}");
  switch (qp.branch()) {
    case Branch::Classical:
      return classical::polygamma(k, x);
    case Branch::SuperUnit: {
      const Eval base = psi_q_deriv(x, qp.reciprocal(), k, pol);
      if (k == 2) return base;
      const double v = base.value + qp.log_q();
      return {v, base.err + 2.0 * kEps * (std::abs(qp.log_q()) + std::abs(v))};
    }
    case Branch::SubUnit:
      break;
  }
  const Eval s = q_lambert_sum(x, qp, k, pol);
  const double factor = std::pow(qp.log_q(), k + 1);
  const double v = factor * s.value;
  return {v, std::abs(factor) * s.err + (k + 3) * kEps * std::abs(v)};
}

Eval lngamma_q_product(double x, const QParam& qp, const TruncationPolicy& pol) {
  detail::require_positive_x(x);
  switch (qp.branch()) {
    case Branch::SubUnit:
      return lngamma_q(x, qp, pol);
    case Branch::Classical:
      throw DomainError("no product form at q = 1");
    case Branch::SuperUnit:
      break;
  }
  detail::require_series_regime(qp);
  const QParam p = qp.reciprocal();
  const Eval p1 = log_q_pochhammer_pow(1.0, p, pol);
  const Eval px = log_q_pochhammer_pow(x, p, pol);
  const double lin = (1.0 - x) * std::log(qp.value() - 1.0);
  const double quad = 0.5 * x * (x - 1.0) * qp.log_q();
  const double v = p1.value - px.value + lin + quad;
  // q - 1 carries relative error eps * q / (q - 1)
  const double qm1_err = std::abs(1.0 - x) * kEps * qp.value() / (qp.value() - 1.0);
  const double round = 3.0 * kEps * (std::abs(lin) + std::abs(quad) + std::abs(p1.value) +
                                     std::abs(px.value) + std::abs(v)) + qm1_err;
  return {v, p1.err + px.err + round};
}

}  // namespace qgamma
