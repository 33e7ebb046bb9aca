#include "qgamma/means.hpp"

#include <cmath>
#include <limits>

#include "qgamma/core.hpp"

namespace qgamma {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxRootIterations = 400;
// Below this relative width the mean is taken from the midpoint expansion.
constexpr double kDegenerateWidth = 1e-4;

/// ln(expm1(u)/u), accurate as u -> 0.
double log_expm1_ratio(double u) {
  if (std::abs(u) < 0.1) {
    // expm1(u)/u - 1 = sum_{k>=1} u^k / (k+1)!
    double term = 1.0;
    double w = 0.0;
    for (int k = 1; k < 20; ++k) {
      term *= u / (k + 1);
      w += term;
    }
    return std::log1p(w);
  }
  return std::log(std::expm1(u) / u);
}

/// Series inner policy for evaluations made on behalf of a root search.
TruncationPolicy inner_policy(const TruncationPolicy& pol) {
  return {std::min(pol.target_tol, 1e-16), pol.max_terms};
}

Eval invert_on(const QParam& qp, double y, Interval br, const TruncationPolicy& pol) {
  const TruncationPolicy inner = inner_policy(pol);
  auto residual = [&](double x) { return psi_q(x, qp, inner); };

  double lo = br.lo, hi = br.hi;
  double x = 0.5 * (lo + hi);
  Eval f = residual(x);
  double best_x = x, best_res = std::abs(f.value - y);
  double best_err = f.err;
  double dx_prev = hi - lo;
  for (int it = 0; it < kMaxRootIterations; ++it) {
    const double res = f.value - y;
    if (std::abs(res) < best_res) {
      best_x = x;
      best_res = std::abs(res);
      best_err = f.err;
    }
    if (best_res <= pol.target_tol) break;
    if (res < 0.0)
      lo = x;
    else
      hi = x;
    if (!(std::nextafter(lo, hi) < hi)) break;

    const double slope = psi_q_deriv(x, qp, 1, inner).value;
    double next = x - res / slope;
    // Newton only while it stays inside the bracket and halves the step.
    if (!(next > lo && next < hi) || std::abs(2.0 * res) > std::abs(dx_prev * slope))
      next = lo + 0.5 * (hi - lo);
    dx_prev = std::abs(next - x);
    x = next;
    f = residual(x);
  }
  if (!(best_res <= pol.target_tol))
    throw ConvergenceError("psi_q inverse: forward residual " + std::to_string(best_res) +
                           " above tolerance");
  // |x - x*| <= |psi(x) - y| / min psi' over the neighbourhood; psi' is
  // decreasing, so evaluate it a little to the right.
  const double slope = psi_q_deriv(best_x, qp, 1, inner).value;
  const double dx = (best_res + best_err) / slope;
  const double slope_right = psi_q_deriv(best_x + 2.0 * dx + kEps * best_x, qp, 1, inner).value;
  return {best_x, (best_res + best_err) / slope_right + kEps * best_x};
}

}  // namespace

double stolarsky_E(double r, double x, double y) {
  if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
    throw DomainError("Stolarsky mean requires positive x and y");
  if (!std::isfinite(r)) throw DomainError("Stolarsky mean requires finite r");
  if (x == y) return x;
  if (std::abs(r) < kStolarskyZeroBand) return std::sqrt(x * y);
  // E = y * (expm1(r L) / (r L))^{1/r}, L = ln(x/y)
  const double L = std::log(x) - std::log(y);
  return y * std::exp(log_expm1_ratio(r * L) / r);
}

double best_b(double q, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("best_b requires 0 < s < 1");
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("best_b requires q > 0");
  if (q >= 1.0) return 0.5 * (1.0 + s);
  // (q^s - q)/((s-1) ln q) = q^s * expm1(u)/u with u = (1-s) ln q
  const double lq = std::log(q);
  return s + log_expm1_ratio((1.0 - s) * lq) / lq;
}

double aq_const(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("a_q requires 0 < q < 1");
  const double lq = std::log(q);
  if (std::abs(lq) < 0.1) {
    // (e^l - 1 - l)/l^2 = sum_{k>=2} l^{k-2}/k!
    double term = 0.5, sum = 0.5;
    for (int k = 3; k < 22; ++k) {
      term *= lq / k;
      sum += term;
    }
    return sum;
  }
  return (std::expm1(lq) - lq) / (lq * lq);
}

Interval psi_q_bracket(const QParam& qp, double y, const TruncationPolicy& pol) {
  if (!std::isfinite(y)) throw RangeError("psi_q inverse: target must be finite");
  const TruncationPolicy inner = inner_policy(pol);
  if (qp.branch() == Branch::SubUnit) {
    const double sup = -std::log1p(-qp.value());
    if (y >= sup)
      throw RangeError("psi_q inverse: target at or above sup psi_q = -ln(1-q)");
  }
  double lo = 1e-8, hi = 1.0;
  while (psi_q(lo, qp, inner).value > y) {
    lo /= 16.0;
    if (lo < 1e-290) throw RangeError("psi_q inverse: target below the range of psi_q");
  }
  while (psi_q(hi, qp, inner).value < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw RangeError("psi_q inverse: target above the sampled range of psi_q");
  }
  return {lo, hi};
}

Eval psi_q_inverse(const QParam& qp, double y, const TruncationPolicy& pol) {
  pol.validate();
  return invert_on(qp, y, psi_q_bracket(qp, y, pol), pol);
}

Eval psi_q_average(const QParam& qp, double s, double t, const TruncationPolicy& pol) {
  detail::require_positive_x(s);
  if (!(t > s) || !std::isfinite(t)) throw DomainError("psi_q average requires s < t");
  const double width = t - s;
  if (width < kDegenerateWidth * s) {
    // midpoint rule plus its leading correction psi''(m) w^2 / 24
    const double m = 0.5 * (s + t);
    const Eval mid = psi_q(m, qp, pol);
    const Eval curv = psi_q_deriv(m, qp, 2, pol);
    const double corr = curv.value * width * width / 24.0;
    // next term psi''''(m) w^4 / 1920 with |psi''''| <~ (6/m^2 + 4 ln^2 q) |psi''|
    const double lq = qp.log_q();
    const double trunc =
        std::abs(curv.value) * std::pow(width, 4) * (6.0 / (m * m) + 4.0 * lq * lq) / 1920.0;
    return {mid.value + corr, mid.err + curv.err * width * width / 24.0 + trunc +
                                  kEps * std::abs(mid.value + corr)};
  }
  const Eval gt = lngamma_q(t, qp, pol);
  const Eval gs = lngamma_q(s, qp, pol);
  const double v = (gt.value - gs.value) / width;
  return {v, (gt.err + gs.err) / width + 2.0 * kEps * std::abs(v) +
                 kEps * (std::abs(gt.value) + std::abs(gs.value)) / width};
}

Eval integral_psi_mean(const QParam& qp, double s, double t, const TruncationPolicy& pol) {
  pol.validate();
  const Eval avg = psi_q_average(qp, s, t, inner_policy(pol));
  // psi_q is increasing, so the root lies in [s, t]
  const Eval root = invert_on(qp, avg.value, {s, t}, pol);
  const double slope = psi_q_deriv(std::min(t, root.value + root.err), qp, 1,
                                   inner_policy(pol)).value;
  return {root.value, root.err + avg.err / slope};
}

SharpConstants sharp_constants(const QParam& qp, double s, const TruncationPolicy& pol) {
  SharpConstants out;
  out.b = best_b(qp.value(), s);
  out.a_mean = integral_psi_mean(qp, s, 1.0, pol);
  if (qp.branch() == Branch::SubUnit) out.aq = aq_const(qp.value());
  return out;
}

}  // namespace qgamma
