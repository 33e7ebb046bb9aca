#pragma once

#include <optional>

#include "qgamma/types.hpp"

namespace qgamma {

/// r-values with |r| below this use the geometric-mean limit.
inline constexpr double kStolarskyZeroBand = 1e-8;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sharp shift constants for 0 < s < 1.
struct SharpConstants {
  double b = 0.0;                 ///< best upper shift b(q,s)
  Eval a_mean;                    ///< best lower shift a(q,s) = I_{psi_q}(s,1)
  std::optional<double> aq;       ///< a_q, defined for 0 < q < 1 only
};

/// Stolarsky mean E(r,0;x,y) = ((x^r - y^r) / (r (ln x - ln y)))^{1/r},
/// sqrt(xy) at r = 0, x when x = y. Strictly increasing in r for x != y.
double stolarsky_E(double r, double x, double y);

/// b(q,s) = ln((q^s - q)/((s-1) ln q)) / ln q for 0 < q < 1, (1+s)/2 for q >= 1.
double best_b(double q, double s);

/// a_q = (q - 1 - ln q) / (ln q)^2, 0 < q < 1.
double aq_const(double q);

/// Bracket [lo, hi] with psi_q(lo) <= y <= psi_q(hi), grown geometrically
/// from [1e-8, 1]. Throws RangeError if y is outside the range of psi_q.
Interval psi_q_bracket(const QParam& qp, double y, const TruncationPolicy& pol = {});

/// x with |psi_q(x) - y| <= pol.target_tol. err bounds |x - x_true|.
Eval psi_q_inverse(const QParam& qp, double y, const TruncationPolicy& pol = {1e-13});

/// Mean of psi_q over [s, t], i.e. (ln Gamma_q(t) - ln Gamma_q(s)) / (t - s).
Eval psi_q_average(const QParam& qp, double s, double t, const TruncationPolicy& pol = {});

/// Integral psi_q mean I = psi_q^{-1}(average of psi_q over [s,t]), s < I < t.
Eval integral_psi_mean(const QParam& qp, double s, double t,
                       const TruncationPolicy& pol = {1e-13});

SharpConstants sharp_constants(const QParam& qp, double s,
                               const TruncationPolicy& pol = {1e-13});

}  // namespace qgamma
