#pragma once

#include "qgamma/types.hpp"

// q-gamma family for all q > 0.
//
// SubUnit (0 < q < 1) values come from the defining product and the
// Lambert-type series
//
//   psi_q(x) = -ln(1-q) + ln q * S_0(x),   S_k(x) = sum_{n>=1} n^k q^{nx}/(1-q^n)
//
// with a geometric tail bound. SuperUnit (q > 1) values are reduced to
// p = 1/q through Gamma_q(x) = Gamma_p(x) q^{(x-1)(x-2)/2}. Classical (q = 1)
// dispatches to qgamma::classical.
namespace qgamma {

/// Half-width of the excluded band around q = 1 for the series branches.
inline constexpr double kNearOneBand = 1e-4;

/// ln (a; q)_inf = sum_{n>=0} ln(1 - a q^n) for 0 <= a < 1, 0 < q < 1.
Eval log_q_pochhammer(double a, const QParam& qp,
                      const TruncationPolicy& pol = {});

/// ln (q^y; q)_inf for y > 0, accurate even when q^y is close to 1.
Eval log_q_pochhammer_pow(double y, const QParam& qp,
                          const TruncationPolicy& pol = {});

/// S_k(x) = sum_{n>=1} n^k q^{nx} / (1 - q^n), k in {0,1,2}, SubUnit only.
/// All terms are positive, so the bound is relative to the value.
Eval q_lambert_sum(double x, const QParam& qp, int k,
                   const TruncationPolicy& pol = {});

Eval lngamma_q(double x, const QParam& qp, const TruncationPolicy& pol = {});
Eval psi_q(double x, const QParam& qp, const TruncationPolicy& pol = {});
/// k-th derivative of psi_q, k in {1, 2}.
Eval psi_q_deriv(double x, const QParam& qp, int k,
                 const TruncationPolicy& pol = {});

/// ln Gamma_q straight from the two-branch product definition, without the
/// reduction to 1/q. Used to cross-check the SuperUnit reduction.
Eval lngamma_q_product(double x, const QParam& qp,
                       const TruncationPolicy& pol = {});

namespace detail {
/// Throws unless qp is a series branch outside the near-one band.
void require_series_regime(const QParam& qp);
void require_positive_x(double x);
}  // namespace detail

}  // namespace qgamma
