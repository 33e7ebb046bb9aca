#pragma once

#include "qgamma/types.hpp"

// Euler gamma family for the q = 1 branch. Arguments are shifted above
// kAsymptoticStart by the functional equation, then the Stirling-type
// expansions are summed through B_16. Each result carries the fixed error
// budget kClassicalBudget * max(1, |value|).
namespace qgamma::classical {

inline constexpr double kAsymptoticStart = 10.0;
inline constexpr double kClassicalBudget = 1e-12;

Eval lgamma(double x);
Eval digamma(double x);
/// k-th derivative of digamma, k in {1, 2}.
Eval polygamma(int k, double x);

}  // namespace qgamma::classical
