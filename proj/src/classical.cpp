#include "qgamma/classical.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace qgamma::classical {
namespace {

// B_2, B_4, ..., B_16
constexpr std::array<double, 8> kBernoulli = {
    1.0 / 6.0,   -1.0 / 30.0,   1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};

void require_positive(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("classical gamma family requires finite x > 0");
}

Eval budgeted(double v) {
  return {v, kClassicalBudget * std::max(1.0, std::abs(v))};
}

}  // namespace

Eval lgamma(double x) {
  require_positive(x);
  double shift = 0.0;
  while (x < kAsymptoticStart) {
    shift += std::log(x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double pw = inv;
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    series += kBernoulli[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= inv2;
  }
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  return budgeted((x - 0.5) * std::log(x) - x + half_log_2pi + series - shift);
}

Eval digamma(double x) {
  require_positive(x);
  double shift = 0.0;
  while (x < kAsymptoticStart) {
    shift += 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  double pw = inv2;
  for (std::size_t k = 1; k <= kBernoulli.size(); ++k) {
    series += kBernoulli[k - 1] / (2.0 * k) * pw;
    pw *= inv2;
  }
  return budgeted(std::log(x) - 0.5 / x - series - shift);
}

Eval polygamma(int k, double x) {
  require_positive(x);
  if (k != 1 && k != 2) throw DomainError("polygamma order must be 1 or 2");
  double shift = 0.0;
  while (x < kAsymptoticStart) {
    shift += k == 1 ? 1.0 / (x * x) : -2.0 / (x * x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double v = 0.0;
  if (k == 1) {
    v = inv + 0.5 * inv2;
    double pw = inv2 * inv;
    for (double b : kBernoulli) {
      v += b * pw;
      pw *= inv2;
    }
  } else {
    v = -inv2 - inv2 * inv;
    double pw = inv2 * inv2;
    int m = 1;
    for (double b : kBernoulli) {
      v -= (2.0 * m + 1.0) * b * pw;
      pw *= inv2;
      ++m;
    }
  }
  return budgeted(v + shift);
}

}  // namespace qgamma::classical
