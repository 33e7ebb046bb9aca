#include "doctest.h"
#include "oracle/mp_oracle.hpp"
#include "qgamma/core.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace qgamma;

namespace {

// Frozen from tests/oracle/pin_values.py (mpmath, 50 digits).
constexpr double kLogPochHalfHalf = -1.242062094812414945797845;
constexpr double kLnGammaHalfAtHalf = 0.4523695117205561777078938;
constexpr double kPsiHalfAtOne = -0.4205290343560457797847369;
constexpr double kPsi1HalfAtOne = 1.318379352148178841124921;
constexpr double kPsi2HalfAtOne = -2.364236976070309307060652;

const QParam kHalf(0.5);
const TruncationPolicy kTight{1e-16, 10'000'000};

std::vector<double> x_grid() {
  std::vector<double> xs;
  for (double x = 0.1; x <= 20.0 + 1e-9; x *= 1.45) xs.push_back(x);
  xs.push_back(20.0);
  return xs;
}

}  // namespace

TEST_CASE("QParam classifies branches and rejects nonpositive q") {
  CHECK(QParam(0.3).branch() == Branch::SubUnit);
  CHECK(QParam(1.0).branch() == Branch::Classical);
  CHECK(QParam(2.0).branch() == Branch::SuperUnit);
  CHECK(QParam(2.0).reciprocal().value() == 0.5);
  CHECK_THROWS_AS(QParam(0.0), DomainError);
  CHECK_THROWS_AS(QParam(-0.5), DomainError);
  CHECK_THROWS_AS(QParam(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("log_q_pochhammer") {
  SUBCASE("empty product") {
    const Eval e = log_q_pochhammer(0.0, kHalf, {1e-14});
    CHECK(e.value == 0.0);
    CHECK(e.err == 0.0);
  }
  SUBCASE("pinned value") {
    const Eval e = log_q_pochhammer(0.5, kHalf, {1e-14});
    CHECK(std::abs(e.value - kLogPochHalfHalf) <= e.err);
    CHECK(e.err < 1e-13);
  }
  SUBCASE("shift identity (a;q) = (1-a)(aq;q)") {
    const Eval lhs = log_q_pochhammer(0.25, kHalf, {1e-14});
    const Eval rhs = log_q_pochhammer(0.5, kHalf, {1e-14});
    CHECK(std::abs(lhs.value - (rhs.value - std::log(0.5))) <= lhs.err + rhs.err + 1e-16);
  }
  SUBCASE("power form agrees with the plain form") {
    for (double y : {0.01, 0.5, 1.0, 3.7}) {
      const Eval a = log_q_pochhammer(std::pow(0.5, y), kHalf);
      const Eval b = log_q_pochhammer_pow(y, kHalf);
      CHECK(std::abs(a.value - b.value) <= a.err + b.err + 1e-14 * std::abs(a.value));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(log_q_pochhammer(1.0, kHalf), DomainError);
    CHECK_THROWS_AS(log_q_pochhammer(0.5, QParam(2.0)), DomainError);
    CHECK_THROWS_AS(log_q_pochhammer(0.5, kHalf, {1e-16, 3}), ConvergenceError);
  }
}

TEST_CASE("lngamma_q examples") {
  CHECK(std::abs(lngamma_q(1.0, kHalf).value) <= lngamma_q(1.0, kHalf).err);
  const Eval three = lngamma_q(3.0, kHalf);
  CHECK(std::abs(three.value - std::log(1.5)) <= three.err + 1e-16);
  const Eval half = lngamma_q(0.5, kHalf);
  CHECK(std::abs(half.value - kLnGammaHalfAtHalf) <= half.err);
  const Eval super = lngamma_q(3.0, QParam(2.0));
  CHECK(std::abs(super.value - (std::log(1.5) + std::numbers::ln2)) <= super.err + 1e-15);
  CHECK_THROWS_AS(lngamma_q(0.0, kHalf), DomainError);
  CHECK_THROWS_AS(lngamma_q(-2.0, QParam(1.0)), DomainError);
}

TEST_CASE("psi_q and derivatives: pinned values and signs") {
  const Eval p = psi_q(1.0, kHalf);
  CHECK(std::abs(p.value - kPsiHalfAtOne) <= p.err);
  const Eval p2 = psi_q(2.0, kHalf);
  CHECK(std::abs(p2.value - (p.value + std::numbers::ln2)) <= p.err + p2.err + 1e-16);

  const Eval d1 = psi_q_deriv(1.0, kHalf, 1);
  CHECK(std::abs(d1.value - kPsi1HalfAtOne) <= d1.err);
  const Eval d1b = psi_q_deriv(2.0, kHalf, 1);
  const double ln2 = std::numbers::ln2;
  CHECK(std::abs((d1.value - d1b.value) - 2.0 * ln2 * ln2) <= d1.err + d1b.err + 1e-16);

  const Eval d2 = psi_q_deriv(1.0, kHalf, 2);
  CHECK(d2.value < 0.0);
  CHECK(std::abs(d2.value - kPsi2HalfAtOne) <= d2.err);

  CHECK_THROWS_AS(psi_q_deriv(1.0, kHalf, 3), DomainError);
  CHECK_THROWS_AS(psi_q(0.0, kHalf), DomainError);
}

TEST_CASE("q -> 1 probe approaches the classical digamma") {
  const Eval p = psi_q(1.0, QParam(0.999));
  CHECK(std::abs(p.value - (-0.5772156649015329)) < 0.01);
}

TEST_CASE("near-one band is rejected for the series branches") {
  CHECK_THROWS_AS(psi_q(1.0, QParam(0.99995)), DomainError);
  CHECK_THROWS_AS(lngamma_q(1.0, QParam(1.00005)), DomainError);
  CHECK_NOTHROW(psi_q(1.0, QParam(0.9999)));
}

TEST_CASE("agreement with the 50-digit oracle across branches") {
  for (double q : {0.1, 0.5, 0.9, 0.99, 1.0, 1.5, 5.0}) {
    const QParam qp(q);
    for (double x : {0.05, 0.5, 1.0, 2.5, 11.0}) {
      const oracle::mp mq(q), mx(x);
      const Eval lg = lngamma_q(x, qp);
      CHECK_MESSAGE(std::abs(lg.value - oracle::to_double(oracle::lngamma_q(mx, mq))) <=
                        lg.err + 1e-16, "q=" << q << " x=" << x);
      for (int k = 0; k <= 2; ++k) {
        const Eval e = k == 0 ? psi_q(x, qp) : psi_q_deriv(x, qp, k);
        const double ref = oracle::to_double(oracle::psi_q_k(mx, mq, k));
        CHECK_MESSAGE(std::abs(e.value - ref) <= e.err + 1e-16 * std::abs(ref),
                      "q=" << q << " x=" << x << " k=" << k);
      }
    }
  }
}

TEST_CASE("recurrence residuals stay within the combined error bounds") {
  for (double q = 0.1; q < 0.95; q += 0.1) {
    const QParam qp(q);
    const double lq = qp.log_q();
    for (double x : x_grid()) {
      const double qx = std::exp(x * lq);
      const double one_minus_qx = -std::expm1(x * lq);
      const Eval g0 = lngamma_q(x, qp), g1 = lngamma_q(x + 1, qp);
      const double step = std::log(one_minus_qx / (1.0 - q));
      CHECK(std::abs(g1.value - g0.value - step) <= g0.err + g1.err + 1e-15);
      const Eval p0 = psi_q(x, qp), p1 = psi_q(x + 1, qp);
      CHECK(std::abs(p1.value - p0.value + lq * qx / one_minus_qx) <=
            p0.err + p1.err + 1e-15 * (1 + std::abs(p0.value)));
      const Eval d0 = psi_q_deriv(x, qp, 1), d1 = psi_q_deriv(x + 1, qp, 1);
      CHECK(std::abs(d1.value - d0.value + lq * lq * qx / (one_minus_qx * one_minus_qx)) <=
            d0.err + d1.err + 1e-15 * std::abs(d0.value));
    }
  }
}

TEST_CASE("central differences of psi_q converge to psi_q' at second order") {
  for (double q : {0.3, 0.7}) {
    const QParam qp(q);
    for (double x : {0.5, 2.0}) {
      const double exact = psi_q_deriv(x, qp, 1).value;
      std::vector<double> log_h, log_e;
      for (double h : {1e-1, 3e-2, 1e-2}) {
        const double fd = (psi_q(x + h, qp).value - psi_q(x - h, qp).value) / (2 * h);
        log_h.push_back(std::log(h));
        log_e.push_back(std::log(std::abs(fd - exact)));
      }
      const double slope = (log_e.back() - log_e.front()) / (log_h.back() - log_h.front());
      CHECK(slope >= 1.9);
    }
  }
}

TEST_CASE("monotonicity of psi_q and psi_q' on sampled grids") {
  for (double q : {0.1, 0.5, 0.9}) {
    const QParam qp(q);
    double prev_psi = -INFINITY, prev_d1 = INFINITY;
    for (double x = 0.05; x < 15.0; x *= 1.3) {
      const double p = psi_q(x, qp).value, d = psi_q_deriv(x, qp, 1).value;
      CHECK(p > prev_psi);
      CHECK(d < prev_d1);
      CHECK(d > 0.0);
      CHECK(psi_q_deriv(x, qp, 2).value < 0.0);
      prev_psi = p;
      prev_d1 = d;
    }
  }
}

TEST_CASE("SuperUnit reduction against the direct product") {
  for (double q : {1.5, 2.0, 5.0}) {
    const QParam qp(q);
    for (double x = 0.5; x <= 10.0; x += 0.5) {
      const Eval red = lngamma_q(x, qp);
      const Eval direct = lngamma_q_product(x, qp);
      const double quad = std::log(q) * (x - 1) * (x - 2) / 2;
      CHECK(std::abs(red.value - direct.value) <= red.err + direct.err);
      CHECK(std::abs(red.value - lngamma_q(x, qp.reciprocal()).value - quad) <= red.err + 1e-15);
    }
  }
}

TEST_CASE("halving target_tol moves the value by less than the previous err") {
  for (double q : {0.2, 0.8}) {
    const QParam qp(q);
    for (double x : {0.3, 1.0, 6.0}) {
      double tol = 1e-4;
      Eval prev = psi_q(x, qp, {tol});
      Eval prev_g = lngamma_q(x, qp, {tol});
      for (int i = 0; i < 30; ++i) {
        tol /= 2;
        const Eval cur = psi_q(x, qp, {tol});
        const Eval cur_g = lngamma_q(x, qp, {tol});
        CHECK(std::abs(cur.value - prev.value) <= prev.err);
        CHECK(std::abs(cur_g.value - prev_g.value) <= prev_g.err);
        prev = cur;
        prev_g = cur_g;
      }
    }
  }
}
