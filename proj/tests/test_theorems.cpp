#include "doctest.h"
#include "oracle/mp_oracle.hpp"
#include "qgamma/core.hpp"
#include "qgamma/means.hpp"
#include "qgamma/theorems.hpp"

#include <cmath>

using namespace qgamma;

namespace {

// Frozen from tests/oracle/pin_values.py.
constexpr double kGQCHalfAtOne = 0.10947337461879200017764;

using oracle::mp;

mp mp_fqsc(double x, double q, double s, double c) {
  const mp X(x), Q(q), S(s), C(c);
  return oracle::lngamma_q(X + 1, Q) - oracle::lngamma_q(X + S, Q) - (1 - S) * oracle::psi_q(X + C, Q);
}

mp mp_log_ratio(const mp& x, const mp& q) {  // ln((1-q^x)/(1-q))
  return boost::multiprecision::log((1 - boost::multiprecision::pow(q, x)) / (1 - q));
}

mp mp_theorem(TheoremFn fn, double x, double q, double s, double c) {
  const mp X(x), Q(q), C(c), L = boost::multiprecision::log(Q);
  const mp qx = boost::multiprecision::pow(Q, X);
  switch (fn) {
    case TheoremFn::FQSC: return mp_fqsc(x, q, s, c);
    case TheoremFn::GQC:
      return oracle::psi_q(X, Q) - mp_log_ratio(X, Q) + oracle::a_q(Q) * oracle::psi_q_k(X + C, Q, 1);
    case TheoremFn::T2:
      return oracle::psi_q(X, Q) - mp_log_ratio(X, Q) + oracle::psi_q_k(X + C, Q, 1) / 2;
    case TheoremFn::T1A:
      return -oracle::psi_q(X, Q) + mp_log_ratio(X, Q) + L * qx / (2 * (1 - qx)) +
             oracle::psi_q_k(X + mp(0.5), Q, 2) / 12;
    case TheoremFn::T1B:
      return oracle::psi_q(X, Q) - mp_log_ratio(X, Q) - L * qx / (2 * (1 - qx)) -
             oracle::psi_q_k(X, Q, 2) / 12;
    case TheoremFn::T10A:
      return oracle::psi_q_k(X, Q, 1) - L * L * qx / ((1 - Q) * (1 - qx)) -
             L * L * qx * qx / ((1 + Q) * (1 - qx) * (1 - qx));
    case TheoremFn::T10B:
      return -oracle::psi_q_k(X + mp(0.5), Q, 1) +
             L * L * qx * boost::multiprecision::sqrt(Q) / ((1 - Q) * (1 - qx));
  }
  return 0;
}

double series_sum(const Family& fam, double x, bool integrate) {
  const double lam = std::log(fam.q);
  double sum = 0.0;
  for (long n = first_index(fam.id); n < 20000; ++n) {
    const double rn = std::exp(n * x * lam);
    if (rn < 1e-40) break;
    double a = series_coefficient(fam, n);
    if (integrate) a /= n * lam;
    sum += a * rn;
  }
  return sum;
}

}  // namespace

TEST_CASE("theorem_function examples") {
  const double b = best_b(0.5, 0.5);
  const Eval f30 = theorem_function(TheoremFn::FQSC, 30.0, {0.5, 0.5, b});
  CHECK(std::fabs(f30.value) <= 1e-12);

  const Eval g = theorem_function(TheoremFn::GQC, 1.0, {0.5, 0.5, 0.0});
  CHECK(g.value > 0);
  CHECK(g.value == doctest::Approx(kGQCHalfAtOne).epsilon(1e-13));

  const Eval t = theorem_function(TheoremFn::T10B, 2.0, {0.5});
  CHECK(t.value >= -t.err);

  CHECK_THROWS_AS(theorem_function(TheoremFn::GQC, 1.0, {1.5}), DomainError);
  CHECK_THROWS_AS(theorem_function(TheoremFn::T1A, 0.0, {0.5}), DomainError);
  CHECK_THROWS_AS(theorem_function(TheoremFn::FQSC, 1.0, {0.5, 1.2, 0.5}), DomainError);
  CHECK_THROWS_AS(theorem_function(TheoremFn::FQSC, 1.0, {0.5, 0.5, 0.0}), DomainError);
  CHECK_NOTHROW(theorem_function(TheoremFn::FQSC, 1.0, {2.0, 0.5, 0.75}));
  CHECK_NOTHROW(theorem_function(TheoremFn::FQSC, 1.0, {1.0, 0.5, 0.75}));
}

TEST_CASE("theorem functions agree with the high-precision oracle") {
  const TheoremFn fns[] = {TheoremFn::FQSC, TheoremFn::GQC,  TheoremFn::T2,  TheoremFn::T1A,
                           TheoremFn::T1B,  TheoremFn::T10A, TheoremFn::T10B};
  for (TheoremFn fn : fns) {
    for (double q : {0.1, 0.5, 0.9}) {
      for (double x : {0.1, 1.0, 4.0, 10.0}) {
        const double s = 0.25;
        const double c = fn == TheoremFn::FQSC ? best_b(q, s) : 0.2;
        const Eval e = theorem_function(fn, x, {q, s, c});
        const double ref = oracle::to_double(mp_theorem(fn, x, q, s, c));
        CAPTURE(to_string(fn));
        CAPTURE(q);
        CAPTURE(x);
        CHECK(std::fabs(e.value - ref) <= e.err);
        // at c = b the q^x term cancels, so f is O(q^{2x}) and may sit below roundoff
        if (fn != TheoremFn::FQSC) CHECK(e.err <= 1e-6 * std::fabs(ref));
      }
    }
  }
  for (double q : {1.0, 1.5, 5.0}) {
    const Eval e = theorem_function(TheoremFn::FQSC, 2.0, {q, 0.5, 0.6});
    const double ref = oracle::to_double(mp_fqsc(2.0, q, 0.5, 0.6));
    CHECK(e.value == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("theorem functions equal their exponential series") {
  struct Case {
    Family fam;
    TheoremFn fn;
    double sign;
  };
  for (double q : {0.2, 0.5, 0.8}) {
    const Case cases[] = {
        {{FamilyId::GQC, q, 0.5, Shift::fixed(0.0)}, TheoremFn::GQC, 1},
        {{FamilyId::GQC, q, 0.5, Shift::fixed(0.3)}, TheoremFn::GQC, 1},
        {{FamilyId::Thm2, q, 0.5, Shift::fixed(0.0)}, TheoremFn::T2, 1},
        {{FamilyId::Thm2, q, 0.5, Shift::fixed(0.5), true}, TheoremFn::T2, -1},
        {{FamilyId::Thm1A, q}, TheoremFn::T1A, 1},
        {{FamilyId::Thm1B, q}, TheoremFn::T1B, 1},
        {{FamilyId::Thm10A, q}, TheoremFn::T10A, 1},
        {{FamilyId::Thm10B, q}, TheoremFn::T10B, 1},
    };
    for (const auto& cs : cases) {
      for (double x : {0.7, 2.0, 6.0}) {
        const double v = cs.sign * theorem_function(cs.fn, x, {q, 0.5, cs.fam.c.value}).value;
        const double ser = series_sum(cs.fam, x, false);
        CAPTURE(describe(cs.fam));
        CAPTURE(x);
        CHECK(ser == doctest::Approx(v).epsilon(1e-9).scale(0));
      }
    }
    for (double s : {0.25, 0.75}) {
      const double c = best_b(q, s) + 0.1;
      const Family fam{FamilyId::FprimeQSC, q, s, Shift::fixed(c)};
      for (double x : {0.7, 2.0, 6.0}) {
        const double v = theorem_function(TheoremFn::FQSC, x, {q, s, c}).value;
        CHECK(series_sum(fam, x, true) == doctest::Approx(v).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("psi_mean_gap across branches") {
  for (double q : {0.3, 1.0, 2.0}) {
    const QParam qp(q);
    const Eval g = psi_mean_gap(qp, 1.0, 0.5, 2.0, 1.0);
    const Eval avg = psi_q_average(qp, 1.5, 3.0);
    const Eval p = psi_q(2.0, qp);
    CHECK(g.value == doctest::Approx(avg.value - p.value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(psi_mean_gap(QParam(0.5), 1.0, 0.5, 0.5, 0.0), DomainError);
}

TEST_CASE("kershaw_bounds examples") {
  {
    const KershawGaps g = kershaw_bounds(QParam(0.5), 0.5, 1.0);
    CHECK(g.lower_gap.value > g.lower_gap.err);
    CHECK(g.sharp_upper_gap.value < -g.sharp_upper_gap.err);
    CHECK(std::fabs(g.sharp_upper_gap.value) <= std::fabs(g.upper_gap.value));
    CHECK(g.b_shift == doctest::Approx(best_b(0.5, 0.5)));
    CHECK(g.a_shift > 0.5);
    CHECK(g.a_shift < g.b_shift);
  }
  {
    const KershawGaps g = kershaw_bounds(QParam(1.0), 0.5, 1.0);
    CHECK(g.lower_gap.value > g.lower_gap.err);
    CHECK(g.upper_gap.value < -g.upper_gap.err);
    const Eval sq = psi_mean_gap(QParam(1.0), 1.0, 0.5, 1.0, std::sqrt(0.5));
    CHECK(sq.value > sq.err);
  }
  {
    const KershawGaps g = kershaw_bounds(QParam(0.5), 0.5, 30.0);
    CHECK(std::fabs(g.lower_gap.value) <= 1e-10);
    CHECK(std::fabs(g.upper_gap.value) <= 1e-10);
    CHECK(std::fabs(g.sharp_upper_gap.value) <= 1e-10);
  }
}

TEST_CASE("every theorem verifies on the default grid") {
  const GridSpec grid = GridSpec::defaults();
  for (TheoremId id : all_theorems()) {
    const TheoremReport r = verify_theorem(id, grid);
    CAPTURE(to_string(id));
    CHECK(r.pass);
    CHECK(r.count(Status::Fail) == 0);
    CHECK(r.checks.size() > 0);
    // unresolved checks only occur where the value has fallen below roundoff
    for (const auto& c : r.checks)
      if (c.status == Status::Unresolved) CHECK(std::fabs(c.value) < 1e-20);
  }
}

TEST_CASE("verify_theorem reports the statement's sharpness probes") {
  const TheoremReport r4 = verify_theorem(TheoremId::Thm4, GridSpec::defaults());
  std::size_t controls = 0, taylor = 0;
  for (const auto& c : r4.checks) {
    if (c.quantity == "control:f_above_zero_below_b") {
      ++controls;
      CHECK(c.status == Status::Pass);
      CHECK(c.value > c.err);
    }
    if (c.quantity.rfind("taylor_", 0) == 0) ++taylor;
  }
  CHECK(controls == 25);
  CHECK(taylor == 75);

  const TheoremReport r3 = verify_theorem(TheoremId::Thm3, GridSpec::defaults());
  bool saw_cert_control = false;
  for (const auto& c : r3.checks)
    if (c.quantity == "control:certificate_fails_GQC(c=0.1)") saw_cert_control = c.status == Status::Pass;
  CHECK(saw_cert_control);

  const TheoremReport r10 = verify_theorem(TheoremId::Thm10, GridSpec::defaults());
  REQUIRE(r10.certificates.size() == 2);
  CHECK(r10.certificates[0].witness_n == 2);
  CHECK(std::fabs(r10.certificates[0].min_margin) <= 1e-13);
}

TEST_CASE("asserting a shift below b produces a violation") {
  GridSpec g = GridSpec::defaults();
  g.q_values = {0.5};
  g.s_values = {0.5};
  g.c_values = {0.69};
  const TheoremReport r = verify_theorem(TheoremId::Thm4, g);
  CHECK_FALSE(r.pass);
  CHECK(r.count(Status::Fail) > 0);
  REQUIRE(r.certificates.size() == 1);
  CHECK_FALSE(r.certificates[0].pass);

  g.c_values = {0.8};
  CHECK(verify_theorem(TheoremId::Thm4, g).pass);

  g.c_values = {0.2};
  CHECK_FALSE(verify_theorem(TheoremId::Thm3, g).pass);
}

TEST_CASE("verify_theorem grid validation and ordering") {
  GridSpec g = GridSpec::defaults();
  g.x_values.clear();
  CHECK_THROWS_AS(verify_theorem(TheoremId::Cor32, g), DomainError);
  g = GridSpec::defaults();
  g.s_values = {1.0};
  CHECK_THROWS_AS(verify_theorem(TheoremId::Cor20, g), DomainError);
  g = GridSpec::defaults();
  g.q_values = {0.99995};
  CHECK_THROWS_AS(verify_theorem(TheoremId::Cor20, g), DomainError);

  g = GridSpec::defaults();
  g.q_values = {0.9, 0.1, 0.5};
  const TheoremReport r = verify_theorem(TheoremId::Ineq11, g);
  for (std::size_t i = 1; i < r.checks.size(); ++i) {
    const auto& a = r.checks[i - 1].point;
    const auto& b = r.checks[i].point;
    CHECK((a.q < b.q || (a.q == b.q && a.x <= b.x)));
  }
}

TEST_CASE("name round trips") {
  for (TheoremId id : all_theorems()) {
    CHECK(theorem_from_string(cli_name(id)) == id);
    CHECK(theorem_from_string(to_string(id)) == id);
  }
  CHECK(all_theorems().size() == 11);
  CHECK(theorem_fn_from_string("t10b") == TheoremFn::T10B);
  CHECK_THROWS_AS(theorem_from_string("thm5"), DomainError);
}
