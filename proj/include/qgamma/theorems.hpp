#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qgamma/certificates.hpp"
#include "qgamma/types.hpp"

namespace qgamma {

enum class TheoremId { Thm4Prime, Cor20, Thm4, Cor21, Thm3, Thm2, Thm1, Thm10, Cor32, Ineq02, Ineq11 };

/// All ids in report order.
const std::vector<TheoremId>& all_theorems();
/// CLI spelling: thm4p, cor20, thm4, cor21, thm3, thm2, thm1, thm10, cor32, ineq02, ineq11.
std::string cli_name(TheoremId id);
std::string to_string(TheoremId id);
TheoremId theorem_from_string(const std::string& name);

/// Functions whose complete monotonicity (or that of their negative) the
/// theorems assert:
///   FQSC  f_{q,s,c}(x) = ln G(x+1) - ln G(x+s) - (1-s) psi(x+c)   (all q > 0)
///   GQC   g_{q,c}(x) = psi(x) - ln((1-q^x)/(1-q)) + a_q psi'(x+c)
///   T2    same with coefficient 1/2
///   T1A   -psi(x) + ln((1-q^x)/(1-q)) + ln q q^x/(2(1-q^x)) + psi''(x+1/2)/12
///   T1B   psi(x) - ln((1-q^x)/(1-q)) - ln q q^x/(2(1-q^x)) - psi''(x)/12
///   T10A  psi'(x) - (ln q)^2 q^x/((1-q)(1-q^x)) - (ln q)^2 q^{2x}/((1+q)(1-q^x)^2)
///   T10B  -psi'(x+1/2) + (ln q)^2 q^{x+1/2}/((1-q)(1-q^x))
enum class TheoremFn { FQSC, GQC, T2, T1A, T1B, T10A, T10B };

std::string to_string(TheoremFn fn);
TheoremFn theorem_fn_from_string(const std::string& name);

struct FnParams {
  double q = 0.5;
  double s = 0.5;
  double c = 0.0;
};

Eval theorem_function(TheoremFn fn, double x, const FnParams& p, const TruncationPolicy& pol = {});

/// Average of psi_q over [x+s, x+t] minus psi_q(x+shift), computed without
/// cancelling the O(1) constants of the q-series.
Eval psi_mean_gap(const QParam& qp, double x, double s, double t, double shift,
                  const TruncationPolicy& pol = {});

struct KershawGaps {
  double a_shift = 0.0;  ///< I_{psi_q}(s, 1)
  double b_shift = 0.0;  ///< b(q, s)
  Eval lower_gap;        ///< ln(G(x+1)/G(x+s)) - (1-s) psi(x + a_shift), predicted > 0
  Eval upper_gap;        ///< same with shift (1+s)/2, predicted < 0
  Eval sharp_upper_gap;  ///< same with shift b(q,s), predicted < 0 and >= upper_gap
};

KershawGaps kershaw_bounds(const QParam& qp, double s, double x, const TruncationPolicy& pol = {});

struct GridSpec {
  std::vector<double> q_values;
  std::vector<double> x_values;
  std::vector<double> s_values;
  /// Shifts at which the statements are asserted; empty selects each
  /// statement's own constant (b(q,s) for thm4/cor21, 0 for thm3, {0, 1/3} for thm2).
  std::vector<double> c_values;
  /// Upper endpoints t for the integral-mean inequality.
  std::vector<double> t_values;

  static GridSpec defaults();
  void validate() const;
};

struct Point {
  double q = std::numeric_limits<double>::quiet_NaN();
  double x = std::numeric_limits<double>::quiet_NaN();
  double s = std::numeric_limits<double>::quiet_NaN();
  double c = std::numeric_limits<double>::quiet_NaN();
};

enum class Relation { Greater, GreaterEq, Less, LessEq };
/// Unresolved: |value| is within its own error bound, so the sign of a strict
/// inequality cannot be decided at working precision.
enum class Status { Pass, Fail, Unresolved };

struct Check {
  Point point;
  std::string quantity;
  double value = 0.0;
  double err = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::Greater;
  Status status = Status::Pass;
};

std::string to_string(Relation r);
std::string to_string(Status s);

struct TheoremReport {
  TheoremId id = TheoremId::Thm4Prime;
  GridSpec grid;
  std::vector<Check> checks;
  std::vector<CertificateReport> certificates;
  std::vector<std::string> notes;
  bool pass = false;

  std::size_t count(Status s) const;
};

/// Settings of the numerical probes; defaults are the documented values.
struct VerifyOptions {
  long certificate_n = kDefaultCertificateN;
  double below_threshold_delta = 0.05;
  double taylor_delta = 0.01;
  std::vector<double> large_x = {5.0, 10.0, 20.0, 40.0};
  double tightness_x = 1e-6;
  double tightness_limit = 1e-4;
  double residual_limit = 1e-12;
  double taylor_zero_limit = 1e-12;
  double fd_h = 0.05;
  int fd_order = 6;
  bool finite_differences = true;
};

TheoremReport verify_theorem(TheoremId id, const GridSpec& grid,
                             const TruncationPolicy& pol = {},
                             const VerifyOptions& opt = {});

}  // namespace qgamma
