#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qgamma/means.hpp"
#include "qgamma/types.hpp"

// Coefficient families of the exponential-sum expansions sum_n c_n q^{nx}
// that underlie each complete-monotonicity statement, the scalar kernels
// the sign arguments reduce to, and two numerical CM surrogates: a sign
// sweep over the coefficients and alternating forward differences.
namespace qgamma {

/// Relative slack for provably nonnegative coefficients that round below 0.
inline constexpr double kSignSlack = 1e-15;
/// Coefficients within this fraction of their scale are identically zero.
inline constexpr double kZeroSnap = 1e-13;
inline constexpr double kCmTol = 1e-10;
inline constexpr long kDefaultCertificateN = 10'000;
inline constexpr int kMaxCmOrder = 10;

enum class FamilyId { PsiSeries, FprimeQSC, GQC, Thm2, Thm1A, Thm1B, Thm10A, Thm10B };

/// A shift parameter c that is either a fixed number or the sharp constant
/// b(q,s), resolved per q when a family is swept across a grid.
struct Shift {
  bool sharp_upper = false;
  double value = 0.0;

  static Shift fixed(double c) { return {false, c}; }
  static Shift best_b() { return {true, 0.0}; }
  double resolve(double q, double s) const;
};

/// psi_q'                                          PsiSeries(q)
/// f'_{q,s,c} = d/dx [ln G(x+1) - ln G(x+s) - (1-s) psi(x+c)]   FprimeQSC(q,s,c)
/// g_{q,c} with coefficient a_q                    GQC(q,c)
/// g_{q,c} with coefficient 1/2                    Thm2(q,c), negated for c >= 1/3
/// T1A, T1B of theorems.hpp                       Thm1A(q), Thm1B(q)
/// T10A, T10B of theorems.hpp                     Thm10A(q), Thm10B(q)
/// Coefficients are oriented so that the corresponding statement predicts
/// c_n >= 0 (negated flips the sign).
struct Family {
  FamilyId id = FamilyId::PsiSeries;
  double q = 0.5;
  double s = 0.5;
  Shift c = Shift::fixed(0.0);
  bool negated = false;

  Family at(double q_new) const {
    Family f = *this;
    f.q = q_new;
    return f;
  }
  void validate() const;
};

std::string to_string(FamilyId id);
FamilyId family_from_string(const std::string& name);
std::string describe(const Family& f);

/// Smallest admissible n for the family (2 for Thm10A, else 1).
long first_index(FamilyId id);

/// Coefficient of q^{nx} in the family's expansion, oriented as above.
double series_coefficient(const Family& fam, long n);

enum class KernelKind { Lemma25, Lemma26, HQ, UN, TaylorThm4, TaylorThm3 };

struct KernelArgs {
  double q = 0.5;
  long n = 1;
  double t = 0.0;  ///< HQ argument, t >= -ln q
  double s = 0.5;
  double c = 0.0;
};

/// Lemma25/26: the two strict sign inequalities in n and q; HQ: h_q(t);
/// UN: u_n(q); TaylorThm4/TaylorThm3: first-order Taylor coefficients in
/// z = q^x of f(x+1) - f(x) for the thm4 and thm3 functions.
double scalar_kernel(KernelKind kind, const KernelArgs& args);

struct CertificateReport {
  Family family;
  long n_min = 1;
  long n_max = 1;
  std::vector<double> q_grid;
  double min_margin = std::numeric_limits<double>::infinity();
  long witness_n = 0;
  double witness_q = 0.0;
  /// Lowest n (then lowest q) with a negative margin; 0 when none.
  long first_violation_n = 0;
  double first_violation_q = 0.0;
  bool pass = false;
};

/// Margins are c_n / scale_n, where scale_n is the magnitude of the summands
/// c_n is assembled from; ties go to the smaller n, then the smaller q.
/// Evaluates c_n for n in [first_index, N] at every grid q (the family's own
/// q is replaced). Pass iff every margin >= -kSignSlack * scale.
CertificateReport certify_signs(const Family& fam, long N, std::span<const double> q_grid);

struct CMReport {
  std::string id;
  std::vector<double> x_grid;
  double h = 0.0;
  int K = 0;
  double cm_tol = kCmTol;
  double worst = std::numeric_limits<double>::infinity();
  double witness_x = 0.0;
  int witness_k = 0;
  bool pass = false;
};

/// (-1)^k Delta_h^k f(x) for k = 0..K on the grid; pass iff all >= -cm_tol.
/// Every x + K h must lie inside the open interval domain.
CMReport finite_difference_cm(std::string id, const std::function<double(double)>& f,
                              std::span<const double> x_grid, double h, int K,
                              Interval domain = {0.0, std::numeric_limits<double>::infinity()},
                              double cm_tol = kCmTol);

}  // namespace qgamma
