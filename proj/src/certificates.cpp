#include "qgamma/certificates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <sstream>

namespace qgamma {
namespace {

/// Coefficient value together with the magnitude of the summands it was
/// assembled from, which sets the rounding scale.
struct Term {
  double value;
  double scale;
};

void require_q(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("family parameter q must lie in (0,1)");
}

void require_n(long n, long lo) {
  if (n < lo) throw DomainError("coefficient index n=" + std::to_string(n) + " below " +
                                std::to_string(lo));
}

double horner_odd_even(const double* c, int len, double x) {
  double v = 0.0;
  for (int i = len - 1; i >= 0; --i) v = v * x + c[i];
  return v;
}

// n * Lemma25(n, q) and n * Lemma26(n, q) as functions of x = n ln q; the
// Taylor coefficients start at x^4 and x^3 respectively.
constexpr std::array<double, 15> kF25 = {
    0, 0, 0, 0, -1.0 / 480, 0, 11.0 / 161280, 0, -107.0 / 58060800, 0,
    2911.0 / 61312204800.0, 0, -808733.0 / 669529276416000.0, 0,
    984397.0 / 32137405267968000.0};
constexpr std::array<double, 16> kF26 = {
    0, 0, 0, -1.0 / 24, 1.0 / 120, 0, -1.0 / 6720, 0, 13.0 / 3628800, 0,
    -43.0 / 479001600, 0, 1483.0 / 653837184000.0, 0, -901.0 / 15692092416000.0, 0};
constexpr double kLemmaSeriesRadius = 0.5;

Term lemma_kernel(bool half_power, long n, double q) {
  const double x = static_cast<double>(n) * std::log(q);
  const double nn = static_cast<double>(n);
  if (std::abs(x) < kLemmaSeriesRadius) {
    const double v = half_power ? horner_odd_even(kF25.data(), kF25.size(), x)
                                : horner_odd_even(kF26.data(), kF26.size(), x);
    return {v / nn, std::abs(v) / nn};
  }
  const double om = -std::expm1(x);  // 1 - q^n
  const double a = x / om;
  const double b = -0.5 * x;
  const double tail = x * x * x * (half_power ? std::exp(0.5 * x) : 1.0) / (12.0 * om);
  const double v = (a + 1.0 + b - tail) / nn;
  return {v, (std::abs(a) + 1.0 + std::abs(b) + std::abs(tail)) / nn};
}

/// (t + expm1(-t)) / t = 1 - (1 - e^{-t})/t, stable as t -> 0.
double one_minus_avg_exp(double t) {
  if (t < 0.1) {
    double term = 1.0, sum = 0.0;
    for (int k = 2; k < 20; ++k) {
      term *= (k == 2 ? t / 2.0 : -t / k);
      sum += term;
    }
    return sum;
  }
  return (t + std::expm1(-t)) / t;
}

/// Coefficient of q^{nx} in psi_q(x) - ln((1-q^x)/(1-q)) + w psi_q'(x+c):
/// (ln q / (1-q^n)) (1 - (1-e^{-t})/t - w t e^{-ct}), t = -n ln q.
Term g_coefficient(long n, double q, double w, double c) {
  const double lq = std::log(q);
  const double t = -static_cast<double>(n) * lq;
  const double om = -std::expm1(-t);
  const double first = one_minus_avg_exp(t);
  const double second = w * t * std::exp(-c * t);
  const double f = lq / om;
  return {f * (first - second), std::abs(f) * (std::abs(first) + std::abs(second))};
}

Term coefficient_term(const Family& fam, long n) {
  const double q = fam.q;
  const double lq = std::log(q);
  const double nn = static_cast<double>(n);
  const double om = -std::expm1(nn * lq);  // 1 - q^n
  switch (fam.id) {
    case FamilyId::PsiSeries: {
      const double v = lq * lq * nn / om;
      return {v, v};
    }
    case FamilyId::FprimeQSC: {
      const double c = fam.c.resolve(q, fam.s);
      // q^n - q^{ns} = q^{ns} expm1(n(1-s) ln q)
      const double a = std::exp(nn * fam.s * lq) * std::expm1(nn * (1.0 - fam.s) * lq);
      const double b = (1.0 - fam.s) * nn * lq * std::exp(nn * c * lq);
      const double f = lq / om;
      return {f * (a - b), std::abs(f) * (std::abs(a) + std::abs(b))};
    }
    case FamilyId::GQC:
      return g_coefficient(n, q, aq_const(q), fam.c.resolve(q, fam.s));
    case FamilyId::Thm2:
      return g_coefficient(n, q, 0.5, fam.c.resolve(q, fam.s));
    case FamilyId::Thm1A: {
      const Term k = lemma_kernel(true, n, q);
      return {-k.value, k.scale};
    }
    case FamilyId::Thm1B:
      return lemma_kernel(false, n, q);
    case FamilyId::Thm10A: {
      // (ln q)^2 u_n / ((1-q^n)(1-q)(1+q)) with u_n/(1-q) = n(q+q^n) - 2q(1-q^n)/(1-q)
      const double om1 = -std::expm1(lq);
      const double a = nn * (q + std::exp(nn * lq));
      const double b = 2.0 * q * om / om1;
      const double f = lq * lq / (om * (1.0 + q));
      return {f * (a - b), f * (a + b)};
    }
    case FamilyId::Thm10B: {
      const double om1 = -std::expm1(lq);
      const double a = std::exp(0.5 * lq) / om1;
      const double b = nn * std::exp(0.5 * nn * lq) / om;
      const double f = lq * lq;
      return {f * (a - b), f * (a + b)};
    }
  }
  throw DomainError("unknown family");
}

}  // namespace

double Shift::resolve(double q, double s) const {
  return sharp_upper ? qgamma::best_b(q, s) : value;
}

void Family::validate() const {
  require_q(q);
  if (id == FamilyId::FprimeQSC && !(s > 0.0 && s < 1.0))
    throw DomainError("FprimeQSC requires 0 < s < 1");
  if (!c.sharp_upper && !(c.value >= 0.0 && std::isfinite(c.value)))
    throw DomainError("shift c must be a finite nonnegative number");
}

std::string to_string(FamilyId id) {
  switch (id) {
    case FamilyId::PsiSeries: return "PsiSeries";
    case FamilyId::FprimeQSC: return "FprimeQSC";
    case FamilyId::GQC: return "GQC";
    case FamilyId::Thm2: return "Thm2";
    case FamilyId::Thm1A: return "Thm1A";
    case FamilyId::Thm1B: return "Thm1B";
    case FamilyId::Thm10A: return "Thm10A";
    case FamilyId::Thm10B: return "Thm10B";
  }
  return "?";
}

FamilyId family_from_string(const std::string& name) {
  std::string lower;
  for (char ch : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (FamilyId id : {FamilyId::PsiSeries, FamilyId::FprimeQSC, FamilyId::GQC, FamilyId::Thm2,
                      FamilyId::Thm1A, FamilyId::Thm1B, FamilyId::Thm10A, FamilyId::Thm10B}) {
    std::string cand;
    for (char ch : to_string(id)) cand += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (cand == lower) return id;
  }
  throw DomainError("unknown family '" + name + "'");
}

std::string describe(const Family& f) {
  std::ostringstream os;
  os << to_string(f.id);
  switch (f.id) {
    case FamilyId::FprimeQSC:
      os << "(s=" << f.s << ",c=" << (f.c.sharp_upper ? std::string("b(q,s)") : std::to_string(f.c.value)) << ")";
      break;
    case FamilyId::GQC:
    case FamilyId::Thm2:
      os << "(c=" << f.c.value << ")";
      break;
    default:
      break;
  }
  if (f.negated) os << "[negated]";
  return os.str();
}

long first_index(FamilyId id) { return id == FamilyId::Thm10A ? 2 : 1; }

double series_coefficient(const Family& fam, long n) {
  fam.validate();
  require_n(n, first_index(fam.id));
  const double v = coefficient_term(fam, n).value;
  return fam.negated ? -v : v;
}

double scalar_kernel(KernelKind kind, const KernelArgs& a) {
  require_q(a.q);
  const double q = a.q;
  const double lq = std::log(q);
  switch (kind) {
    case KernelKind::Lemma25:
      require_n(a.n, 1);
      return lemma_kernel(true, a.n, q).value;
    case KernelKind::Lemma26:
      require_n(a.n, 1);
      return lemma_kernel(false, a.n, q).value;
    case KernelKind::HQ: {
      if (!(a.t >= -lq) || !std::isfinite(a.t)) throw DomainError("h_q requires t >= -ln q");
      return (a.t + std::expm1(-a.t)) - aq_const(q) * a.t * a.t;
    }
    case KernelKind::UN: {
      require_n(a.n, 1);
      const double nn = static_cast<double>(a.n);
      const double qn = std::exp(nn * lq);
      return nn * (1.0 - q) * (q + qn) - 2.0 * q * (-std::expm1(nn * lq));
    }
    case KernelKind::TaylorThm4: {
      if (!(a.s > 0.0 && a.s < 1.0)) throw DomainError("TaylorThm4 requires 0 < s < 1");
      if (!(a.c >= 0.0)) throw DomainError("TaylorThm4 requires c >= 0");
      // q^s - q = -q^s expm1((1-s) ln q)
      return -std::exp(a.s * lq) * std::expm1((1.0 - a.s) * lq) +
             (1.0 - a.s) * lq * std::exp(a.c * lq);
    }
    case KernelKind::TaylorThm3: {
      if (!(a.c >= 0.0)) throw DomainError("TaylorThm3 requires c >= 0");
      // -ln q + q - 1 = expm1(ln q) - ln q
      return (std::expm1(lq) - lq) - aq_const(q) * lq * lq * std::exp(a.c * lq);
    }
  }
  throw DomainError("unknown kernel");
}

CertificateReport certify_signs(const Family& fam, long N, std::span<const double> q_grid) {
  const long n0 = first_index(fam.id);
  if (N < 2 || N < n0) throw DomainError("certificate range N must be at least 2");
  if (q_grid.empty()) throw DomainError("certificate q grid is empty");
  for (double q : q_grid) fam.at(q).validate();

  struct Partial {
    double margin = std::numeric_limits<double>::infinity();
    long n = 0;
    long first_bad = 0;
  };
  auto sweep = [&](double q) {
    const Family f = fam.at(q);
    Partial p;
    for (long n = n0; n <= N; ++n) {
      const Term t = coefficient_term(f, n);
      // Underflowed coefficients carry no sign information.
      if (!(t.scale > std::numeric_limits<double>::min())) continue;
      double m = (f.negated ? -t.value : t.value) / t.scale;
      if (std::abs(m) <= kZeroSnap) m = 0.0;
      if (m < -kSignSlack && p.first_bad == 0) p.first_bad = n;
      if (m < p.margin) {
        p.margin = m;
        p.n = n;
      }
    }
    return p;
  };

  std::vector<std::future<Partial>> jobs;
  jobs.reserve(q_grid.size());
  for (double q : q_grid) jobs.push_back(std::async(std::launch::async, sweep, q));

  CertificateReport rep;
  rep.family = fam;
  rep.n_min = n0;
  rep.n_max = N;
  rep.q_grid.assign(q_grid.begin(), q_grid.end());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Partial p = jobs[i].get();
    const double q = q_grid[i];
    const bool better =
        p.margin < rep.min_margin ||
        (p.margin == rep.min_margin &&
         (p.n < rep.witness_n || (p.n == rep.witness_n && q < rep.witness_q)));
    if (better) {
      rep.min_margin = p.margin;
      rep.witness_n = p.n;
      rep.witness_q = q;
    }
    if (p.first_bad != 0 &&
        (rep.first_violation_n == 0 || p.first_bad < rep.first_violation_n ||
         (p.first_bad == rep.first_violation_n && q < rep.first_violation_q))) {
      rep.first_violation_n = p.first_bad;
      rep.first_violation_q = q;
    }
  }
  rep.pass = rep.min_margin >= -kSignSlack;
  return rep;
}

CMReport finite_difference_cm(std::string id, const std::function<double(double)>& f,
                              std::span<const double> x_grid, double h, int K,
                              Interval domain, double cm_tol) {
  if (x_grid.empty()) throw DomainError("finite-difference grid is empty");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("step h must be positive");
  if (K < 0 || K > kMaxCmOrder) throw DomainError("order K must lie in [0, 10]");
  if (!(cm_tol >= 0.0)) throw DomainError("cm_tol must be nonnegative");
  for (double x : x_grid) {
    if (!(x > domain.lo) || !(x + K * h < domain.hi))
      throw DomainError("grid point " + std::to_string(x) + " + K h leaves the domain");
  }

  CMReport rep;
  rep.id = std::move(id);
  rep.x_grid.assign(x_grid.begin(), x_grid.end());
  rep.h = h;
  rep.K = K;
  rep.cm_tol = cm_tol;
  std::vector<double> d(static_cast<std::size_t>(K) + 1);
  for (double x : x_grid) {
    for (int j = 0; j <= K; ++j) d[j] = f(x + j * h);
    for (int k = 0; k <= K; ++k) {
      const double v = (k % 2 == 0 ? 1.0 : -1.0) * d[0];
      if (v < rep.worst) {
        rep.worst = v;
        rep.witness_x = x;
        rep.witness_k = k;
      }
      for (int j = 0; j + 1 <= K - k; ++j) d[j] = d[j + 1] - d[j];
    }
  }
  rep.pass = rep.worst >= -cm_tol;
  return rep;
}

}  // namespace qgamma
