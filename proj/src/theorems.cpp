#include "qgamma/theorems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <future>
#include <sstream>

#include "qgamma/classical.hpp"
#include "qgamma/core.hpp"
#include "qgamma/means.hpp"

namespace qgamma {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eval rounded(double v, double ulps) { return {v, ulps * kEps * std::fabs(v)}; }

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// elementary pieces in r = q^x

// ln(1 - q^x) for 0 < q < 1.
Eval log_one_minus_pow(double x, double lam) {
  const double z = x * lam;
  const double r = std::exp(z);
  if (r < 0.5) return rounded(std::log1p(-r), 4);
  const double v = std::log(-std::expm1(z));
  return {v, 4 * kEps * (std::fabs(v) + 1.0)};
}

// q^x / (1 - q^x).
Eval pow_over_one_minus(double x, double lam) {
  const double z = x * lam;
  return rounded(std::exp(z) / -std::expm1(z), std::fabs(z) + 4);
}

// Sum of a_n r^n from n0 on, with a_n supplied with its own error and a
// bound on sum_{n>=m} |a_n| r^n for the truncated tail.
// z = ln r is taken as given so that r^n = exp(n z) carries no compounded
// rounding from r itself.
Eval exp_series(double z, long n0, const std::function<Eval(long)>& coef,
                const std::function<double(long)>& tail_from, const TruncationPolicy& pol) {
  double sum = 0.0, comp = 0.0, err = 0.0;
  const double lr = z;
  for (long n = n0;; ++n) {
    if (static_cast<std::size_t>(n - n0) > pol.max_terms)
      throw ConvergenceError("exponential series exceeded max_terms");
    const double rn = std::exp(static_cast<double>(n) * lr);
    const Eval a = coef(n);
    const double term = a.value * rn;
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    err += a.err * rn + (static_cast<double>(n) * std::fabs(lr) + 2) * kEps * std::fabs(term);
    const double tail = tail_from(n + 1);
    const double total = sum + comp;
    if (tail <= pol.target_tol * std::fabs(total) || tail < 1e-300) {
      return {total, err + tail + 2 * kEps * std::fabs(total)};
    }
  }
}

// sum_{n>=m} n r^n
double power1_tail(long m, double r) {
  const double md = static_cast<double>(m);
  return std::pow(r, md) * (md - (md - 1) * r) / ((1 - r) * (1 - r));
}

constexpr long kPairedTerms = 64;

// T10A: lambda^2 sum_{n>=3} v_n / ((1-q^n)(1+q)) q^{nx} with
// v_n = n(q+q^n) - 2q(1-q^n)/(1-q) = sum_{i=1}^{n} (q - q^i)(1 - q^{n-i}) >= 0.
Eval t10a_series(double x, const QParam& qp, const TruncationPolicy& pol) {
  const double q = qp.value(), lam = qp.log_q();
  const double l2 = lam * lam;
  auto coef = [&](long n) -> Eval {
    const double omn = -std::expm1(n * lam);
    double v, verr;
    if (n <= kPairedTerms) {
      v = 0.0;
      for (long i = 2; i < n; ++i) v += q * std::expm1((i - 1) * lam) * std::expm1((n - i) * lam);
      verr = (n + 6) * kEps * v;
    } else {
      const double a = n * (q + std::exp(n * lam));
      const double b = 2 * q * omn / (1 - q);
      v = a - b;
      verr = 8 * kEps * (a + b);
    }
    const double scale = l2 / (omn * (1 + q));
    return {v * scale, verr * scale + 4 * kEps * std::fabs(v * scale)};
  };
  auto tail = [&](long m) {
    return l2 * 2.0 / ((-std::expm1(m * lam)) * (1 + q)) * power1_tail(m, std::exp(x * lam));
  };
  return exp_series(x * lam, 3, coef, tail, pol);
}

// T10B: lambda^2 sum_{n>=2} d_n q^{nx} with
// d_n = q^{1/2}/(1-q) - n q^{n/2}/(1-q^n)
//     = q^{1/2} sum_{i=0}^{n-1} (q^{i/2} - q^{(n-1-i)/2})^2 / (2(1-q^n)).
Eval t10b_series(double x, const QParam& qp, const TruncationPolicy& pol) {
  const double q = qp.value(), lam = qp.log_q();
  const double l2 = lam * lam, rq = std::sqrt(q);
  auto coef = [&](long n) -> Eval {
    const double omn = -std::expm1(n * lam);
    double d, derr;
    if (n <= kPairedTerms) {
      double acc = 0.0;
      for (long i = 0; i < n; ++i) {
        const long j = n - 1 - i;
        const long lo = std::min(i, j), hi = std::max(i, j);
        const double diff = std::exp(0.5 * lo * lam) * std::expm1(0.5 * (hi - lo) * lam);
        acc += diff * diff;
      }
      d = rq * acc / (2 * omn);
      derr = (n + 8) * kEps * d;
    } else {
      const double a = rq / (1 - q);
      const double b = n * std::exp(0.5 * n * lam) / omn;
      d = a - b;
      derr = 8 * kEps * (a + b);
    }
    return {l2 * d, l2 * derr + 2 * kEps * l2 * std::fabs(d)};
  };
  auto tail = [&](long m) {
    const double r = std::exp(x * lam);
    return l2 * rq / (1 - q) * std::pow(r, static_cast<double>(m)) / (1 - r);
  };
  return exp_series(x * lam, 2, coef, tail, pol);
}

// (t - s) * [mean of psi over [x+s, x+t] - psi(x+shift)]
Eval weighted_gap(const QParam& qp, double x, double s, double t, double shift,
                  const TruncationPolicy& pol) {
  switch (qp.branch()) {
    case Branch::SubUnit: {
      const Eval lo = log_q_pochhammer_pow(x + s, qp, pol);
      const Eval hi = log_q_pochhammer_pow(x + t, qp, pol);
      const Eval s0 = q_lambert_sum(x + shift, qp, 0, pol);
      const Eval tail = s0.scaled((t - s) * qp.log_q());
      const Eval diff = lo - hi;
      return diff - tail + Eval{0, 2 * kEps * (std::fabs(lo.value) + std::fabs(hi.value))};
    }
    case Branch::SuperUnit: {
      const Eval base = weighted_gap(qp.reciprocal(), x, s, t, shift, pol);
      const double lin = (t - s) * (0.5 * (s + t) - shift) * qp.log_q();
      return base + rounded(lin, 4);
    }
    case Branch::Classical:
      break;
  }
  const Eval hi = classical::lgamma(x + t);
  const Eval lo = classical::lgamma(x + s);
  const Eval d = classical::digamma(x + shift);
  return hi - lo - d.scaled(t - s);
}

void require_theorem_q(const QParam& qp) {
  if (qp.branch() != Branch::SubUnit) throw DomainError("function requires 0 < q < 1");
  detail::require_series_regime(qp);
}

void require_finite_nonneg(double v, const char* what) {
  if (!std::isfinite(v) || v < 0) throw DomainError(std::string(what) + " must be finite and >= 0");
}

}  // namespace

// ---------------------------------------------------------------------------
// names

const std::vector<TheoremId>& all_theorems() {
  static const std::vector<TheoremId> ids = {
      TheoremId::Thm4Prime, TheoremId::Cor20, TheoremId::Thm4,   TheoremId::Cor21,
      TheoremId::Thm3,      TheoremId::Thm2,  TheoremId::Thm1,   TheoremId::Thm10,
      TheoremId::Cor32,     TheoremId::Ineq02, TheoremId::Ineq11};
  return ids;
}

std::string cli_name(TheoremId id) {
  switch (id) {
    case TheoremId::Thm4Prime: return "thm4p";
    case TheoremId::Cor20: return "cor20";
    case TheoremId::Thm4: return "thm4";
    case TheoremId::Cor21: return "cor21";
    case TheoremId::Thm3: return "thm3";
    case TheoremId::Thm2: return "thm2";
    case TheoremId::Thm1: return "thm1";
    case TheoremId::Thm10: return "thm10";
    case TheoremId::Cor32: return "cor32";
    case TheoremId::Ineq02: return "ineq02";
    case TheoremId::Ineq11: return "ineq11";
  }
  return "?";
}

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::Thm4Prime: return "Thm4Prime";
    case TheoremId::Cor20: return "Cor20";
    case TheoremId::Thm4: return "Thm4";
    case TheoremId::Cor21: return "Cor21";
    case TheoremId::Thm3: return "Thm3";
    case TheoremId::Thm2: return "Thm2";
    case TheoremId::Thm1: return "Thm1";
    case TheoremId::Thm10: return "Thm10";
    case TheoremId::Cor32: return "Cor32";
    case TheoremId::Ineq02: return "Ineq02";
    case TheoremId::Ineq11: return "Ineq11";
  }
  return "?";
}

TheoremId theorem_from_string(const std::string& name) {
  const std::string n = lower(name);
  for (TheoremId id : all_theorems())
    if (n == cli_name(id) || n == lower(to_string(id))) return id;
  throw DomainError("unknown theorem: " + name);
}

std::string to_string(TheoremFn fn) {
  switch (fn) {
    case TheoremFn::FQSC: return "FQSC";
    case TheoremFn::GQC: return "GQC";
    case TheoremFn::T2: return "T2";
    case TheoremFn::T1A: return "T1A";
    case TheoremFn::T1B: return "T1B";
    case TheoremFn::T10A: return "T10A";
    case TheoremFn::T10B: return "T10B";
  }
  return "?";
}

TheoremFn theorem_fn_from_string(const std::string& name) {
  const std::string n = lower(name);
  for (TheoremFn fn : {TheoremFn::FQSC, TheoremFn::GQC, TheoremFn::T2, TheoremFn::T1A,
                       TheoremFn::T1B, TheoremFn::T10A, TheoremFn::T10B})
    if (n == lower(to_string(fn))) return fn;
  throw DomainError("unknown theorem function: " + name);
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Greater: return ">";
    case Relation::GreaterEq: return ">=";
    case Relation::Less: return "<";
    case Relation::LessEq: return "<=";
  }
  return "?";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Unresolved: return "unresolved";
  }
  return "?";
}

std::size_t TheoremReport::count(Status s) const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [s](const Check& c) { return c.status == s; }));
}

// ---------------------------------------------------------------------------
// functions

Eval psi_mean_gap(const QParam& qp, double x, double s, double t, double shift,
                  const TruncationPolicy& pol) {
  detail::require_positive_x(x);
  if (!(t > s) || !(s >= 0) || !(shift >= 0) || !std::isfinite(t) || !std::isfinite(shift))
    throw DomainError("psi_mean_gap requires 0 <= s < t and shift >= 0");
  if (qp.branch() != Branch::Classical) detail::require_series_regime(qp);
  const Eval w = weighted_gap(qp, x, s, t, shift, pol);
  return rounded(w.value / (t - s), 2) + Eval{0, w.err / (t - s)};
}

Eval theorem_function(TheoremFn fn, double x, const FnParams& p, const TruncationPolicy& pol) {
  pol.validate();
  detail::require_positive_x(x);
  const QParam qp(p.q);
  require_finite_nonneg(p.c, "c");
  if (fn == TheoremFn::FQSC) {
    if (!(p.s > 0 && p.s < 1)) throw DomainError("s must lie in (0,1)");
    if (!(p.c > 0)) throw DomainError("FQSC requires c > 0");
    if (qp.branch() != Branch::Classical) detail::require_series_regime(qp);
    return weighted_gap(qp, x, p.s, 1.0, p.c, pol);
  }
  require_theorem_q(qp);
  const double lam = qp.log_q();
  switch (fn) {
    case TheoremFn::GQC:
    case TheoremFn::T2: {
      const double w = fn == TheoremFn::GQC ? aq_const(p.q) : 0.5;
      const Eval s0 = q_lambert_sum(x, qp, 0, pol).scaled(lam);
      const Eval s1 = q_lambert_sum(x + p.c, qp, 1, pol).scaled(w * lam * lam);
      return s0 - log_one_minus_pow(x, lam) + s1;
    }
    case TheoremFn::T1A: {
      const Eval s0 = q_lambert_sum(x, qp, 0, pol).scaled(lam);
      const Eval s2 = q_lambert_sum(x + 0.5, qp, 2, pol).scaled(lam * lam * lam / 12);
      const Eval r = pow_over_one_minus(x, lam).scaled(0.5 * lam);
      return -s0 + log_one_minus_pow(x, lam) + r + s2;
    }
    case TheoremFn::T1B: {
      const Eval s0 = q_lambert_sum(x, qp, 0, pol).scaled(lam);
      const Eval s2 = q_lambert_sum(x, qp, 2, pol).scaled(lam * lam * lam / 12);
      const Eval r = pow_over_one_minus(x, lam).scaled(0.5 * lam);
      return s0 - log_one_minus_pow(x, lam) - r - s2;
    }
    case TheoremFn::T10A: return t10a_series(x, qp, pol);
    case TheoremFn::T10B: return t10b_series(x, qp, pol);
    case TheoremFn::FQSC: break;
  }
  throw DomainError("unhandled theorem function");
}

KershawGaps kershaw_bounds(const QParam& qp, double s, double x, const TruncationPolicy& pol) {
  if (!(s > 0 && s < 1)) throw DomainError("s must lie in (0,1)");
  detail::require_positive_x(x);
  KershawGaps g;
  const Eval a = integral_psi_mean(qp, s, 1.0);
  g.a_shift = a.value;
  g.b_shift = best_b(qp.value(), s);
  g.lower_gap = weighted_gap(qp, x, s, 1.0, g.a_shift, pol);
  // the shift itself is only known to a.err
  g.lower_gap.err += (1 - s) * std::fabs(psi_q_deriv(x + g.a_shift, qp, 1, pol).value) * a.err;
  g.upper_gap = weighted_gap(qp, x, s, 1.0, 0.5 * (1 + s), pol);
  g.sharp_upper_gap = weighted_gap(qp, x, s, 1.0, g.b_shift, pol);
  return g;
}

// ---------------------------------------------------------------------------
// grids

GridSpec GridSpec::defaults() {
  GridSpec g;
  g.q_values = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.5, 2.0, 5.0};
  g.x_values = {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  g.s_values = {0.1, 0.25, 0.5, 0.75, 0.9};
  g.t_values = {1.0, 2.0};
  return g;
}

void GridSpec::validate() const {
  if (q_values.empty() || x_values.empty() || s_values.empty())
    throw DomainError("grid lists must be nonempty");
  for (double q : q_values)
    if (!(q > 0) || !std::isfinite(q)) throw DomainError("grid q must be > 0");
  for (double x : x_values)
    if (!(x > 0) || !std::isfinite(x)) throw DomainError("grid x must be > 0");
  for (double s : s_values)
    if (!(s > 0 && s < 1)) throw DomainError("grid s must lie in (0,1)");
  for (double c : c_values) require_finite_nonneg(c, "grid c");
  for (double t : t_values)
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("grid t must be > 0");
}

// ---------------------------------------------------------------------------
// verification

namespace {

bool nan_less(double a, double b) {
  if (std::isnan(a)) return !std::isnan(b);
  if (std::isnan(b)) return false;
  return a < b;
}

bool check_less(const Check& a, const Check& b) {
  const double ka[4] = {a.point.q, a.point.x, a.point.s, a.point.c};
  const double kb[4] = {b.point.q, b.point.x, b.point.s, b.point.c};
  for (int i = 0; i < 4; ++i) {
    if (nan_less(ka[i], kb[i])) return true;
    if (nan_less(kb[i], ka[i])) return false;
  }
  return a.quantity < b.quantity;
}

// Claim: sign * value > 0.
Check strict(Point p, std::string qty, Eval e, int sign = 1) {
  Check c{p, std::move(qty), e.value, e.err, sign > 0 ? e.err : -e.err,
          sign > 0 ? Relation::Greater : Relation::Less, Status::Pass};
  const double v = sign * e.value;
  c.status = v > e.err ? Status::Pass : (v < -e.err ? Status::Fail : Status::Unresolved);
  return c;
}

// Claim: sign * value >= 0.
Check nonstrict(Point p, std::string qty, Eval e, int sign = 1) {
  Check c{p, std::move(qty), e.value, e.err, sign > 0 ? -e.err : e.err,
          sign > 0 ? Relation::GreaterEq : Relation::LessEq, Status::Pass};
  c.status = sign * e.value >= -e.err ? Status::Pass : Status::Fail;
  return c;
}

Check at_most(Point p, std::string qty, double value, double limit, double err = 0.0) {
  return {p, std::move(qty), value, err, limit, Relation::LessEq,
          value <= limit ? Status::Pass : Status::Fail};
}

Check exact_sign(Point p, std::string qty, double value, int sign) {
  const bool ok = sign > 0 ? value > 0 : value < 0;
  return {p, std::move(qty), value, 0.0, 0.0, sign > 0 ? Relation::Greater : Relation::Less,
          ok ? Status::Pass : Status::Fail};
}

Point pt(double q, double x = kNaN, double s = kNaN, double c = kNaN) { return {q, x, s, c}; }

class Builder {
 public:
  Builder(TheoremId id, const GridSpec& grid, const TruncationPolicy& pol, const VerifyOptions& opt)
      : pol_(pol), opt_(opt) {
    rep_.id = id;
    rep_.grid = grid;
  }

  TheoremReport finish() {
    std::stable_sort(rep_.checks.begin(), rep_.checks.end(), check_less);
    rep_.pass = std::none_of(rep_.checks.begin(), rep_.checks.end(),
                             [](const Check& c) { return c.status == Status::Fail; });
    for (const auto& c : rep_.certificates) rep_.pass = rep_.pass && c.pass;
    return std::move(rep_);
  }

  void add(Check c) { rep_.checks.push_back(std::move(c)); }
  void note(std::string n) {
    if (std::find(rep_.notes.begin(), rep_.notes.end(), n) == rep_.notes.end())
      rep_.notes.push_back(std::move(n));
  }

  std::vector<double> sub_q() const {
    std::vector<double> out;
    for (double q : rep_.grid.q_values)
      if (q < 1) out.push_back(q);
    return out;
  }

  bool any_q() const { return !rep_.grid.q_values.empty(); }

  // Certificate across the SubUnit grid, summarised as one check.
  void certificate(const Family& fam, std::string label) {
    const auto qs = sub_q();
    if (qs.empty()) return;
    CertificateReport cr = certify_signs(fam, opt_.certificate_n, qs);
    const double c = fam.c.sharp_upper ? fam.c.resolve(cr.witness_q, fam.s) : fam.c.value;
    const bool uses_s = fam.id == FamilyId::FprimeQSC;
    const bool uses_c = uses_s || fam.id == FamilyId::GQC || fam.id == FamilyId::Thm2;
    add({pt(cr.witness_q, kNaN, uses_s ? fam.s : kNaN, uses_c ? c : kNaN),
         "certificate:" + label + " n<=" + std::to_string(cr.n_max), cr.min_margin, 0.0,
         -kSignSlack, Relation::GreaterEq, cr.pass ? Status::Pass : Status::Fail});
    rep_.certificates.push_back(std::move(cr));
  }

  // Alternating forward differences on [0.2, 5] step 0.1.
  void fd_cm(Point p, const std::string& label, const std::function<double(double)>& f) {
    if (!opt_.finite_differences) return;
    std::vector<double> xs;
    for (int i = 2; i <= 50; ++i) xs.push_back(0.1 * i);
    const CMReport r = finite_difference_cm(label, f, xs, opt_.fd_h, opt_.fd_order);
    add({p, "fd_cm:" + label, r.worst, 0.0, -r.cm_tol, Relation::GreaterEq,
         r.pass ? Status::Pass : Status::Fail});
  }

  const TruncationPolicy& pol() const { return pol_; }
  const VerifyOptions& opt() const { return opt_; }
  const GridSpec& grid() const { return rep_.grid; }

 private:
  TheoremReport rep_;
  TruncationPolicy pol_;
  VerifyOptions opt_;
};

Eval fn_at(TheoremFn fn, double x, double q, double s, double c, const TruncationPolicy& pol) {
  return theorem_function(fn, x, FnParams{q, s, c}, pol);
}

void note_reduction(Builder& b, double q) {
  if (q > 1) b.note("q > 1 points rely on the reduction Gamma_q(x) = Gamma_{1/q}(x) q^{(x-1)(x-2)/2}");
  if (q == 1) b.note("q = 1 points use the classical gamma function");
}

// mean of psi over [x+s, x+t] against psi(x + I(s,t))
void integral_mean_checks(Builder& b, double q, double s, double t, const std::string& tag,
                          bool as_lower_kershaw) {
  const QParam qp(q);
  const Eval I = integral_psi_mean(qp, s, t);
  const Eval avg = psi_q_average(qp, s, t, b.pol());
  const Eval at = psi_q(I.value, qp, b.pol());
  const Point p0 = pt(q, kNaN, s);
  b.add(strict(p0, "I-s" + tag, Eval{I.value - s, I.err}));
  b.add(strict(p0, "t-I" + tag, Eval{t - I.value, I.err}));
  b.add(at_most(p0, "mean_residual" + tag, std::fabs(at.value - avg.value), b.opt().residual_limit,
                at.err + avg.err));
  auto margin = [&](double x) {
    Eval g = as_lower_kershaw ? weighted_gap(qp, x, s, t, I.value, b.pol())
                              : psi_mean_gap(qp, x, s, t, I.value, b.pol());
    const double w = as_lower_kershaw ? (t - s) : 1.0;
    g.err += w * std::fabs(psi_q_deriv(x + I.value, qp, 1, b.pol()).value) * I.err;
    return g;
  };
  const std::string name = as_lower_kershaw ? "lower_gap" : "mean_minus_psi_at_I" + tag;
  for (double x : b.grid().x_values) b.add(strict(pt(q, x, s), name, margin(x)));
  const double xt = b.opt().tightness_x;
  const Eval gt = margin(xt);
  b.add(at_most(pt(q, xt, s), name + "_tightness", gt.value, b.opt().tightness_limit, gt.err));
}

void verify_thm4prime(Builder& b) {
  auto ts = b.grid().t_values;
  if (ts.empty()) ts = {1.0};
  for (double q : b.grid().q_values) {
    note_reduction(b, q);
    for (double s : b.grid().s_values)
      for (double t : ts)
        if (t > s) integral_mean_checks(b, q, s, t, "(t=" + fmt(t) + ")", false);
  }
}

void verify_cor20(Builder& b) {
  for (double q : b.grid().q_values) {
    note_reduction(b, q);
    for (double s : b.grid().s_values) integral_mean_checks(b, q, s, 1.0, "", true);
  }
}

// shifts asserted for thm4/cor21 at (q, s)
std::vector<std::pair<double, std::string>> upper_shifts(const Builder& b, double q, double s) {
  std::vector<std::pair<double, std::string>> out;
  if (b.grid().c_values.empty()) {
    out.emplace_back(best_b(q, s), "b");
  } else {
    for (double c : b.grid().c_values) out.emplace_back(c, "c");
  }
  return out;
}

void below_threshold_control(Builder& b, double q, double s) {
  const double c = best_b(q, s) - b.opt().below_threshold_delta;
  if (!(c > 0)) return;
  Check best;
  bool have = false;
  for (double x : b.opt().large_x) {
    const Eval f = fn_at(TheoremFn::FQSC, x, q, s, c, b.pol());
    Check ch = strict(pt(q, x, s, c), "control:f_above_zero_below_b", f, +1);
    if (!have || (ch.status == Status::Pass && best.status != Status::Pass) ||
        (ch.status == best.status && ch.value - ch.err > best.value - best.err)) {
      best = ch;
      have = true;
    }
  }
  if (have) {
    if (best.status == Status::Unresolved) best.status = Status::Fail;
    b.add(best);
  }
}

void taylor_probes_thm4(Builder& b, double q, double s) {
  const double bq = best_b(q, s), d = b.opt().taylor_delta;
  auto k = [&](double c) {
    return scalar_kernel(KernelKind::TaylorThm4, KernelArgs{.q = q, .s = s, .c = c});
  };
  b.add(at_most(pt(q, kNaN, s, bq), "taylor_at_b", std::fabs(k(bq)), b.opt().taylor_zero_limit));
  b.add(exact_sign(pt(q, kNaN, s, bq - d), "taylor_below_b", k(bq - d), -1));
  b.add(exact_sign(pt(q, kNaN, s, bq + d), "taylor_above_b", k(bq + d), +1));
}

void verify_thm4(Builder& b) {
  const auto qs = b.sub_q();
  for (double s : b.grid().s_values) {
    if (b.grid().c_values.empty()) {
      b.certificate(Family{FamilyId::FprimeQSC, 0.5, s, Shift::best_b()}, "FprimeQSC(c=b)");
    } else {
      for (double c : b.grid().c_values)
        b.certificate(Family{FamilyId::FprimeQSC, 0.5, s, Shift::fixed(c)},
                      "FprimeQSC(c=" + fmt(c) + ")");
    }
    for (double q : qs) {
      for (auto [c, tag] : upper_shifts(b, q, s)) {
        if (!(c > 0)) continue;
        Eval prev{};
        double prev_x = 0;
        bool first = true;
        auto xs = b.grid().x_values;
        std::sort(xs.begin(), xs.end());
        for (double x : xs) {
          const Eval nf = -fn_at(TheoremFn::FQSC, x, q, s, c, b.pol());
          b.add(strict(pt(q, x, s, c), "-f", nf));
          if (!first) {
            b.add(strict(pt(q, prev_x, s, c), "-f_decrease_to_next_x", prev - nf));
          }
          prev = nf;
          prev_x = x;
          first = false;
        }
        b.fd_cm(pt(q, kNaN, s, c), "-f(c=" + tag + ")", [&, c = c](double x) {
          return -fn_at(TheoremFn::FQSC, x, q, s, c, b.pol()).value;
        });
      }
      taylor_probes_thm4(b, q, s);
      below_threshold_control(b, q, s);
    }
  }
}

void verify_cor21(Builder& b) {
  for (double q : b.sub_q()) {
    const QParam qp(q);
    for (double s : b.grid().s_values) {
      for (auto [c, tag] : upper_shifts(b, q, s)) {
        if (!(c > 0)) continue;
        for (double x : b.grid().x_values) {
          const Eval sharp = weighted_gap(qp, x, s, 1.0, c, b.pol());
          b.add(strict(pt(q, x, s, c), "sharp_upper_gap", sharp, -1));
          const Eval im = weighted_gap(qp, x, s, 1.0, 0.5 * (1 + s), b.pol());
          b.add(strict(pt(q, x, s, c), "sharp_minus_midpoint_gap", sharp - im, +1));
        }
      }
      below_threshold_control(b, q, s);
    }
  }
}

void verify_thm3(Builder& b) {
  std::vector<double> cs = b.grid().c_values;
  if (cs.empty()) cs = {0.0};
  for (double c : cs) b.certificate(Family{FamilyId::GQC, 0.5, 0.5, Shift::fixed(c)}, "GQC(c=" + fmt(c) + ")");
  for (double q : b.sub_q()) {
    for (double c : cs) {
      for (double x : b.grid().x_values)
        b.add(strict(pt(q, x, kNaN, c), "g", fn_at(TheoremFn::GQC, x, q, 0.5, c, b.pol())));
      b.fd_cm(pt(q, kNaN, kNaN, c), "g(c=" + fmt(c) + ")",
              [&](double x) { return fn_at(TheoremFn::GQC, x, q, 0.5, c, b.pol()).value; });
    }
    // kernel h_q(t) <= 0 for t >= -ln q, zero at the endpoint
    const double t0 = -std::log(q);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 200; ++k)
      worst = std::max(worst, scalar_kernel(KernelKind::HQ, KernelArgs{.q = q, .t = t0 + 0.05 * k}));
    b.add(exact_sign(pt(q), "h_q_max_beyond_endpoint", worst, -1));
    b.add(at_most(pt(q), "h_q_at_endpoint",
                  std::fabs(scalar_kernel(KernelKind::HQ, KernelArgs{.q = q, .t = t0})),
                  b.opt().taylor_zero_limit));
    b.add(at_most(pt(q, kNaN, kNaN, 0.0), "taylor_at_c0",
                  std::fabs(scalar_kernel(KernelKind::TaylorThm3, KernelArgs{.q = q, .c = 0.0})),
                  b.opt().taylor_zero_limit));
    for (double c : {0.1, 0.5})
      b.add(exact_sign(pt(q, kNaN, kNaN, c), "taylor_positive_c",
                       scalar_kernel(KernelKind::TaylorThm3, KernelArgs{.q = q, .c = c}), +1));
    // positive c: g eventually increases
    Check best;
    bool have = false;
    for (double x : b.opt().large_x) {
      const Eval d = fn_at(TheoremFn::GQC, x + 1, q, 0.5, 0.1, b.pol()) -
                     fn_at(TheoremFn::GQC, x, q, 0.5, 0.1, b.pol());
      Check ch = strict(pt(q, x, kNaN, 0.1), "control:g_increase_c0.1", d, +1);
      if (!have || ch.value - ch.err > best.value - best.err) {
        best = ch;
        have = true;
      }
    }
    if (best.status == Status::Unresolved) best.status = Status::Fail;
    b.add(best);
  }
  // certificate for c = 0.1 must fail
  const auto qs = b.sub_q();
  if (!qs.empty()) {
    const CertificateReport neg =
        certify_signs(Family{FamilyId::GQC, 0.5, 0.5, Shift::fixed(0.1)}, b.opt().certificate_n, qs);
    b.add({pt(neg.first_violation_q, kNaN, kNaN, 0.1), "control:certificate_fails_GQC(c=0.1)",
           neg.min_margin, 0.0, -kSignSlack, Relation::Less,
           neg.pass ? Status::Fail : Status::Pass});
  }
}

void verify_thm2(Builder& b) {
  std::vector<double> cs = b.grid().c_values;
  if (cs.empty()) cs = {0.0, 1.0 / 3.0};
  for (double c : cs) {
    int sign;
    if (c == 0) {
      sign = +1;
    } else if (c >= 1.0 / 3.0) {
      sign = -1;
    } else {
      b.note("no claim for 0 < c < 1/3; c = " + fmt(c) + " skipped");
      continue;
    }
    const std::string tag = std::string(sign > 0 ? "" : "-") + "T2(c=" + fmt(c) + ")";
    b.certificate(Family{FamilyId::Thm2, 0.5, 0.5, Shift::fixed(c), sign < 0}, tag);
    for (double q : b.sub_q()) {
      for (double x : b.grid().x_values)
        b.add(strict(pt(q, x, kNaN, c), sign > 0 ? "T2" : "-T2",
                     fn_at(TheoremFn::T2, x, q, 0.5, c, b.pol()), sign));
      b.fd_cm(pt(q, kNaN, kNaN, c), tag,
              [&](double x) { return sign * fn_at(TheoremFn::T2, x, q, 0.5, c, b.pol()).value; });
    }
  }
}

void verify_pair(Builder& b, FamilyId fa, FamilyId fb, TheoremFn ta, TheoremFn tb) {
  b.certificate(Family{fa}, to_string(fa));
  b.certificate(Family{fb}, to_string(fb));
  for (double q : b.sub_q()) {
    for (TheoremFn fn : {ta, tb}) {
      for (double x : b.grid().x_values)
        b.add(strict(pt(q, x), to_string(fn), fn_at(fn, x, q, 0.5, 0.0, b.pol())));
      b.fd_cm(pt(q), to_string(fn),
              [&](double x) { return fn_at(fn, x, q, 0.5, 0.0, b.pol()).value; });
    }
  }
}

void verify_thm1(Builder& b) {
  verify_pair(b, FamilyId::Thm1A, FamilyId::Thm1B, TheoremFn::T1A, TheoremFn::T1B);
}

void verify_thm10(Builder& b) {
  verify_pair(b, FamilyId::Thm10A, FamilyId::Thm10B, TheoremFn::T10A, TheoremFn::T10B);
  for (double q : b.sub_q()) {
    const double u2 = series_coefficient(Family{FamilyId::Thm10A, q}, 2);
    const double u3 = series_coefficient(Family{FamilyId::Thm10A, q}, 3);
    b.add(at_most(pt(q), "u2_coefficient_magnitude", std::fabs(u2),
                  kZeroSnap * std::max(std::fabs(u3), std::numeric_limits<double>::min())));
  }
}

// lambda^2 q^{x+1/2} / ((1-q)(1-q^x)) and ln(1/q) q^x/(1-q^x)
Eval rhs32(double x, const QParam& qp) {
  const double lam = qp.log_q();
  return pow_over_one_minus(x, lam).scaled(lam * lam * std::sqrt(qp.value()) / (1 - qp.value()));
}
Eval rhs11(double x, const QParam& qp) {
  return pow_over_one_minus(x, qp.log_q()).scaled(-qp.log_q());
}

void verify_cor32(Builder& b) {
  for (double q : b.sub_q()) {
    const QParam qp(q);
    for (double x : b.grid().x_values) {
      const Eval p1 = psi_q_deriv(x + 1, qp, 1, b.pol());
      const Eval ph = psi_q_deriv(x + 0.5, qp, 1, b.pol());
      b.add(strict(pt(q, x), "1:psi1(x+1/2)-psi1(x+1)", ph - p1));
      b.add(nonstrict(pt(q, x), "2:rhs-psi1(x+1/2)", theorem_function(TheoremFn::T10B, x, {q}, b.pol())));
      b.add(strict(pt(q, x), "3:rhs11-rhs", rhs11(x, qp) - rhs32(x, qp)));
    }
  }
}

void verify_ineq11(Builder& b) {
  for (double q : b.sub_q()) {
    const QParam qp(q);
    for (double x : b.grid().x_values)
      b.add(strict(pt(q, x), "rhs11-psi1(x+1)", rhs11(x, qp) - psi_q_deriv(x + 1, qp, 1, b.pol())));
  }
}

void verify_ineq02(Builder& b) {
  for (double q : b.grid().q_values) {
    note_reduction(b, q);
    const QParam qp(q);
    for (double s : b.grid().s_values) {
      for (double x : b.grid().x_values) {
        b.add(strict(pt(q, x, s, 0.5 * (1 + s)), "upper_gap",
                     weighted_gap(qp, x, s, 1.0, 0.5 * (1 + s), b.pol()), -1));
        if (q == 1.0)
          b.add(strict(pt(q, x, s, std::sqrt(s)), "lower_gap_sqrt_s",
                       weighted_gap(qp, x, s, 1.0, std::sqrt(s), b.pol()), +1));
      }
    }
    if (q != 1.0) b.note("the sqrt(s) lower bound is asserted for q = 1 only");
  }
}

}  // namespace

TheoremReport verify_theorem(TheoremId id, const GridSpec& grid, const TruncationPolicy& pol,
                             const VerifyOptions& opt) {
  grid.validate();
  pol.validate();
  for (double q : grid.q_values) {
    const QParam qp(q);
    if (qp.branch() != Branch::Classical) detail::require_series_regime(qp);
  }
  Builder b(id, grid, pol, opt);
  switch (id) {
    case TheoremId::Thm4Prime: verify_thm4prime(b); break;
    case TheoremId::Cor20: verify_cor20(b); break;
    case TheoremId::Thm4: verify_thm4(b); break;
    case TheoremId::Cor21: verify_cor21(b); break;
    case TheoremId::Thm3: verify_thm3(b); break;
    case TheoremId::Thm2: verify_thm2(b); break;
    case TheoremId::Thm1: verify_thm1(b); break;
    case TheoremId::Thm10: verify_thm10(b); break;
    case TheoremId::Cor32: verify_cor32(b); break;
    case TheoremId::Ineq02: verify_ineq02(b); break;
    case TheoremId::Ineq11: verify_ineq11(b); break;
  }
  return b.finish();
}

}  // namespace qgamma
