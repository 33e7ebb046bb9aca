#include "qgamma/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qgamma/certificates.hpp"
#include "qgamma/core.hpp"
#include "qgamma/means.hpp"
#include "qgamma/report.hpp"
#include "qgamma/theorems.hpp"

namespace qgamma::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::optional<std::string> q, x, s, c, t;
  std::string fn = "psi";
  std::string theorem = "all";
  std::string family;
  long N = kDefaultCertificateN;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
  bool show_defaults = false;
};

std::vector<double> parse_list(const std::string& text, const char* name) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(pos, end - pos);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) {
      double d = 0;
      auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
      if (ec != std::errc() || p != item.data() + item.size() || !std::isfinite(d))
        throw DomainError(std::string("malformed number in --") + name + ": '" + item + "'");
      v.push_back(d);
    } else if (end < text.size()) {
      throw DomainError(std::string("empty entry in --") + name);
    }
    pos = end + 1;
  }
  if (v.empty()) throw DomainError(std::string("empty grid for --") + name);
  return v;
}

std::vector<double> list_or(const std::optional<std::string>& text, const char* name,
                            std::vector<double> fallback) {
  return text ? parse_list(*text, name) : std::move(fallback);
}

TruncationPolicy policy(const Options& o) {
  TruncationPolicy pol = TruncationPolicy::from_env();
  if (o.tol) {
    if (!(*o.tol > 0) || !std::isfinite(*o.tol)) throw DomainError("--tol must be > 0");
    pol.target_tol = *o.tol;
  }
  pol.validate();
  return pol;
}

std::string point_json(const Json& rows) {
  return (rows.size() == 1 ? rows.front() : rows).dump(2) + "\n";
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------------------

enum class CoreFn { LnGamma, Psi, Psi1, Psi2 };

std::optional<CoreFn> core_fn(const std::string& name) {
  static const std::map<std::string, CoreFn> m = {
      {"lngamma", CoreFn::LnGamma}, {"psi", CoreFn::Psi}, {"psi1", CoreFn::Psi1}, {"psi2", CoreFn::Psi2}};
  auto it = m.find(name);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

Eval eval_core(CoreFn fn, double x, double q, const TruncationPolicy& pol) {
  const QParam qp(q);
  switch (fn) {
    case CoreFn::LnGamma: return lngamma_q(x, qp, pol);
    case CoreFn::Psi: return psi_q(x, qp, pol);
    case CoreFn::Psi1: return psi_q_deriv(x, qp, 1, pol);
    case CoreFn::Psi2: return psi_q_deriv(x, qp, 2, pol);
  }
  return {};
}

int run_eval(const Options& o, std::string& text) {
  const auto fn = core_fn(o.fn);
  if (!fn) throw DomainError("--fn must be one of lngamma, psi, psi1, psi2");
  const auto qs = list_or(o.q, "q", {0.5});
  const auto xs = list_or(o.x, "x", {1.0});
  const Format fmt = format_from_string(o.format);
  const TruncationPolicy pol = policy(o);
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "fn,q,x,value,err\n";
  for (double q : qs)
    for (double x : xs) {
      const Eval e = eval_core(*fn, x, q, pol);
      rows.push_back(Json{{"fn", o.fn}, {"q", q}, {"x", x}, {"value", num(e.value)}, {"err", num(e.err)}});
      csv << o.fn << ',' << csv_num(q) << ',' << csv_num(x) << ',' << csv_num(e.value) << ','
          << csv_num(e.err) << '\n';
    }
  text = fmt == Format::Json ? point_json(rows) : csv.str();
  return kExitOk;
}

int run_sweep(const Options& o, std::string& text) {
  const auto core = core_fn(o.fn);
  std::optional<TheoremFn> thm;
  if (!core) thm = theorem_fn_from_string(o.fn);
  const auto qs = list_or(o.q, "q", {0.1, 0.3, 0.5, 0.7, 0.9});
  const auto xs = list_or(o.x, "x", GridSpec::defaults().x_values);
  const auto ss = thm ? list_or(o.s, "s", {0.5}) : std::vector<double>{NAN};
  // without --c, FQSC uses b(q,s) and the other functions c = 0
  const auto cs = thm && o.c ? parse_list(*o.c, "c") : std::vector<double>{NAN};
  const Format fmt = format_from_string(o.format);
  const TruncationPolicy pol = policy(o);
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "fn,q,x,s,c,value,err\n";
  for (double q : qs)
    for (double s : ss)
      for (double c0 : cs)
        for (double x : xs) {
          double c = c0;
          if (thm && std::isnan(c0)) c = *thm == TheoremFn::FQSC ? best_b(q, s) : 0.0;
          const Eval e = core ? eval_core(*core, x, q, pol) : theorem_function(*thm, x, {q, s, c}, pol);
          rows.push_back(Json{{"fn", o.fn}, {"q", q}, {"x", x}, {"s", num(s)}, {"c", num(c)},
                              {"value", num(e.value)}, {"err", num(e.err)}});
          csv << o.fn << ',' << csv_num(q) << ',' << csv_num(x) << ',' << csv_num(s) << ',' << csv_num(c)
              << ',' << csv_num(e.value) << ',' << csv_num(e.err) << '\n';
        }
  text = fmt == Format::Json ? rows.dump(2) + "\n" : csv.str();
  return kExitOk;
}

int run_constants(const Options& o, std::string& text) {
  const auto qs = list_or(o.q, "q", {0.5});
  const auto ss = list_or(o.s, "s", {0.5});
  const Format fmt = format_from_string(o.format);
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "q,s,b,a_mean,a_mean_err,aq\n";
  for (double q : qs)
    for (double s : ss) {
      if (!(s > 0 && s < 1)) throw DomainError("--s must lie in (0,1)");
      const SharpConstants k = sharp_constants(QParam(q), s);
      const double aq = k.aq ? *k.aq : NAN;
      rows.push_back(Json{{"q", q}, {"s", s}, {"b", num(k.b)}, {"a_mean", num(k.a_mean.value)},
                          {"a_mean_err", num(k.a_mean.err)}, {"aq", num(aq)}});
      csv << csv_num(q) << ',' << csv_num(s) << ',' << csv_num(k.b) << ',' << csv_num(k.a_mean.value) << ','
          << csv_num(k.a_mean.err) << ',' << csv_num(aq) << '\n';
    }
  text = fmt == Format::Json ? point_json(rows) : csv.str();
  return kExitOk;
}

int run_certify(const Options& o, std::string& text) {
  if (o.family.empty()) throw DomainError("--family is required");
  const FamilyId id = family_from_string(o.family);
  const auto qs = list_or(o.q, "q", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  const auto ss = list_or(o.s, "s", {0.5});
  const bool has_c = id == FamilyId::FprimeQSC || id == FamilyId::GQC || id == FamilyId::Thm2;
  std::vector<std::optional<double>> cs;
  if (o.c && has_c) {
    for (double c : parse_list(*o.c, "c")) cs.emplace_back(c);
  } else {
    cs.emplace_back(std::nullopt);
  }
  if (o.N < 2) throw DomainError("--N must be >= 2");
  const Format fmt = format_from_string(o.format);
  std::vector<CertificateReport> reports;
  bool pass = true;
  for (double s : id == FamilyId::FprimeQSC ? ss : std::vector<double>{0.5}) {
    for (const auto& c : cs) {
      Family fam{id, qs.front(), s};
      if (c) {
        fam.c = Shift::fixed(*c);
        fam.negated = id == FamilyId::Thm2 && *c >= 1.0 / 3.0;
      } else if (id == FamilyId::FprimeQSC) {
        fam.c = Shift::best_b();
      }
      fam.validate();
      reports.push_back(certify_signs(fam, o.N, qs));
      pass = pass && reports.back().pass;
    }
  }
  text = render(reports, fmt);
  return pass ? kExitOk : kExitFailure;
}

GridSpec verify_grid(const Options& o) {
  GridSpec g = GridSpec::defaults();
  if (o.q) g.q_values = parse_list(*o.q, "q");
  if (o.x) g.x_values = parse_list(*o.x, "x");
  if (o.s) g.s_values = parse_list(*o.s, "s");
  if (o.c) g.c_values = parse_list(*o.c, "c");
  if (o.t) g.t_values = parse_list(*o.t, "t");
  g.validate();
  return g;
}

int run_verify(const Options& o, std::string& text) {
  std::vector<TheoremId> ids;
  if (o.theorem == "all") {
    ids = all_theorems();
  } else {
    ids.push_back(theorem_from_string(o.theorem));
  }
  const GridSpec grid = verify_grid(o);
  const Format fmt = format_from_string(o.format);
  const TruncationPolicy pol = policy(o);
  for (double q : grid.q_values) {
    const QParam qp(q);
    if (qp.branch() != Branch::Classical) detail::require_series_regime(qp);
  }
  std::vector<TheoremReport> reports;
  bool pass = true;
  for (TheoremId id : ids) {
    reports.push_back(verify_theorem(id, grid, pol));
    pass = pass && reports.back().pass;
  }
  text = render(reports, fmt);
  return pass ? kExitOk : kExitFailure;
}

void grid_options(CLI::App* sub, Options& o, bool with_c, bool with_t) {
  sub->add_option("--q", o.q, "comma-separated q values");
  sub->add_option("--x", o.x, "comma-separated x values");
  sub->add_option("--s", o.s, "comma-separated s values in (0,1)");
  if (with_c) sub->add_option("--c", o.c, "comma-separated shifts c >= 0");
  if (with_t) sub->add_option("--t", o.t, "comma-separated upper endpoints t for the integral mean");
}

void output_options(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "series truncation tolerance (relative)");
  sub->add_option("--out", o.out, "write the report to this file instead of stdout");
  sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"q-gamma and q-digamma evaluation, sharp constants and monotonicity verification", "qgamma"};
  app.add_flag("--show-defaults", o.show_defaults, "print the default verification grid and exit");
  app.require_subcommand(0, 1);

  auto* eval = app.add_subcommand("eval", "evaluate ln Gamma_q, psi_q, psi_q' or psi_q''");
  eval->add_option("--fn", o.fn, "lngamma, psi, psi1 or psi2")
      ->check(CLI::IsMember({"lngamma", "psi", "psi1", "psi2"}));
  eval->add_option("--q", o.q, "comma-separated q values");
  eval->add_option("--x", o.x, "comma-separated x values");
  output_options(eval, o);

  auto* constants = app.add_subcommand("constants", "sharp shift constants b(q,s), a(q,s) and a_q");
  constants->add_option("--q", o.q, "comma-separated q values");
  constants->add_option("--s", o.s, "comma-separated s values in (0,1)");
  output_options(constants, o);

  auto* certify = app.add_subcommand("certify", "coefficient sign certificate for a family");
  certify->add_option("--family", o.family,
                      "PsiSeries, FprimeQSC, GQC, Thm2, Thm1A, Thm1B, Thm10A or Thm10B");
  grid_options(certify, o, true, false);
  certify->add_option("--N", o.N, "largest coefficient index");
  output_options(certify, o);

  auto* verify = app.add_subcommand("verify", "verify a theorem on a parameter grid");
  verify->add_option("--theorem", o.theorem,
                     "thm4p, cor20, thm4, cor21, thm3, thm2, thm1, thm10, cor32, ineq02, ineq11 or all");
  grid_options(verify, o, true, true);
  verify->add_flag("--show-defaults", o.show_defaults, "print the default grid and exit");
  output_options(verify, o);

  auto* sweep = app.add_subcommand("sweep", "tabulate a function over a grid");
  sweep->add_option("--fn", o.fn, "lngamma, psi, psi1, psi2, FQSC, GQC, T2, T1A, T1B, T10A or T10B");
  grid_options(sweep, o, true, false);
  output_options(sweep, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qgamma: " << e.what() << "\n";
    return kExitUsage;
  }

  if (o.show_defaults) {
    Format fmt = Format::Json;
    try {
      fmt = format_from_string(o.format);
    } catch (const DomainError& e) {
      err << "qgamma: " << e.what() << "\n";
      return kExitUsage;
    }
    out << render_defaults(GridSpec::defaults(), fmt);
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    err << "qgamma: a subcommand is required (eval, constants, certify, verify, sweep)\n";
    return kExitUsage;
  }

  std::unique_ptr<std::ofstream> file;
  if (!o.out.empty()) {
    file = std::make_unique<std::ofstream>(o.out, std::ios::binary | std::ios::trunc);
    if (!*file) {
      err << "qgamma: cannot write " << o.out << "\n";
      return kExitUsage;
    }
  }

  std::string text;
  int code = kExitOk;
  try {
    if (eval->parsed()) code = run_eval(o, text);
    else if (constants->parsed()) code = run_constants(o, text);
    else if (certify->parsed()) code = run_certify(o, text);
    else if (verify->parsed()) code = run_verify(o, text);
    else code = run_sweep(o, text);
  } catch (const DomainError& e) {
    err << "qgamma: " << e.what() << "\n";
    return kExitUsage;
  } catch (const RangeError& e) {
    err << "qgamma: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    err << "qgamma: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostream& sink = file ? static_cast<std::ostream&>(*file) : out;
  sink << text;
  sink.flush();
  if (!sink) {
    err << "qgamma: write failed\n";
    return kExitUsage;
  }
  return code;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace qgamma::cli
