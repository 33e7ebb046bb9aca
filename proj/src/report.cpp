#include "qgamma/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace qgamma {

namespace {

using Json = nlohmann::ordered_json;

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json list(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json point(double q, double x, double s, double c) {
  return Json{{"q", num(q)}, {"x", num(x)}, {"s", num(s)}, {"c", num(c)}};
}

Json grid_json(const GridSpec& g) {
  Json j{{"q", list(g.q_values)}, {"x", list(g.x_values)}, {"s", list(g.s_values)}};
  j["c"] = g.c_values.empty() ? Json("statement") : list(g.c_values);
  j["t"] = list(g.t_values);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct Row {
  std::string id;
  double q, x, s, c;
  std::string quantity;
  double value, threshold;
  std::string pass;
};

void csv_row(std::ostringstream& os, const Row& r) {
  os << csv_text(r.id) << ',' << csv_num(r.q) << ',' << csv_num(r.x) << ',' << csv_num(r.s) << ','
     << csv_num(r.c) << ',' << csv_text(r.quantity) << ',' << csv_num(r.value) << ','
     << csv_num(r.threshold) << ',' << r.pass << '\n';
}

const char* verdict(bool pass) { return pass ? "pass" : "fail"; }

Json check_json(const Point& p, const std::string& quantity, double value, double err, double threshold,
                const std::string& relation, const std::string& status) {
  Json j;
  j["point"] = point(p.q, p.x, p.s, p.c);
  j["quantity"] = quantity;
  j["value"] = num(value);
  j["err"] = num(err);
  j["threshold"] = num(threshold);
  j["relation"] = relation;
  j["pass"] = status == "pass";
  j["status"] = status;
  return j;
}

std::string certificate_id(const CertificateReport& r) { return "certificate:" + describe(r.family); }

Json certificate_json(const CertificateReport& r) {
  const bool uses_s = r.family.id == FamilyId::FprimeQSC;
  const double c = r.family.c.sharp_upper ? r.family.c.resolve(r.witness_q, r.family.s) : r.family.c.value;
  Json j;
  j["id"] = certificate_id(r);
  j["grid"] = Json{{"q", list(r.q_grid)}, {"n", Json::array({r.n_min, r.n_max})}};
  j["checks"] = Json::array({check_json({r.witness_q, NAN, uses_s ? r.family.s : NAN, c}, "min_margin",
                                        r.min_margin, 0.0, -kSignSlack, ">=", verdict(r.pass))});
  j["witness"] = Json{{"n", r.witness_n}, {"q", num(r.witness_q)}};
  j["first_violation"] = r.first_violation_n > 0
                             ? Json{{"n", r.first_violation_n}, {"q", num(r.first_violation_q)}}
                             : Json(nullptr);
  j["verdict"] = verdict(r.pass);
  return j;
}

Json theorem_json(const TheoremReport& r) {
  Json j;
  j["id"] = to_string(r.id);
  j["grid"] = grid_json(r.grid);
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(check_json(c.point, c.quantity, c.value, c.err, c.threshold, to_string(c.relation),
                                to_string(c.status)));
  j["checks"] = std::move(checks);
  Json certs = Json::array();
  for (const auto& c : r.certificates) certs.push_back(certificate_json(c));
  j["certificates"] = std::move(certs);
  j["notes"] = r.notes;
  j["summary"] = Json{{"checks", r.checks.size()},
                      {"passed", r.count(Status::Pass)},
                      {"failed", r.count(Status::Fail)},
                      {"unresolved", r.count(Status::Unresolved)}};
  j["verdict"] = verdict(r.pass);
  return j;
}

Json cm_json(const CMReport& r) {
  Json j;
  j["id"] = "fd_cm:" + r.id;
  j["grid"] = Json{{"x", list(r.x_grid)}, {"h", num(r.h)}, {"K", r.K}};
  j["checks"] = Json::array({check_json({NAN, r.witness_x, NAN, NAN},
                                        "worst_difference(k=" + std::to_string(r.witness_k) + ")", r.worst,
                                        0.0, -r.cm_tol, ">=", verdict(r.pass))});
  j["verdict"] = verdict(r.pass);
  return j;
}

template <class R, class F>
std::string render_json(const std::vector<R>& reports, F to_json) {
  if (reports.size() == 1) return dump(to_json(reports.front()));
  Json a = Json::array();
  for (const auto& r : reports) a.push_back(to_json(r));
  return dump(a);
}

}  // namespace

Format format_from_string(const std::string& name) {
  std::string n = name;
  for (auto& ch : n) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (n == "json") return Format::Json;
  if (n == "csv") return Format::Csv;
  throw DomainError("format must be json or csv: " + name);
}

std::string render(const std::vector<TheoremReport>& reports, Format fmt) {
  if (fmt == Format::Json) return render_json(reports, theorem_json);
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : reports)
    for (const auto& c : r.checks)
      csv_row(os, {to_string(r.id), c.point.q, c.point.x, c.point.s, c.point.c, c.quantity, c.value,
                   c.threshold, to_string(c.status)});
  return os.str();
}

std::string render(const std::vector<CertificateReport>& reports, Format fmt) {
  if (fmt == Format::Json) return render_json(reports, certificate_json);
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : reports) {
    const bool uses_s = r.family.id == FamilyId::FprimeQSC;
    const double c = r.family.c.sharp_upper ? r.family.c.resolve(r.witness_q, r.family.s) : r.family.c.value;
    csv_row(os, {certificate_id(r), r.witness_q, NAN, uses_s ? r.family.s : NAN, c, "min_margin", r.min_margin,
                 -kSignSlack, verdict(r.pass)});
  }
  return os.str();
}

std::string render(const std::vector<CMReport>& reports, Format fmt) {
  if (fmt == Format::Json) return render_json(reports, cm_json);
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : reports)
    csv_row(os, {"fd_cm:" + r.id, NAN, r.witness_x, NAN, NAN,
                 "worst_difference(k=" + std::to_string(r.witness_k) + ")", r.worst, -r.cm_tol,
                 verdict(r.pass)});
  return os.str();
}

std::string render_defaults(const GridSpec& grid, Format fmt) {
  if (fmt == Format::Json) return dump(grid_json(grid));
  std::ostringstream os;
  os << "name,values\n";
  auto line = [&](const char* name, const std::vector<double>& v) {
    os << name << ",\"";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << csv_num(v[i]);
    os << "\"\n";
  };
  line("q", grid.q_values);
  line("x", grid.x_values);
  line("s", grid.s_values);
  if (grid.c_values.empty()) {
    os << "c,statement\n";
  } else {
    line("c", grid.c_values);
  }
  line("t", grid.t_values);
  return os.str();
}

}  // namespace qgamma
