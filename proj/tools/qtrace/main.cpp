#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "checks.hpp"
#include "qtrace/coeffs.hpp"
#include "qtrace/contour.hpp"
#include "qtrace/mcint.hpp"
#include "qtrace/polynomial.hpp"
#include "qtrace/qepver.hpp"
#include "qtrace/special.hpp"
#include "qtrace/symcalc.hpp"

#ifndef QTRACE_VERSION
#define QTRACE_VERSION "unknown"
#endif

using json = nlohmann::json;
using namespace qtrace;

namespace {

constexpr int kSchemaVersion = 1;

struct Global {
  std::uint64_t seed = 20240611;
  bool json_out = false;
  std::string out;
  double t = 1.0;
  double mu = 0.0;
};

struct Report {
  std::string command;
  json config = json::object();
  json results = json::object();
  std::vector<std::string> warnings;
  bool pass = true;
  std::string text;  // human-readable summary
};

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

MultiPoly read_poly(const std::string& text, int d) {
  if (!text.empty() && text.front() == '@') {
    MultiPoly p = load_polynomial(text.substr(1));
    if (d > 0 && p.dim() != d) throw std::invalid_argument("polynomial file has dimension " + std::to_string(p.dim()));
    return p;
  }
  return parse_polynomial(text, d);
}

std::vector<double> read_point(const std::string& text, int d) {
  std::vector<double> x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) x.push_back(std::stod(item));
  if (static_cast<int>(x.size()) != d)
    throw std::invalid_argument("--x needs " + std::to_string(d) + " comma-separated values");
  return x;
}

double mu_or_default(const Global& g, int d, const MultiPoly& p) { return g.mu > 0 ? g.mu : default_mu(d, p.degree()); }

json global_config(const Global& g) {
  return {{"seed", g.seed}, {"t", g.t}, {"mu", g.mu > 0 ? json(g.mu) : json("floor(d(m+1)/m)+1")}};
}

std::string fmt(double v, int prec = 8) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------

struct CoeffArgs {
  int j = 2;
  int d = 5;
  std::string poly;
  std::string route = "printed";
  std::string method = "mc";
  std::int64_t samples = 1'000'000;
  int replicates = 20;
  std::string cutoff = "auto";
  double tail_tol = 1e-6;
  int nodes = 16;
  int panels = 8;
  int order = 16;
};

coeffs::Integrator make_integrator(const CoeffArgs& a, const Global& g) {
  coeffs::Integrator in;
  if (a.method == "mc") {
    in.kind = coeffs::Integrator::Kind::monte_carlo;
  } else if (a.method == "mapped" || a.method == "quad") {
    in.kind = coeffs::Integrator::Kind::mapped;
  } else if (a.method == "tensor") {
    in.kind = coeffs::Integrator::Kind::tensor;
  } else {
    in.kind = coeffs::Integrator::Kind::radial;
  }
  in.mc.n_samples = a.samples;
  in.mc.n_replicates = a.replicates;
  in.mc.seed = g.seed;
  in.mc.tail_tol = a.tail_tol;
  in.mc.cutoff_radius = a.cutoff == "auto" ? 0.0 : std::stod(a.cutoff);
  in.cutoff_tol = a.tail_tol;
  in.nodes_per_axis = a.nodes;
  in.panels = a.panels;
  in.order = a.order;
  if (a.cutoff != "auto") in.half_width = in.mc.cutoff_radius;
  return in;
}

Report cmd_coeff(const CoeffArgs& a, const Global& g) {
  Report r;
  const MultiPoly p = read_poly(a.poly, a.d);
  const InversePowerF f(g.t, mu_or_default(g, a.d, p));
  coeffs::check_admissible(f, p);
  const auto in = make_integrator(a, g);
  r.config = global_config(g);
  r.config.update({{"j", a.j}, {"d", a.d}, {"P", p.to_string()}, {"mu_used", f.mu()}, {"route", a.route},
                   {"method", a.method}, {"samples", a.samples}, {"replicates", a.replicates},
                   {"cutoff", a.cutoff}, {"tail_tol", a.tail_tol}});
  if (a.method == "mc") r.config["events"] = "samples per replicate";

  auto single = [&](coeffs::Route route) {
    const auto c = coeffs::c_total(a.j, a.d, p, f, route, in);
    r.results[coeffs::to_string(route)] = coeffs::to_json(c);
    r.text += "C_" + std::to_string(2 * a.j) + " (" + coeffs::to_string(route) + ", " + coeffs::to_string(c.method) +
              ") = " + fmt(c.value) + (c.stderr_ > 0 ? " +- " + fmt(c.stderr_, 3) : "") + "\n";
    if (a.method == "mc" && c.stderr_ > 0.1 * std::abs(c.value))
      r.warnings.push_back(coeffs::to_string(route) + ": stderr above 10% of the value");
  };
  if (a.route == "both") {
    if (a.j == 2 && (a.d == 5 || a.d == 7)) {
      const auto rep = coeffs::dual_route(a.d, p, f, in);
      r.results["dual_route"] = coeffs::to_json(rep);
      r.text += "printed " + fmt(rep.printed_total) + ", printed b-form " + fmt(rep.printed_b_total) +
                ", pipeline " + fmt(rep.pipeline_total) + "\n";
      for (const auto& s : rep.differing) r.text += "  differs: " + s + "\n";
    } else {
      single(coeffs::Route::printed);
      single(coeffs::Route::pipeline);
    }
  } else if (a.route == "pipeline") {
    single(coeffs::Route::pipeline);
  } else if (a.route == "printed_b") {
    single(coeffs::Route::printed_b);
  } else {
    single(coeffs::Route::printed);
  }
  return r;
}

struct TablesArgs {
  std::int64_t samples = 1'000'000;
  int replicates = 20;
  std::vector<int> examples{1, 2, 3};
  std::string csv;
};

Report cmd_tables(const TablesArgs& a, const Global& g) {
  Report r;
  checks::TableOptions o;
  o.seed = g.seed;
  o.t = g.t;
  o.mu = g.mu;
  o.samples = a.samples;
  o.replicates = a.replicates;
  o.examples = a.examples;
  if (g.mu > 0)
    for (const auto& e : checks::appendix_tables())
      if (std::find(a.examples.begin(), a.examples.end(), e.example) != a.examples.end())
        coeffs::check_admissible(InversePowerF(g.t, g.mu), e.poly);
  r.config = global_config(g);
  r.config.update({{"samples", a.samples}, {"replicates", a.replicates}, {"events", "samples per replicate"},
                   {"examples", a.examples}, {"route", "printed"}, {"method", "monte_carlo"}, {"cutoff", "auto"}});
  const auto rows = checks::compute_tables(o);
  const auto v = checks::judge_tables(rows);
  for (const auto& row : rows) {
    r.results["rows"].push_back(checks::to_json(row));
    r.text += "Example." + std::to_string(row.entry.example) + " " + json(row.entry.params).dump() + ": " +
              fmt(row.value, 6) + " +- " + fmt(row.stderr_, 2) + "  paper " + fmt(row.entry.paper, 6) + "  ratio " +
              fmt(row.ratio, 4) + " vs " + fmt(row.paper_ratio, 4) + "\n";
  }
  r.results["verdict"] = {{"positive", v.positive}, {"monotone", v.monotone}, {"ratios_within_25pct", v.ratios},
                          {"worst_ratio_error", v.worst_ratio_error}, {"notes", v.notes}};
  r.warnings.push_back("absolute values depend on the unstated test function; compare ratios");
  r.pass = v.positive && v.monotone && v.ratios;
  if (!a.csv.empty()) {
    std::ofstream os(a.csv);
    if (!os) throw std::runtime_error("cannot write " + a.csv);
    os << checks::tables_csv(rows);
  }
  return r;
}

struct VerifyArgs {
  std::vector<int> only;
  bool all = false;
  std::int64_t table_samples = 1'000'000;
  int table_replicates = 20;
};

Report cmd_verify(const VerifyArgs& a, const Global& g) {
  Report r;
  std::vector<int> ids = a.only;
  if (ids.empty()) {
    const int last = a.all ? checks::kCheckCount : 8;
    for (int i = 1; i <= last; ++i) ids.push_back(i);
  }
  if (g.mu > 0) {
    const InversePowerF f(g.t, g.mu);
    for (int id : ids) {
      if (id == 9)
        for (const auto& e : checks::appendix_tables()) coeffs::check_admissible(f, e.poly);
      if (id == 10) coeffs::check_admissible(f, MultiPoly::power_sum(7, 4));
      if (id == 11) coeffs::check_admissible(f, MultiPoly::power_sum(9, 4));
    }
  }
  checks::Options o;
  o.seed = g.seed;
  o.t = g.t;
  o.mu = g.mu;
  o.table_samples = a.table_samples;
  o.table_replicates = a.table_replicates;
  r.config = global_config(g);
  r.config.update({{"checks", ids}, {"table_samples", a.table_samples}, {"table_replicates", a.table_replicates}});
  r.results["checks"] = json::array();
  for (int id : ids) {
    const auto c = checks::run_check(id, o);
    r.results["checks"].push_back(checks::to_json(c));
    r.pass = r.pass && c.pass && c.evaluated;
    r.text += std::string(c.pass ? "PASS" : "FAIL") + " " + std::to_string(c.id) + " " + c.name + ": " + c.summary +
              "\n";
  }
  return r;
}

struct SymbolsArgs {
  int j = 2;
  int d = 0;
  std::string conv = "printed";
  std::string poly;
  std::string x;
  bool print = false;
  bool check_lemma = false;
  int jmax = 4;
};

Report cmd_lemma(const SymbolsArgs& a, const Global& g) {
  Report r;
  const auto conv = a.conv == "weyl" ? symcalc::Convention::weyl : symcalc::Convention::printed;
  r.config = global_config(g);
  r.config.update({{"jmax", a.jmax}, {"convention", a.conv}});
  const auto rep = symcalc::check_structure(a.jmax, conv);
  json lemma = json::array();
  for (const auto& c : rep.lemma) {
    lemma.push_back({{"j", c.j},
                     {"k", c.k},
                     {"valuation", c.valuation == symcalc::kInfiniteValuation ? json("inf") : json(c.valuation)},
                     {"required", c.required},
                     {"pass", c.pass}});
    r.text += std::string(c.pass ? "PASS" : "FAIL") + " j=" + std::to_string(c.j) + " k=" + std::to_string(c.k) +
              " val=" + (c.valuation == symcalc::kInfiniteValuation ? "inf" : std::to_string(c.valuation)) +
              " required=" + std::to_string(c.required) + "\n";
  }
  r.results["lemma"] = lemma;
  r.results["lemma_ok"] = rep.lemma_ok();
  r.results["index_range_ok"] = rep.index_range_ok;
  r.results["degree_bound_ok"] = rep.degree_bound_ok;
  r.results["max_degree_excess"] = rep.max_degree_excess;
  r.results["degree_violations"] = rep.degree_violations;
  r.results["term_counts"] = rep.term_counts;
  r.text += std::string("lemma ") + (rep.lemma_ok() ? "holds" : "fails") + "; index range " +
            (rep.index_range_ok ? "ok" : "violated") + "; degree bound " +
            (rep.degree_bound_ok ? "ok" : "violated (max nu+|xi|-k = " + std::to_string(rep.max_degree_excess) + ")") +
            "\n";
  r.pass = rep.lemma_ok();
  return r;
}

Report cmd_symbols(const SymbolsArgs& a, const Global& g) {
  Report r;
  const auto conv = a.conv == "weyl" ? symcalc::Convention::weyl : symcalc::Convention::printed;
  r.config = global_config(g);
  r.config.update({{"j", a.j}, {"d", a.d}, {"convention", a.conv}});
  if (!a.poly.empty() && a.d < 1) throw std::invalid_argument("--poly needs --d");
  std::optional<MultiPoly> p;
  if (!a.poly.empty()) {
    p = read_poly(a.poly, a.d);
    coeffs::check_admissible(InversePowerF(g.t, mu_or_default(g, a.d, *p)), *p);
  }
  const auto ks = symcalc::generic_parametrix(a.j, conv);
  for (int j = 0; j <= a.j; ++j) {
    json sym;
    sym["j"] = j;
    sym["terms"] = ks[j].size();
    for (const auto& [k, q] : symcalc::q_decomposition(ks[j])) {
      const int val = symcalc::valuation(q);
      json lines = json::array();
      for (const auto& t : q.terms()) lines.push_back(t.coef.str() + " " + symcalc::describe(t));
      sym["groups"].push_back({{"k", k}, {"terms", q.size()}, {"valuation", val}, {"text", lines}});
      if (a.print && j == a.j) {
        r.text += "Q_" + std::to_string(k) + "^" + std::to_string(2 * j) + " (denominator L^" + std::to_string(k + 1) +
                  ", valuation " + std::to_string(val) + ")\n";
        for (const auto& line : lines) r.text += "  " + line.get<std::string>() + "\n";
      }
    }
    if (a.d > 0) {
      const auto& td = coeffs::trace_density(j, a.d, conv);
      sym["trace_terms"] = td.terms().size();
    }
    r.results["symbols"].push_back(sym);
    r.text += "K_" + std::to_string(2 * j) + ": " + std::to_string(ks[j].size()) + " terms\n";
  }
  if (p) {
    const InversePowerF f(g.t, mu_or_default(g, a.d, *p));
    r.config.update({{"P", p->to_string()}, {"mu_used", f.mu()}});
    const std::vector<double> x = a.x.empty() ? std::vector<double>(a.d, 0.3) : read_point(a.x, a.d);
    r.config["x"] = x;
    json diff;
    diff["pipeline"] = coeffs::to_json(coeffs::density_from_symbols(2, a.d, *p, f, x));
    if (a.d == 5 || a.d == 7) {
      diff["printed"] = coeffs::to_json(coeffs::c4_density_printed(a.d, *p, f, x, coeffs::PrintedForm::pi_form));
      diff["printed_b"] = coeffs::to_json(coeffs::c4_density_printed(a.d, *p, f, x, coeffs::PrintedForm::b_form));
      const auto pi = coeffs::printed_coefficients(a.d, coeffs::PrintedForm::pi_form);
      const auto b = coeffs::printed_coefficients(a.d, coeffs::PrintedForm::b_form);
      for (const auto& [name, v] : pi) {
        const double w = b.count(name) ? b.at(name) : 0.0;
        diff["coefficients"].push_back({{"term", name}, {"pi_form", v}, {"b_form", w},
                                        {"rel_diff", std::abs(v - w) / std::max(std::abs(v), 1e-300)}});
      }
      r.text += "C_4 density at x: printed " + fmt(diff["printed"]["value"].get<double>()) + ", pipeline " +
                fmt(diff["pipeline"]["value"].get<double>()) + "\n";
    } else {
      r.warnings.push_back("printed C_4 formulas exist only for d = 5 and d = 7");
    }
    r.results["density_diff"] = diff;
  }
  return r;
}

struct QepArgs {
  int trace_check = 0;
  std::vector<double> lmg;
  std::string poly;
  double X = 6.0;
  int n = 200;
  int levels = 3;
  int count = 16;
};

Report cmd_qep(const QepArgs& a, const Global& g) {
  Report r;
  r.config = global_config(g);
  r.config.update({{"X", a.X}, {"n", a.n}, {"levels", a.levels}, {"count", a.count}});
  if (a.trace_check > 0) {
    checks::Options o;
    o.seed = g.seed;
    const auto c = checks::check_trace_identity(o);
    r.results["trace_check"] = checks::to_json(c);
    r.pass = r.pass && c.pass;
    r.text += c.summary + "\n";
  }
  auto study = [&](const std::string& label, const qepver::PencilBuilder& b) {
    const auto s = qepver::refinement_study(b, a.X, a.n, a.levels, a.count);
    json j = qepver::to_json(s);
    const auto conv = s.converged();
    j["violations"] = json::array();
    for (const auto& v : qepver::location_check(conv))
      j["violations"].push_back({{"value", {v.value.real(), v.value.imag()}}, {"reason", v.reason}});
    if (conv.empty()) {
      j["message"] = "no convergent eigenvalue found";
    } else {
      double lo = 1e300, hi = 0.0;
      for (const auto& z : conv) {
        lo = std::min(lo, std::abs(z));
        hi = std::max(hi, std::abs(z));
      }
      std::vector<double> radii;
      for (int i = 0; i < 8; ++i) radii.push_back(0.5 * lo * std::pow(4.0 * hi / lo, i / 7.0));
      const auto prof = qepver::counting_profile(conv, radii);
      j["counting"] = qepver::to_json(prof);
      if (prof.saturated) r.warnings.push_back(label + ": counting saturates at the largest radius (discretisation)");
    }
    r.results[label] = j;
    r.text += label + ": " + std::to_string(conv.size()) + " converged\n";
    for (const auto& z : conv) r.text += "  " + fmt(z.real()) + " " + (z.imag() < 0 ? "- " : "+ ") + fmt(std::abs(z.imag())) + "i\n";
  };
  if (a.lmg.size() == 2) {
    const int m = static_cast<int>(a.lmg[0]);
    const double gg = a.lmg[1];
    study("lmg", [=](double X, int n) { return qepver::discretize_lmg(m, gg, X, n); });
  }
  if (!a.poly.empty()) {
    const MultiPoly p = read_poly(a.poly, 1);
    study("poly", [=](double X, int n) { return qepver::discretize_1d(p, X, n); });
  }
  if (a.trace_check == 0 && a.lmg.empty() && a.poly.empty())
    throw std::invalid_argument("qep needs --trace-check, --lmg or --poly");
  return r;
}

struct BcoefArgs {
  int d = 5;
  int j = 0;
  int k = 0;
  int l = 0;
};

Report cmd_bcoef(const BcoefArgs& ba, const Global& g) {
  Report r;
  const int d = ba.d;
  r.config = global_config(g);
  r.config["d"] = d;
  if (ba.j > 0) {
    r.config.update({{"j", ba.j}, {"k", ba.k}, {"l", ba.l}});
    const double v = special::b_general(ba.j, ba.k, ba.l, d);
    const auto [q, err] = special::b_general_quadrature(ba.j, ba.k, ba.l, d);
    const double res = std::abs(v - q) / std::abs(v);
    r.results = {{"value", v}, {"quadrature", q}, {"quad_error", err}, {"residual", res}};
    r.pass = res < 1e-10;
    r.text = "b_{" + std::to_string(ba.j) + "," + std::to_string(ba.k) + "," + std::to_string(ba.l) + "}(" +
             std::to_string(d) + ") = " + fmt(v, 17) + "  quadrature residual " + fmt(res, 3) + "\n";
    return r;
  }
  const std::tuple<const char*, int, int, int, int> fams[] = {
      {"b_j", 0, 0, 4, 7}, {"b_j,1", 1, 0, 5, 7}, {"b_j,2", 2, 0, 6, 7}, {"b_j,1,1", 1, 1, 6, 7}};
  for (const auto& [name, k, l, lo, hi] : fams)
    for (int j = lo; j <= hi; ++j) {
      const double v = special::b_general(j, k, l, d);
      const auto [q, err] = special::b_general_quadrature(j, k, l, d);
      r.results["b"].push_back({{"name", name}, {"j", j}, {"value", v}, {"quadrature", q}, {"quad_error", err},
                                {"method", "closed_form"}});
      r.text += std::string(name) + "(" + std::to_string(j) + ") = " + fmt(v, 15) + "\n";
    }
  if (d == 5 || d == 7) {
    const auto a = special::a_coeffs(d);
    r.results["a"] = {{"a1", a.a1}, {"a2", a.a2}, {"a1_printed_combination", a.a1_combo},
                      {"discrepancy", a.discrepancy}};
    r.results["b_oneone_printed"] = {special::b_oneone_printed(6, d), special::b_oneone_printed(7, d)};
  }
  return r;
}

Report cmd_residue(const Global& g) {
  Report r;
  r.config = global_config(g);
  const auto c = checks::check_residues({});
  r.results = checks::to_json(c);
  r.pass = c.pass;
  r.text = c.summary + "\n";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtrace: trace coefficients of quadratic pencils"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value config file; flags win");
  Global g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_flag("--json", g.json_out, "print the JSON report");
  app.add_option("--out", g.out, "write the JSON report to a file");
  app.add_option("--t", g.t, "shift t in f(s) = (s+t)^-mu")->capture_default_str();
  app.add_option("--mu", g.mu, "exponent mu (default floor(d(m+1)/m)+1)");

  CoeffArgs ca;
  auto* coeff = app.add_subcommand("coeff", "coefficient C_2j");
  coeff->add_option("--j", ca.j)->capture_default_str();
  coeff->add_option("--d", ca.d)->capture_default_str();
  coeff->add_option("--poly", ca.poly, "polynomial text or @file")->required();
  coeff->add_option("--route", ca.route)->check(CLI::IsMember({"printed", "printed_b", "pipeline", "both"}))
      ->capture_default_str();
  coeff->add_option("--method", ca.method)->check(CLI::IsMember({"mc", "quad", "mapped", "radial", "tensor"}))
      ->capture_default_str();
  coeff->add_option("--samples", ca.samples)->capture_default_str();
  coeff->add_option("--replicates", ca.replicates)->capture_default_str();
  coeff->add_option("--cutoff", ca.cutoff, "auto or a radius")->capture_default_str();
  coeff->add_option("--tail-tol", ca.tail_tol)->capture_default_str();
  coeff->add_option("--nodes", ca.nodes, "tensor nodes per axis")->capture_default_str();
  coeff->add_option("--panels", ca.panels, "mapped panels")->capture_default_str();
  coeff->add_option("--order", ca.order, "mapped nodes per panel")->capture_default_str();

  TablesArgs ta;
  auto* tables = app.add_subcommand("tables", "appendix tables");
  tables->add_option("--samples", ta.samples)->capture_default_str();
  tables->add_option("--replicates", ta.replicates)->capture_default_str();
  tables->add_option("--example", ta.examples)->check(CLI::Range(1, 3));
  tables->add_option("--csv", ta.csv, "also write CSV");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "property and oracle suite");
  verify->add_option("--only", va.only, "check ids")->delimiter(',')->check(CLI::Range(1, checks::kCheckCount));
  verify->add_flag("--all", va.all, "include the tables, dual route and probe");
  verify->add_option("--table-samples", va.table_samples)->capture_default_str();
  verify->add_option("--table-replicates", va.table_replicates)->capture_default_str();

  SymbolsArgs sa;
  auto* symbols = app.add_subcommand("symbols", "parametrix symbols and route diffs");
  symbols->add_option("--j", sa.j)->check(CLI::Range(0, 4))->capture_default_str();
  symbols->add_option("--d", sa.d, "dimension for trace terms and diffs");
  symbols->add_option("--conv", sa.conv)->check(CLI::IsMember({"printed", "weyl"}))->capture_default_str();
  symbols->add_option("--poly", sa.poly, "polynomial for the density diff");
  symbols->add_option("--x", sa.x, "point, comma separated");
  symbols->add_flag("--print", sa.print, "print the Q_k decomposition of K_2j");
  symbols->add_flag("--check-lemma", sa.check_lemma, "valuation lemma and structure report");
  symbols->add_option("--jmax", sa.jmax, "largest order for --check-lemma")->check(CLI::Range(1, 4))->capture_default_str();

  QepArgs qa;
  auto* qep = app.add_subcommand("qep", "quadratic eigenvalue checks");
  qep->add_flag("--trace-check", qa.trace_check, "trace identity on random pencils");
  qep->add_option("--lmg", qa.lmg, "m g")->expected(2);
  qep->add_option("--poly", qa.poly, "1-D polynomial P");
  qep->add_option("--X", qa.X)->capture_default_str();
  qep->add_option("--n", qa.n)->capture_default_str();
  qep->add_option("--levels", qa.levels)->capture_default_str();
  qep->add_option("--count", qa.count)->capture_default_str();

  BcoefArgs ba;
  auto* bcoef = app.add_subcommand("bcoef", "b_{j,k,l}(d) values");
  bcoef->add_option("--d", ba.d)->capture_default_str();
  bcoef->add_option("--j", ba.j, "single value instead of the table");
  bcoef->add_option("--k", ba.k)->capture_default_str();
  bcoef->add_option("--l", ba.l)->capture_default_str();

  auto* residue = app.add_subcommand("residue-check", "closed form J against contour quadrature");

  CLI11_PARSE(app, argc, argv);

  std::string cmdline = "qtrace";
  for (int i = 1; i < argc; ++i) cmdline += " " + std::string(argv[i]);

  Report r;
  try {
    if (coeff->parsed()) r = cmd_coeff(ca, g);
    else if (tables->parsed()) r = cmd_tables(ta, g);
    else if (verify->parsed()) r = cmd_verify(va, g);
    else if (symbols->parsed()) r = sa.check_lemma ? cmd_lemma(sa, g) : cmd_symbols(sa, g);
    else if (qep->parsed()) r = cmd_qep(qa, g);
    else if (bcoef->parsed()) r = cmd_bcoef(ba, g);
    else if (residue->parsed()) r = cmd_residue(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  json out{{"schema_version", kSchemaVersion},
           {"command", cmdline},
           {"config", r.config},
           {"results", r.results},
           {"warnings", r.warnings},
           {"pass", r.pass},
           {"provenance", {{"version", QTRACE_VERSION}, {"timestamp", timestamp()}}}};
  if (!g.out.empty()) {
    std::ofstream os(g.out);
    if (!os) {
      std::cerr << "error: cannot write " << g.out << "\n";
      return 3;
    }
    os << out.dump(2) << "\n";
  }
  if (g.json_out) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << r.text;
    for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
  }
  return r.pass ? 0 : 1;
}
