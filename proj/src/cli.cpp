#include "heightkit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "heightkit/arch.hpp"
#include "heightkit/equidist.hpp"
#include "heightkit/errors.hpp"
#include "heightkit/heights.hpp"
#include "heightkit/padic.hpp"
#include "heightkit/parallel.hpp"
#include "heightkit/parse.hpp"

namespace heightkit {
namespace {

using json = nlohmann::ordered_json;

json number(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json local_value(const LocalValue& v) {
  return {{"p", v.p}, {"coefficient_of_log_p", to_string(v.coefficient_of_log_p)}, {"value", number(v.to_double())}};
}

json envelope(const std::string& command, json inputs, json results, const std::vector<std::string>& warnings) {
  json out;
  out["command"] = command;
  out["inputs"] = std::move(inputs);
  out["results"] = std::move(results);
  out["warnings"] = warnings;
  out["version"] = kVersion;
  return out;
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Polynomial text with its variable list, either given or detected.
struct PolyInput {
  std::string text;
  std::vector<std::string> vars;

  bool univariate() const { return vars.size() <= 1; }
  std::string var() const { return vars.empty() ? "T" : vars.front(); }
  IntPoly as_univariate() const { return parse_univariate(text, var()); }
  MultiPoly as_multi() const { return parse_poly(text, vars); }
  json echo() const { return {{"poly", text}, {"vars", vars}}; }
};

PolyInput read_poly(const std::string& text, const std::string& vars_flag) {
  PolyInput in{text, {}};
  if (vars_flag.empty()) {
    in.vars = detect_variables(text);
  } else {
    std::size_t start = 0;
    while (start <= vars_flag.size()) {
      std::size_t end = vars_flag.find(',', start);
      if (end == std::string::npos) end = vars_flag.size();
      if (end > start) in.vars.push_back(vars_flag.substr(start, end - start));
      start = end + 1;
    }
  }
  return in;
}

json height_breakdown(const HeightBreakdown& h) {
  json finite = json::array();
  for (const auto& v : h.finite) finite.push_back(local_value(v));
  return {{"degree", h.degree},
          {"total", number(h.total)},
          {"arch", number(h.arch)},
          {"arch_error", number(h.arch_error)},
          {"finite", finite},
          {"places_possibly_incomplete", h.places_possibly_incomplete}};
}

json cmd_mahler(const PolyInput& in, std::optional<std::size_t> grid) {
  json results;
  std::vector<std::string> warnings;
  if (in.univariate()) {
    const IntPoly p = in.as_univariate();
    const ArchValue m = mahler_univariate(p);
    results["method"] = "roots";
    results["degree"] = p.degree();
    results["log_mahler"] = number(m.value);
    results["error"] = number(m.error);
    if (grid) {
      if (p.is_zero()) throw DomainError("Mahler measure of the zero polynomial");
      const QuadratureResult q = mahler_quadrature(p, *grid);
      results["quadrature"] = {{"grid", *grid},
                               {"estimate", number(q.estimate)},
                               {"error_estimate", number(q.error_estimate)},
                               {"nodes_dropped", q.nodes_dropped}};
    }
  } else {
    MultiPoly f = in.as_multi();
    if (f.is_zero()) throw DomainError("Mahler measure of the zero polynomial");
    if (!f.is_homogeneous()) {
      warnings.push_back("input is not homogeneous; integrating its homogenization over the torus");
      f = homogenize(f, f.total_degree());
    }
    const std::size_t n = grid.value_or(256);
    const QuadratureResult q = mahler_quadrature(f, n);
    if (q.nodes_dropped > 0) warnings.push_back(std::to_string(q.nodes_dropped) + " nodes dropped on the zero set");
    results["method"] = "quadrature";
    results["degree"] = f.total_degree();
    results["log_mahler"] = number(q.estimate);
    results["error_estimate"] = number(q.error_estimate);
    results["grid"] = n;
    results["nodes_dropped"] = q.nodes_dropped;
  }
  json inputs = in.echo();
  inputs["grid"] = grid ? json(*grid) : json(nullptr);
  return envelope("mahler", inputs, results, warnings);
}

json cmd_height(const PolyInput& in, std::optional<std::size_t> grid) {
  HeightBreakdown h;
  if (in.univariate()) {
    h = weil_height(in.as_univariate());
  } else {
    MultiPoly f = in.as_multi();
    if (!f.is_zero() && !f.is_homogeneous()) throw DomainError("hypersurface height needs a homogeneous polynomial");
    h = hypersurface_height(f, grid.value_or(256));
  }
  json inputs = in.echo();
  inputs["grid"] = grid ? json(*grid) : json(nullptr);
  return envelope("height", inputs, height_breakdown(h), h.warnings);
}

json cmd_canonical_height(const PolyInput& in, const std::string& c_text, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const QuadraticMap f{parse_rational(c_text)};
  const CanonicalHeight h = canonical_height(f, in.as_univariate(), {tol, EscapeConfig{}.max_iterations});
  json finite = json::array();
  for (const auto& v : h.finite) finite.push_back(local_value(v));
  json results = {{"value", number(h.value)},   {"error", number(h.error)}, {"degree", h.degree},
                  {"arch", number(h.arch)},     {"finite", finite},         {"preperiodic", h.preperiodic}};
  json inputs = in.echo();
  inputs["c"] = to_string(f.c);
  inputs["tolerance"] = tol;
  return envelope("canonical-height", inputs, results, h.warnings);
}

json cmd_newton_polygon(const PolyInput& in, std::uint64_t p_value) {
  const Prime p = Prime::checked(p_value);
  const NewtonPolygon np = newton_polygon(in.as_univariate(), p);
  json points = json::array();
  for (const auto& pt : np.points) points.push_back({pt.index, pt.valuation});
  json vertices = json::array();
  for (const auto& pt : np.vertices) vertices.push_back({pt.index, pt.valuation});
  json segments = json::array();
  for (const auto& s : np.segments) segments.push_back({{"slope", to_string(s.slope)}, {"width", s.width}});
  json valuations = json::array();
  for (const auto& rv : root_valuations(np)) {
    valuations.push_back({{"valuation", to_string(rv.valuation)}, {"multiplicity", rv.multiplicity}});
  }
  std::vector<std::string> warnings;
  if (!p.verified()) warnings.push_back("p passed a probabilistic primality test only");
  json inputs = in.echo();
  inputs["p"] = p_value;
  return envelope("newton-polygon", inputs,
                  {{"p", p_value}, {"points", points}, {"vertices", vertices}, {"segments", segments},
                   {"root_valuations", valuations}},
                  warnings);
}

json cmd_local_integral(const PolyInput& in, const std::string& at_text, std::uint64_t p_value) {
  const Prime p = Prime::checked(p_value);
  const Rational a = parse_rational(at_text);
  const LocalValue v = empirical_integral_padic(in.as_univariate(), a, p);
  std::vector<std::string> warnings;
  if (!p.verified()) warnings.push_back("p passed a probabilistic primality test only");
  json inputs = in.echo();
  inputs["at"] = to_string(a);
  inputs["p"] = p_value;
  return envelope("local-integral", inputs, local_value(v), warnings);
}

struct ExperimentArgs {
  std::string name;
  std::string family;
  std::string divisor;
  std::string places;
  long n_min = 1;
  long n_max = 200;
  std::string format = "json";
  std::optional<double> truncate;
};

json report_json(const ExperimentReport& r) {
  json places = json::array();
  for (const auto& pl : r.places) places.push_back(pl.label());
  json rows = json::array();
  for (const auto& row : r.rows) {
    json entries = json::array();
    for (const auto& e : row.places) {
      json j = {{"place", e.place.label()},
                {"empirical", number(e.empirical)},
                {"equilibrium", number(e.equilibrium)}};
      if (e.empirical_exact) j["empirical_coefficient_of_log_p"] = to_string(*e.empirical_exact);
      if (e.equilibrium_exact) j["equilibrium_coefficient_of_log_p"] = to_string(*e.equilibrium_exact);
      if (e.empirical_identity) j["empirical_identity"] = number(*e.empirical_identity);
      entries.push_back(std::move(j));
    }
    rows.push_back({{"n", row.n},
                    {"degree", row.degree},
                    {"height", number(row.height)},
                    {"height_error", number(row.height_error)},
                    {"places", entries},
                    {"empirical_sum", number(row.empirical_sum)},
                    {"equilibrium_sum", number(row.equilibrium_sum)},
                    {"gap", number(row.gap)},
                    {"ok", row.ok},
                    {"flags", row.flags}});
  }
  json gaps = json::array();
  for (double g : r.gap_series) gaps.push_back(number(g));
  return {{"family", r.family},
          {"divisor", r.divisor.to_string()},
          {"places", places},
          {"divisor_height", number(r.divisor_height)},
          {"equilibrium_sum", number(r.equilibrium_sum)},
          {"predicted_limit", number(r.predicted_limit)},
          {"rows", rows},
          {"gap_series", gaps}};
}

void write_csv(const ExperimentReport& r, std::ostream& out) {
  out << "n,degree,height";
  for (const auto& pl : r.places) out << ',' << pl.label() << "_empirical," << pl.label() << "_equilibrium";
  out << ",gap,predicted_limit\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << row.degree << ',' << csv_number(row.height);
    for (std::size_t i = 0; i < r.places.size(); ++i) {
      if (i < row.places.size()) {
        out << ',' << csv_number(row.places[i].empirical) << ',' << csv_number(row.places[i].equilibrium);
      } else {
        out << ",,";
      }
    }
    out << ',' << csv_number(row.gap) << ',' << csv_number(r.predicted_limit) << '\n';
  }
}

PointFamily resolve_family(const std::string& text) {
  if (text == "autissier") return family_autissier();
  if (text.rfind("power-shift:", 0) == 0) {
    const Rational a = parse_rational(text.substr(12));
    if (a.get_den() != 1) throw DomainError("power-shift parameter must be an integer");
    return family_power_shift(a.get_num());
  }
  return family_from_template(text);
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out) {
  std::string family = a.family;
  std::string divisor = a.divisor;
  std::string places = a.places;
  if (a.name == "autissier") {
    if (family.empty()) family = "autissier";
    if (divisor.empty()) divisor = "T-2";
    if (places.empty()) places = "inf,3";
  } else if (a.name == "equidist") {
    if (family.empty()) family = "T^n-2";
    if (divisor.empty()) divisor = "T-1";
    if (places.empty()) places = "inf";
  } else {
    throw DomainError("unknown experiment '" + a.name + "'; expected autissier or equidist");
  }
  if (a.format != "json" && a.format != "csv") throw DomainError("unknown format '" + a.format + "'");
  if (a.n_min < 1) throw DomainError("--n-min must be >= 1");

  const PointFamily fam = resolve_family(family);
  const IntPoly g = parse_univariate(divisor);
  const std::vector<Place> pl = parse_places(places);
  std::vector<long> ns;
  for (long n = a.n_min; n <= a.n_max; ++n) ns.push_back(n);
  const ExperimentReport report = run_experiment(fam, g, pl, ns, a.truncate);

  if (a.format == "csv") {
    write_csv(report, out);
    return kExitOk;
  }
  json inputs = {{"experiment", a.name}, {"family", family},   {"divisor", divisor}, {"places", places},
                 {"n_min", a.n_min},     {"n_max", a.n_max},   {"truncate", a.truncate ? json(*a.truncate) : json(nullptr)}};
  out << envelope("experiment", inputs, report_json(report), report.warnings).dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arithmetic heights as generalized Mahler measures", "heightkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::optional<unsigned> threads;
  app.add_option("--threads", threads, "Worker thread cap (default: HEIGHTKIT_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  std::string poly_text;
  std::string vars_flag;
  std::optional<std::size_t> grid;
  std::string c_text;
  double tol = EscapeConfig{}.tolerance;
  std::uint64_t prime = 0;
  std::string at_text;

  auto* mahler = app.add_subcommand("mahler", "log Mahler measure (roots for one variable, torus quadrature otherwise)");
  mahler->add_option("poly", poly_text, "Polynomial")->required();
  mahler->add_option("--vars", vars_flag, "Comma-separated variable order");
  mahler->add_option("--grid", grid, "Quadrature nodes per axis (power of two)");

  auto* height = app.add_subcommand("height", "Weil height with per-place breakdown");
  height->add_option("poly", poly_text, "Minimal polynomial, or a homogeneous form")->required();
  height->add_option("--vars", vars_flag, "Comma-separated variable order");
  height->add_option("--grid", grid, "Quadrature nodes per axis for forms");

  auto* canon = app.add_subcommand("canonical-height", "Canonical height for z^2 + c");
  canon->add_option("poly", poly_text, "Minimal polynomial of the point")->required();
  canon->add_option("--c", c_text, "Rational parameter c")->required();
  canon->add_option("--tol", tol, "Escape-rate tolerance");

  auto* newton = app.add_subcommand("newton-polygon", "p-adic Newton polygon");
  newton->add_option("poly", poly_text, "Polynomial")->required();
  newton->add_option("-p,--prime", prime, "Prime")->required();

  auto* local = app.add_subcommand("local-integral", "Exact p-adic empirical integral of log|T - a|^{-1}");
  local->add_option("poly", poly_text, "Polynomial of the orbit")->required();
  local->add_option("--at", at_text, "Rational point a")->required();
  local->add_option("-p,--prime", prime, "Prime")->required();

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Empirical versus equilibrium integrals along a family");
  experiment->add_option("name", ex.name, "autissier | equidist")->required();
  experiment->add_option("--family", ex.family, "autissier, power-shift:<a>, or a template in T and n");
  experiment->add_option("--divisor", ex.divisor, "Divisor polynomial in T");
  experiment->add_option("--places", ex.places, "Comma-separated places, e.g. inf,3");
  experiment->add_option("--n-min", ex.n_min, "First index");
  experiment->add_option("--n-max", ex.n_max, "Last index");
  experiment->add_option("--format", ex.format, "json | csv");
  experiment->add_option("--truncate", ex.truncate, "Clamp the Green function at this level");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (threads) set_thread_cap(*threads);

  try {
    PolyInput in = read_poly(poly_text, vars_flag);
    json report;
    if (mahler->parsed()) report = cmd_mahler(in, grid);
    else if (height->parsed()) report = cmd_height(in, grid);
    else if (canon->parsed()) report = cmd_canonical_height(in, c_text, tol);
    else if (newton->parsed()) report = cmd_newton_polygon(in, prime);
    else if (local->parsed()) report = cmd_local_integral(in, at_text, prime);
    else return cmd_experiment(ex, out);
    out << report.dump(2) << '\n';
    return kExitOk;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace heightkit
