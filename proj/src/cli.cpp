#include "mcalc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mcalc/holo.hpp"
#include "mcalc/io.hpp"
#include "mcalc/pde.hpp"
#include "mcalc/quad.hpp"

#ifndef MCALC_DATA_DIR
#define MCALC_DATA_DIR ""
#endif

namespace mcalc {

namespace {

struct Quantity {
  std::string name;
  GenNet net;
};

// What a subcommand hands back for serialization.
struct Outcome {
  json inputs = json::object();
  std::vector<Quantity> nets;
  json extra = json::object();
  // Taylor coefficient table, one CSV row per n.
  std::vector<GenNet> table;
};

struct Options {
  std::string config_path;
  std::optional<int> kmin, kmax;
  std::optional<std::size_t> tail;
  std::string out_path;
  std::string format;
  std::optional<unsigned> workers;
  bool force = false;
  double s = 1.0;

  std::string expr, net, f, membrane, contour, z0, problem, a, b;
  std::vector<std::string> field, z;
  double rho = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_max = 10;
};

std::string resolve_path(const std::string& p) {
  namespace fs = std::filesystem;
  if (fs::exists(p)) return p;
  const std::string dir = MCALC_DATA_DIR;
  if (!dir.empty()) {
    const fs::path alt = fs::path(dir) / fs::path(p).filename();
    if (fs::exists(alt)) return alt.string();
  }
  return p;
}

json load_json_arg(const std::string& text) {
  if (text.size() > 5 && text.ends_with(".json")) return read_json_file(resolve_path(text));
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return json(text);
  return j;
}

GenNet net_arg(const std::string& text, const GridPtr& grid, double s) {
  return net_from_json(load_json_arg(text), grid, s);
}

GenNet complex_point(const GenNet& z) {
  if (z.is_complex() || z.arity() != 1) return z;
  GenNet out(z.grid(), 1, true);
  for (std::size_t k = 0; k < z.size(); ++k) {
    out.set(k, z.at(k));
    out.set_floor(k, z.floor(k));
  }
  return out;
}

// Default variables first (x1..xn or z), then the short names x, y, z.
Representative make_rep(const std::string& body, std::size_t arity, const Box& domain, Codomain cod,
                        const GridPtr& grid, bool trailing_t = false) {
  std::vector<std::string> vars;
  if (cod == Codomain::Real)
    for (std::size_t i = 1; i <= arity - (trailing_t ? 1 : 0); ++i) vars.push_back("x" + std::to_string(i));
  else
    vars.push_back("z");
  if (trailing_t) vars.push_back("t");
  try {
    return Representative::make(body, arity, domain, cod, grid, vars);
  } catch (const UndeclaredVariable&) {
    const std::size_t spatial = arity - (trailing_t ? 1 : 0);
    if (cod != Codomain::Real || spatial > 3) throw;
    static const char* names[] = {"x", "y", "z"};
    std::vector<std::string> alt(names, names + spatial);
    if (trailing_t) alt.push_back("t");
    try {
      return Representative::make(body, arity, domain, cod, grid, alt);
    } catch (const UndeclaredVariable&) {
    }
    throw;
  }
}

Box pad_box(const Box& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) w = std::max(w, b.hi(i) - b.lo(i));
  return b.enlarged(0.05 * w + 1e-9);
}

Box union_box(const Box& a, const Box& b) {
  if (a.dim() != b.dim()) throw InputError("contour and membrane dimensions differ");
  Box u = a;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    u.axes[i][0] = std::min(a.lo(i), b.lo(i));
    u.axes[i][1] = std::max(a.hi(i), b.hi(i));
  }
  return u;
}

History load_history(const Options& o, const GridPtr& grid) {
  if (o.contour.empty()) throw InputError("--contour is required");
  return history_from_json(load_json_arg(o.contour), grid);
}

PreMembrane load_membrane(const Options& o, const GridPtr& grid) {
  if (o.membrane.empty()) throw InputError("--membrane is required");
  return membrane_from_json(load_json_arg(o.membrane), grid, o.s);
}

void require(const std::string& v, const char* flag) {
  if (v.empty()) throw InputError(std::string(flag) + " is required");
}

// ---------------------------------------------------------------------------

Outcome cmd_classify(const Options& o, const RunConfig&, const GridPtr& grid) {
  if (o.expr.empty() == o.net.empty()) throw InputError("classify needs exactly one of --expr and --net");
  Outcome r;
  if (!o.expr.empty()) {
    r.inputs["expr"] = o.expr;
    r.nets.push_back({"value", net_from_json(json(o.expr), grid, o.s)});
  } else {
    r.inputs["net"] = o.net;
    r.nets.push_back({"value", net_arg(o.net, grid, o.s)});
  }
  return r;
}

Outcome cmd_integrate(const Options& o, const RunConfig& cfg, const GridPtr& grid) {
  require(o.f, "--f");
  const PreMembrane M = load_membrane(o, grid);
  const Representative f = make_rep(o.f, M.dim(), pad_box(M.compact_box()), Codomain::Real, grid);
  Outcome r;
  r.inputs = {{"f", o.f}, {"membrane", load_json_arg(o.membrane)}, {"s", o.s}};
  r.nets.push_back({"integral", integrate_membrane(f, M, cfg.quad)});
  return r;
}

Outcome cmd_line(const Options& o, const RunConfig& cfg, const GridPtr& grid) {
  const History gamma = load_history(o, grid);
  const Box dom = pad_box(gamma.compact_box());
  Outcome r;
  r.inputs["contour"] = load_json_arg(o.contour);
  if (!o.f.empty()) {
    if (!o.field.empty()) throw InputError("line takes either --f or --field, not both");
    r.inputs["f"] = o.f;
    const Representative f = make_rep(o.f, 1, dom, Codomain::Complex, grid);
    r.nets.push_back({"integral", line_integral_complex(f, gamma, cfg.quad)});
    return r;
  }
  if (o.field.size() != gamma.dim()) throw InputError("line needs one --field per curve dimension");
  std::vector<Representative> F;
  for (const auto& c : o.field) F.push_back(make_rep(c, gamma.dim(), dom, Codomain::Real, grid));
  r.inputs["field"] = o.field;
  r.nets.push_back({"integral", line_integral_real(F, gamma, cfg.quad)});
  return r;
}

ContourSetup make_setup(const Options& o, const GridPtr& grid, Outcome& r) {
  require(o.f, "--f");
  require(o.z0, "--z0");
  History gamma = load_history(o, grid);
  const Representative f = make_rep(o.f, 1, pad_box(gamma.compact_box()), Codomain::Complex, grid);
  r.inputs = {{"f", o.f}, {"contour", load_json_arg(o.contour)}, {"z0", load_json_arg(o.z0)}};
  if (!std::isnan(o.rho)) r.inputs["rho"] = o.rho;
  ContourSetup s = ContourSetup::make(f, std::move(gamma), complex_point(net_arg(o.z0, grid, o.s)), o.rho);
  r.extra["separation_class"] = class_to_json(s.separation_class());
  r.extra["rho"] = s.rho();
  return s;
}

Outcome cmd_cauchy(const Options& o, const RunConfig& cfg, const GridPtr& grid) {
  Outcome r;
  const ContourSetup s = make_setup(o, grid, r);
  const CauchyReport c = cauchy_eval(s, cfg.quad);
  r.nets.push_back({"via_contour", c.via_contour});
  r.nets.push_back({"direct", c.direct});
  r.nets.push_back({"gap", c.via_contour - c.direct});
  return r;
}

Outcome cmd_taylor(const Options& o, const RunConfig& cfg, const GridPtr& grid) {
  Outcome r;
  const ContourSetup s = make_setup(o, grid, r);
  r.inputs["n_max"] = o.n_max;
  r.table = taylor_coefficients(s, o.n_max, cfg.quad);
  for (std::size_t n = 0; n < r.table.size(); ++n) r.nets.push_back({"a" + std::to_string(n), r.table[n]});
  if (!o.z.empty()) {
    r.inputs["z"] = o.z;
    json terms = json::array();
    for (std::size_t i = 0; i < o.z.size(); ++i) {
      const TaylorReport t = taylor_eval(s, r.table, complex_point(net_arg(o.z[i], grid, o.s)));
      const std::string tag = "z" + std::to_string(i);
      r.nets.push_back({tag + "_series", t.series});
      r.nets.push_back({tag + "_direct", t.direct});
      r.nets.push_back({tag + "_gap", t.series - t.direct});
      terms.push_back(t.terms_used);
    }
    r.extra["terms_used"] = terms;
  }
  return r;
}

Outcome cmd_green(const Options& o, const RunConfig& cfg, const GridPtr& grid) {
  const History gamma = load_history(o, grid);
  const PreMembrane M = load_membrane(o, grid);
  if (o.field.size() != 2) throw InputError("green needs exactly two --field components");
  const Box dom = pad_box(union_box(gamma.compact_box(), M.compact_box()));
  std::vector<Representative> F;
  for (const auto& c : o.field) F.push_back(make_rep(c, 2, dom, Codomain::Real, grid));
  const GreenReport g = green_check(F, gamma, M, cfg.quad);
  Outcome r;
  r.inputs = {{"field", o.field}, {"contour", load_json_arg(o.contour)}, {"membrane", load_json_arg(o.membrane)}};
  r.nets.push_back({"lhs", g.lhs});
  r.nets.push_back({"rhs", g.rhs});
  r.nets.push_back({"gap", g.lhs - g.rhs});
  return r;
}

Outcome cmd_meanvalue(const Options& o, const RunConfig& cfg, const GridPtr& grid) {
  require(o.f, "--f");
  const PreMembrane M = load_membrane(o, grid);
  const Representative f = make_rep(o.f, M.dim(), pad_box(M.compact_box()), Codomain::Real, grid);
  const MeanValueReport m = mean_value_bound(f, M, cfg.quad);
  Outcome r;
  r.inputs = {{"f", o.f}, {"membrane", load_json_arg(o.membrane)}, {"s", o.s}};
  r.nets.push_back({"integral", m.integral});
  r.nets.push_back({"volume", m.volume});
  if (std::isinf(m.r_star)) r.extra["r_star"] = m.r_star > 0 ? "+inf" : "-inf";
  else r.extra["r_star"] = m.r_star;
  return r;
}

Outcome cmd_consistency(const Options& o, const RunConfig& cfg, const GridPtr& grid) {
  require(o.f, "--f");
  require(o.a, "--a");
  require(o.b, "--b");
  const GenNet a = net_arg(o.a, grid, o.s), b = net_arg(o.b, grid, o.s);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = grid->tail_begin(); k < grid->size(); ++k) {
    lo = std::min({lo, a.real(k), b.real(k)});
    hi = std::max({hi, a.real(k), b.real(k)});
  }
  const Representative f = make_rep(o.f, 1, pad_box(Box({{lo, hi}})), Codomain::Real, grid);
  const ConsistencyReport c = interval_consistency(f, a, b, cfg.quad);
  Outcome r;
  r.inputs = {{"f", o.f}, {"a", load_json_arg(o.a)}, {"b", load_json_arg(o.b)}};
  r.nets.push_back({"membrane_val", c.membrane_val});
  r.nets.push_back({"line_val", c.line_val});
  r.nets.push_back({"gap", c.membrane_val - c.line_val});
  return r;
}

// A candidate solution written in x1..xn (or x, y, z), t and eps.
Evaluator candidate_evaluator(const std::string& body, std::size_t n, const GridPtr& grid) {
  std::vector<std::string> vars;
  for (std::size_t i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  vars.push_back("t");
  Expr e = [&] {
    try {
      return parse(body, vars);
    } catch (const UndeclaredVariable&) {
      if (n > 3) throw;
      static const char* names[] = {"x", "y", "z"};
      std::vector<std::string> alt(names, names + n);
      alt.push_back("t");
      return parse(body, alt);
    }
  }();
  return [e = std::move(e), n, grid](std::size_t k, std::span<const double> x, double t) {
    std::vector<double> env(x.begin(), x.end());
    env.resize(n);
    env.push_back(t);
    env.push_back((*grid)[k]);
    return e.eval(std::span<const double>(env));
  };
}

std::vector<Probe> load_probes(const json& p, std::size_t n, const GridPtr& grid, double s) {
  const json& probes = p.at("probes");
  if (!probes.is_array() || probes.empty()) throw InputError("problem needs a non-empty \"probes\" array");
  std::vector<Probe> out;
  for (const auto& q : probes) {
    if (!q.contains("x") || !q.contains("t")) throw InputError("each probe needs \"x\" and \"t\"");
    GenNet x = net_from_json(q.at("x"), grid, s);
    if (x.arity() != n || x.is_complex()) throw InputError("probe x has the wrong dimension");
    out.push_back({std::move(x), net_from_json(q.at("t"), grid, s)});
  }
  return out;
}

void add_residual(Outcome& r, const ResidualReport& rep) {
  r.nets.push_back({"residual_raw", rep.raw});
  r.nets.push_back({"residual_scaled", rep.scaled});
}

Box problem_domain(const json& p, std::size_t n) {
  if (p.contains("domain")) return box_from_json(p.at("domain"));
  return Box::cube(n, -10.0, 10.0);
}

Outcome cmd_transport(const Options& o, const RunConfig&, const GridPtr& grid) {
  require(o.problem, "--problem");
  const json p = load_json_arg(o.problem);
  if (!p.is_object()) throw InputError("transport problem must be a JSON object");
  const std::size_t n = p.value("n", std::size_t{1});
  if (n == 0) throw InputError("transport problem needs n >= 1");
  const Box dom = problem_domain(p, n);
  if (dom.dim() != n) throw InputError("problem domain dimension differs from n");
  if (!p.contains("b") || !p.contains("g")) throw InputError("transport problem needs \"b\" and \"g\"");
  GenNet b = net_from_json(p.at("b"), grid, o.s);
  Representative g = make_rep(p.at("g").get<std::string>(), n, dom, Codomain::Real, grid);
  std::optional<Representative> f;
  const double a = p.value("a", 1.0);
  if (p.contains("f")) {
    Box fdom = dom;
    fdom.axes.push_back({-a, p.value("t_max", 10.0)});
    f = make_rep(p.at("f").get<std::string>(), n + 1, fdom, Codomain::Real, grid, true);
  }
  TransportProblem prob{n, std::move(b), std::move(g), std::move(f), a};
  const TransportSolution sol = transport_solve(prob);
  const std::vector<Probe> probes = load_probes(p, n, grid, o.s);
  const double h = p.value("h_fd", 1e-5);

  Outcome r;
  r.inputs["problem"] = p;
  for (std::size_t i = 0; i < probes.size(); ++i)
    r.nets.push_back({"probe" + std::to_string(i), sol(GenPoint(probes[i].x, dom), probes[i].t)});
  const Evaluator w = p.contains("candidate") ? candidate_evaluator(p.at("candidate").get<std::string>(), n, grid)
                                              : sol.evaluator();
  add_residual(r, residual_check(w, sol.problem(), probes, h));
  return r;
}

Outcome cmd_wave(const Options& o, const RunConfig&, const GridPtr& grid) {
  require(o.problem, "--problem");
  const json p = load_json_arg(o.problem);
  if (!p.is_object() || !p.contains("g") || !p.contains("h"))
    throw InputError("wave problem must be an object with \"g\" and \"h\"");
  const Box dom = problem_domain(p, 1);
  WaveProblem prob{make_rep(p.at("g").get<std::string>(), 1, dom, Codomain::Real, grid),
                   make_rep(p.at("h").get<std::string>(), 1, dom, Codomain::Real, grid), grid};
  const WaveSolution sol = wave_solve(prob);
  const std::vector<Probe> probes = load_probes(p, 1, grid, o.s);
  const double h = p.value("h_fd", 1e-5);

  Outcome r;
  r.inputs["problem"] = p;
  for (std::size_t i = 0; i < probes.size(); ++i)
    r.nets.push_back({"probe" + std::to_string(i), sol(probes[i].x, probes[i].t)});
  const Evaluator w = p.contains("candidate") ? candidate_evaluator(p.at("candidate").get<std::string>(), 1, grid)
                                              : sol.evaluator();
  add_residual(r, residual_check(w, sol.problem(), probes, h));
  return r;
}

// ---------------------------------------------------------------------------

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string class_line(const std::string& name, const NetClass& c) {
  std::string v = std::isnan(c.estimated_valuation) ? "nan"
                  : std::isinf(c.estimated_valuation) ? (c.estimated_valuation > 0 ? "+inf" : "-inf")
                                                      : fmt(c.estimated_valuation);
  return "# " + name + " valuation=" + v + " kind=" + to_string(c.kind) + " residual=" + fmt(c.fit_residual) + "\n";
}

std::string render_json(const std::string& command, const RunConfig& cfg, const Outcome& r) {
  json results = json::object();
  for (const auto& q : r.nets) results[q.name] = result_to_json(q.net, cfg.classify);
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) results[it.key()] = it.value();
  json report = {{"command", command}, {"config", config_to_json(cfg)}, {"inputs", r.inputs}, {"results", results}};
  return report.dump() + "\n";
}

std::string render_csv(const std::string& command, const RunConfig& cfg, const Outcome& r, const GridPtr& grid) {
  std::ostringstream s;
  s << "# command " << command << "\n# config " << config_to_json(cfg).dump() << "\n# inputs " << r.inputs.dump()
    << "\n";
  if (!r.table.empty()) {
    s << "n";
    for (std::size_t k = 0; k < grid->size(); ++k) s << ",re@" << fmt((*grid)[k]) << ",im@" << fmt((*grid)[k]);
    s << ",valuation,kind\n";
    for (std::size_t n = 0; n < r.table.size(); ++n) {
      s << n;
      for (std::size_t k = 0; k < grid->size(); ++k)
        s << "," << fmt(r.table[n].at(k).real()) << "," << fmt(r.table[n].at(k).imag());
      const NetClass c = classify(r.table[n], cfg.classify);
      s << "," << fmt(c.estimated_valuation) << "," << to_string(c.kind) << "\n";
    }
  }
  std::vector<const Quantity*> rows;
  for (const auto& q : r.nets)
    if (r.table.empty() || q.name.rfind("a", 0) != 0) rows.push_back(&q);
  if (!rows.empty()) {
    s << "eps";
    for (const Quantity* q : rows)
      for (std::size_t j = 0; j < q->net.arity(); ++j) {
        const std::string base = q->net.arity() == 1 ? q->name : q->name + "_" + std::to_string(j + 1);
        if (q->net.is_complex()) s << "," << base << "_re," << base << "_im";
        else s << "," << base;
      }
    s << "\n";
    for (std::size_t k = 0; k < grid->size(); ++k) {
      s << fmt((*grid)[k]);
      for (const Quantity* q : rows)
        for (std::size_t j = 0; j < q->net.arity(); ++j) {
          s << "," << fmt(q->net.at(k, j).real());
          if (q->net.is_complex()) s << "," << fmt(q->net.at(k, j).imag());
        }
      s << "\n";
    }
  }
  for (const auto& q : r.nets) s << class_line(q.name, classify(q.net, cfg.classify));
  for (auto it = r.extra.begin(); it != r.extra.end(); ++it) s << "# " << it.key() << "=" << it.value().dump() << "\n";
  return s.str();
}

void add_common(CLI::App& sub, Options& o) {
  sub.add_option("--config", o.config_path, "JSON run configuration");
  sub.add_option("--grid-kmin", o.kmin, "first grid exponent k (eps = 10^(-k/per_decade))");
  sub.add_option("--grid-kmax", o.kmax, "last grid exponent k");
  sub.add_option("--tail", o.tail, "number of tail samples");
  sub.add_option("--out", o.out_path, "append the report to this file");
  sub.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub.add_option("--workers", o.workers, "worker threads for per-eps loops (0 = hardware)");
  sub.add_flag("--force", o.force, "overwrite --out instead of appending");
  sub.add_option("--s", o.s, "value substituted for alpha:s in inputs");
}

RunConfig build_config(const Options& o) {
  RunConfig cfg;
  std::string path = o.config_path;
  if (path.empty())
    if (const char* env = std::getenv("MEMBRANE_CALC_CONFIG"); env && *env) path = env;
  if (!path.empty()) apply_config(read_json_file(path), cfg);
  if (o.kmin) cfg.k_min = *o.kmin;
  if (o.kmax) cfg.k_max = *o.kmax;
  if (o.tail) cfg.tail_len = *o.tail;
  if (!o.format.empty()) cfg.format = o.format;
  if (o.workers) cfg.quad.workers = *o.workers;
  cfg.validate();
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Generalized numbers, membrane integrals, contour formulas and PDE solutions", "mcalc");
  app.require_subcommand(1);
  Options o;

  using Handler = Outcome (*)(const Options&, const RunConfig&, const GridPtr&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto sub = [&](const char* name, const char* help, Handler h) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(*s, o);
    commands.emplace_back(s, h);
    return s;
  };

  auto* c = sub("classify", "classify a net", cmd_classify);
  c->add_option("--expr", o.expr, "expression in eps");
  c->add_option("--net", o.net, "net specification or JSON file");

  c = sub("integrate", "integrate a representative over a membrane", cmd_integrate);
  c->add_option("--f", o.f, "representative in x1..xn and eps")->required();
  c->add_option("--membrane", o.membrane, "membrane JSON (inline or file)")->required();

  c = sub("line", "line integral along a history", cmd_line);
  c->add_option("--field", o.field, "real field component (repeat per dimension)");
  c->add_option("--f", o.f, "complex integrand in z");
  c->add_option("--contour", o.contour, "history JSON (inline or file)")->required();

  c = sub("contour-cauchy", "Cauchy formula at z0", cmd_cauchy);
  c->add_option("--f", o.f, "complex representative in z and eps")->required();
  c->add_option("--contour", o.contour, "history JSON (inline or file)")->required();
  c->add_option("--z0", o.z0, "expansion point: number, expression in eps, or net JSON")->required();
  c->add_option("--rho", o.rho, "sharp-norm radius of the neighbourhood of z0");

  c = sub("taylor", "Taylor coefficients about z0 and series evaluation", cmd_taylor);
  c->add_option("--f", o.f, "complex representative in z and eps")->required();
  c->add_option("--contour", o.contour, "history JSON (inline or file)")->required();
  c->add_option("--z0", o.z0, "expansion point: number, expression in eps, or net JSON")->required();
  c->add_option("--rho", o.rho, "sharp-norm radius of the neighbourhood of z0");
  c->add_option("--n-max", o.n_max, "highest coefficient index (default 10)");
  c->add_option("--z", o.z, "evaluation point (repeatable)");

  c = sub("green", "compare both sides of Green's theorem", cmd_green);
  c->add_option("--field", o.field, "real field component (repeat per dimension)")->required();
  c->add_option("--contour", o.contour, "history JSON (inline or file)")->required();
  c->add_option("--membrane", o.membrane, "membrane JSON (inline or file)")->required();

  c = sub("meanvalue", "mean value bound exponent", cmd_meanvalue);
  c->add_option("--f", o.f, "representative in x1..xn and eps")->required();
  c->add_option("--membrane", o.membrane, "membrane JSON (inline or file)")->required();

  c = sub("transport", "solve and check a transport problem", cmd_transport);
  c->add_option("--problem", o.problem, "problem JSON (inline or file)")->required();

  c = sub("wave", "solve and check a 1-D wave problem", cmd_wave);
  c->add_option("--problem", o.problem, "problem JSON (inline or file)")->required();

  c = sub("consistency", "membrane vs line integral on an interval", cmd_consistency);
  c->add_option("--f", o.f, "representative in x1 and eps")->required();
  c->add_option("--a", o.a, "left endpoint net")->required();
  c->add_option("--b", o.b, "right endpoint net")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string name;
  Handler handler = nullptr;
  for (auto& [s, h] : commands)
    if (s->parsed()) {
      name = s->get_name();
      handler = h;
    }

  try {
    const RunConfig cfg = build_config(o);
    const GridPtr grid = cfg.make_grid();
    const Outcome r = handler(o, cfg, grid);
    const std::string text = cfg.format == "csv" ? render_csv(name, cfg, r, grid) : render_json(name, cfg, r);
    if (o.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(o.out_path, o.force ? std::ios::trunc : std::ios::app);
      if (!f) throw InputError("cannot open '" + o.out_path + "' for writing");
      f << text;
      if (!f) throw InputError("write to '" + o.out_path + "' failed");
    }
    return 0;
  } catch (const HypothesisError& e) {
    err << "mcalc " << name << ": hypothesis failed: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "mcalc " << name << ": input error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "mcalc " << name << ": bad JSON input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "mcalc " << name << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mcalc
