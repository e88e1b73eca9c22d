#include "mcalc/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mcalc {

namespace {

const json& require(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(std::string(what) + " is missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::complex<double> scalar_value(const json& v, bool complex) {
  if (complex) {
    if (!v.is_array() || v.size() != 2) throw InputError("complex net values are [re, im] pairs");
    return {number(v[0], "net value"), number(v[1], "net value")};
  }
  return {number(v, "net value"), 0.0};
}

GenNet net_from_object(const json& j, const GridPtr& grid) {
  const json& g = require(j, "grid", "net");
  const json& vals = require(j, "values", "net");
  if (!g.is_array() || g.size() != grid->size() || !vals.is_array() || vals.size() != grid->size())
    throw InputError("net grid does not match the run's epsilon grid");
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double e = number(g[k], "grid sample");
    if (std::fabs(e - (*grid)[k]) > 1e-12 * (*grid)[k])
      throw InputError("net grid does not match the run's epsilon grid");
  }
  const std::size_t arity = j.value("arity", std::size_t{1});
  const bool complex = j.value("complex", false);
  if (arity == 0) throw InputError("net arity must be positive");
  GenNet out(grid, arity, complex);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    if (arity == 1) {
      out.set(k, scalar_value(vals[k], complex));
    } else {
      if (!vals[k].is_array() || vals[k].size() != arity) throw InputError("vector net sample has the wrong arity");
      for (std::size_t i = 0; i < arity; ++i) out.set(k, i, scalar_value(vals[k][i], complex));
    }
  }
  if (j.contains("floor")) {
    const json& f = j.at("floor");
    if (!f.is_array() || f.size() != grid->size()) throw InputError("net floor must have one entry per sample");
    for (std::size_t k = 0; k < grid->size(); ++k) out.set_floor(k, number(f[k], "net floor"));
  }
  return out;
}

// "alpha:r" or "alpha:s".
bool parse_alpha(const std::string& s, double svalue, double& r) {
  if (s.rfind("alpha:", 0) != 0) return false;
  const std::string arg = s.substr(6);
  if (arg == "s") {
    r = svalue;
    return true;
  }
  std::istringstream in(arg);
  in >> r;
  if (!in || !in.eof()) throw InputError("bad gauge specification '" + s + "'");
  return true;
}

void set_flat(RunConfig& cfg, const std::string& key, const json& v) {
  auto num = [&] { return number(v, key.c_str()); };
  auto count = [&] {
    const double d = num();
    if (!(d >= 0.0) || d != std::floor(d)) throw InputError(key + " must be a non-negative integer");
    return static_cast<std::size_t>(d);
  };
  if (key == "grid.k_min") cfg.k_min = static_cast<int>(count());
  else if (key == "grid.k_max") cfg.k_max = static_cast<int>(count());
  else if (key == "grid.per_decade") cfg.per_decade = num();
  else if (key == "grid.tail_len") cfg.tail_len = count();
  else if (key == "classify.null_threshold") cfg.classify.null_threshold = num();
  else if (key == "classify.residual_max") cfg.classify.residual_max = num();
  else if (key == "classify.invertible_margin") cfg.classify.invertible_margin = num();
  else if (key == "classify.growth_max") cfg.classify.growth_max = num();
  else if (key == "quad.gauss_order") cfg.quad.gauss_order = count();
  else if (key == "quad.segments") cfg.quad.segments = count();
  else if (key == "quad.ball_radial") cfg.quad.ball_radial = count();
  else if (key == "quad.ball_angular") cfg.quad.ball_angular = count();
  else if (key == "quad.indicator_refine_max") cfg.quad.indicator_refine_max = count();
  else if (key == "quad.indicator_gauss") cfg.quad.indicator_gauss = count();
  else if (key == "quad.indicator_tol") cfg.quad.indicator_tol = num();
  else if (key == "quad.abs_tol") cfg.quad.abs_tol = num();
  else if (key == "workers") cfg.quad.workers = static_cast<unsigned>(count());
  else if (key == "format") {
    if (!v.is_string()) throw InputError("format must be a string");
    cfg.format = v.get<std::string>();
  } else {
    throw InputError("unknown configuration key '" + key + "'");
  }
}

void walk_config(const json& j, const std::string& prefix, RunConfig& cfg) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) walk_config(*it, key, cfg);
    else set_flat(cfg, key, *it);
  }
}

std::vector<std::string> string_list(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw InputError(std::string(what) + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

GridPtr RunConfig::make_grid() const { return EpsilonGrid::decades(k_min, k_max, per_decade, tail_len); }

void RunConfig::validate() const {
  make_grid();
  quad.validate();
  if (!(classify.residual_max > 0.0) || !(classify.growth_max > 0.0) || !(classify.invertible_margin >= 0.0))
    throw InputError("classification thresholds out of range");
  if (format != "json" && format != "csv") throw InputError("format must be json or csv");
}

void apply_config(const json& j, RunConfig& cfg) {
  if (!j.is_object()) throw InputError("configuration must be a JSON object");
  walk_config(j, "", cfg);
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["grid"] = {{"k_min", cfg.k_min}, {"k_max", cfg.k_max}, {"per_decade", cfg.per_decade}, {"tail_len", cfg.tail_len}};
  j["classify"] = {{"null_threshold", cfg.classify.null_threshold},
                   {"residual_max", cfg.classify.residual_max},
                   {"invertible_margin", cfg.classify.invertible_margin},
                   {"growth_max", cfg.classify.growth_max}};
  j["quad"] = {{"gauss_order", cfg.quad.gauss_order},
               {"segments", cfg.quad.segments},
               {"ball_radial", cfg.quad.ball_radial},
               {"ball_angular", cfg.quad.ball_angular},
               {"indicator_refine_max", cfg.quad.indicator_refine_max},
               {"indicator_gauss", cfg.quad.indicator_gauss},
               {"indicator_tol", cfg.quad.indicator_tol},
               {"abs_tol", cfg.quad.abs_tol}};
  j["format"] = cfg.format;
  return j;
}

json net_to_json(const GenNet& a) {
  json j;
  j["grid"] = json::array();
  for (double e : a.grid()->samples()) j["grid"].push_back(e);
  auto scalar = [&](std::complex<double> v) {
    return a.is_complex() ? json::array({v.real(), v.imag()}) : json(v.real());
  };
  json vals = json::array();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.arity() == 1) {
      vals.push_back(scalar(a.at(k)));
    } else {
      json row = json::array();
      for (std::size_t i = 0; i < a.arity(); ++i) row.push_back(scalar(a.at(k, i)));
      vals.push_back(row);
    }
  }
  j["values"] = vals;
  if (a.arity() != 1) j["arity"] = a.arity();
  if (a.is_complex()) j["complex"] = true;
  bool floored = false;
  for (std::size_t k = 0; k < a.size(); ++k) floored = floored || a.floor(k) != 0.0;
  if (floored) {
    json f = json::array();
    for (std::size_t k = 0; k < a.size(); ++k) f.push_back(a.floor(k));
    j["floor"] = f;
  }
  return j;
}

json class_to_json(const NetClass& c) {
  json j;
  if (std::isnan(c.estimated_valuation)) j["valuation"] = nullptr;
  else if (std::isinf(c.estimated_valuation)) j["valuation"] = c.estimated_valuation > 0 ? "+inf" : "-inf";
  else j["valuation"] = c.estimated_valuation;
  j["kind"] = to_string(c.kind);
  j["residual"] = c.fit_residual;
  return j;
}

json result_to_json(const GenNet& a, const ClassifyConfig& cfg) {
  return {{"net", net_to_json(a)}, {"class", class_to_json(classify(a, cfg))}};
}

GenNet net_from_json(const json& j, const GridPtr& grid, double s) {
  if (j.is_number()) return GenNet::constant(grid, j.get<double>());
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    double r = 0.0;
    if (parse_alpha(text, s, r)) return alpha(r, grid);
    const Expr e = parse(text, {});
    if (e.uses_complex()) {
      return GenNet::from_complex_function(grid, [&](double eps) {
        const std::complex<double> env[1] = {{eps, 0.0}};
        return e.eval(std::span<const std::complex<double>>(env, 1));
      });
    }
    return GenNet::from_function(grid, [&](double eps) { return e.eval(std::span<const double>(&eps, 1)); });
  }
  if (j.is_array()) {
    std::vector<GenNet> comps;
    for (const auto& c : j) comps.push_back(net_from_json(c, grid, s));
    if (comps.empty()) throw InputError("empty vector net");
    return comps.size() == 1 ? comps[0] : GenNet::vector(comps);
  }
  if (j.is_object()) return net_from_object(j, grid);
  throw InputError("unrecognized net specification");
}

Box box_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("a box is a non-empty array of [lo, hi] pairs");
  Box b;
  for (const auto& ax : j) {
    if (!ax.is_array() || ax.size() != 2) throw InputError("a box is a non-empty array of [lo, hi] pairs");
    const double lo = number(ax[0], "box bound"), hi = number(ax[1], "box bound");
    if (!(lo <= hi)) throw InputError("box axis with lo > hi");
    b.axes.push_back({lo, hi});
  }
  return b;
}

History history_from_json(const json& j, const GridPtr& grid) {
  const std::vector<std::string> curve = string_list(require(j, "curve", "history"), "history curve");
  Growth growth;
  if (j.contains("growth")) {
    const json& g = j.at("growth");
    growth.c = number(require(g, "c", "history growth"), "growth c");
    const double N = number(require(g, "N", "history growth"), "growth N");
    if (N < 0 || N != std::floor(N)) throw InputError("growth N must be a non-negative integer");
    growth.N = static_cast<int>(N);
  }
  HistoryFlags flags;
  if (j.contains("flags")) {
    const json& f = j.at("flags");
    flags.closed = f.value("closed", false);
    flags.simple = f.value("simple", false);
    flags.positively_oriented = f.value("positively_oriented", false);
    flags.contractible = f.value("contractible", false);
  }
  Box box;
  if (j.contains("compact_box")) {
    box = box_from_json(j.at("compact_box"));
  } else {
    std::vector<Expr> exprs;
    for (const auto& c : curve) exprs.push_back(parse(c, {"t"}));
    box.axes.assign(exprs.size(), {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (std::size_t k = grid->tail_begin(); k < grid->size(); ++k)
      for (int s = 0; s <= 1024; ++s) {
        const double env[2] = {s / 1024.0, (*grid)[k]};
        for (std::size_t i = 0; i < exprs.size(); ++i) {
          const double v = exprs[i].eval(std::span<const double>(env, 2));
          box.axes[i][0] = std::min(box.axes[i][0], v);
          box.axes[i][1] = std::max(box.axes[i][1], v);
        }
      }
    for (auto& ax : box.axes) {
      const double pad = 1e-9 * (1.0 + std::fabs(ax[0]) + std::fabs(ax[1]));
      ax[0] -= pad;
      ax[1] += pad;
    }
  }
  return History::make(curve, growth, flags, std::move(box), grid);
}

PreMembrane membrane_from_json(const json& j, const GridPtr& grid, double s) {
  const json& v = require(j, "variant", "membrane");
  if (!v.is_string()) throw InputError("membrane variant must be a string");
  const std::string variant = v.get<std::string>();
  const Box cbox = box_from_json(require(j, "compact_box", "membrane"));
  PreMembrane M = [&] {
    if (variant == "interval")
      return PreMembrane::interval(net_from_json(require(j, "a", "interval"), grid, s),
                                   net_from_json(require(j, "b", "interval"), grid, s), cbox);
    if (variant == "box") {
      const json& axes = require(j, "axes", "box membrane");
      if (!axes.is_array()) throw InputError("box axes must be an array of [a, b] pairs");
      std::vector<IntervalRegion> iv;
      for (const auto& ax : axes) {
        if (!ax.is_array() || ax.size() != 2) throw InputError("box axes must be an array of [a, b] pairs");
        iv.push_back({net_from_json(ax[0], grid, s), net_from_json(ax[1], grid, s)});
      }
      return PreMembrane::box(std::move(iv), cbox);
    }
    if (variant == "ball") {
      GenNet center = net_from_json(require(j, "center", "ball membrane"), grid, s);
      return PreMembrane::ball(std::move(center), net_from_json(require(j, "radius", "ball membrane"), grid, s),
                               cbox);
    }
    if (variant == "indicator") {
      const json& p = require(j, "predicate", "indicator membrane");
      if (!p.is_string()) throw InputError("indicator predicate must be a string");
      return PreMembrane::indicator(p.get<std::string>(), box_from_json(require(j, "bounding_box", "indicator")),
                                    cbox, grid);
    }
    throw InputError("unknown membrane variant '" + variant + "'");
  }();
  if (j.contains("perturbation")) {
    const json& p = j.at("perturbation");
    const Box pbox = p.contains("box") ? box_from_json(p.at("box")) : M.compact_box();
    auto psi = std::make_shared<const NullPerturbation>(
        NullPerturbation::make(string_list(require(p, "psi", "perturbation"), "perturbation psi"), pbox, grid));
    M = perturb(M, psi);
  }
  return M;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace mcalc
