#pragma once

// JSON forms of nets, membranes, histories and run configuration.

#include <string>

#include <json.hpp>

#include "mcalc/config.hpp"
#include "mcalc/gennum.hpp"
#include "mcalc/history.hpp"
#include "mcalc/membrane.hpp"

namespace mcalc {

using json = nlohmann::json;

/// Grid, classification thresholds and node counts of one run.
struct RunConfig {
  int k_min = 4;
  int k_max = 48;
  double per_decade = 4.0;
  std::size_t tail_len = 16;
  ClassifyConfig classify;
  QuadConfig quad;
  std::string format = "json";

  GridPtr make_grid() const;
  void validate() const;
};

/// Reads nested ({"grid": {"k_min": 4}}) or dotted ({"grid.k_min": 4}) keys
/// over the defaults in `cfg`. Unknown keys are an InputError.
void apply_config(const json& j, RunConfig& cfg);

/// Everything except the worker count, which never changes results.
json config_to_json(const RunConfig& cfg);

/// { "grid": [...], "values": [...] } with "arity"/"complex" for
/// non-scalar or complex nets.
json net_to_json(const GenNet& a);
/// { "valuation": v | "+inf" | null, "kind": ..., "residual": ... }.
json class_to_json(const NetClass& c);
/// { "net": ..., "class": ... }.
json result_to_json(const GenNet& a, const ClassifyConfig& cfg);

/// Net specifications:
///  - a number: constant net;
///  - "alpha:r" (r a number, or "s" for the caller's `s`): the gauge ε^r;
///  - any other string: an expression in eps evaluated per sample;
///  - an array of specifications: a vector net;
///  - an object { "grid", "values" [, "arity", "complex", "floor"] } whose
///    grid must match `grid`.
GenNet net_from_json(const json& j, const GridPtr& grid, double s = 1.0);

/// { "curve": [...], "growth": {"c", "N"}, "flags": {...}, "compact_box": [[lo, hi], ...] }.
/// Without "compact_box" the box is the sampled tail image padded by 1e-9.
History history_from_json(const json& j, const GridPtr& grid);

/// { "variant": "interval"|"box"|"ball"|"indicator", ..., "compact_box": [...] }
/// with an optional "perturbation": { "psi": [...], "box": [...] }.
PreMembrane membrane_from_json(const json& j, const GridPtr& grid, double s = 1.0);

Box box_from_json(const json& j);

/// Reads and parses a JSON file; failures are InputError.
json read_json_file(const std::string& path);

}  // namespace mcalc
