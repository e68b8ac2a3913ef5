#pragma once

// Run configuration: JSON load with strict key checking, range validation
// that reports every violation at once, and builders for the objects a run
// needs.  The effective (default-filled) config can be re-serialized so
// every artifact records exactly what produced it.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <diracres/common.hpp>
#include <diracres/potential.hpp>
#include <diracres/quadrature.hpp>
#include <diracres/zerosearch.hpp>

namespace diracres {

struct RunConfig {
  // potential
  PotentialChannel channel = PotentialChannel::ElectricI4;
  double g = 2.0;
  double R0 = 1.0;
  Mat4 custom = Mat4::Identity();
  bool has_custom = false;
  // grids
  int cells_per_axis = 8;
  int gauss_order = 2;
  int polar_order = 16;
  int azimuthal_count = 32;
  double margin = 0.25;  // cutoff margin as a fraction of R0
  // search
  SearchRegion region{0.2, 3.0, -1.5, -0.01, Sheet::Second, 14, 16};
  FindOptions find;
  // trace
  double trace_t0 = 3.0;
  double trace_w = 1.0;
  double trace_Lambda = 4.0;
  double trace_Lambda_max = 48.0;
  // misc
  unsigned seed = 1234;
};

namespace config_detail {

using nlohmann::json;

inline void require_keys(const json& j, const std::string& block,
                         std::initializer_list<const char*> allowed,
                         std::vector<std::string>& errs) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) { ok = true; break; }
    if (!ok) errs.push_back("unknown key '" + block + "." + it.key() + "'");
  }
}

template <class T>
void fetch(const json& j, const char* key, T& slot,
           const std::string& block, std::vector<std::string>& errs) {
  if (!j.contains(key)) return;
  try {
    slot = j.at(key).get<T>();
  } catch (const json::exception& e) {
    errs.push_back("bad value for '" + block + "." + key + "': " + e.what());
  }
}

}  // namespace config_detail

inline RunConfig parse_config(const nlohmann::json& root) {
  using config_detail::fetch;
  using config_detail::require_keys;
  using nlohmann::json;

  RunConfig c;
  std::vector<std::string> errs;
  require_keys(root, "",
               {"potential", "grids", "search", "trace", "seed"}, errs);

  if (root.contains("potential")) {
    const json& p = root.at("potential");
    require_keys(p, "potential", {"channel", "g", "R0", "custom"}, errs);
    std::string ch = to_string(c.channel);
    fetch(p, "channel", ch, "potential", errs);
    if (ch == "ElectricI4") c.channel = PotentialChannel::ElectricI4;
    else if (ch == "ScalarBeta") c.channel = PotentialChannel::ScalarBeta;
    else if (ch == "CustomHermitian") c.channel = PotentialChannel::CustomHermitian;
    else errs.push_back("potential.channel: unknown channel '" + ch + "'");
    fetch(p, "g", c.g, "potential", errs);
    fetch(p, "R0", c.R0, "potential", errs);
    if (p.contains("custom")) {
      c.has_custom = true;
      try {
        const auto entries =
            p.at("custom").get<std::vector<std::array<double, 2>>>();
        if (entries.size() != 16) {
          errs.push_back("potential.custom: expected 16 row-major entries");
        } else {
          for (int r = 0; r < 4; ++r)
            for (int col = 0; col < 4; ++col)
              c.custom(r, col) = Complex(entries[4 * r + col][0],
                                         entries[4 * r + col][1]);
        }
      } catch (const json::exception& e) {
        errs.push_back(std::string("potential.custom: ") + e.what());
      }
    }
  }

  if (root.contains("grids")) {
    const json& gr = root.at("grids");
    require_keys(gr, "grids",
                 {"cells_per_axis", "gauss_order", "polar_order",
                  "azimuthal_count", "margin"},
                 errs);
    fetch(gr, "cells_per_axis", c.cells_per_axis, "grids", errs);
    fetch(gr, "gauss_order", c.gauss_order, "grids", errs);
    fetch(gr, "polar_order", c.polar_order, "grids", errs);
    fetch(gr, "azimuthal_count", c.azimuthal_count, "grids", errs);
    fetch(gr, "margin", c.margin, "grids", errs);
  }

  if (root.contains("search")) {
    const json& s = root.at("search");
    require_keys(s, "search",
                 {"region", "sheet", "max_depth", "tolerances"}, errs);
    if (s.contains("region")) {
      const json& r = s.at("region");
      require_keys(r, "search.region",
                   {"re_min", "re_max", "im_min", "im_max"}, errs);
      fetch(r, "re_min", c.region.re_min, "search.region", errs);
      fetch(r, "re_max", c.region.re_max, "search.region", errs);
      fetch(r, "im_min", c.region.im_min, "search.region", errs);
      fetch(r, "im_max", c.region.im_max, "search.region", errs);
    }
    std::string sheet = to_string(c.region.sheet);
    fetch(s, "sheet", sheet, "search", errs);
    if (sheet == "Physical") c.region.sheet = Sheet::Physical;
    else if (sheet == "Second") c.region.sheet = Sheet::Second;
    else errs.push_back("search.sheet: unknown sheet '" + sheet + "'");
    fetch(s, "max_depth", c.region.max_depth, "search", errs);
    if (s.contains("tolerances")) {
      const json& t = s.at("tolerances");
      require_keys(t, "search.tolerances",
                   {"min_box", "newton_rel_tol", "boundary_floor"}, errs);
      fetch(t, "min_box", c.find.min_box, "search.tolerances", errs);
      fetch(t, "newton_rel_tol", c.find.newton_rel_tol, "search.tolerances",
            errs);
      fetch(t, "boundary_floor", c.find.winding.boundary_floor,
            "search.tolerances", errs);
    }
  }

  if (root.contains("trace")) {
    const json& t = root.at("trace");
    require_keys(t, "trace", {"t0", "w", "Lambda", "Lambda_max"}, errs);
    fetch(t, "t0", c.trace_t0, "trace", errs);
    fetch(t, "w", c.trace_w, "trace", errs);
    fetch(t, "Lambda", c.trace_Lambda, "trace", errs);
    fetch(t, "Lambda_max", c.trace_Lambda_max, "trace", errs);
  }

  fetch(root, "seed", c.seed, "", errs);

  // range validation, collecting every violation
  if (!(c.g == c.g)) errs.push_back("potential.g: not a number");
  if (!(c.R0 > 0.0)) errs.push_back("potential.R0: must be positive");
  if (c.channel == PotentialChannel::CustomHermitian) {
    const double defect = (c.custom - c.custom.adjoint()).norm();
    if (defect > 1e-12)
      errs.push_back("potential.custom: matrix is not Hermitian (defect " +
                     std::to_string(defect) + " vs M = M*)");
  } else if (c.has_custom) {
    errs.push_back("potential.custom: only valid with channel CustomHermitian");
  }
  if (c.cells_per_axis < 2)
    errs.push_back("grids.cells_per_axis: must be >= 2");
  if (c.gauss_order < 1 || c.gauss_order > 6)
    errs.push_back("grids.gauss_order: must be in [1,6]");
  if (c.polar_order < 4) errs.push_back("grids.polar_order: must be >= 4");
  if (c.azimuthal_count < 8)
    errs.push_back("grids.azimuthal_count: must be >= 8");
  if (!(c.margin > 0.0) || !(c.margin < 4.0))
    errs.push_back("grids.margin: must be in (0,4)");
  if (!(c.region.re_min < c.region.re_max) ||
      !(c.region.im_min < c.region.im_max))
    errs.push_back("search.region: empty rectangle");
  if (c.region.max_depth < 1 || c.region.max_depth > 40)
    errs.push_back("search.max_depth: must be in [1,40]");
  if (!(c.find.min_box > 0.0))
    errs.push_back("search.tolerances.min_box: must be positive");
  if (!(c.find.newton_rel_tol > 0.0))
    errs.push_back("search.tolerances.newton_rel_tol: must be positive");
  if (!(c.find.winding.boundary_floor > 0.0))
    errs.push_back("search.tolerances.boundary_floor: must be positive");
  if (!(c.trace_w > 0.0)) errs.push_back("trace.w: must be positive");
  if (!(c.trace_t0 - c.trace_w > 0.0) && !(c.trace_t0 + c.trace_w < 0.0))
    errs.push_back("trace.t0/w: bump support must avoid t = 0");
  if (!(c.trace_Lambda > 1.0)) errs.push_back("trace.Lambda: must be > 1");
  if (!(c.trace_Lambda_max >= 32.0))
    errs.push_back("trace.Lambda_max: must be >= 32");

  if (!errs.empty()) {
    std::string msg = "config validation failed:";
    for (const std::string& e : errs) msg += "\n  - " + e;
    throw ValidationError(msg);
  }
  return c;
}

inline RunConfig load_config_text(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config parse: ") + e.what());
  }
  return parse_config(root);
}

// Effective config with all defaults filled, for the reproducibility echo.
inline nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json root;
  root["potential"] = {{"channel", to_string(c.channel)},
                       {"g", c.g},
                       {"R0", c.R0}};
  if (c.channel == PotentialChannel::CustomHermitian) {
    std::vector<std::array<double, 2>> entries;
    for (int r = 0; r < 4; ++r)
      for (int col = 0; col < 4; ++col)
        entries.push_back({c.custom(r, col).real(), c.custom(r, col).imag()});
    root["potential"]["custom"] = entries;
  }
  root["grids"] = {{"cells_per_axis", c.cells_per_axis},
                   {"gauss_order", c.gauss_order},
                   {"polar_order", c.polar_order},
                   {"azimuthal_count", c.azimuthal_count},
                   {"margin", c.margin}};
  root["search"] = {
      {"region",
       {{"re_min", c.region.re_min},
        {"re_max", c.region.re_max},
        {"im_min", c.region.im_min},
        {"im_max", c.region.im_max}}},
      {"sheet", to_string(c.region.sheet)},
      {"max_depth", c.region.max_depth},
      {"tolerances",
       {{"min_box", c.find.min_box},
        {"newton_rel_tol", c.find.newton_rel_tol},
        {"boundary_floor", c.find.winding.boundary_floor}}}};
  root["trace"] = {{"t0", c.trace_t0},
                   {"w", c.trace_w},
                   {"Lambda", c.trace_Lambda},
                   {"Lambda_max", c.trace_Lambda_max}};
  root["seed"] = c.seed;
  return root;
}

inline MatrixPotential make_potential(const RunConfig& c) {
  MatrixPotential V;
  V.R0 = c.R0;
  V.channel = c.channel;
  V.g = c.g;
  V.custom = c.custom;
  return V;
}

// Everything a 3D pipeline stage needs, built once per run.
struct Workspace {
  MatrixPotential V;
  CutoffProfile chi;
  VolumeQuadrature quad;
  SphereQuadrature sphere;
};

inline Workspace make_workspace(const RunConfig& c) {
  Workspace w;
  w.V = make_potential(c);
  w.chi = make_cutoff(c.R0, c.margin);
  w.quad = build_volume_quadrature(c.R0, c.margin * c.R0, c.cells_per_axis,
                                   c.gauss_order);
  w.sphere = build_sphere_quadrature(c.polar_order, c.azimuthal_count);
  return w;
}

}  // namespace diracres
