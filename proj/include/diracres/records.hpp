#pragma once

// Plot-ready persistence: CSV rows for resonances and scattering samples,
// JSON for reports.  All formatting is locale-independent with '.' decimals,
// LF line endings, and shortest round-trip doubles, so identical inputs
// produce bitwise-identical files.

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <diracres/common.hpp>
#include <diracres/scattering.hpp>
#include <diracres/trace.hpp>
#include <diracres/zerosearch.hpp>

namespace diracres {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

inline std::string resonance_csv(const std::vector<Resonance>& rows) {
  std::string out =
      "re_lambda,im_lambda,multiplicity,residual,sheet,method,flags\n";
  for (const Resonance& r : rows) {
    out += format_double(r.lambda.real());
    out += ',';
    out += format_double(r.lambda.imag());
    out += ',';
    out += std::to_string(r.multiplicity);
    out += ',';
    out += format_double(r.residual);
    out += ',';
    out += to_string(r.sheet);
    out += ',';
    out += to_string(r.method);
    out += ',';
    out += join_flags(r.flags);
    out += '\n';
  }
  return out;
}

inline std::string scattering_csv(const std::vector<ShiftSample>& rows) {
  std::string out = "lambda,re_s,im_s,xi,unitarity_residual\n";
  for (const ShiftSample& r : rows) {
    out += format_double(r.lambda);
    out += ',';
    out += format_double(r.s.real());
    out += ',';
    out += format_double(r.s.imag());
    out += ',';
    out += format_double(r.xi);
    out += ',';
    out += format_double(r.unitarity_residual);
    out += '\n';
  }
  return out;
}

inline nlohmann::json trace_report_json(const TraceReport& r) {
  nlohmann::json j;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["rhs_tail_estimate"] = r.rhs_tail_estimate;
  j["truncation_radius"] = r.truncation_radius;
  j["breakdown"] = {{"continuous_integral", r.continuous_integral},
                    {"boundary_terms", r.boundary_terms},
                    {"discrete_sum_lhs", r.discrete_sum_lhs},
                    {"resonance_sum_upper", r.resonance_sum_upper},
                    {"resonance_sum_lower", r.resonance_sum_lower},
                    {"discrete_sum_rhs", r.discrete_sum_rhs},
                    {"gap_diagnostic", r.gap_diagnostic}};
  j["difference"] = r.difference;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["threshold_warning"] = r.threshold_warning;
  j["imag_residual"] = r.imag_residual;
  return j;
}

struct VerifyCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline nlohmann::json verify_report_json(const std::vector<VerifyCheck>& cs) {
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const VerifyCheck& c : cs) {
    arr.push_back({{"name", c.name},
                   {"residual", c.residual},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
    all = all && c.pass;
  }
  return {{"checks", arr}, {"all_pass", all}};
}

}  // namespace diracres
