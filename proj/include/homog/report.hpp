#pragma once

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "homog/bench.hpp"
#include "homog/cell.hpp"
#include "homog/corrector.hpp"
#include "homog/macro.hpp"

namespace homog {

using json = nlohmann::ordered_json;

/// Locale-free decimal with 17 significant digits; non-finite values become null in JSON.
inline std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

namespace detail {

inline void write_json(std::ostringstream& os, const json& j, int indent, int depth) {
  const auto pad = [&](int d) {
    if (indent > 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        os << json(k).dump() << (indent > 0 ? ": " : ":");
        write_json(os, v, indent, depth + 1);
      }
      pad(depth);
      os << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        write_json(os, v, indent, depth + 1);
      }
      pad(depth);
      os << ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? format_number(v) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Serializes with 17-significant-digit floats, so equal inputs give byte-identical text.
inline std::string dump_json(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  if (indent > 0) os << '\n';
  return os.str();
}

inline json to_json(const Tensor& t) {
  json rows = json::array();
  for (int i = 0; i < t.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < t.dim(); ++j) row.push_back(t(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Vec& v, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const EffectiveModel& m) {
  return {{"dim", m.K0.dim()}, {"K0", to_json(m.K0)}, {"lambda", m.lambda}, {"Lambda", m.Lambda},
          {"n", m.n},          {"residuals", m.residuals}};
}

inline json to_json(const ErrorReport& r) {
  return {{"dim", r.dim},         {"l", r.l},       {"D", r.D},   {"eps", r.eps},
          {"cells_per_period", r.cells_per_period}, {"e_L2", r.e_L2}, {"e_H1", r.e_H1},
          {"e_energy", r.e_energy}, {"e_H1_p0", r.e_H1_p0}, {"E", r.E},   {"E0", r.E0}};
}

inline json to_json(const RateVerdict& v) {
  json j{{"metric", v.expected.metric}, {"mode", v.expected.mode}, {"expected_rate", v.expected.rate},
         {"rate_tolerance", v.expected.tolerance}};
  j["fitted_rate"] = v.fit ? json(v.fit->rate) : json(nullptr);
  j["prefactor"] = v.fit ? json(v.fit->prefactor) : json(nullptr);
  j["r2"] = v.fit ? json(v.fit->r2) : json(nullptr);
  j["expected_prefactor"] = v.expected.prefactor ? json(*v.expected.prefactor) : json(nullptr);
  if (!v.error.empty()) j["error"] = v.error;
  j["pass"] = v.pass;
  return j;
}

// ---------------------------------------------------------------------------------------------
// CSV

inline constexpr const char* error_report_header = "dim,l,D,eps,m_per_period,e_L2,e_H1,e_energy";

inline std::string csv_row(const ErrorReport& r) {
  return std::to_string(r.dim) + ',' + format_number(r.l) + ',' + format_number(r.D) + ',' + format_number(r.eps) +
         ',' + std::to_string(r.cells_per_period) + ',' + format_number(r.e_L2) + ',' + format_number(r.e_H1) + ',' +
         format_number(r.e_energy);
}

/// One row per sweep point; failed points keep their position with empty metrics.
inline std::string sweep_csv(const SweepPlan& plan, const SweepResult& result) {
  std::string out = std::string(error_report_header) + ",status\n";
  for (std::size_t k = 0; k < result.points.size(); ++k) {
    const auto& pt = result.points[k];
    if (pt.ok) {
      out += csv_row(pt.report) + ",ok\n";
    } else {
      const double D = plan.l * plan.ratios[k];
      out += std::to_string(plan.field.dim) + ',' + format_number(plan.l) + ',' + format_number(D) + ',' +
             format_number(plan.l / D) + ',' + std::to_string(plan.cells_per_period) + ",,,,failed\n";
    }
  }
  return out;
}

/// Nodal fields on the macro grid: coordinates, p, p0, p1.
inline std::string fields_csv(const TwoScaleRun& run) {
  const auto& g = run.p.grid();
  std::string out = g.dim() == 1 ? "x,p,p0,p1\n" : "x,y,p,p0,p1\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.coordinate(i);
    out += format_number(x[0]) + ',';
    if (g.dim() == 2) out += format_number(x[1]) + ',';
    out += format_number(run.p[i]) + ',' + format_number(run.p0[i]) + ',' + format_number(run.p1[i]) + '\n';
  }
  return out;
}

}  // namespace homog
