#pragma once

// SweepReport: the JSON document written by `thermi sweep`, plus its CSV
// mirror. Doubles are written in shortest round-trip form so that
// report_from_json(report_to_json(r)) == r.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermi/config.hpp"
#include "thermi/errors.hpp"
#include "thermi/quadrature.hpp"

namespace thermi {

struct SweepRecord {
  double beta = 0.0;
  double snr_db = 0.0;
  std::optional<double> mi_thermo_generalized;
  std::optional<double> mi_thermo_classical;
  std::optional<double> mi_gsv;
  std::optional<double> mi_closed_form;
  double mmse = 0.0;
  /// Absent when beta is too small for the centered difference.
  std::optional<double> gsv_residual;
  double identity_residual_max = 0.0;
  /// Only filled in with --timing, so default reports stay byte-identical.
  std::optional<double> runtime_ms;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct ReportHeader {
  json prior;
  QuadratureConfig quadrature;
  std::uint64_t oracle_seed = 0;
  std::int64_t mc_samples = 0;
  std::vector<std::string> routes;
  std::string tool_version;

  friend bool operator==(const ReportHeader&, const ReportHeader&) = default;
};

struct SweepReport {
  ReportHeader header;
  std::vector<SweepRecord> records;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

namespace detail {

inline void put_optional(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

inline std::optional<double> get_optional(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace detail

inline json record_to_json(const SweepRecord& r) {
  json j;
  j["beta"] = r.beta;
  j["snr_db"] = r.snr_db;
  detail::put_optional(j, "mi_thermo_generalized", r.mi_thermo_generalized);
  detail::put_optional(j, "mi_thermo_classical", r.mi_thermo_classical);
  detail::put_optional(j, "mi_gsv", r.mi_gsv);
  detail::put_optional(j, "mi_closed_form", r.mi_closed_form);
  j["mmse"] = r.mmse;
  detail::put_optional(j, "gsv_residual", r.gsv_residual);
  j["identity_residual_max"] = r.identity_residual_max;
  detail::put_optional(j, "runtime_ms", r.runtime_ms);
  return j;
}

inline SweepRecord record_from_json(const json& j) {
  SweepRecord r;
  r.beta = j.at("beta").get<double>();
  r.snr_db = j.at("snr_db").get<double>();
  r.mi_thermo_generalized = detail::get_optional(j, "mi_thermo_generalized");
  r.mi_thermo_classical = detail::get_optional(j, "mi_thermo_classical");
  r.mi_gsv = detail::get_optional(j, "mi_gsv");
  r.mi_closed_form = detail::get_optional(j, "mi_closed_form");
  r.mmse = j.at("mmse").get<double>();
  r.gsv_residual = detail::get_optional(j, "gsv_residual");
  r.identity_residual_max = j.at("identity_residual_max").get<double>();
  r.runtime_ms = detail::get_optional(j, "runtime_ms");
  return r;
}

inline json report_to_json(const SweepReport& rep) {
  json header;
  header["prior"] = rep.header.prior;
  header["quadrature"] = quadrature_to_json(rep.header.quadrature);
  header["oracle"] = json{{"seed", rep.header.oracle_seed}, {"mc_samples", rep.header.mc_samples}};
  header["routes"] = rep.header.routes;
  header["tool_version"] = rep.header.tool_version;
  json records = json::array();
  for (const auto& r : rep.records) records.push_back(record_to_json(r));
  return json{{"header", header}, {"records", records}};
}

inline SweepReport report_from_json(const json& j) {
  SweepReport rep;
  try {
    const json& h = j.at("header");
    rep.header.prior = h.at("prior");
    rep.header.quadrature = quadrature_from_json(h.at("quadrature"));
    rep.header.oracle_seed = h.at("oracle").at("seed").get<std::uint64_t>();
    rep.header.mc_samples = h.at("oracle").at("mc_samples").get<std::int64_t>();
    rep.header.routes = h.at("routes").get<std::vector<std::string>>();
    rep.header.tool_version = h.at("tool_version").get<std::string>();
    for (const auto& r : j.at("records")) rep.records.push_back(record_from_json(r));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed report: ") + e.what());
  }
  return rep;
}

inline std::string format_report(const SweepReport& rep) { return report_to_json(rep).dump(2) + "\n"; }

namespace detail {

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_cell(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "beta,snr_db,mi_generalized,mi_classical,mi_gsv,mi_closed,mmse,gsv_residual";

/// One row per record; missing values are empty cells. No cell ever needs
/// quoting since every field is numeric.
inline void write_csv(const SweepReport& rep, std::ostream& out) {
  out << kCsvHeader << "\r\n";
  for (const auto& r : rep.records) {
    out << detail::csv_number(r.beta) << ',' << detail::csv_number(r.snr_db) << ','
        << detail::csv_cell(r.mi_thermo_generalized) << ',' << detail::csv_cell(r.mi_thermo_classical)
        << ',' << detail::csv_cell(r.mi_gsv) << ',' << detail::csv_cell(r.mi_closed_form) << ','
        << detail::csv_number(r.mmse) << ',' << detail::csv_cell(r.gsv_residual) << "\r\n";
  }
}

}  // namespace thermi
