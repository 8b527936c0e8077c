#pragma once

// CSV and JSON serialization of analysis records.
//
// CSV header (k = spectrum head length, q in request order):
//   label,N,E_<q>...,N_E,e_max,regime,saturation,sigma_r,
//   spectrum_1..spectrum_k,sum_1,sum_2,sum_5,sum_10[,E2_approx]
// Missing values are empty fields. Numbers use 12 significant digits.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "histent/analysis.hpp"
#include "histent/error.hpp"

namespace histent {

inline constexpr const char* kVersion = "0.1.0";

enum class ReportFormat { Csv, Json };

/// Value as it survives a 12-significant-digit round trip.
inline double round_sig12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string order_key(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", q);
  return buf;
}

namespace detail {

inline nlohmann::ordered_json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig12(x);
}

inline double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline std::string base_name(LogBase b) { return b == LogBase::Bits ? "bits" : "nats"; }

inline LogBase base_from(const std::string& s) {
  if (s == "bits") return LogBase::Bits;
  if (s == "nats") return LogBase::Nats;
  throw Error(ErrorCode::InvalidArgument, "unknown log base '" + s + "'");
}

inline Regime regime_from(const std::string& s) {
  if (s == "I") return Regime::I;
  if (s == "II") return Regime::II;
  if (s == "III") return Regime::III;
  throw Error(ErrorCode::InvalidArgument, "unknown regime '" + s + "'");
}

inline std::vector<double> orders_of(const std::vector<AnalysisRecord>& records) {
  std::vector<double> qs;
  for (const auto& [q, e] : records.front().entropies) qs.push_back(q);
  return qs;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const AnalysisRecord& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["label"] = r.label;
  j["n"] = r.n;
  j["first_date"] = r.first_date;
  j["last_date"] = r.last_date;
  ordered_json ents = ordered_json::array();
  for (const auto& [q, e] : r.entropies)
    ents.push_back({{"q", round_sig12(q)}, {"value", detail::number_or_null(e.value)},
                    {"base", detail::base_name(e.base)}});
  j["entropies"] = std::move(ents);
  j["n_effective"] = detail::number_or_null(r.n_effective);
  j["e_max"] = detail::number_or_null(r.e_max);
  j["rank"] = r.rank;
  ordered_json head = ordered_json::array();
  for (double l : r.spectrum_head) head.push_back(detail::number_or_null(l));
  j["spectrum_head"] = std::move(head);
  ordered_json sums = ordered_json::object();
  for (const auto& [l, v] : r.partial_sums_at) sums[std::to_string(l)] = detail::number_or_null(v);
  j["partial_sums"] = std::move(sums);
  if (r.regime) {
    j["regime"] = std::string(to_string(r.regime->label));
    j["regime_strict"] = r.regime->strict;
    j["regime_step"] = r.regime_step;
  } else {
    j["regime"] = nullptr;
    j["regime_strict"] = nullptr;
    j["regime_step"] = nullptr;
  }
  j["saturated"] = r.saturated;
  j["sigma_r"] = detail::number_or_null(r.sigma_r);
  j["e2_incremental"] = r.e2_incremental ? detail::number_or_null(*r.e2_incremental) : nullptr;
  j["e2_approx_nats"] = r.e2_approx_nats ? detail::number_or_null(*r.e2_approx_nats) : nullptr;
  if (!r.spectrum.empty()) {
    ordered_json full = ordered_json::array();
    for (double l : r.spectrum) full.push_back(detail::number_or_null(l));
    j["spectrum"] = std::move(full);
  }
  return j;
}

inline AnalysisRecord record_from_json(const nlohmann::json& j) {
  AnalysisRecord r;
  try {
    r.label = j.at("label").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.first_date = j.at("first_date").get<std::string>();
    r.last_date = j.at("last_date").get<std::string>();
    for (const auto& e : j.at("entropies")) {
      const double q = e.at("q").get<double>();
      r.entropies[q] = {detail::number_from(e.at("value")),
                        detail::base_from(e.at("base").get<std::string>()), q};
    }
    r.n_effective = detail::number_from(j.at("n_effective"));
    r.e_max = detail::number_from(j.at("e_max"));
    r.rank = j.at("rank").get<std::size_t>();
    for (const auto& v : j.at("spectrum_head")) r.spectrum_head.push_back(detail::number_from(v));
    for (const auto& [k, v] : j.at("partial_sums").items())
      r.partial_sums_at[std::stoul(k)] = detail::number_from(v);
    if (!j.at("regime").is_null()) {
      r.regime = RegimeLabel{detail::regime_from(j.at("regime").get<std::string>()),
                             j.at("regime_strict").get<bool>()};
      r.regime_step = j.at("regime_step").get<std::size_t>();
    }
    r.saturated = j.at("saturated").get<bool>();
    r.sigma_r = detail::number_from(j.at("sigma_r"));
    if (!j.at("e2_incremental").is_null()) r.e2_incremental = j.at("e2_incremental").get<double>();
    if (!j.at("e2_approx_nats").is_null()) r.e2_approx_nats = j.at("e2_approx_nats").get<double>();
    if (j.contains("spectrum"))
      for (const auto& v : j.at("spectrum")) r.spectrum.push_back(detail::number_from(v));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed record: ") + e.what());
  }
  return r;
}

/// Parses the "records" array of an emitted JSON document.
inline std::vector<AnalysisRecord> records_from_json(const nlohmann::json& doc) {
  if (!doc.contains("records")) throw Error(ErrorCode::InvalidArgument, "document has no records");
  std::vector<AnalysisRecord> out;
  for (const auto& j : doc.at("records")) out.push_back(record_from_json(j));
  return out;
}

/// The record exactly as it reads back from emitted JSON.
inline AnalysisRecord rounded(AnalysisRecord r) {
  for (auto& [q, e] : r.entropies) e.value = round_sig12(e.value);
  r.n_effective = round_sig12(r.n_effective);
  r.e_max = round_sig12(r.e_max);
  for (double& l : r.spectrum_head) l = round_sig12(l);
  for (auto& [l, v] : r.partial_sums_at) v = round_sig12(v);
  r.sigma_r = round_sig12(r.sigma_r);
  if (r.e2_incremental) r.e2_incremental = round_sig12(*r.e2_incremental);
  if (r.e2_approx_nats) r.e2_approx_nats = round_sig12(*r.e2_approx_nats);
  for (double& l : r.spectrum) l = round_sig12(l);
  return r;
}

inline void emit_csv(const std::vector<AnalysisRecord>& records, std::ostream& out,
                     std::size_t head = 15) {
  const std::vector<double> qs = detail::orders_of(records);
  bool with_approx = false;
  for (const auto& r : records) with_approx = with_approx || r.e2_approx_nats.has_value();

  out << "label,N";
  for (double q : qs) out << ",E_" << order_key(q);
  out << ",N_E,e_max,regime,saturation,sigma_r";
  for (std::size_t k = 1; k <= head; ++k) out << ",spectrum_" << k;
  for (std::size_t l : kTrackedPartialSums) out << ",sum_" << l;
  if (with_approx) out << ",E2_approx";
  out << '\n';

  for (const auto& r : records) {
    out << r.label << ',' << r.n;
    for (double q : qs) {
      out << ',';
      if (const EntropyValue* e = r.entropy(q)) out << format_number(e->value);
    }
    out << ',' << format_number(r.n_effective) << ',' << format_number(r.e_max) << ',';
    if (r.regime) out << to_string(r.regime->label);
    out << ',' << (r.saturated ? 1 : 0) << ',' << format_number(r.sigma_r);
    for (std::size_t k = 0; k < head; ++k) {
      out << ',';
      if (k < r.spectrum_head.size()) out << format_number(r.spectrum_head[k]);
    }
    for (std::size_t l : kTrackedPartialSums) {
      out << ',';
      const auto it = r.partial_sums_at.find(l);
      if (it != r.partial_sums_at.end()) out << format_number(it->second);
    }
    if (with_approx) {
      out << ',';
      if (r.e2_approx_nats) out << format_number(*r.e2_approx_nats);
    }
    out << '\n';
  }
}

/// Document layout: {"metadata": {...}, "records": [...]}. The caller's
/// metadata is merged after the tool name and version.
inline void emit_json(const std::vector<AnalysisRecord>& records, std::ostream& out,
                      const nlohmann::ordered_json& metadata = {}) {
  nlohmann::ordered_json doc;
  doc["metadata"] = {{"tool", "histent"}, {"version", kVersion}};
  if (metadata.is_object())
    for (const auto& [k, v] : metadata.items()) doc["metadata"][k] = v;
  doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) doc["records"].push_back(to_json(r));
  out << doc.dump(2) << '\n';
}

inline void emit(const std::vector<AnalysisRecord>& records, ReportFormat format, std::ostream& out,
                 const nlohmann::ordered_json& metadata = {}, std::size_t head = 15) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to emit");
  if (format == ReportFormat::Csv)
    emit_csv(records, out, head);
  else
    emit_json(records, out, metadata);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write to output failed");
}

inline nlohmann::ordered_json to_json(const ComparisonReport& c) {
  return {{"scale", detail::number_or_null(c.scale)},
          {"pearson", detail::number_or_null(c.pearson)},
          {"spearman", detail::number_or_null(c.spearman)},
          {"paired_count", c.paired_count}};
}

inline nlohmann::ordered_json to_json(const ExtremalWindows& x) {
  auto one = [](const ExtremalWindow& w) {
    return nlohmann::ordered_json{{"index", w.index}, {"label", w.label},
                                  {"universal", w.universal}, {"tied", w.tied}};
  };
  return {{"max_entropy", one(x.max_entropy)}, {"min_entropy", one(x.min_entropy)}};
}

}  // namespace histent
