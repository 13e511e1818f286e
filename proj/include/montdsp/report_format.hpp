#pragma once

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "montdsp/harness.hpp"

namespace montdsp {

enum class ReportFormat { Csv, Json, Table };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "table") return ReportFormat::Table;
  throw UsageError("unknown report format '" + std::string(s) + "' (expected csv, json or table)");
}

inline std::string_view extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
    case ReportFormat::Table: return "txt";
  }
  return "txt";
}

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Integers print without a fraction, everything else with four digits.
inline std::string number(double v) {
  return v == std::floor(v) && std::abs(v) < 1e15 ? std::to_string(static_cast<long long>(v)) : fixed(v, 4);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_report_csv(std::ostream& os, const Report& rep) {
  os << "table,item,word,metric,model,reference,delta_pct,ratio,allowed,verdict,note\n";
  for (const auto& c : rep.cells) {
    os << c.table << ',' << c.item << ',' << c.word << ',' << c.metric << ',' << detail::number(c.model) << ','
       << detail::number(c.reference) << ',' << detail::fixed(c.delta_pct(), 2) << ','
       << (c.ratio > 0 ? detail::fixed(c.ratio, 4) : "") << ',' << detail::csv_quote(c.allowed) << ','
       << to_string(c.verdict) << ',' << detail::csv_quote(c.note) << '\n';
  }
}

inline nlohmann::json report_to_json(const Report& rep) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : rep.cells) {
    nlohmann::json j = {{"table", c.table},         {"item", c.item},           {"word", c.word},
                        {"metric", c.metric},       {"model", c.model},         {"reference", c.reference},
                        {"delta_pct", c.delta_pct()}, {"allowed", c.allowed}, {"verdict", to_string(c.verdict)},
                        {"note", c.note}};
    if (c.ratio > 0) j["ratio"] = c.ratio;
    cells.push_back(std::move(j));
  }
  return {{"pass", rep.pass()},
          {"counts",
           {{"PASS", rep.count(Verdict::Pass)},
            {"DEVIATION", rep.count(Verdict::Deviation)},
            {"FLAGGED", rep.count(Verdict::Flagged)},
            {"FAIL", rep.count(Verdict::Fail)}}},
          {"cells", cells}};
}

inline void write_report_json(std::ostream& os, const Report& rep) { os << report_to_json(rep).dump(2) << '\n'; }

inline void write_report_table(std::ostream& os, const Report& rep) {
  os << std::left << std::setw(11) << "table" << std::setw(10) << "item" << std::setw(5) << "word" << std::setw(12)
     << "metric" << std::right << std::setw(10) << "model" << std::setw(10) << "reference" << std::setw(9) << "delta%"
     << std::setw(8) << "ratio" << "  " << std::left << "verdict\n";
  for (const auto& c : rep.cells) {
    os << std::left << std::setw(11) << c.table << std::setw(10) << c.item << std::setw(5) << c.word << std::setw(12)
       << c.metric << std::right << std::setw(10) << detail::number(c.model) << std::setw(10)
       << detail::number(c.reference) << std::setw(9) << detail::fixed(c.delta_pct(), 2) << std::setw(8)
       << (c.ratio > 0 ? detail::fixed(c.ratio, 3) : "-") << "  " << to_string(c.verdict);
    if (!c.note.empty()) os << "  (" << c.note << ')';
    os << '\n';
  }
}

inline void write_report(std::ostream& os, const Report& rep, ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: write_report_csv(os, rep); break;
    case ReportFormat::Json: write_report_json(os, rep); break;
    case ReportFormat::Table: write_report_table(os, rep); break;
  }
}

}  // namespace montdsp
