// Tabular report rows shared by every CLI subcommand.
//
// All commands write the same fixed column set; a command fills the columns
// it computes and leaves the rest absent.  Absent cells serialize as empty
// CSV fields (omitted keys in JSON), while non-finite values are spelled out
// as inf/-inf/nan so a degenerate result is visible instead of silently
// swallowed.  Numbers are printed with 17 significant digits in the C locale
// with '\n' line ends, which makes reports byte-reproducible across runs.
#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bumplab {

// Column order of the report table.  Shared prefix first, then the blocks
// owned by the individual subcommands.
inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      // identity
      "id", "command", "p", "dimension", "depth", "seed",
      // bump and Muckenhoupt constants
      "ap", "separated_sw", "separated_ws", "entangled_sw_one_plus_rho",
      "entangled_ws_one_plus_rho", "entangled_sw_rho", "entangled_ws_rho",
      // sparse testing and norm
      "testing_forward", "testing_dual", "testing_max", "norm",
      "norm_converged", "norm_iterations", "sandwich_ratio",
      // corona strata
      "stratum", "alpha", "blocks", "degenerate_blocks", "tsharp_failures",
      "r_quasiorth", "r_epssum", "r_rhodecay", "r_holder", "r_sw", "r_packing",
      "worst_block",
      // self-improvement
      "eta", "eta_prime", "hypothesis", "conclusion", "prop_ratio", "r_theta",
      "r_ep", "r_chain", "eps_scale", "eps_quadrature", "prop_skipped",
      // objectives and search
      "theorem_ratio", "conjecture_ratio", "start_objective", "best_objective",
      "accepted_moves", "rejected_infinite", "t0",
      // deterministic cost proxy (structural operation count, not seconds)
      "runtime"};
  return cols;
}

class ReportRow {
 public:
  std::string id;
  std::string command;

  void set(const std::string& column, double value) {
    for (auto& kv : values_)
      if (kv.first == column) {
        kv.second = value;
        return;
      }
    values_.emplace_back(column, value);
  }

  std::optional<double> get(const std::string& column) const {
    for (const auto& kv : values_)
      if (kv.first == column) return kv.second;
    return std::nullopt;
  }

 private:
  std::vector<std::pair<std::string, double>> values_;
};

namespace detail {

// Shortest-faithful decimal form: 17 significant digits round-trip any
// double, but trailing zeros are trimmed so common values stay readable.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  bool needs_quotes = false;
  for (char c : s)
    if (c == ',' || c == '"' || c == '\n') needs_quotes = true;
  if (!needs_quotes) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string csv_header() {
  std::string line;
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) line += ',';
    line += cols[i];
  }
  line += '\n';
  return line;
}

inline std::string csv_line(const ReportRow& row) {
  std::string line;
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) line += ',';
    if (cols[i] == "id") {
      line += detail::csv_escape(row.id);
    } else if (cols[i] == "command") {
      line += detail::csv_escape(row.command);
    } else if (auto v = row.get(cols[i])) {
      line += detail::format_number(*v);
    }
  }
  line += '\n';
  return line;
}

inline std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::string out = csv_header();
  for (const auto& row : rows) out += csv_line(row);
  return out;
}

// JSON form: {"version":1,"rows":[{...},...]}.  Keys follow the column
// order, absent columns are omitted, and non-finite values become strings
// so the document stays standard JSON.
inline std::string rows_to_json(const std::vector<ReportRow>& rows) {
  std::string out = "{\n  \"version\": 1,\n  \"rows\": [";
  const auto& cols = report_columns();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += r ? ",\n    {" : "\n    {";
    bool first = true;
    auto emit_key = [&](const std::string& key) {
      if (!first) out += ", ";
      first = false;
      out += '"';
      out += detail::json_escape(key);
      out += "\": ";
    };
    for (const auto& col : cols) {
      if (col == "id") {
        emit_key(col);
        out += '"' + detail::json_escape(rows[r].id) + '"';
      } else if (col == "command") {
        emit_key(col);
        out += '"' + detail::json_escape(rows[r].command) + '"';
      } else if (auto v = rows[r].get(col)) {
        emit_key(col);
        if (std::isfinite(*v))
          out += detail::format_number(*v);
        else
          out += '"' + detail::format_number(*v) + '"';
      }
    }
    out += '}';
  }
  out += rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

inline std::string serialize_rows(const std::vector<ReportRow>& rows,
                                  const std::string& format) {
  if (format == "csv") return rows_to_csv(rows);
  if (format == "json") return rows_to_json(rows);
  throw std::invalid_argument("unknown report format: " + format);
}

}  // namespace bumplab
