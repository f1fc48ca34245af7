#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatsum/validate.hpp"

namespace heatsum::cli {

// One row of the report/estimate table. Empty optionals serialize as empty
// fields, never "NaN".
struct TableRow {
  std::string scenario;
  std::string theorem_case;
  std::optional<double> t;
  std::optional<double> abs_x;
  std::optional<double> abs_y;
  std::optional<double> oracle_p;
  std::optional<double> structural;
  std::optional<double> fitted_c;
  std::optional<double> fitted_b;
  std::optional<double> ratio;
  std::string verdict;
};

// Shortest representation at 9 significant digits.
std::string format_value(double v);

// RFC-4180-style quoting: fields containing separators or quotes are wrapped
// and inner quotes doubled. LF line endings.
std::string csv_escape(const std::string& field);

std::string emit_rows(const std::vector<TableRow>& rows);

// Stable column order: scenario, theorem_case, t, abs_x, abs_y, oracle_p,
// structural, fitted_C, fitted_b, ratio, verdict.
std::string emit_table(const std::vector<validate::FitReport>& reports);

// Inverse of emit_rows, for round-trip checks and downstream tooling.
std::vector<TableRow> parse_table(const std::string& csv);

}  // namespace heatsum::cli
