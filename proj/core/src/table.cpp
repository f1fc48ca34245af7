#include "heatsum/table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace heatsum::cli {

namespace {

constexpr const char* kHeader =
    "scenario,theorem_case,t,abs_x,abs_y,oracle_p,structural,fitted_C,fitted_b,ratio,verdict";

std::string opt(const std::optional<double>& v) {
  return v ? format_value(*v) : std::string();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string emit_rows(const std::vector<TableRow>& rows) {
  std::string out = kHeader;
  out.push_back('\n');
  for (const auto& r : rows) {
    out += csv_escape(r.scenario);
    out.push_back(',');
    out += csv_escape(r.theorem_case);
    for (const auto* v : {&r.t, &r.abs_x, &r.abs_y, &r.oracle_p, &r.structural, &r.fitted_c,
                          &r.fitted_b, &r.ratio}) {
      out.push_back(',');
      out += opt(*v);
    }
    out.push_back(',');
    out += csv_escape(r.verdict);
    out.push_back('\n');
  }
  return out;
}

std::string emit_table(const std::vector<validate::FitReport>& reports) {
  if (reports.empty()) throw DomainError("emit_table needs at least one report");
  std::vector<TableRow> rows;
  for (const auto& rep : reports) {
    for (const auto& s : rep.samples) {
      TableRow row;
      row.scenario = rep.scenario;
      row.theorem_case = rep.theorem_case;
      row.t = s.t;
      row.abs_x = s.abs_x;
      row.abs_y = s.abs_y;
      row.oracle_p = s.oracle_p;
      row.structural = s.estimate.structural;
      row.fitted_c = rep.fitted_c;
      row.fitted_b = rep.fitted_b;
      row.ratio = s.oracle_p / (rep.fitted_c * s.estimate.structural *
                                std::exp(-rep.fitted_b * s.estimate.gauss_exponent));
      row.verdict = rep.pass ? "pass" : "fail";
      rows.push_back(std::move(row));
    }
  }
  return emit_rows(rows);
}

std::vector<TableRow> parse_table(const std::string& csv) {
  std::vector<TableRow> rows;
  std::size_t pos = 0;
  bool first = true;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string::npos) eol = csv.size();
    std::string line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != kHeader) throw DomainError("unexpected table header");
      continue;
    }
    auto f = split_line(line);
    if (f.size() != 11) throw DomainError("malformed table row");
    TableRow row;
    row.scenario = f[0];
    row.theorem_case = f[1];
    row.t = parse_opt(f[2]);
    row.abs_x = parse_opt(f[3]);
    row.abs_y = parse_opt(f[4]);
    row.oracle_p = parse_opt(f[5]);
    row.structural = parse_opt(f[6]);
    row.fitted_c = parse_opt(f[7]);
    row.fitted_b = parse_opt(f[8]);
    row.ratio = parse_opt(f[9]);
    row.verdict = f[10];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace heatsum::cli
