#include "parastencil/records.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace parastencil {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double_field(const std::string& s) {
  std::size_t used = 0;
  const double d = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters in number '" + s + "'");
  return d;
}

const std::vector<std::string>& run_record_columns() {
  static const std::vector<std::string> cols = {
      "mode",  "n_p",      "k",       "threads",    "omega",         "wall_seconds", "tau_f",         "tau_c",
      "defect_series", "eps_fine", "speedup", "efficiency", "energy_joules", "gamma",        "oversubscribed"};
  return cols;
}

std::vector<std::string> to_csv_fields(const RunRecord& r) {
  std::string defects;
  for (std::size_t i = 0; i < r.defect_series.size(); ++i)
    defects += (i ? ";" : "") + format_double(r.defect_series[i]);
  return {r.mode,
          std::to_string(r.n_p),
          std::to_string(r.k),
          std::to_string(r.threads),
          format_double(r.omega),
          format_double(r.wall_seconds),
          format_double(r.tau_f),
          format_double(r.tau_c),
          defects,
          format_double(r.eps_fine),
          format_double(r.speedup),
          format_double(r.efficiency),
          format_double(r.energy_joules),
          format_double(r.gamma),
          r.oversubscribed ? "1" : "0"};
}

RunRecord run_record_from_csv(const std::vector<std::string>& f) {
  if (f.size() != run_record_columns().size())
    throw std::invalid_argument("run record row has " + std::to_string(f.size()) + " fields, expected " +
                                std::to_string(run_record_columns().size()));
  RunRecord r;
  r.mode = f[0];
  r.n_p = std::stoi(f[1]);
  r.k = std::stoi(f[2]);
  r.threads = std::stoi(f[3]);
  r.omega = parse_double_field(f[4]);
  r.wall_seconds = parse_double_field(f[5]);
  r.tau_f = parse_double_field(f[6]);
  r.tau_c = parse_double_field(f[7]);
  std::stringstream ds(f[8]);
  std::string item;
  while (std::getline(ds, item, ';'))
    if (!item.empty()) r.defect_series.push_back(parse_double_field(item));
  r.eps_fine = parse_double_field(f[9]);
  r.speedup = parse_double_field(f[10]);
  r.efficiency = parse_double_field(f[11]);
  r.energy_joules = parse_double_field(f[12]);
  r.gamma = parse_double_field(f[13]);
  r.oversubscribed = f[14] == "1";
  return r;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("CSV has no column '" + name + "'");
}

CsvTable run_records_table(const std::vector<RunRecord>& records) {
  CsvTable t{run_record_columns(), {}};
  for (const auto& r : records) t.rows.push_back(to_csv_fields(r));
  return t;
}

std::vector<RunRecord> run_records_from_table(const CsvTable& table) {
  if (table.header != run_record_columns()) throw std::invalid_argument("not a run-record table");
  std::vector<RunRecord> out;
  for (const auto& row : table.rows) out.push_back(run_record_from_csv(row));
  return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, table);
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != t.header.size()) throw std::invalid_argument("ragged CSV row: " + line);
      t.rows.push_back(std::move(fields));
    }
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  return read_csv(in);
}

}  // namespace parastencil
