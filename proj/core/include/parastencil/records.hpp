#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parastencil {

/// One measured run. Numeric fields are nonnegative; defect_series holds
/// d^0..d^K (empty for serial modes).
struct RunRecord {
  std::string mode;
  int n_p = 1;
  int k = 0;
  int threads = 1;
  double omega = 0.0;
  double wall_seconds = 0.0;
  double tau_f = 0.0;
  double tau_c = 0.0;
  std::vector<double> defect_series;
  double eps_fine = 0.0;
  double speedup = 0.0;
  double efficiency = 0.0;
  double energy_joules = 0.0;
  double gamma = 0.0;
  bool oversubscribed = false;

  bool operator==(const RunRecord&) const = default;
};

/// Header row of the run-record CSV.
const std::vector<std::string>& run_record_columns();

/// Values are written with 17 significant digits so that parsing a row
/// gives back the same doubles; defect_series is ';'-separated.
std::vector<std::string> to_csv_fields(const RunRecord& r);
RunRecord run_record_from_csv(const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range when missing.
  std::size_t column(const std::string& name) const;
};

CsvTable run_records_table(const std::vector<RunRecord>& records);
std::vector<RunRecord> run_records_from_table(const CsvTable& table);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);
/// Plain comma splitting; fields never contain commas or quotes here.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

std::string format_double(double v);
double parse_double_field(const std::string& s);

}  // namespace parastencil
