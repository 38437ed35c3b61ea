#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypharm/common.hpp"
#include "hypharm/grids.hpp"

namespace hypharm::io {

/// Malformed input file (bad header, missing column, unparsable number).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Shortest "%.17g" rendering; always round-trips a double.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
  /// Column by name as numbers (empty cells become NaN).
  std::vector<double> column(const std::string& name) const;
};

/// RFC 4180: CRLF line ends, fields quoted when they contain , " CR or LF.
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

/// Grid samples: first line a JSON header (schema, grid parameters,
/// normalization constants), then a columnar CSV with one row per node.
void write_function(std::ostream& out, const FunctionOnX& u);
FunctionOnX read_function(std::istream& in);
void write_table(std::ostream& out, const SpectralTable& table);
SpectralTable read_table(std::istream& in);
void write_horocycle(std::ostream& out, const HorocycleFunction& f);
HorocycleFunction read_horocycle(std::istream& in);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart; non-finite points are skipped and a
/// logarithmic y axis drops nonpositive values.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series, bool log_y = false);

}  // namespace hypharm::io
