#include "hypharm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hypharm/report.hpp"

namespace hypharm::io {

std::string format_number(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) {
    cells.push_back(format_number(v));
  }
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) {
    throw FormatError("CsvTable: row has " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(columns.size()));
  }
  rows.push_back(std::move(cells));
}

namespace {

double parse_number(const std::string& cell) {
  if (cell.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) {
      throw FormatError("not a number: '" + cell + "'");
    }
    return v;
  } catch (const std::invalid_argument&) {
    throw FormatError("not a number: '" + cell + "'");
  } catch (const std::out_of_range&) {
    throw FormatError("number out of range: '" + cell + "'");
  }
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') {
      out += '"';
    }
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) {
      out << ',';
    }
    out << escape(cells[i]);
  }
  out << "\r\n";
}

// Reads one RFC 4180 record; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& cells) {
  cells.clear();
  if (in.peek() == std::char_traits<char>::eof()) {
    return false;
  }
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(field);
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') {
        in.get(c);
      }
      break;
    } else if (c == '\n') {
      break;
    } else {
      field += c;
    }
  }
  if (quoted) {
    throw FormatError("CSV: unterminated quoted field");
  }
  cells.push_back(field);
  return any;
}

}  // namespace

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw FormatError("CSV: missing column '" + name + "'");
  }
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back(parse_number(r[idx]));
  }
  return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  write_row(out, table.columns);
  for (const auto& r : table.rows) {
    write_row(out, r);
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::vector<std::string> cells;
  if (!read_record(in, cells)) {
    throw FormatError("CSV: empty input");
  }
  t.columns = cells;
  std::size_t line = 1;
  while (read_record(in, cells)) {
    ++line;
    if (cells.size() == 1 && cells[0].empty()) {
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw FormatError("CSV record " + std::to_string(line) + ": expected " + std::to_string(t.columns.size()) +
                        " fields, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(cells);
  }
  return t;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot write " + path.string());
  }
  f << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::ostringstream ss;
  write_csv(ss, table);
  write_text_file(path, ss.str());
}

namespace {

nlohmann::json read_header(std::istream& in, const std::string& kind) {
  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(kind + ": missing JSON header line");
  }
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(kind + ": bad JSON header: " + e.what());
  }
  if (h.value("schema", "") != "hypharm-grid/1" || h.value("kind", "") != kind) {
    throw FormatError(kind + ": unexpected header schema/kind");
  }
  return h;
}

template <typename T>
T header_value(const nlohmann::json& h, const char* key) {
  if (!h.contains(key)) {
    throw FormatError(std::string("header: missing '") + key + "'");
  }
  return h.at(key).get<T>();
}

void write_values(std::ostream& out, CsvTable& t) {
  std::ostringstream body;
  write_csv(body, t);
  out << body.str();
}

// Values from the re/im columns in row order, checked against the expected count.
std::vector<Complex> read_values(std::istream& in, std::size_t expected) {
  const CsvTable t = read_csv(in);
  const auto re = t.column("re");
  const auto im = t.column("im");
  if (re.size() != expected) {
    throw FormatError("expected " + std::to_string(expected) + " rows, got " + std::to_string(re.size()));
  }
  std::vector<Complex> v(expected);
  for (std::size_t q = 0; q < expected; ++q) {
    v[q] = {re[q], im[q]};
  }
  return v;
}

}  // namespace

void write_function(std::ostream& out, const FunctionOnX& u) {
  const PolarGrid& g = u.grid;
  nlohmann::json h = {{"schema", "hypharm-grid/1"}, {"kind", "FunctionOnX"}, {"r_max", g.r_max()},
                      {"n_r", g.n_r()}, {"n_theta", g.n_theta()}, {"measure", measure_info()}};
  out << h.dump() << "\n";
  CsvTable t{{"i", "j", "r", "theta", "re", "im"}, {}};
  for (int i = 0; i < g.n_r(); ++i) {
    for (int j = 0; j < g.n_theta(); ++j) {
      const Complex v = u.at(i, j);
      t.add_row({static_cast<double>(i), static_cast<double>(j), g.r(i), g.theta(j), v.real(), v.imag()});
    }
  }
  write_values(out, t);
}

FunctionOnX read_function(std::istream& in) {
  const auto h = read_header(in, "FunctionOnX");
  PolarGrid g(header_value<double>(h, "r_max"), header_value<int>(h, "n_r"), header_value<int>(h, "n_theta"));
  return FunctionOnX(g, read_values(in, g.size()));
}

void write_table(std::ostream& out, const SpectralTable& table) {
  const SpectralGrid& g = table.grid;
  nlohmann::json h = {{"schema", "hypharm-grid/1"}, {"kind", "SpectralTable"}, {"lambda_max", g.lambda_max()},
                      {"n_lambda", g.n_lambda()}, {"n_b", g.n_b()}, {"chamber", table.chamber},
                      {"measure", measure_info()}};
  out << h.dump() << "\n";
  CsvTable t{{"j", "k", "lambda", "b", "re", "im"}, {}};
  for (int j = 0; j < g.n_lambda(); ++j) {
    for (int k = 0; k < g.n_b(); ++k) {
      const Complex v = table.at(j, k);
      t.add_row({static_cast<double>(j), static_cast<double>(k), table.signed_lambda(j), g.b(k), v.real(), v.imag()});
    }
  }
  write_values(out, t);
}

SpectralTable read_table(std::istream& in) {
  const auto h = read_header(in, "SpectralTable");
  SpectralGrid g(header_value<double>(h, "lambda_max"), header_value<int>(h, "n_lambda"), header_value<int>(h, "n_b"));
  const int chamber = header_value<int>(h, "chamber");
  if (chamber != 1 && chamber != -1) {
    throw FormatError("SpectralTable: chamber must be +1 or -1");
  }
  SpectralTable t(g, chamber);
  t.values = read_values(in, g.size());
  return t;
}

void write_horocycle(std::ostream& out, const HorocycleFunction& f) {
  const HorocycleGrid& g = f.grid;
  nlohmann::json h = {{"schema", "hypharm-grid/1"}, {"kind", "HorocycleFunction"}, {"h_max", g.h_max()},
                      {"n_h", g.n_h()}, {"n_b", g.n_b()}, {"measure", measure_info()}};
  out << h.dump() << "\n";
  CsvTable t{{"i", "k", "h", "b", "re", "im"}, {}};
  for (int i = 0; i < g.n_points(); ++i) {
    for (int k = 0; k < g.n_b(); ++k) {
      const Complex v = f.at(i, k);
      t.add_row({static_cast<double>(i), static_cast<double>(k), g.h(i), g.b(k), v.real(), v.imag()});
    }
  }
  write_values(out, t);
}

HorocycleFunction read_horocycle(std::istream& in) {
  const auto h = read_header(in, "HorocycleFunction");
  HorocycleGrid g(header_value<double>(h, "h_max"), header_value<int>(h, "n_h"), header_value<int>(h, "n_b"));
  HorocycleFunction f(g);
  f.values = read_values(in, g.size());
  return f;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<SvgSeries>& series, bool log_y) {
  const double width = 720.0;
  const double height = 440.0;
  const double left = 80.0;
  const double right = 170.0;
  const double top = 40.0;
  const double bottom = 60.0;
  auto ty = [log_y](double y) { return log_y ? std::log10(y) : y; };
  auto usable = [log_y](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0); };

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) {
        continue;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (!(xmin < xmax)) {
    xmin = std::isfinite(xmin) ? xmin - 1.0 : 0.0;
    xmax = xmin + 2.0;
  }
  if (!(ymin < ymax)) {
    ymin = std::isfinite(ymin) ? ymin - 1.0 : 0.0;
    ymax = ymin + 2.0;
  }
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << fmt(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    const double gx = left + pw * k / 4.0;
    const double gy = top + ph * (1.0 - k / 4.0);
    o << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(gx) << "\" y2=\""
      << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(xv) << "</text>\n";
    o << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(gy) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(gy)
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(gy + 4) << "\" text-anchor=\"end\">"
      << tick_label(log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(height - 15) << "\" text-anchor=\"middle\">"
    << xml_escape(x_label) << "</text>\n";
  o << "<text x=\"18\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fmt(top + ph / 2) << ")\">" << xml_escape(y_label) << (log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % (sizeof colors / sizeof colors[0])];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const auto& ser = series[s];
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      if (usable(ser.x[i], ser.y[i])) {
        o << fmt(px(ser.x[i])) << ',' << fmt(py(ser.y[i])) << ' ';
      }
    }
    o << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(left + pw + 32)
      << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fmt(left + pw + 38) << "\" y=\"" << fmt(ly) << "\">" << xml_escape(ser.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace hypharm::io
