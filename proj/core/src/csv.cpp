#include "gflsr/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gflsr {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("not a numeric cell: '" + text + "'");
  }
  return value;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parses_as_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

CsvTable load_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty file: " + path);
  CsvTable table;
  table.header = split_line(line);
  bool all_numeric = !table.header.empty();
  for (const auto& h : table.header) {
    if (!parses_as_double(h)) all_numeric = false;
  }
  if (all_numeric) throw ConfigError("header required: " + path);

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      throw ConfigError(path + ": row " + std::to_string(lineno) + " has " +
                        std::to_string(fields.size()) + " cells, expected " +
                        std::to_string(table.header.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      try {
        row[j] = parse_double(fields[j]);
      } catch (const ConfigError&) {
        throw ConfigError(path + ": row " + std::to_string(lineno) + ", column " +
                          std::to_string(j + 1) + ": not a numeric cell: '" +
                          fields[j] + "'");
      }
    }
    rows.push_back(std::move(row));
  }

  table.values.resize(static_cast<Index>(rows.size()),
                      static_cast<Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

void save_csv_table(const std::string& path, const std::vector<std::string>& header,
                    const Matrix& values) {
  if (static_cast<Index>(header.size()) != values.cols()) {
    throw ConfigError("save_csv_table: header size does not match column count");
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

Dataset load_dataset_csv(const std::string& path) {
  const CsvTable table = load_csv_table(path);
  Index p = 0;
  while (p < static_cast<Index>(table.header.size()) &&
         table.header[static_cast<std::size_t>(p)].rfind('x', 0) == 0) {
    ++p;
  }
  const Index q = static_cast<Index>(table.header.size()) - p;
  if (p == 0 || q == 0) {
    throw ConfigError(path + ": expected a header of x1..xp followed by y1..yq");
  }
  return Dataset::from_raw(table.values.leftCols(p), table.values.rightCols(q));
}

Dataset load_dataset_csv(const std::string& path, Index p) {
  const CsvTable table = load_csv_table(path);
  if (p <= 0 || p >= table.values.cols()) {
    throw ConfigError(path + ": predictor count must split the columns");
  }
  return Dataset::from_raw(table.values.leftCols(p),
                           table.values.rightCols(table.values.cols() - p));
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  std::vector<std::string> header;
  for (Index j = 0; j < data.p(); ++j) header.push_back("x" + std::to_string(j + 1));
  for (Index j = 0; j < data.q(); ++j) header.push_back("y" + std::to_string(j + 1));
  Matrix values(data.n(), data.p() + data.q());
  values.leftCols(data.p()) = data.raw_x();
  values.rightCols(data.q()) = data.raw_y();
  save_csv_table(path, header, values);
}

}  // namespace gflsr
