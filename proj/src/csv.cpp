#include "normdyn/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

#include "normdyn/errors.hpp"

namespace normdyn::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  // from_chars does not accept a leading '+'.
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DomainError("parse_double: not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DomainError("CsvTable: no column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view col) const {
  return parse_double(rows.at(row).at(column(col)));
}

const std::string& CsvTable::text(std::size_t row, std::string_view col) const {
  return rows.at(row).at(column(col));
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw ShapeError("CsvTable: row width differs from header");
  rows.push_back(std::move(row));
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find_first_of(",\"\n\r") != std::string::npos) {
      throw DomainError("write_csv: field needs quoting: '" + fields[i] + "'");
    }
    if (i > 0) out << ',';
    out << fields[i];
  }
  out << '\n';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  write_line(out, table.header);
  for (const auto& row : table.rows) write_line(out, row);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.add_row(std::move(fields));
    }
  }
  if (first) throw DomainError("read_csv: empty input");
  return table;
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot open for writing: " + tmp.string());
    write_csv(out, table);
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw RuntimeError("write failed: " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw RuntimeError("cannot move output into place: " + path.string());
  }
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot open for reading: " + path.string());
  return read_csv(in);
}

CsvTable matrix_table(const Eigen::MatrixXd& m) {
  CsvTable t;
  t.header.push_back("row");
  for (Eigen::Index j = 0; j < m.cols(); ++j) t.header.push_back(std::to_string(j));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    t.add_row(std::move(row));
  }
  return t;
}

Eigen::MatrixXd matrix_from_table(const CsvTable& table) {
  if (table.header.empty() || table.header.front() != "row") {
    throw DomainError("matrix_from_table: missing 'row' index column");
  }
  const auto cols = static_cast<Eigen::Index>(table.header.size() - 1);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()), cols);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), j) = parse_double(table.rows[i][static_cast<std::size_t>(j + 1)]);
    }
  }
  return m;
}

CsvTable labelled_matrix_table(const Eigen::MatrixXd& m, const std::vector<std::string>& labels) {
  if (m.rows() != m.cols() || labels.size() != static_cast<std::size_t>(m.rows())) {
    throw ShapeError("labelled_matrix_table: need a square matrix and one label per row");
  }
  CsvTable t;
  t.header.push_back("strategy");
  t.header.insert(t.header.end(), labels.begin(), labels.end());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{labels[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(format_double(m(i, j)));
    t.add_row(std::move(row));
  }
  return t;
}

std::pair<Eigen::MatrixXd, std::vector<std::string>> labelled_matrix_from_table(const CsvTable& table) {
  if (table.header.empty() || table.header.front() != "strategy") {
    throw DomainError("labelled_matrix_from_table: missing 'strategy' column");
  }
  const std::size_t n = table.header.size() - 1;
  if (table.rows.size() != n) throw ShapeError("labelled_matrix_from_table: matrix is not square");
  std::vector<std::string> labels(table.header.begin() + 1, table.header.end());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (table.rows[i][0] != labels[i]) throw DomainError("labelled_matrix_from_table: row and column labels differ");
    for (std::size_t j = 0; j < n; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(table.rows[i][j + 1]);
    }
  }
  return {m, labels};
}

}  // namespace normdyn::io
