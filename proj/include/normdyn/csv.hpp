#pragma once

// Minimal CSV tables. Fields never contain commas, quotes or newlines (all
// emitted fields are numbers or identifiers), so no quoting is performed;
// write_csv rejects fields that would need it.

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace normdyn::io {

// Shortest representation that parses back to the identical double.
std::string format_double(double v);
// Throws DomainError on malformed input.
double parse_double(std::string_view s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws DomainError when the column is missing.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view col) const;
  const std::string& text(std::size_t row, std::string_view col) const;
  void add_row(std::vector<std::string> row);
};

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

// Writes to `path` via a temporary file renamed into place, so a failed write
// leaves no partial output. Throws RuntimeError naming the path.
void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv_file(const std::filesystem::path& path);

// Row-major matrix with header "row,0,1,...,k-1" and a leading row index.
CsvTable matrix_table(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_table(const CsvTable& table);

// Square matrix with named rows and columns; header "strategy,<labels...>".
CsvTable labelled_matrix_table(const Eigen::MatrixXd& m, const std::vector<std::string>& labels);
std::pair<Eigen::MatrixXd, std::vector<std::string>> labelled_matrix_from_table(const CsvTable& table);

}  // namespace normdyn::io
