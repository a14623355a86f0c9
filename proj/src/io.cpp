#include "bosons/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bosons {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("write_csv: cannot open " + path);
  for (size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "");
  }
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

void write_csv_numeric(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<std::string> line;
    line.reserve(row.size());
    for (double x : row) line.push_back(format_full(x));
    cells.push_back(std::move(line));
  }
  write_csv(path, header, cells);
}

void export_operator_triplets(const std::string& path, const SparseOperator& op) {
  std::ofstream out(path);
  if (!out) throw Error("export_operator_triplets: cannot open " + path);
  out << "row,col,value\n";
  for (int k = 0; k < op.mat.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(op.mat, k); it; ++it) {
      out << it.row() << "," << it.col() << "," << format_full(it.value()) << "\n";
    }
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("write_text_file: cannot open " + path);
  out << content;
}

}  // namespace bosons
