#include "slowkill/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace slowkill {

namespace {

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // tolerate trailing \r and blank lines
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* ptr = line.c_str();
    while (*ptr) {
      char* end = nullptr;
      double v = std::strtod(ptr, &end);
      if (end == ptr)
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected a number near '" +
                         std::string(ptr).substr(0, 12) + "'");
      row.push_back(v);
      ptr = end;
      while (*ptr == ' ' || *ptr == '\t') ++ptr;
      if (*ptr == ',') ++ptr;
      while (*ptr == ' ' || *ptr == '\t') ++ptr;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                       std::to_string(row.size()) + " vs " + std::to_string(rows.front().size()) +
                       " columns)");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  return rows;
}

}  // namespace

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  auto rows = read_rows(path);
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

Eigen::MatrixXcd read_complex_matrix_csv(const std::string& path) {
  auto rows = read_rows(path);
  if (rows.front().size() % 2 != 0)
    throw ParseError(path + ": complex matrices need an even column count (re,im pairs)");
  Eigen::MatrixXcd m(static_cast<Index>(rows.size()),
                     static_cast<Index>(rows.front().size() / 2));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j + 1 < rows[i].size(); j += 2)
      m(static_cast<Index>(i), static_cast<Index>(j / 2)) = {rows[i][j], rows[i][j + 1]};
  return m;
}

namespace {

void write_rows(const std::string& path, Index rows, Index cols,
                const std::function<double(Index, Index)>& at) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  char buf[40];
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", at(i, j));
      out << buf;
      if (j + 1 < cols) out << ',';
    }
    out << '\n';
  }
}

}  // namespace

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  write_rows(path, m.rows(), m.cols(), [&](Index i, Index j) { return m(i, j); });
}

void write_complex_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m) {
  write_rows(path, m.rows(), 2 * m.cols(), [&](Index i, Index j) {
    return j % 2 == 0 ? m(i, j / 2).real() : m(i, j / 2).imag();
  });
}

}  // namespace slowkill
