#pragma once

#include <string>

#include "slowkill/common.hpp"

namespace slowkill {

// Headerless CSV interchange: rows are observations, decimal floats.
// Complex matrices use alternating real,imag column pairs.

Eigen::MatrixXd read_matrix_csv(const std::string& path);
Eigen::MatrixXcd read_complex_matrix_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
void write_complex_matrix_csv(const std::string& path, const Eigen::MatrixXcd& m);

}  // namespace slowkill
