// Headerless CSV matrix round-trip at full double precision.

#pragma once

#include <Eigen/Dense>
#include <string>

namespace blindcen {

// One row per line, comma-separated, printf %.17g per entry.
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

// Strict parse: every row must have the same number of fields, every field
// must be a complete floating-point literal. Errors name the 1-based line.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

std::string format_double(double x);  // shortest %.17g form used everywhere

}  // namespace blindcen
