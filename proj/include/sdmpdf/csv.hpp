#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdmpdf/density_grid.hpp"

namespace sdmpdf::csv {

// Shortest round-trippable decimal form ("%.17g").
std::string g17(double v);

void ensure_dir(const std::string& dir);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Lines without trailing newline; optionally keeps '#' comment lines.
std::vector<std::string> read_lines(const std::string& path);
std::vector<std::string> split(const std::string& line, char sep);

// Complex matrix, one matrix row per line, each cell written as "re,im"
// (so a line holds 2*cols comma-separated numbers).  `header` lines are
// emitted verbatim before the data.
void write_complex_matrix(const std::string& path, const Eigen::MatrixXcd& m,
                          const std::vector<std::string>& header);
Eigen::MatrixXcd read_complex_matrix(const std::string& path, std::vector<std::string>* header = nullptr);

// Grid dump: "# M=<m> t=<t> sigma=<s> seed=<seed>" then rows x1,..,xn,f in
// flat row-major order.
void write_grid(const std::string& path, const sdmpdf::DensityGrid& grid, double t,
                double sigma, unsigned long long seed);
sdmpdf::DensityGrid read_grid(const std::string& path);

}  // namespace sdmpdf::csv
