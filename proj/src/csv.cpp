#include "sdmpdf/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdmpdf/errors.hpp"

namespace sdmpdf::csv {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << content;
  if (!os) throw IoError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

void write_complex_matrix(const std::string& path, const Eigen::MatrixXcd& m,
                          const std::vector<std::string>& header) {
  std::ostringstream os;
  for (const auto& h : header) os << h << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << g17(m(i, j).real()) << ',' << g17(m(i, j).imag());
    }
    os << '\n';
  }
  write_file(path, os.str());
}

Eigen::MatrixXcd read_complex_matrix(const std::string& path, std::vector<std::string>* header) {
  auto lines = read_lines(path);
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : lines) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header) header->push_back(line);
      continue;
    }
    rows.push_back(split(line, ','));
  }
  if (rows.empty()) throw IoError("no data rows in " + path);
  size_t w = rows.front().size();
  if (w % 2 != 0) throw IoError("odd cell count in " + path);
  Eigen::MatrixXcd m(rows.size(), w / 2);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != w) throw IoError("ragged rows in " + path);
    for (size_t j = 0; j < w / 2; ++j)
      m(i, j) = {std::stod(rows[i][2 * j]), std::stod(rows[i][2 * j + 1])};
  }
  return m;
}

void write_grid(const std::string& path, const sdmpdf::DensityGrid& grid, double t,
                double sigma, unsigned long long seed) {
  std::ostringstream os;
  os << "# M=" << grid.mesh << " t=" << g17(t) << " sigma=" << g17(sigma)
     << " seed=" << seed << '\n';
  std::vector<double> x(grid.dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x.data());
    for (int d = 0; d < grid.dim; ++d) os << g17(x[d]) << ',';
    os << g17(grid.values[i]) << '\n';
  }
  write_file(path, os.str());
}

sdmpdf::DensityGrid read_grid(const std::string& path) {
  auto lines = read_lines(path);
  int mesh = 0;
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : lines) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto mp = line.find("M=");
      if (mp != std::string::npos) mesh = std::stoi(line.substr(mp + 2));
      continue;
    }
    rows.push_back(split(line, ','));
  }
  if (rows.empty()) throw IoError("no data rows in " + path);
  int dim = static_cast<int>(rows.front().size()) - 1;
  if (dim < 1) throw IoError("grid csv needs coordinate columns: " + path);
  if (mesh == 0) {
    // infer: rows = mesh^dim
    mesh = static_cast<int>(std::llround(std::pow(double(rows.size()), 1.0 / dim)));
  }
  sdmpdf::DensityGrid g = sdmpdf::DensityGrid::zeros(dim, mesh);
  if (g.size() != rows.size())
    throw IoError("grid csv row count " + std::to_string(rows.size()) +
                  " does not match mesh^dim in " + path);
  for (std::size_t i = 0; i < rows.size(); ++i)
    g.values[i] = std::stod(rows[i].back());
  return g;
}

}  // namespace sdmpdf::csv
