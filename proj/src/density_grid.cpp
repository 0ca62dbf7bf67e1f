#include "sdmpdf/density_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdmpdf {

namespace {
std::size_t total_points(int dim, int mesh) {
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(mesh);
  return n;
}
}  // namespace

DensityGrid DensityGrid::uniform(int dim, int mesh) {
  DensityGrid g = zeros(dim, mesh);
  double v = std::pow(2.0 * std::numbers::pi, -dim);
  std::fill(g.values.begin(), g.values.end(), v);
  return g;
}

DensityGrid DensityGrid::zeros(int dim, int mesh) {
  if (dim < 1 || mesh < 2) throw std::invalid_argument("DensityGrid: bad shape");
  DensityGrid g;
  g.dim = dim;
  g.mesh = mesh;
  g.values.assign(total_points(dim, mesh), 0.0);
  return g;
}

double DensityGrid::spacing() const { return 2.0 * std::numbers::pi / mesh; }

double DensityGrid::cell_volume() const { return std::pow(spacing(), dim); }

double DensityGrid::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell_volume();
}

double DensityGrid::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double DensityGrid::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double DensityGrid::h_norm_sq() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s * cell_volume() * std::pow(2.0 * std::numbers::pi, dim);
}

void DensityGrid::point(std::size_t flat, double* x) const {
  double h = spacing();
  for (int d = dim - 1; d >= 0; --d) {
    x[d] = h * static_cast<double>(flat % mesh);
    flat /= mesh;
  }
}

double DensityGrid::l2_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s * cell_volume());
}

double DensityGrid::l2_distance(const DensityGrid& a, const DensityGrid& b) {
  if (a.dim != b.dim || a.mesh != b.mesh)
    throw std::invalid_argument("l2_distance: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    double d = a.values[i] - b.values[i];
    s += d * d;
  }
  return std::sqrt(s * a.cell_volume());
}

}  // namespace sdmpdf
