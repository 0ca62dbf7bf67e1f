#pragma once

#include <cstddef>
#include <vector>

namespace sdmpdf {

// Sampled density on the uniform periodic grid of [0, 2*pi)^n with `mesh`
// points per axis: x_i = 2*pi*i/mesh.  Values are stored row-major with the
// first coordinate slowest (same convention as lexicographic index sets).
struct DensityGrid {
  int dim = 0;
  int mesh = 0;
  std::vector<double> values;

  static DensityGrid uniform(int dim, int mesh);  // constant (2*pi)^-n
  static DensityGrid zeros(int dim, int mesh);

  std::size_t size() const { return values.size(); }
  double spacing() const;      // 2*pi / mesh
  double cell_volume() const;  // spacing^dim
  double integral() const;     // cell_volume * sum(values)
  double min_value() const;
  double max_value() const;
  // squared norm in the (2*pi)^-n-weighted space: (2*pi)^n * mean(f^2);
  // equals exp(R(f || uniform)) for a density f.
  double h_norm_sq() const;

  // Coordinates of flat index.
  void point(std::size_t flat, double* x) const;

  // L2 grid norms (cell_volume-weighted) used for relative error reports.
  double l2_norm() const;
  static double l2_distance(const DensityGrid& a, const DensityGrid& b);
};

}  // namespace sdmpdf
