#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdmpdf/density_grid.hpp"
#include "sdmpdf/exec.hpp"
#include "sdmpdf/multi_index.hpp"

namespace sdmpdf {

// Real trigonometric potential V(x) = sum_{0 < |k|_2 <= R} V_k e^{i k.x} on
// the torus, stored on a half-lattice (one representative per {k,-k} pair,
// the one whose first nonzero entry is positive) and mirrored on read.
class Potential {
 public:
  // |V_k| ~ Exponential(mean = amplitude_mean), phase ~ Uniform[0, 2*pi),
  // drawn from a counter-based generator in lexicographic representative
  // order, so the map (seed, n, R) -> coefficients is a pure function.
  static Potential sample(int dim, int cutoff, std::uint64_t seed, double amplitude_mean);
  // Explicit coefficients (tests, file round-trips); representatives only.
  static Potential from_coefficients(
      int dim, int cutoff,
      std::vector<std::pair<MultiIndex, std::complex<double>>> half_lattice,
      std::uint64_t seed = 0, double amplitude_mean = 0.0);

  Potential negated() const;  // V -> -V (same half-lattice support)

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  std::uint64_t seed() const { return seed_; }
  double amplitude_mean() const { return amplitude_mean_; }
  const std::vector<std::pair<MultiIndex, std::complex<double>>>& half_lattice() const {
    return reps_;
  }
  // Mirrored coefficient: V_{-k} = conj(V_k); zero outside the disk.
  std::complex<double> coefficient(const MultiIndex& k) const;

  double eval(std::span<const double> x) const;
  Eigen::VectorXd gradient(std::span<const double> x) const;
  double laplacian(std::span<const double> x) const;

  // Grid kernels (values at the uniform mesh, optionally offset by a
  // fraction of the spacing along one axis for flux midpoints).
  std::vector<double> eval_grid(int mesh, Exec exec = Exec::parallel) const;
  std::vector<double> gradient_axis_grid(int mesh, int axis, double offset_frac,
                                         Exec exec = Exec::parallel) const;
  double max_abs_laplacian(int mesh) const;
  // Upper bound sum |k|^2 |V_k| over the full lattice.
  double laplacian_spectral_bound() const;

  void write_csv(const std::string& path) const;
  void write_meta_json(const std::string& path) const;

 private:
  int dim_ = 0;
  int cutoff_ = 0;
  std::uint64_t seed_ = 0;
  double amplitude_mean_ = 0.0;
  std::vector<std::pair<MultiIndex, std::complex<double>>> reps_;
  std::vector<std::pair<MultiIndex, std::complex<double>>> full_;  // mirrored
  std::map<MultiIndex, std::complex<double>> lookup_;

  void finish_init();
};

}  // namespace sdmpdf
