#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sdmpdf/density_grid.hpp"
#include "sdmpdf/exec.hpp"
#include "sdmpdf/multi_index.hpp"
#include "sdmpdf/potential.hpp"

namespace sdmpdf {

// Gibbs-Boltzmann invariant density e^{-beta V}/Z on the mesh (beta = 2/sigma^2
// for the Smoluchowski diffusion), normalized by rectangle-rule quadrature.
DensityGrid gibbs_invariant(const Potential& pot, double beta, int mesh);

// Explicit finite-difference solver for
//   df/dt = div(f grad V) + (sigma^2/2) Laplace f
// on the periodic uniform mesh: conservative flux form, second-order central
// differences, grad V evaluated analytically at cell-face midpoints, RK4 in
// time.  Mass is conserved to rounding by telescoping fluxes.
class FdSolver {
 public:
  FdSolver(DensityGrid f0, const Potential& pot, double sigma, double dt,
           Exec exec = Exec::parallel);

  // Largest stable step: RK4 real-axis stability radius 2.785 against the
  // worst diffusion eigenvalue 2 n sigma^2 / h^2, with safety factor 1.1.
  static double stability_limit(int mesh, int dim, double sigma);

  void step();
  void run(int steps);

  const DensityGrid& grid() const { return f_; }
  double time() const { return t_; }
  double dt() const { return dt_; }
  double mass() const { return f_.integral(); }
  double min_value() const { return f_.min_value(); }
  double h_norm_sq() const { return f_.h_norm_sq(); }
  // Most negative value ever seen (raw, before any output clamping).
  double worst_min_value() const { return worst_min_; }

  // Values below this floor abort the run (engineering choice; the scheme
  // is not positivity-preserving in exact generality).
  double negativity_floor = -1e-8;

 private:
  void rhs(const std::vector<double>& in, std::vector<double>& out) const;

  DensityGrid f_;
  const Potential* pot_;
  double sigma_, dt_, t_ = 0.0;
  Exec exec_;
  double worst_min_ = 0.0;
  std::vector<std::vector<double>> face_drift_;  // per axis: dV/dx_d at x + h/2 e_d
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;  // RK4 scratch
};

// Truncated Fourier coefficients of a real torus density: cube |j|_inf <= J,
// f_0 pinned to (2*pi)^-n, f_{-j} = conj(f_j) maintained exactly.
struct FourierDensity {
  int dim = 0;
  int truncation = 0;
  IndexSet cube;
  Eigen::VectorXcd coeffs;

  static FourierDensity uniform(int dim, int truncation);
  std::complex<double> at(const MultiIndex& j) const;  // zero outside the cube
  DensityGrid to_grid(int mesh) const;
};

// Frequency-domain FPKE: df_j/dt = -j . (sum_k V_k k f_{j-k}) - (sigma^2/2)|j|^2 f_j
// for j != 0 (zero outside the truncation), df_0/dt = 0.  Derivatives are
// computed on representatives and mirrored, so conjugate symmetry is exact.
Eigen::VectorXcd galerkin_rhs(const FourierDensity& fd, const Potential& pot, double sigma);
void galerkin_step(FourierDensity& fd, const Potential& pot, double sigma, double dt);

// Per-step margins of the dissipation bound
//   d/dt ||f||_H^2 <= (||Laplace V||_inf - sigma^2) ||f||_H^2 + (2*pi)^{-2n} sigma^2
// with the time derivative taken as a forward difference of the recorded
// ||f||_H^2 series.  margin > slack * max(1, |bound|) counts as a violation.
struct EnergyBoundReport {
  std::vector<double> margins;
  double worst_margin = 0.0;
  double worst_scale = 1.0;
  int violations = 0;
};
EnergyBoundReport energy_bound_check(const std::vector<double>& h_norm_sq_series, double dt,
                                     double max_abs_laplacian_v, double sigma, int dim,
                                     double slack = 1e-3);

// R(f || g) = ln \int f^2 / g by rectangle rule; g must exceed 1e-300.
double renyi_relative(const DensityGrid& f, const DensityGrid& g);

}  // namespace sdmpdf
