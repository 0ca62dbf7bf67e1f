#pragma once

#include <Eigen/Dense>
#include <optional>

#include "sdmpdf/density_grid.hpp"
#include "sdmpdf/exec.hpp"
#include "sdmpdf/operators.hpp"
#include "sdmpdf/sdm.hpp"

namespace sdmpdf {

// Basis moments of a density, E_f[phi_l] for every l in mho (mho order).
struct MomentVector {
  Eigen::VectorXcd values;
  int size() const { return static_cast<int>(values.size()); }
};

// B(f) = sum_l E_f[phi_l] E_l, the linear term of the fit objective
// (Hermitian for a real density's moment sequence).
Eigen::MatrixXcd moments_to_B(const StructureOperators& ops, const MomentVector& mv);

// D(f, p_S) = 0.5 (e^{R(f||nu)} + e^{R(p||nu)}) - Re sum_l <E_l,S> conj(E_f[phi_l])
//           = 0.5 || (f - p_S) / nu ||^2 in the nu-weighted space.
double proximity(const StructureOperators& ops, const MomentVector& mv, double renyi_f,
                 const Sdm& s);

// Quadrature moments of a sampled density (Fourier family).  Rejects
// mesh <= 4*degree, where the moment map aliases.
MomentVector moments_from_grid(const DensityGrid& grid, const StructureTable& table,
                               Exec exec = Exec::parallel);

// R(f || uniform) of a sampled torus density.
double grid_renyi_vs_uniform(const DensityGrid& grid);

struct StaticFitResult {
  Sdm s;
  double lagrange = 0.0;       // multiplier of the trace constraint
  double residual = 0.0;       // || grad - lagrange I ||_F at the solution
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double min_eigenvalue = 0.0;
  double condition = 0.0;      // worst Newton-system condition encountered
};

struct StaticFitOptions {
  double tol = 1e-10;
  int max_iter = 100;
  FSolveMethod method = FSolveMethod::gram_reduction;
  std::optional<Sdm> start;  // default: uniform I/N
};

// Minimize J(S) = 0.5 <S, A(S)> - <B, S> - mu ln det S over Hermitian S with
// tr S = 1, by feasible-start Newton with Cholesky-guarded backtracking.
// The iterates stay positive definite; the result satisfies
// A(S) - mu S^-1 - B = lagrange I up to `residual`.
StaticFitResult solve_static(const StructureOperators& ops, const MomentVector& mv, double mu,
                             const StaticFitOptions& opts = {});

}  // namespace sdmpdf
