#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>

#include "sdmpdf/basis.hpp"
#include "sdmpdf/density_grid.hpp"
#include "sdmpdf/exec.hpp"

namespace sdmpdf {

// Hermitian, positive semi-definite, unit trace matrix over the basis label
// set.  Represents the density p(x) = nu(x) * Phi(x)^* S Phi(x).
struct Sdm {
  Eigen::MatrixXcd matrix;

  static Sdm uniform(int n_basis);                // I/N, the reference weight itself
  static Sdm pure(const Eigen::VectorXcd& unit);  // u u^* for a unit vector u
  int size() const { return static_cast<int>(matrix.rows()); }
};

struct SdmDiagnostics {
  double hermiticity_defect = 0.0;  // ||S - S^*||_F
  double trace_deviation = 0.0;     // |tr S - 1|
  double min_eigenvalue = 0.0;
  bool pass = false;
};

// pass iff hermiticity defect <= 1e-12, |tr-1| <= 1e-10, min eig >= -1e-12.
SdmDiagnostics validate(const Sdm& s);

// p(x).  The quadratic form of a Hermitian S is real up to rounding; an
// imaginary residue above 1e-12 (relative) throws, below it is dropped.
double eval_pdf(const Sdm& s, const StructureTable& table, std::span<const double> x);

// p on the uniform torus grid (Fourier family only).
DensityGrid eval_pdf_grid(const Sdm& s, const StructureTable& table, int mesh,
                          Exec exec = Exec::parallel);

// C(S)_l = <E_l, S> = tr(E_l^* S) for all l in mho, in mho order.
// These are exactly the basis moments of p: E_p[phi_l] = C(S)_l.
Eigen::VectorXcd coefficient_map(const Sdm& s, const StructureTable& table);

// Single moment E_p[phi_m]; zero when m lies outside mho.
std::complex<double> moment(const Sdm& s, const StructureTable& table, const MultiIndex& m);

// Quadratic Renyi divergence against the reference weight:
//   R(p || nu) = ln(1 + sum_{l != 0} |<E_l, S>|^2).
double renyi_vs_weight(const Sdm& s, const StructureTable& table);

// S = sum_i w_i u_i u_i^*: eigendecomposition with negative eigenvalues in
// [-1e-10, 0] clamped to zero (more negative throws), weights descending,
// each vector phased so its first nonzero entry is real positive.
struct SosDecomposition {
  Eigen::VectorXd weights;
  Eigen::MatrixXcd vectors;  // column i goes with weights[i]
};
SosDecomposition sos_decomposition(const Sdm& s);

// Header "# sdm n=<n> r=<r> family=<family>", then row-major "re,im" cells.
void write_sdm_csv(const std::string& path, const Sdm& s, const StructureTable& table);
Sdm read_sdm_csv(const std::string& path);

}  // namespace sdmpdf
