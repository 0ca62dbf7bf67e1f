#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sdmpdf/multi_index.hpp"

namespace sdmpdf {

enum class BasisFamily { fourier, hermite };

std::string family_name(BasisFamily f);
BasisFamily family_from_name(const std::string& s);

// Label sets for degree r:
//   fourier: Lambda = ([-r,r] cap Z)^n,  mho = Lambda - Lambda = ([-2r,2r] cap Z)^n
//   hermite: Lambda = [0,r]^n,           mho = Lambda + Lambda = [0,2r]^n
// Both are lexicographically ordered cubes, so a flat position decomposes as
// a mixed-radix number with the first coordinate most significant.
struct IndexSets {
  IndexSet lambda;
  IndexSet mho;
};
IndexSets build_index_set(BasisFamily family, int dim, int degree);

// Triple product of basis functions against the weight:
//   e_{j,k,l} = E_nu[ phi_j * conj(phi_k) * conj(phi_l) ].
// Fourier: 1 if j - k == l else 0.  Hermite (per coordinate, with
// m = (j+k+l)/2): sqrt(j! k! l!) / ((m-j)! (m-k)! (m-l)!) when j+k+l is even
// and m >= max(j,k,l), else 0.  Multi-dimensional values factor over
// coordinates.
double structure_coefficient(BasisFamily family, const MultiIndex& j,
                             const MultiIndex& k, const MultiIndex& l);

// E_l = (e_{j,k,l})_{j,k in Lambda}, one N x N matrix per l in mho.
struct StructureTable {
  BasisFamily family = BasisFamily::fourier;
  int dim = 0;
  int degree = 0;
  IndexSet lambda;
  IndexSet mho;
  std::vector<Eigen::MatrixXcd> matrices;  // aligned with mho positions
  int zero_moment_pos = -1;                // position of 0 in mho
  int zero_basis_pos = -1;                 // position of 0 in lambda

  int n_basis() const { return lambda.size(); }
  int n_moments() const { return mho.size(); }
  const Eigen::MatrixXcd& structure_matrix(int pos) const { return matrices[pos]; }
};

StructureTable build_structure_table(BasisFamily family, int dim, int degree);

// Phi(x): values of all basis functions at a point, in lambda order.
Eigen::VectorXcd eval_basis_vector(BasisFamily family, const IndexSet& lambda,
                                   std::span<const double> x);

// Reference weight nu(x): (2*pi)^-n on the torus, standard normal on R^n.
double weight(BasisFamily family, std::span<const double> x);

// Rank of the Gram matrix of {E_l} in the Frobenius inner product
// (dimension of the moment problem actually posed by the table).
int effective_dimension(const StructureTable& table);

// Gauss-Hermite rule for the standard normal weight (weights sum to 1);
// exact for polynomials of degree <= 2*count - 1.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
QuadratureRule gauss_hermite_rule(int count);

// One CSV per structure matrix: <dir>/E_<l joined by '_'>.csv.
void write_structure_table_csv(const StructureTable& table, const std::string& dir);

}  // namespace sdmpdf
