#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <vector>

#include "sdmpdf/basis.hpp"
#include "sdmpdf/exec.hpp"

namespace sdmpdf {

// Column-major vec / unvec (Eigen's native layout), so that
// (conj(B) kron A) vec(X) = vec(A X B) for Hermitian B.
inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}
inline Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int rows) {
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), rows, static_cast<int>(v.size()) / rows);
}
inline Eigen::MatrixXcd hermitized(const Eigen::MatrixXcd& m) {
  return 0.5 * (m + m.adjoint());
}
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Precomputed contraction data for one structure table:
//   vec_structure: N^2 x L, column l = vec(E_l)
//   A(X) = sum_l <E_l, X> E_l
// plus Fourier-only shift tables used by the fast Gram kernels.
class StructureOperators {
 public:
  explicit StructureOperators(const StructureTable& table);

  const StructureTable& table() const { return *table_; }
  int n_basis() const { return table_->n_basis(); }
  int n_moments() const { return table_->n_moments(); }

  Eigen::MatrixXcd apply_A(const Eigen::MatrixXcd& x) const;

  const Eigen::MatrixXcd& vec_structure() const { return vec_e_; }

  // Dense N^2 x N^2 matrix of A (reference path; built once on demand).
  const Eigen::MatrixXcd& a_dense() const;

  // Fourier: diff_position(j, k) = mho position of lambda_j - lambda_k
  // (always present since mho = Lambda - Lambda); empty for Hermite.
  bool has_shift_tables() const { return !diff_pos_.empty(); }
  int diff_position(int j, int k) const { return diff_pos_[j * n_basis() + k]; }
  const std::vector<int>& diff_positions() const { return diff_pos_; }
  // pairs_by_diff[l] = all (j, k) with lambda_j - lambda_k = mho_l.
  const std::vector<std::vector<std::pair<int, int>>>& pairs_by_diff() const {
    return pairs_by_diff_;
  }

  // Toeplitz assembly sum_l w_l E_l (any family).
  Eigen::MatrixXcd assemble_from_moments(const Eigen::VectorXcd& w) const;

 private:
  const StructureTable* table_;
  Eigen::MatrixXcd vec_e_;
  std::vector<int> diff_pos_;
  std::vector<std::vector<std::pair<int, int>>> pairs_by_diff_;
  mutable std::unique_ptr<Eigen::MatrixXcd> a_dense_;
  mutable std::mutex a_mutex_;
};

enum class FSolveMethod {
  dense_vectorized,  // factor the full N^2 x N^2 operator (reference)
  gram_reduction     // reduce to an L x L system via the structure Gram matrix
};

// The barrier-regularized Hessian at a positive definite state S:
//   F_S(X) = A(X) + mu * S^-1 X S^-1.
// Construction performs the Cholesky factorization of S and throws
// PositivityLoss if S is not numerically positive definite.
class BarrierHessian {
 public:
  BarrierHessian(const StructureOperators& ops, const Eigen::MatrixXcd& s, double mu,
                 FSolveMethod method = FSolveMethod::gram_reduction,
                 Exec exec = Exec::parallel);

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;
  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& y) const;

  // Reciprocal condition estimate of the factored system; > 1e14 means the
  // solve is untrustworthy at the requested tolerances.
  double condition() const { return condition_; }
  bool ill_conditioned() const { return condition_ > 1e14; }

  double mu() const { return mu_; }
  const Eigen::MatrixXcd& s() const { return s_; }
  // S^-1 Y S^-1 via the Cholesky factor of S.
  Eigen::MatrixXcd inverse_sandwich(const Eigen::MatrixXcd& y) const;

 private:
  void build_gram(Exec exec);
  Eigen::MatrixXcd gram_solve(const Eigen::MatrixXcd& y) const;

  const StructureOperators* ops_;
  Eigen::MatrixXcd s_;
  double mu_;
  FSolveMethod method_;
  Eigen::LLT<Eigen::MatrixXcd> llt_s_;
  Eigen::LLT<Eigen::MatrixXcd> llt_sys_;  // mu I_L + G (gram) or dense F (reference)
  double condition_ = 0.0;
};

// Free-function forms of the operator contracts.
Eigen::MatrixXcd apply_A(const StructureOperators& ops, const Eigen::MatrixXcd& x);
Eigen::MatrixXcd apply_F(const StructureOperators& ops, const Eigen::MatrixXcd& s, double mu,
                         const Eigen::MatrixXcd& x);
Eigen::MatrixXcd solve_F(const StructureOperators& ops, const Eigen::MatrixXcd& s, double mu,
                         const Eigen::MatrixXcd& y,
                         FSolveMethod method = FSolveMethod::gram_reduction);

}  // namespace sdmpdf
