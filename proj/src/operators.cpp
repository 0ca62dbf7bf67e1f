#include "sdmpdf/operators.hpp"

#include <complex>
#include <limits>

#include "sdmpdf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmpdf {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

StructureOperators::StructureOperators(const StructureTable& table) : table_(&table) {
  const int N = table.n_basis();
  const int L = table.n_moments();
  vec_e_.resize(N * N, L);
  for (int l = 0; l < L; ++l)
    vec_e_.col(l) = vec(table.matrices[l]);
  if (table.family == BasisFamily::fourier) {
    diff_pos_.resize(static_cast<size_t>(N) * N);
    pairs_by_diff_.resize(L);
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        int pos = table.mho.position(table.lambda[j] - table.lambda[k]);
        diff_pos_[static_cast<size_t>(j) * N + k] = pos;
        pairs_by_diff_[pos].emplace_back(j, k);
      }
  }
}

Eigen::MatrixXcd StructureOperators::apply_A(const Eigen::MatrixXcd& x) const {
  const int N = n_basis();
  if (has_shift_tables()) {
    // <E_l, X> is the sum along the l-th shifted diagonal; A(X) is the
    // Toeplitz-like matrix rebuilt from those sums.
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_moments());
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) c[diff_position(j, k)] += x(j, k);
    Eigen::MatrixXcd out(N, N);
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) out(j, k) = c[diff_position(j, k)];
    return hermitized(out);
  }
  Eigen::VectorXcd c = vec_e_.adjoint() * vec(x);
  return hermitized(unvec(vec_e_ * c, N));
}

const Eigen::MatrixXcd& StructureOperators::a_dense() const {
  std::lock_guard<std::mutex> lock(a_mutex_);
  if (!a_dense_)
    a_dense_ = std::make_unique<Eigen::MatrixXcd>(vec_e_ * vec_e_.adjoint());
  return *a_dense_;
}

Eigen::MatrixXcd StructureOperators::assemble_from_moments(const Eigen::VectorXcd& w) const {
  const int N = n_basis();
  if (has_shift_tables()) {
    Eigen::MatrixXcd out(N, N);
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) out(j, k) = w[diff_position(j, k)];
    return out;
  }
  return unvec(vec_e_ * w, N);
}

BarrierHessian::BarrierHessian(const StructureOperators& ops, const Eigen::MatrixXcd& s,
                               double mu, FSolveMethod method, Exec exec)
    : ops_(&ops), s_(s), mu_(mu), method_(method) {
  if (mu <= 0.0) throw Error("BarrierHessian: mu must be positive");
  llt_s_.compute(s_);
  if (llt_s_.info() != Eigen::Success)
    throw PositivityLoss("BarrierHessian: state is not positive definite");
  if (method_ == FSolveMethod::dense_vectorized) {
    const int N = static_cast<int>(s_.rows());
    Eigen::MatrixXcd s_inv = llt_s_.solve(Eigen::MatrixXcd::Identity(N, N));
    Eigen::MatrixXcd f = ops.a_dense() + mu_ * kron(s_inv.conjugate(), s_inv);
    llt_sys_.compute(hermitized(f));
  } else {
    build_gram(exec);
  }
  if (llt_sys_.info() != Eigen::Success)
    throw PositivityLoss("BarrierHessian: system matrix lost positive definiteness");
  double rc = llt_sys_.rcond();
  condition_ = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

void BarrierHessian::build_gram(Exec exec) {
  const int N = static_cast<int>(s_.rows());
  const int L = ops_->n_moments();
  Eigen::MatrixXcd g(L, L);
  const bool par = exec == Exec::parallel;
  (void)par;
  if (ops_->has_shift_tables()) {
    // G_{l,m} = <E_l, S E_m S> = sum_{p-p'=l, q-q'=m} S(p,q) S(q',p').
    // Each row l owns a disjoint set of (p,p') pairs, so rows are
    // independent outputs with a fixed inner summation order.
    const auto& pairs = ops_->pairs_by_diff();
    const auto& diff = ops_->diff_positions();
    const std::complex<double>* sd = s_.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (int l = 0; l < L; ++l) {
      std::vector<std::complex<double>> row(L, 0.0);
      for (const auto& [p, pp] : pairs[l]) {
        const std::complex<double>* col = sd + static_cast<size_t>(pp) * N;  // S(:,p')
        for (int q = 0; q < N; ++q) {
          const std::complex<double> a = s_(p, q);
          const int* dq = diff.data() + static_cast<size_t>(q) * N;
          for (int qp = 0; qp < N; ++qp) row[dq[qp]] += a * col[qp];
        }
      }
      for (int m = 0; m < L; ++m) g(l, m) = row[m];
    }
  } else {
    const auto& mats = ops_->table().matrices;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (int m = 0; m < L; ++m) {
      Eigen::MatrixXcd t = s_ * (mats[m] * s_);
      for (int l = 0; l < L; ++l)
        g(l, m) = mats[l].conjugate().cwiseProduct(t).sum();
    }
  }
  llt_sys_.compute(hermitized(g) + mu_ * Eigen::MatrixXcd::Identity(L, L));
}

Eigen::MatrixXcd BarrierHessian::inverse_sandwich(const Eigen::MatrixXcd& y) const {
  Eigen::MatrixXcd t = llt_s_.solve(y);           // S^-1 Y
  return llt_s_.solve(t.adjoint()).adjoint();     // (S^-1 Y) S^-1, S Hermitian
}

Eigen::MatrixXcd BarrierHessian::apply(const Eigen::MatrixXcd& x) const {
  return ops_->apply_A(x) + mu_ * inverse_sandwich(x);
}

Eigen::MatrixXcd BarrierHessian::gram_solve(const Eigen::MatrixXcd& y) const {
  const int N = static_cast<int>(s_.rows());
  Eigen::MatrixXcd z = s_ * y * s_;
  Eigen::VectorXcd c(ops_->n_moments());
  if (ops_->has_shift_tables()) {
    c.setZero();
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) c[ops_->diff_position(j, k)] += z(j, k);
  } else {
    c = ops_->vec_structure().adjoint() * vec(z);
  }
  Eigen::VectorXcd w = llt_sys_.solve(c);
  Eigen::MatrixXcd d = ops_->assemble_from_moments(w);
  return (z - s_ * d * s_) / mu_;
}

Eigen::MatrixXcd BarrierHessian::solve(const Eigen::MatrixXcd& y) const {
  if (method_ == FSolveMethod::gram_reduction) {
    Eigen::MatrixXcd x = gram_solve(y);
    // One pass of iterative refinement: the 1/mu factor in the reduction
    // amplifies rounding in the reduced solve, leaving a residual floor a
    // few orders above the dense factorization's.  Re-solving for the
    // defect reuses the cached factorization and recovers that floor.
    x += gram_solve(y - apply(x));
    return x;
  }
  const int N = static_cast<int>(s_.rows());
  Eigen::VectorXcd x = llt_sys_.solve(vec(y));
  return unvec(x, N);
}

Eigen::MatrixXcd apply_A(const StructureOperators& ops, const Eigen::MatrixXcd& x) {
  return ops.apply_A(x);
}

Eigen::MatrixXcd apply_F(const StructureOperators& ops, const Eigen::MatrixXcd& s, double mu,
                         const Eigen::MatrixXcd& x) {
  return BarrierHessian(ops, s, mu).apply(x);
}

Eigen::MatrixXcd solve_F(const StructureOperators& ops, const Eigen::MatrixXcd& s, double mu,
                         const Eigen::MatrixXcd& y, FSolveMethod method) {
  return BarrierHessian(ops, s, mu, method).solve(y);
}

}  // namespace sdmpdf
