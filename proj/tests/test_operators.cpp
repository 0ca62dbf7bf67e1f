#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "sdmpdf/errors.hpp"
#include "sdmpdf/operators.hpp"
#include "test_util.hpp"

using namespace sdmpdf;

TEST_CASE("vec and unvec are inverse maps") {
  Eigen::MatrixXcd x = testutil::random_hermitian(4, 1);
  CHECK((unvec(vec(x), 4) - x).norm() == 0.0);
  Eigen::VectorXcd v = vec(x);
  CHECK((vec(unvec(v, 4)) - v).norm() == 0.0);
}

TEST_CASE("kron identity: (conj(B) kron A) vec(X) = vec(A X B) for hermitian B") {
  testutil::TestRng rng(2);
  Eigen::MatrixXcd a(3, 3), x(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      a(i, j) = {rng.normal(), rng.normal()};
      x(i, j) = {rng.normal(), rng.normal()};
    }
  Eigen::MatrixXcd b = testutil::random_hermitian(3, 3);
  Eigen::VectorXcd lhs = kron(b.conjugate(), a) * vec(x);
  Eigen::VectorXcd rhs = vec(a * x * b);
  CHECK((lhs - rhs).norm() < 1e-13);
}

TEST_CASE("hermitized projects onto the hermitian part") {
  Eigen::MatrixXcd h = testutil::random_hermitian(5, 4);
  CHECK((hermitized(h) - h).norm() < 1e-15);
  Eigen::MatrixXcd g = h;
  g(0, 1) += std::complex<double>(0.3, 0.7);
  Eigen::MatrixXcd p = hermitized(g);
  CHECK((p - p.adjoint()).norm() < 1e-15);
}

TEST_CASE("apply_A equals the explicit structure sum and the dense matrix") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 2);
  StructureOperators ops(t);
  Eigen::MatrixXcd x = testutil::random_hermitian(t.n_basis(), 7);

  Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(t.n_basis(), t.n_basis());
  for (int l = 0; l < t.n_moments(); ++l) {
    std::complex<double> w = (t.structure_matrix(l).adjoint() * x).trace();
    direct += w * t.structure_matrix(l);
  }
  Eigen::MatrixXcd fast = ops.apply_A(x);
  CHECK((fast - direct).norm() < 1e-12);

  Eigen::VectorXcd dense = ops.a_dense() * vec(x);
  CHECK((unvec(dense, t.n_basis()) - direct).norm() < 1e-12);
}

TEST_CASE("A maps the uniform state to the identity (fourier)") {
  for (int dim : {1, 2}) {
    StructureTable t = build_structure_table(BasisFamily::fourier, dim, dim == 1 ? 2 : 1);
    StructureOperators ops(t);
    const int n = t.n_basis();
    Eigen::MatrixXcd a_u = ops.apply_A(Eigen::MatrixXcd::Identity(n, n) / double(n));
    CHECK((a_u - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-13);
  }
}

TEST_CASE("shift tables agree with index arithmetic") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 1);
  StructureOperators ops(t);
  REQUIRE(ops.has_shift_tables());
  for (int j = 0; j < t.n_basis(); ++j)
    for (int k = 0; k < t.n_basis(); ++k)
      CHECK(t.mho[ops.diff_position(j, k)] == t.lambda[j] - t.lambda[k]);
  // pairs_by_diff partitions all N^2 ordered pairs.
  std::size_t total = 0;
  for (const auto& pairs : ops.pairs_by_diff()) total += pairs.size();
  CHECK(total == std::size_t(t.n_basis()) * t.n_basis());
  // Hermite tables have no shift structure.
  StructureOperators hops(build_structure_table(BasisFamily::hermite, 1, 2));
  CHECK(!hops.has_shift_tables());
}

TEST_CASE("assemble_from_moments is the adjoint-side toeplitz sum") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 1);
  StructureOperators ops(t);
  testutil::TestRng rng(5);
  Eigen::VectorXcd w(t.n_moments());
  for (int l = 0; l < w.size(); ++l) w[l] = {rng.normal(), rng.normal()};
  Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(3, 3);
  for (int l = 0; l < t.n_moments(); ++l) direct += w[l] * t.structure_matrix(l);
  CHECK((ops.assemble_from_moments(w) - direct).norm() < 1e-13);
}

TEST_CASE("barrier hessian applies F(X) = A(X) + mu Sinv X Sinv") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 1);
  StructureOperators ops(t);
  const double mu = 0.01;
  Sdm s = testutil::random_sdm(t.n_basis(), 13);
  Eigen::MatrixXcd x = testutil::random_hermitian(t.n_basis(), 14);

  BarrierHessian hess(ops, s.matrix, mu);
  Eigen::MatrixXcd s_inv = s.matrix.inverse();
  Eigen::MatrixXcd direct = ops.apply_A(x) + mu * s_inv * x * s_inv;
  CHECK((hess.apply(x) - direct).norm() / direct.norm() < 1e-11);
  CHECK((hess.inverse_sandwich(x) - s_inv * x * s_inv).norm() / (s_inv * x * s_inv).norm() <
        1e-10);
}

TEST_CASE("solve/apply round trip for both methods, and the methods agree") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 1);
  StructureOperators ops(t);
  const double mu = 0.01;
  Sdm s = testutil::random_sdm(t.n_basis(), 17);
  Eigen::MatrixXcd y = testutil::random_hermitian(t.n_basis(), 18);

  BarrierHessian gram(ops, s.matrix, mu, FSolveMethod::gram_reduction);
  BarrierHessian dense(ops, s.matrix, mu, FSolveMethod::dense_vectorized);
  Eigen::MatrixXcd xg = gram.solve(y);
  Eigen::MatrixXcd xd = dense.solve(y);
  CHECK((gram.apply(xg) - y).norm() / y.norm() < 1e-11);
  CHECK((dense.apply(xd) - y).norm() / y.norm() < 1e-11);
  CHECK((xg - xd).norm() / xd.norm() < 1e-10);
  CHECK(gram.condition() > 0.0);
  CHECK(!gram.ill_conditioned());
  CHECK(gram.mu() == mu);
}

TEST_CASE("closed-form solve at the uniform state: F^-1(I) = I/(N + mu N^2)") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 2);
  StructureOperators ops(t);
  const int n = t.n_basis();
  const double mu = 0.01;
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  for (FSolveMethod m : {FSolveMethod::gram_reduction, FSolveMethod::dense_vectorized}) {
    Eigen::MatrixXcd x = solve_F(ops, id / double(n), mu, id, m);
    Eigen::MatrixXcd expect = id / (n + mu * n * n);
    CHECK((x - expect).norm() / expect.norm() < 1e-12);
  }
}

TEST_CASE("structure-diagonal eigenvalues at the uniform state") {
  // A acts on the Hermitian subspace (its output is hermitized), where the
  // eigenvectors are the Hermitian combinations of E_l and E_{-l} = E_l^*,
  // both with eigenvalue d_l = d_{-l}.  At S = I/N the barrier term adds
  // mu N^2, so F^-1(H) = H / (d_l + mu N^2) exactly.
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 2);
  StructureOperators ops(t);
  const int n = t.n_basis();
  const double mu = 0.05;
  const std::complex<double> im(0.0, 1.0);
  for (int l : {0, 2, 4, 7}) {
    const Eigen::MatrixXcd& el = t.structure_matrix(l);
    int neg = t.mho.position(-t.mho[l]);
    const Eigen::MatrixXcd& emin = t.structure_matrix(neg);
    double d = 2 * t.degree + 1 - std::abs(t.mho[l][0]);
    for (const Eigen::MatrixXcd& h :
         {Eigen::MatrixXcd(0.5 * (el + emin)), Eigen::MatrixXcd(0.5 * im * (el - emin))}) {
      if (h.norm() == 0.0) continue;  // the imaginary combination of E_0 with itself
      Eigen::MatrixXcd x =
          solve_F(ops, Eigen::MatrixXcd::Identity(n, n) / double(n), mu, h);
      CHECK((x - h / (d + mu * n * n)).norm() < 1e-12);
    }
  }
}

TEST_CASE("barrier hessian rejects non positive definite states") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 1);
  StructureOperators ops(t);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(3, 3);
  s(2, 2) = -0.5;
  CHECK_THROWS_AS(BarrierHessian(ops, s, 0.01), PositivityLoss);
}

TEST_CASE("free-function forms match the class") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 1);
  StructureOperators ops(t);
  Sdm s = testutil::random_sdm(3, 23);
  Eigen::MatrixXcd x = testutil::random_hermitian(3, 24);
  BarrierHessian hess(ops, s.matrix, 0.02);
  CHECK((apply_F(ops, s.matrix, 0.02, x) - hess.apply(x)).norm() < 1e-13);
  CHECK((apply_A(ops, x) - ops.apply_A(x)).norm() == 0.0);
  CHECK((solve_F(ops, s.matrix, 0.02, x) - hess.solve(x)).norm() < 1e-12);
}
