#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "sdmpdf/approx.hpp"
#include "sdmpdf/errors.hpp"
#include "sdmpdf/fpke.hpp"
#include "sdmpdf/potential.hpp"
#include "test_util.hpp"

using namespace sdmpdf;
using std::numbers::pi;

TEST_CASE("grid moments of an sdm density reproduce the coefficient map") {
  // Rectangle-rule moments are exact once the mesh clears the band limit.
  for (int dim : {1, 2}) {
    StructureTable t = build_structure_table(BasisFamily::fourier, dim, 2);
    StructureOperators ops(t);
    Sdm s = testutil::random_sdm(t.n_basis(), 31 + dim);
    DensityGrid g = eval_pdf_grid(s, t, dim == 1 ? 12 : 24);
    MomentVector mv = moments_from_grid(g, t, Exec::serial);
    Eigen::VectorXcd c = coefficient_map(s, t);
    CHECK((mv.values - c).norm() < 1e-12);
  }
}

TEST_CASE("grid moments reject aliasing meshes") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 2);
  DensityGrid g = DensityGrid::uniform(1, 8);  // mesh = 4r aliases
  CHECK_THROWS_AS((void)moments_from_grid(g, t), ConfigError);
  DensityGrid ok = DensityGrid::uniform(1, 9);  // 4r + 1 is the exactness edge
  MomentVector mv = moments_from_grid(ok, t);
  CHECK(std::abs(mv.values[t.zero_moment_pos] - 1.0) < 1e-13);
}

TEST_CASE("moments_to_B assembles the hermitian linear term") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 1);
  StructureOperators ops(t);
  Sdm s = testutil::random_sdm(3, 37);
  MomentVector mv;
  mv.values = coefficient_map(s, t);
  Eigen::MatrixXcd b = moments_to_B(ops, mv);
  CHECK((b - b.adjoint()).norm() < 1e-14);
  // <B, X> = sum_l conj(?) pairing must reproduce sum_l mv_l <E_l, X>^* up to
  // hermitization; check against the direct sum.
  Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(3, 3);
  for (int l = 0; l < t.n_moments(); ++l) direct += mv.values[l] * t.structure_matrix(l);
  CHECK((b - hermitized(direct)).norm() < 1e-13);

  MomentVector wrong;
  wrong.values = Eigen::VectorXcd::Zero(2);
  CHECK_THROWS_AS((void)moments_to_B(ops, wrong), Error);
}

TEST_CASE("uniform target: fixed point, multiplier, and fast convergence") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 2);
  StructureOperators ops(t);
  const int n = t.n_basis();
  MomentVector mv;
  mv.values = Eigen::VectorXcd::Zero(t.n_moments());
  mv.values[t.zero_moment_pos] = 1.0;

  for (double mu : {1e-3, 1e-2, 1.0}) {
    StaticFitResult fit = solve_static(ops, mv, mu);
    CHECK(fit.converged);
    CHECK((fit.s.matrix - Eigen::MatrixXcd::Identity(n, n) / double(n)).norm() < 1e-10);
    CHECK(fit.residual <= 1e-10);
    // grad at I/N is exactly (A(I/N) - B - mu N I) = -mu N I, so lambda = -mu N.
    CHECK(fit.lagrange == doctest::Approx(-mu * n).epsilon(1e-8));
    CHECK(fit.iterations <= 3);
    CHECK(fit.min_eigenvalue == doctest::Approx(1.0 / n).epsilon(1e-8));
  }
}

TEST_CASE("gibbs target: KKT conditions verified independently") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 2);
  StructureOperators ops(t);
  const int n = t.n_basis();
  const double mu = 0.01;
  Potential pot = Potential::sample(2, 2, 2, 0.05);
  DensityGrid f = gibbs_invariant(pot, 2.0, 48);
  MomentVector mv = moments_from_grid(f, t);

  StaticFitResult fit = solve_static(ops, mv, mu);
  REQUIRE(fit.converged);
  CHECK(fit.residual <= 1e-10);
  CHECK(std::abs(fit.s.matrix.trace().real() - 1.0) < 1e-12);
  CHECK(fit.min_eigenvalue > 0.0);

  // Recompute the optimality residual without the solver's internals:
  // A(S) - B - mu S^-1 must be a multiple of the identity.
  Eigen::MatrixXcd grad = ops.apply_A(fit.s.matrix) - moments_to_B(ops, mv) -
                          mu * fit.s.matrix.inverse();
  double lambda = grad.trace().real() / n;
  CHECK((grad - lambda * Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-9);
  CHECK(lambda == doctest::Approx(fit.lagrange).epsilon(1e-6));

  // The fit is at least as close to the target as the uniform start.
  double renyi_f = grid_renyi_vs_uniform(f);
  double d_fit = proximity(ops, mv, renyi_f, fit.s);
  double d_unif = proximity(ops, mv, renyi_f, Sdm::uniform(n));
  CHECK(d_fit <= d_unif);
  CHECK(d_fit >= -1e-12);  // proximity is half a squared distance
}

TEST_CASE("strict convexity: the solution is start-independent") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 2);
  StructureOperators ops(t);
  Potential pot = Potential::sample(1, 2, 4, 0.2);
  DensityGrid f = gibbs_invariant(pot, 2.0, 40);
  MomentVector mv = moments_from_grid(f, t);

  StaticFitResult cold = solve_static(ops, mv, 0.01);
  StaticFitOptions warm_opts;
  warm_opts.start = testutil::random_sdm(t.n_basis(), 99);
  StaticFitResult warm = solve_static(ops, mv, 0.01, warm_opts);
  REQUIRE(cold.converged);
  REQUIRE(warm.converged);
  CHECK((cold.s.matrix - warm.s.matrix).norm() < 1e-8);
}

TEST_CASE("both hessian methods reach the same fit") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 2);
  StructureOperators ops(t);
  Potential pot = Potential::sample(1, 2, 6, 0.3);
  DensityGrid f = gibbs_invariant(pot, 2.0, 40);
  MomentVector mv = moments_from_grid(f, t);

  StaticFitOptions dense_opts;
  dense_opts.method = FSolveMethod::dense_vectorized;
  StaticFitResult gram = solve_static(ops, mv, 0.01);
  StaticFitResult dense = solve_static(ops, mv, 0.01, dense_opts);
  REQUIRE(gram.converged);
  REQUIRE(dense.converged);
  CHECK((gram.s.matrix - dense.s.matrix).norm() < 1e-9);
}

TEST_CASE("proximity equals the direct half squared weighted distance") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 2);
  StructureOperators ops(t);
  Potential pot = Potential::sample(2, 2, 3, 0.05);
  DensityGrid f = gibbs_invariant(pot, 2.0, 64);
  MomentVector mv = moments_from_grid(f, t);
  double renyi_f = grid_renyi_vs_uniform(f);
  Sdm s = testutil::random_sdm(t.n_basis(), 55);

  DensityGrid p = eval_pdf_grid(s, t, 64);
  double direct = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double diff = f.values[i] - p.values[i];
    direct += diff * diff;
  }
  direct *= 0.5 * f.cell_volume() * std::pow(2 * pi, 2);  // 1/nu weight
  double closed = proximity(ops, mv, renyi_f, s);
  CHECK(closed == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("renyi of a grid density equals the sdm closed form") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 1);
  Sdm s = testutil::random_sdm(t.n_basis(), 61);
  DensityGrid p = eval_pdf_grid(s, t, 32);
  CHECK(grid_renyi_vs_uniform(p) == doctest::Approx(renyi_vs_weight(s, t)).epsilon(1e-11));
}

TEST_CASE("solve_static rejects bad inputs") {
  StructureTable t = build_structure_table(BasisFamily::fourier, 1, 1);
  StructureOperators ops(t);
  MomentVector mv;
  mv.values = Eigen::VectorXcd::Zero(t.n_moments());
  mv.values[t.zero_moment_pos] = 1.0;
  CHECK_THROWS_AS((void)solve_static(ops, mv, 0.0), Error);
  StaticFitOptions opts;
  Sdm bad;
  bad.matrix = Eigen::MatrixXcd::Identity(3, 3);
  bad.matrix(0, 0) = -1.0;
  opts.start = bad;
  CHECK_THROWS_AS((void)solve_static(ops, mv, 0.01, opts), PositivityLoss);
}

TEST_CASE("moments_from_grid rejects non-torus tables and dimension mismatch") {
  StructureTable h = build_structure_table(BasisFamily::hermite, 1, 2);
  DensityGrid g = DensityGrid::uniform(1, 16);
  CHECK_THROWS_AS((void)moments_from_grid(g, h), Error);
  StructureTable t = build_structure_table(BasisFamily::fourier, 2, 1);
  CHECK_THROWS_AS((void)moments_from_grid(g, t), Error);
}
