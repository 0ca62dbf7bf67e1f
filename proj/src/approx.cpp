#include "sdmpdf/approx.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sdmpdf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmpdf {

namespace {

// ln det S from the Cholesky factor (diagonal of L is real positive).
double log_det(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
  double s = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i).real());
  return 2.0 * s;
}

double objective(const StructureOperators& ops, const Eigen::MatrixXcd& b, double mu,
                 const Eigen::MatrixXcd& s, const Eigen::LLT<Eigen::MatrixXcd>& llt) {
  double quad = 0.5 * ops.apply_A(s).conjugate().cwiseProduct(s).sum().real();
  double lin = b.conjugate().cwiseProduct(s).sum().real();
  return quad - lin - mu * log_det(llt);
}

}  // namespace

Eigen::MatrixXcd moments_to_B(const StructureOperators& ops, const MomentVector& mv) {
  if (mv.size() != ops.n_moments())
    throw Error("moments_to_B: moment vector length mismatch");
  return hermitized(ops.assemble_from_moments(mv.values));
}

double proximity(const StructureOperators& ops, const MomentVector& mv, double renyi_f,
                 const Sdm& s) {
  Eigen::VectorXcd c = coefficient_map(s, ops.table());
  double renyi_p = renyi_vs_weight(s, ops.table());
  double cross = c.dot(mv.values).real();  // sum_l conj(C_l) mv_l
  return 0.5 * (std::exp(renyi_f) + std::exp(renyi_p)) - cross;
}

MomentVector moments_from_grid(const DensityGrid& grid, const StructureTable& table,
                               Exec exec) {
  if (table.family != BasisFamily::fourier)
    throw Error("moments_from_grid: grids live on the torus (fourier family)");
  if (grid.dim != table.dim)
    throw Error("moments_from_grid: dimension mismatch");
  if (grid.mesh <= 4 * table.degree)
    throw ConfigError("moments_from_grid: mesh " + std::to_string(grid.mesh) +
                      " aliases moments up to degree " + std::to_string(table.degree) +
                      " (need mesh > 4*degree)");
  const int n = table.dim;
  const int F = 4 * table.degree + 1;
  const int M = grid.mesh;
  const double h = 2.0 * std::numbers::pi / M;
  const bool par = exec == Exec::parallel;
  (void)par;

  // Phase table per axis: w(a, i) = exp(i freq_a x_i), freq_a = a - 2r.
  Eigen::MatrixXcd w(F, M);
  for (int a = 0; a < F; ++a)
    for (int i = 0; i < M; ++i) w(a, i) = std::polar(1.0, (a - 2 * table.degree) * h * i);

  // Contract grid axes one at a time (first axis last to stay row-major):
  // result[l_1..l_d, i_{d+1}..i_n] after d steps, frequencies slowest.
  std::vector<std::complex<double>> cur(grid.values.begin(), grid.values.end());
  std::size_t freq_prefix = 1;
  std::size_t grid_suffix = grid.size() / M;
  for (int d = 0; d < n; ++d) {
    // cur shape: (freq_prefix, M, grid_suffix) -> next: (freq_prefix, F, grid_suffix)
    std::vector<std::complex<double>> next(freq_prefix * F * grid_suffix);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (long long pa = 0; pa < static_cast<long long>(freq_prefix * F); ++pa) {
      const std::size_t p = pa / F;
      const int a = static_cast<int>(pa % F);
      for (std::size_t q = 0; q < grid_suffix; ++q) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < M; ++i) acc += cur[(p * M + i) * grid_suffix + q] * w(a, i);
        next[(p * F + a) * grid_suffix + q] = acc;
      }
    }
    cur.swap(next);
    freq_prefix *= F;
    grid_suffix /= M;
  }
  MomentVector mv;
  mv.values.resize(table.n_moments());
  const double cell = grid.cell_volume();
  for (int l = 0; l < table.n_moments(); ++l) mv.values[l] = cell * cur[l];
  return mv;
}

double grid_renyi_vs_uniform(const DensityGrid& grid) {
  return std::log(grid.h_norm_sq());
}

StaticFitResult solve_static(const StructureOperators& ops, const MomentVector& mv, double mu,
                             const StaticFitOptions& opts) {
  if (mu <= 0.0) throw Error("solve_static: mu must be positive");
  const int N = ops.n_basis();
  const Eigen::MatrixXcd b = moments_to_B(ops, mv);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(N, N);

  StaticFitResult res;
  Eigen::MatrixXcd s = opts.start ? hermitized(opts.start->matrix)
                                  : Eigen::MatrixXcd(id / double(N));
  Eigen::LLT<Eigen::MatrixXcd> llt(s);
  if (llt.info() != Eigen::Success)
    throw PositivityLoss("solve_static: start matrix is not positive definite");
  double j_cur = objective(ops, b, mu, s, llt);

  double best_resid = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    BarrierHessian hess(ops, s, mu, opts.method);
    res.condition = std::max(res.condition, hess.condition());
    Eigen::MatrixXcd s_inv = llt.solve(id);
    Eigen::MatrixXcd grad = ops.apply_A(s) - b - mu * hermitized(s_inv);
    double lambda = grad.trace().real() / N;
    double resid = (grad - lambda * id).norm();
    res.lagrange = lambda;
    res.residual = resid;
    res.iterations = it;
    if (resid <= opts.tol) {
      res.converged = true;
      break;
    }

    // Newton direction with the trace constraint eliminated:
    // delta = -F^-1(grad) + nu F^-1(I), nu chosen so tr(delta) = 0.
    Eigen::MatrixXcd d1 = hess.solve(grad);
    Eigen::MatrixXcd d2 = hess.solve(id);
    double nu = d1.trace().real() / d2.trace().real();
    Eigen::MatrixXcd delta = hermitized(-d1 + nu * d2);

    double slope = grad.conjugate().cwiseProduct(delta).sum().real();
    // J/mu is self-concordant (convex quadratic - ln det), so once the Newton
    // decrement delta^2 = -slope/mu drops below 1/16 the undamped iteration
    // converges quadratically.  Skip the sufficient-decrease test there: the
    // objective change (~residual^2) falls below rounding noise long before
    // the gradient residual reaches tol, and Armijo would reject good steps.
    const bool quadratic_basin = -slope <= mu / 16.0;
    if (quadratic_basin) {
      // Quadratic convergence should at least halve the residual each step;
      // three steps without that means the rounding floor of the Newton
      // system has been reached and further iterations only jitter.
      stalled = resid > 0.5 * best_resid ? stalled + 1 : 0;
      best_resid = std::min(best_resid, resid);
      if (stalled >= 3) break;
    }
    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      Eigen::MatrixXcd cand = s + t * delta;
      Eigen::LLT<Eigen::MatrixXcd> cand_llt(cand);
      if (cand_llt.info() == Eigen::Success) {
        double j_cand = objective(ops, b, mu, cand, cand_llt);
        if (quadratic_basin || j_cand <= j_cur + 1e-4 * t * slope) {
          s = std::move(cand);
          llt = std::move(cand_llt);
          j_cur = j_cand;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Step collapsed to nothing: stop at the best point found.
      res.iterations = it + 1;
      break;
    }
  }

  if (!res.converged) {
    // Refresh the reported residual at the final iterate.
    Eigen::MatrixXcd s_inv = llt.solve(id);
    Eigen::MatrixXcd grad = ops.apply_A(s) - b - mu * hermitized(s_inv);
    res.lagrange = grad.trace().real() / N;
    res.residual = (grad - res.lagrange * id).norm();
    res.converged = res.residual <= opts.tol;
  }
  res.s.matrix = s;
  res.objective = j_cur;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s, Eigen::EigenvaluesOnly);
  res.min_eigenvalue = es.eigenvalues().minCoeff();
  return res;
}

}  // namespace sdmpdf
