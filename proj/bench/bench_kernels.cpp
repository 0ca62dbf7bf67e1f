// Timing comparison: serial reference kernels vs the OpenMP paths, plus the
// dense N^2 factorization vs the Gram reduction for the barrier Hessian solve.
#include <chrono>
#include <cstdio>
#include <random>

#include "sdmpdf/approx.hpp"
#include "sdmpdf/dynamics.hpp"
#include "sdmpdf/operators.hpp"
#include "sdmpdf/potential.hpp"
#include "sdmpdf/sdm.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double timed(F&& f, int reps) {
  auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) f();
  return seconds(t0, Clock::now()) / reps;
}

sdmpdf::Sdm random_state(const sdmpdf::StructureTable& table, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  int n = table.n_basis();
  Eigen::MatrixXcd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) g(j, k) = std::complex<double>(gauss(rng), gauss(rng));
  Eigen::MatrixXcd s = g * g.adjoint();
  s /= s.trace().real();
  sdmpdf::Sdm out;
  out.matrix = s;
  return out;
}

}  // namespace

int main() {
  using namespace sdmpdf;
  const int n = 2, r = 2, mesh = 100;
  StructureTable table = build_structure_table(BasisFamily::fourier, n, r);
  StructureOperators ops(table);
  Sdm s = random_state(table, 42);
  Potential pot = Potential::sample(n, 5, 1, 0.25);
  DensityGrid f = eval_pdf_grid(s, table, mesh);

  std::printf("%-34s %12s %12s %8s\n", "kernel", "serial [s]", "parallel [s]", "speedup");
  auto row = [](const char* name, double ts, double tp) {
    std::printf("%-34s %12.4g %12.4g %8.2f\n", name, ts, tp, ts / tp);
  };

  {
    double ts = timed([&] { eval_pdf_grid(s, table, mesh, Exec::serial); }, 3);
    double tp = timed([&] { eval_pdf_grid(s, table, mesh, Exec::parallel); }, 3);
    row("eval_pdf_grid (M=100, N=25)", ts, tp);
  }
  {
    double ts = timed([&] { moments_from_grid(f, table, Exec::serial); }, 3);
    double tp = timed([&] { moments_from_grid(f, table, Exec::parallel); }, 3);
    row("moments_from_grid (L=81)", ts, tp);
  }
  {
    double ts = timed([&] { pot.gradient_axis_grid(mesh, 0, 0.5, Exec::serial); }, 5);
    double tp = timed([&] { pot.gradient_axis_grid(mesh, 0, 0.5, Exec::parallel); }, 5);
    row("gradient_axis_grid (M=100)", ts, tp);
  }
  {
    IndexSet mho = IndexSet::cube(n, -2 * r, 2 * r);
    double ts = timed(
        [&] { generator_moments_from_grid(pot, 1.0, f, mho, Exec::serial); }, 2);
    double tp = timed(
        [&] { generator_moments_from_grid(pot, 1.0, f, mho, Exec::parallel); }, 2);
    row("generator_moments_from_grid", ts, tp);
  }
  {
    double ts = timed(
        [&] { BarrierHessian h(ops, s.matrix, 0.01, FSolveMethod::gram_reduction, Exec::serial); },
        3);
    double tp = timed(
        [&] {
          BarrierHessian h(ops, s.matrix, 0.01, FSolveMethod::gram_reduction, Exec::parallel);
        },
        3);
    row("gram build (L=81)", ts, tp);
  }

  std::printf("\n%-34s %12s %12s %8s\n", "F-solve", "dense [s]", "gram [s]", "ratio");
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(table.n_basis(), table.n_basis());
  double td = timed(
      [&] {
        BarrierHessian h(ops, s.matrix, 0.01, FSolveMethod::dense_vectorized);
        h.solve(y);
      },
      2);
  double tg = timed(
      [&] {
        BarrierHessian h(ops, s.matrix, 0.01, FSolveMethod::gram_reduction);
        h.solve(y);
      },
      2);
  std::printf("%-34s %12.4g %12.4g %8.2f\n", "factor + one solve (N=25)", td, tg, td / tg);
  return 0;
}
