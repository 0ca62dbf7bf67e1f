#include "sdmpdf/sdm.hpp"

#include <cmath>
#include <numbers>

#include "sdmpdf/csv.hpp"
#include "sdmpdf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmpdf {

namespace {

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& m) {
  return 0.5 * (m + m.adjoint());
}

// Per-axis Fourier phase table: w(a, i) = exp(i * freq_a * x_i) for
// freq_a = -2r..2r and grid points x_i = 2*pi*i/mesh.
Eigen::MatrixXcd fourier_axis_table(int degree2, int mesh) {
  Eigen::MatrixXcd w(2 * degree2 + 1, mesh);
  const double h = 2.0 * std::numbers::pi / mesh;
  for (int a = 0; a <= 2 * degree2; ++a) {
    int freq = a - degree2;
    for (int i = 0; i < mesh; ++i) w(a, i) = std::polar(1.0, freq * h * i);
  }
  return w;
}

}  // namespace

Sdm Sdm::uniform(int n_basis) {
  Sdm s;
  s.matrix = Eigen::MatrixXcd::Identity(n_basis, n_basis) / double(n_basis);
  return s;
}

Sdm Sdm::pure(const Eigen::VectorXcd& unit) {
  Sdm s;
  s.matrix = unit * unit.adjoint();
  return s;
}

SdmDiagnostics validate(const Sdm& s) {
  SdmDiagnostics d;
  d.hermiticity_defect = (s.matrix - s.matrix.adjoint()).norm();
  d.trace_deviation = std::abs(s.matrix.trace() - std::complex<double>(1.0, 0.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(s.matrix),
                                                     Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  d.pass = d.hermiticity_defect <= 1e-12 && d.trace_deviation <= 1e-10 &&
           d.min_eigenvalue >= -1e-12;
  return d;
}

double eval_pdf(const Sdm& s, const StructureTable& table, std::span<const double> x) {
  Eigen::VectorXcd phi = eval_basis_vector(table.family, table.lambda, x);
  std::complex<double> q = phi.dot(s.matrix * phi);  // phi^* S phi
  if (std::abs(q.imag()) > 1e-12 * std::max(1.0, std::abs(q.real())))
    throw Error("eval_pdf: quadratic form has imaginary residue " +
                std::to_string(q.imag()) + " (matrix not Hermitian?)");
  return weight(table.family, x) * q.real();
}

DensityGrid eval_pdf_grid(const Sdm& s, const StructureTable& table, int mesh,
                          Exec exec) {
  if (table.family != BasisFamily::fourier)
    throw Error("eval_pdf_grid: torus grids require the fourier family");
  const int n = table.dim;
  DensityGrid g = DensityGrid::zeros(n, mesh);
  const double nu = std::pow(2.0 * std::numbers::pi, -n);

  if (exec == Exec::serial) {
    // Reference: the quadratic form point by point.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, x.data());
      g.values[i] = eval_pdf(s, table, x);
    }
    return g;
  }

  // Optimized: p/nu = sum_l C_l conj(phi_l), contracted one axis at a time.
  Eigen::VectorXcd c = coefficient_map(s, table);
  const int F = 4 * table.degree + 1;
  Eigen::MatrixXcd w = fourier_axis_table(2 * table.degree, mesh);
  std::vector<std::complex<double>> cur(c.data(), c.data() + c.size());
  std::size_t prefix = 1;  // product of grid axes already materialized
  std::size_t suffix = cur.size() / F;
  for (int d = 0; d < n; ++d) {
    std::vector<std::complex<double>> next(prefix * mesh * suffix);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long pi = 0; pi < static_cast<long long>(prefix * mesh); ++pi) {
      const std::size_t p = pi / mesh;
      const int i = static_cast<int>(pi % mesh);
      for (std::size_t q = 0; q < suffix; ++q) {
        std::complex<double> acc = 0.0;
        for (int a = 0; a < F; ++a)
          acc += cur[(p * F + a) * suffix + q] * std::conj(w(a, i));
        next[(p * mesh + i) * suffix + q] = acc;
      }
    }
    cur.swap(next);
    prefix *= mesh;
    suffix /= F;
  }
  double max_imag = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    max_imag = std::max(max_imag, std::abs(cur[i].imag()));
    g.values[i] = nu * cur[i].real();
  }
  if (max_imag > 1e-9)
    throw Error("eval_pdf_grid: imaginary residue " + std::to_string(max_imag));
  return g;
}

Eigen::VectorXcd coefficient_map(const Sdm& s, const StructureTable& table) {
  const int L = table.n_moments();
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(L);
  if (table.family == BasisFamily::fourier) {
    // <E_l, S> = sum over the l-th shifted diagonal; one pass over S.
    const int N = table.n_basis();
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        c[table.mho.position(table.lambda[j] - table.lambda[k])] += s.matrix(j, k);
    return c;
  }
  for (int lp = 0; lp < L; ++lp)
    c[lp] = table.matrices[lp].conjugate().cwiseProduct(s.matrix).sum();
  return c;
}

std::complex<double> moment(const Sdm& s, const StructureTable& table, const MultiIndex& m) {
  int pos = table.mho.position(m);
  if (pos < 0) return 0.0;
  return table.matrices[pos].conjugate().cwiseProduct(s.matrix).sum();
}

double renyi_vs_weight(const Sdm& s, const StructureTable& table) {
  Eigen::VectorXcd c = coefficient_map(s, table);
  double sum = 0.0;
  for (int lp = 0; lp < c.size(); ++lp) {
    if (lp == table.zero_moment_pos) continue;
    sum += std::norm(c[lp]);
  }
  return std::log1p(sum);
}

SosDecomposition sos_decomposition(const Sdm& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(s.matrix));
  if (es.info() != Eigen::Success) throw Error("sos_decomposition: eigensolver failed");
  const int N = s.size();
  SosDecomposition out;
  out.weights.resize(N);
  out.vectors.resize(N, N);
  for (int i = 0; i < N; ++i) {
    // Eigen sorts ascending; emit descending.
    double w = es.eigenvalues()[N - 1 - i];
    if (w < -1e-10)
      throw PositivityLoss("sos_decomposition: eigenvalue " + std::to_string(w) +
                               " below the -1e-10 clamp window",
                           0.0, w);
    out.weights[i] = std::max(w, 0.0);
    Eigen::VectorXcd v = es.eigenvectors().col(N - 1 - i);
    for (int j = 0; j < N; ++j) {
      if (std::abs(v[j]) > 1e-12) {
        v *= std::conj(v[j]) / std::abs(v[j]);
        break;
      }
    }
    out.vectors.col(i) = v;
  }
  return out;
}

void write_sdm_csv(const std::string& path, const Sdm& s, const StructureTable& table) {
  std::vector<std::string> header = {"# sdm n=" + std::to_string(table.dim) +
                                     " r=" + std::to_string(table.degree) +
                                     " family=" + family_name(table.family)};
  csv::write_complex_matrix(path, s.matrix, header);
}

Sdm read_sdm_csv(const std::string& path) {
  Sdm s;
  s.matrix = csv::read_complex_matrix(path);
  if (s.matrix.rows() != s.matrix.cols())
    throw IoError("sdm csv is not square: " + path);
  return s;
}

}  // namespace sdmpdf
