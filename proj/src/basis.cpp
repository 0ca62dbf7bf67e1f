#include "sdmpdf/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sdmpdf/csv.hpp"
#include "sdmpdf/errors.hpp"

namespace sdmpdf {

namespace {

// n! exactly representable in double for n <= 22; larger values go through
// lgamma so the square-root combination below stays finite far beyond the
// overflow point of the direct product.
double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table[n];
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double hermite_coeff_1d(int j, int k, int l) {
  if (j < 0 || k < 0 || l < 0) return 0.0;
  int s = j + k + l;
  if (s % 2 != 0) return 0.0;
  int m = s / 2;
  if (m < j || m < k || m < l) return 0.0;
  if (m <= 20) {
    return std::sqrt(factorial(j) * factorial(k) * factorial(l)) /
           (factorial(m - j) * factorial(m - k) * factorial(m - l));
  }
  double lg = 0.5 * (log_factorial(j) + log_factorial(k) + log_factorial(l)) -
              log_factorial(m - j) - log_factorial(m - k) - log_factorial(m - l);
  return std::exp(lg);
}

}  // namespace

std::string family_name(BasisFamily f) {
  return f == BasisFamily::fourier ? "fourier" : "hermite";
}

BasisFamily family_from_name(const std::string& s) {
  if (s == "fourier") return BasisFamily::fourier;
  if (s == "hermite") return BasisFamily::hermite;
  throw ConfigError("unknown basis family: " + s);
}

IndexSets build_index_set(BasisFamily family, int dim, int degree) {
  if (dim < 1) throw ConfigError("dimension must be >= 1");
  if (degree < 1) throw ConfigError("degree must be >= 1");
  IndexSets out;
  if (family == BasisFamily::fourier) {
    out.lambda = IndexSet::cube(dim, -degree, degree);
    out.mho = IndexSet::cube(dim, -2 * degree, 2 * degree);
  } else {
    out.lambda = IndexSet::cube(dim, 0, degree);
    out.mho = IndexSet::cube(dim, 0, 2 * degree);
  }
  return out;
}

double structure_coefficient(BasisFamily family, const MultiIndex& j,
                             const MultiIndex& k, const MultiIndex& l) {
  if (j.dim() != k.dim() || j.dim() != l.dim())
    throw std::invalid_argument("structure_coefficient: dimension mismatch");
  if (family == BasisFamily::fourier) {
    return (j - k) == l ? 1.0 : 0.0;
  }
  double v = 1.0;
  for (int d = 0; d < j.dim(); ++d) {
    v *= hermite_coeff_1d(j[d], k[d], l[d]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

StructureTable build_structure_table(BasisFamily family, int dim, int degree) {
  StructureTable t;
  t.family = family;
  t.dim = dim;
  t.degree = degree;
  auto sets = build_index_set(family, dim, degree);
  t.lambda = std::move(sets.lambda);
  t.mho = std::move(sets.mho);
  const int N = t.lambda.size();
  t.matrices.reserve(t.mho.size());
  for (int lp = 0; lp < t.mho.size(); ++lp) {
    const MultiIndex& l = t.mho[lp];
    Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, N);
    if (family == BasisFamily::fourier) {
      // e_{j,k,l} = [j - k == l]: a single shifted diagonal.
      for (int kp = 0; kp < N; ++kp) {
        int jp = t.lambda.position(t.lambda[kp] + l);
        if (jp >= 0) E(jp, kp) = 1.0;
      }
    } else {
      for (int jp = 0; jp < N; ++jp)
        for (int kp = 0; kp < N; ++kp)
          E(jp, kp) = structure_coefficient(family, t.lambda[jp], t.lambda[kp], l);
    }
    t.matrices.push_back(std::move(E));
  }
  t.zero_moment_pos = t.mho.position(MultiIndex::zero(dim));
  t.zero_basis_pos = t.lambda.position(MultiIndex::zero(dim));
  return t;
}

Eigen::VectorXcd eval_basis_vector(BasisFamily family, const IndexSet& lambda,
                                   std::span<const double> x) {
  const int n = lambda.dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("eval_basis_vector: point dimension mismatch");
  const int N = lambda.size();
  Eigen::VectorXcd phi(N);
  if (family == BasisFamily::fourier) {
    for (int p = 0; p < N; ++p) {
      double arg = 0.0;
      for (int d = 0; d < n; ++d) arg += lambda[p][d] * x[d];
      phi[p] = std::polar(1.0, arg);
    }
    return phi;
  }
  // Normalized probabilists' Hermite values per coordinate,
  // h_{d+1} = (x h_d - sqrt(d) h_{d-1}) / sqrt(d+1); numerically stable
  // upward since the normalized functions stay O(1) near the bulk.
  int max_deg = 0;
  for (const auto& k : lambda) max_deg = std::max(max_deg, k.max_abs());
  std::vector<std::vector<double>> h(n, std::vector<double>(max_deg + 1));
  for (int d = 0; d < n; ++d) {
    h[d][0] = 1.0;
    if (max_deg >= 1) h[d][1] = x[d];
    for (int q = 1; q < max_deg; ++q)
      h[d][q + 1] = (x[d] * h[d][q] - std::sqrt(double(q)) * h[d][q - 1]) / std::sqrt(double(q + 1));
  }
  for (int p = 0; p < N; ++p) {
    double v = 1.0;
    for (int d = 0; d < n; ++d) v *= h[d][lambda[p][d]];
    phi[p] = v;
  }
  return phi;
}

double weight(BasisFamily family, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (family == BasisFamily::fourier)
    return std::pow(2.0 * std::numbers::pi, -n);
  double v = 1.0;
  for (double xi : x)
    v *= std::exp(-0.5 * xi * xi) / std::sqrt(2.0 * std::numbers::pi);
  return v;
}

int effective_dimension(const StructureTable& table) {
  const int L = table.n_moments();
  Eigen::MatrixXcd gram(L, L);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b)
      gram(a, b) = (table.matrices[a].adjoint() * table.matrices[b]).trace();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  return rank;
}

QuadratureRule gauss_hermite_rule(int count) {
  if (count < 1) throw std::invalid_argument("gauss_hermite_rule: count >= 1");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
  // recurrence: zero diagonal, off-diagonal sqrt(k).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(count, count);
  for (int k = 1; k < count; ++k) {
    J(k, k - 1) = std::sqrt(double(k));
    J(k - 1, k) = J(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw Error("gauss_hermite_rule: eigensolver failed");
  QuadratureRule r;
  r.nodes = es.eigenvalues();
  r.weights.resize(count);
  for (int i = 0; i < count; ++i) {
    double v = es.eigenvectors()(0, i);
    r.weights[i] = v * v;  // total mass 1 (standard normal weight)
  }
  return r;
}

void write_structure_table_csv(const StructureTable& table, const std::string& dir) {
  csv::ensure_dir(dir);
  for (int lp = 0; lp < table.n_moments(); ++lp) {
    const MultiIndex& l = table.mho[lp];
    std::string name = dir + "/E_" + l.join('_') + ".csv";
    std::vector<std::string> header = {
        "# structure matrix l=" + l.to_string() + " family=" + family_name(table.family) +
        " n=" + std::to_string(table.dim) + " r=" + std::to_string(table.degree)};
    csv::write_complex_matrix(name, table.matrices[lp], header);
  }
}

}  // namespace sdmpdf
