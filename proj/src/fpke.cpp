#include "sdmpdf/fpke.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sdmpdf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmpdf {

DensityGrid gibbs_invariant(const Potential& pot, double beta, int mesh) {
  if (beta <= 0.0) throw ConfigError("gibbs_invariant: beta must be > 0");
  DensityGrid g = DensityGrid::zeros(pot.dim(), mesh);
  std::vector<double> v = pot.eval_grid(mesh);
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = std::exp(-beta * v[i]);
  double z = g.integral();
  for (double& x : g.values) x /= z;
  return g;
}

double FdSolver::stability_limit(int mesh, int dim, double sigma) {
  double h = 2.0 * std::numbers::pi / mesh;
  return 2.785 * h * h / (2.0 * dim * sigma * sigma * 1.1);
}

FdSolver::FdSolver(DensityGrid f0, const Potential& pot, double sigma, double dt, Exec exec)
    : f_(std::move(f0)), pot_(&pot), sigma_(sigma), dt_(dt), exec_(exec) {
  if (f_.dim != pot.dim()) throw ConfigError("FdSolver: grid/potential dimension mismatch");
  if (f_.mesh < 4 * pot.cutoff())
    throw ConfigError("FdSolver: mesh " + std::to_string(f_.mesh) +
                      " does not resolve the potential (need >= 4*cutoff)");
  double limit = stability_limit(f_.mesh, f_.dim, sigma);
  if (dt > limit)
    throw ConfigError("FdSolver: dt " + std::to_string(dt) +
                      " exceeds the stability limit " + std::to_string(limit));
  face_drift_.resize(f_.dim);
  for (int d = 0; d < f_.dim; ++d)
    face_drift_[d] = pot.gradient_axis_grid(f_.mesh, d, 0.5, exec_);
  k1_.resize(f_.size());
  k2_.resize(f_.size());
  k3_.resize(f_.size());
  k4_.resize(f_.size());
  tmp_.resize(f_.size());
  worst_min_ = f_.min_value();
}

void FdSolver::rhs(const std::vector<double>& in, std::vector<double>& out) const {
  const int n = f_.dim;
  const int m = f_.mesh;
  const double h = f_.spacing();
  const double diff = 0.5 * sigma_ * sigma_;
  const std::size_t total = in.size();
  // strides: axis d (first slowest) has stride m^(n-1-d)
  std::size_t stride[8];
  stride[n - 1] = 1;
  for (int d = n - 2; d >= 0; --d) stride[d] = stride[d + 1] * m;
  const bool par = exec_ == Exec::parallel;
  (void)par;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (long long ii = 0; ii < static_cast<long long>(total); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double acc = 0.0;
    std::size_t rem = i;
    int coord[8];
    for (int d = n - 1; d >= 0; --d) {
      coord[d] = static_cast<int>(rem % m);
      rem /= m;
    }
    for (int d = 0; d < n; ++d) {
      const std::size_t s = stride[d];
      const std::size_t up = (coord[d] == m - 1) ? i - (m - 1) * s : i + s;
      const std::size_t dn = (coord[d] == 0) ? i + (m - 1) * s : i - s;
      // right/left cell-face fluxes of f dV/dx_d + diff df/dx_d
      const double flux_r =
          0.5 * (in[i] + in[up]) * face_drift_[d][i] + diff * (in[up] - in[i]) / h;
      const double flux_l =
          0.5 * (in[dn] + in[i]) * face_drift_[d][dn] + diff * (in[i] - in[dn]) / h;
      acc += (flux_r - flux_l) / h;
    }
    out[i] = acc;
  }
}

void FdSolver::step() {
  const std::size_t total = f_.size();
  std::vector<double>& f = f_.values;
  rhs(f, k1_);
  for (std::size_t i = 0; i < total; ++i) tmp_[i] = f[i] + 0.5 * dt_ * k1_[i];
  rhs(tmp_, k2_);
  for (std::size_t i = 0; i < total; ++i) tmp_[i] = f[i] + 0.5 * dt_ * k2_[i];
  rhs(tmp_, k3_);
  for (std::size_t i = 0; i < total; ++i) tmp_[i] = f[i] + dt_ * k3_[i];
  rhs(tmp_, k4_);
  for (std::size_t i = 0; i < total; ++i)
    f[i] += dt_ / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  t_ += dt_;
  double mn = f_.min_value();
  worst_min_ = std::min(worst_min_, mn);
  if (mn < negativity_floor)
    throw PositivityLoss("FdSolver: density value " + std::to_string(mn) +
                             " fell below the negativity floor at t=" + std::to_string(t_),
                         t_, mn);
}

void FdSolver::run(int steps) {
  for (int i = 0; i < steps; ++i) step();
}

FourierDensity FourierDensity::uniform(int dim, int truncation) {
  FourierDensity fd;
  fd.dim = dim;
  fd.truncation = truncation;
  fd.cube = IndexSet::cube(dim, -truncation, truncation);
  fd.coeffs = Eigen::VectorXcd::Zero(fd.cube.size());
  fd.coeffs[fd.cube.position(MultiIndex::zero(dim))] =
      std::pow(2.0 * std::numbers::pi, -dim);
  return fd;
}

std::complex<double> FourierDensity::at(const MultiIndex& j) const {
  int pos = cube.position(j);
  return pos < 0 ? std::complex<double>(0.0) : coeffs[pos];
}

DensityGrid FourierDensity::to_grid(int mesh) const {
  DensityGrid g = DensityGrid::zeros(dim, mesh);
  const double h = g.spacing();
  const double f0 = coeffs[cube.position(MultiIndex::zero(dim))].real();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(g.size()); ++i) {
    std::size_t rem = i;
    double x[8];
    for (int d = dim - 1; d >= 0; --d) {
      x[d] = h * static_cast<double>(rem % mesh);
      rem /= mesh;
    }
    double v = f0;
    for (int p = 0; p < cube.size(); ++p) {
      const MultiIndex& j = cube[p];
      if (!j.first_nonzero_positive()) continue;  // mirror below
      double arg = 0.0;
      for (int d = 0; d < dim; ++d) arg += j[d] * x[d];
      v += 2.0 * (coeffs[p] * std::polar(1.0, arg)).real();
    }
    g.values[i] = v;
  }
  return g;
}

Eigen::VectorXcd galerkin_rhs(const FourierDensity& fd, const Potential& pot, double sigma) {
  if (fd.truncation < pot.cutoff())
    throw ConfigError("galerkin_rhs: truncation below the potential cutoff");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(fd.coeffs.size());
  const double d2 = 0.5 * sigma * sigma;
  for (int p = 0; p < fd.cube.size(); ++p) {
    const MultiIndex& j = fd.cube[p];
    if (!j.first_nonzero_positive()) continue;  // j=0 stays 0; -j mirrored
    std::complex<double> conv = 0.0;
    for (const auto& [k, vk] : pot.half_lattice()) {
      // V_k k f_{j-k} + V_{-k}(-k) f_{j+k}, projected on j
      long long jk = 0, jmk = 0;
      for (int d = 0; d < j.dim(); ++d) jk += static_cast<long long>(j[d]) * k[d];
      conv += double(jk) * (vk * fd.at(j - k) - std::conj(vk) * fd.at(j + k));
    }
    std::complex<double> dj =
        -conv - d2 * static_cast<double>(j.squared_norm()) * fd.coeffs[p];
    out[p] = dj;
    out[fd.cube.position(-j)] = std::conj(dj);
  }
  return out;
}

void galerkin_step(FourierDensity& fd, const Potential& pot, double sigma, double dt) {
  Eigen::VectorXcd k1 = galerkin_rhs(fd, pot, sigma);
  FourierDensity s = fd;
  s.coeffs = fd.coeffs + 0.5 * dt * k1;
  Eigen::VectorXcd k2 = galerkin_rhs(s, pot, sigma);
  s.coeffs = fd.coeffs + 0.5 * dt * k2;
  Eigen::VectorXcd k3 = galerkin_rhs(s, pot, sigma);
  s.coeffs = fd.coeffs + dt * k3;
  Eigen::VectorXcd k4 = galerkin_rhs(s, pot, sigma);
  fd.coeffs += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

EnergyBoundReport energy_bound_check(const std::vector<double>& h_norm_sq_series, double dt,
                                     double max_abs_laplacian_v, double sigma, int dim,
                                     double slack) {
  EnergyBoundReport rep;
  const double source = std::pow(2.0 * std::numbers::pi, -2 * dim) * sigma * sigma;
  double worst_rel = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < h_norm_sq_series.size(); ++k) {
    double lhs = (h_norm_sq_series[k + 1] - h_norm_sq_series[k]) / dt;
    double bound = (max_abs_laplacian_v - sigma * sigma) * h_norm_sq_series[k] + source;
    double margin = lhs - bound;
    double scale = std::max(1.0, std::abs(bound));
    rep.margins.push_back(margin);
    if (margin / scale > worst_rel) {
      worst_rel = margin / scale;
      rep.worst_margin = margin;
      rep.worst_scale = scale;
    }
    if (margin > slack * scale) ++rep.violations;
  }
  return rep;
}

double renyi_relative(const DensityGrid& f, const DensityGrid& g) {
  if (f.dim != g.dim || f.mesh != g.mesh)
    throw Error("renyi_relative: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (g.values[i] <= 1e-300)
      throw Error("renyi_relative: reference density vanishes on the grid");
    s += f.values[i] * f.values[i] / g.values[i];
  }
  return std::log(s * f.cell_volume());
}

}  // namespace sdmpdf
