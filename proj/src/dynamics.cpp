#include "sdmpdf/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sdmpdf/csv.hpp"
#include "sdmpdf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmpdf {

GeneratorMatrix generator_matrix(const Potential& pot, double sigma, const IndexSet& mho) {
  const int L = mho.size();
  GeneratorMatrix g;
  g.sigma = sigma;
  g.elements.resize(L, L);
  for (int b = 0; b < L; ++b) {
    const MultiIndex& m = mho[b];
    const double diag = -0.5 * sigma * sigma * static_cast<double>(m.squared_norm());
    for (int a = 0; a < L; ++a) {
      const MultiIndex& l = mho[a];
      MultiIndex d = l - m;
      long long dm = 0;
      for (int i = 0; i < d.dim(); ++i) dm += static_cast<long long>(d[i]) * m[i];
      std::complex<double> v = pot.coefficient(d) * static_cast<double>(dm);
      if (a == b) v += diag;
      g.elements(a, b) = v;
    }
  }
  return g;
}

Eigen::MatrixXcd compute_K(const GeneratorMatrix& gen, const MomentVector& mv,
                           const StructureOperators& ops) {
  if (mv.size() != ops.n_moments()) throw Error("compute_K: moment vector length mismatch");
  // E_f[G(phi_l)] = sum_m g_{m,l} E_f[phi_m], truncated to mho.
  Eigen::VectorXcd q = gen.elements.transpose() * mv.values;
  return hermitized(ops.assemble_from_moments(q));
}

Eigen::VectorXcd generator_moments_from_grid(const Potential& pot, double sigma,
                                             const DensityGrid& f, const IndexSet& mho,
                                             Exec exec) {
  const int n = f.dim;
  const int L = mho.size();
  const double h = f.spacing();
  const double cell = f.cell_volume();
  // grad V on the grid, one array per axis
  std::vector<std::vector<double>> gv(n);
  for (int d = 0; d < n; ++d) gv[d] = pot.gradient_axis_grid(f.mesh, d, 0.0, exec);
  Eigen::VectorXcd out(L);
  const bool par = exec == Exec::parallel;
  (void)par;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
  for (int a = 0; a < L; ++a) {
    const MultiIndex& l = mho[a];
    const double decay = -0.5 * sigma * sigma * static_cast<double>(l.squared_norm());
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::size_t rem = i;
      double arg = 0.0;
      double ldotg = 0.0;
      for (int d = n - 1; d >= 0; --d) {
        int c = static_cast<int>(rem % f.mesh);
        rem /= f.mesh;
        arg += l[d] * (h * c);
        ldotg += l[d] * gv[d][i];
      }
      // G(phi_l)(x) = (-i l.grad V - (sigma^2/2)|l|^2) e^{i l.x}
      acc += f.values[i] * std::complex<double>(decay, -ldotg) * std::polar(1.0, arg);
    }
    out[a] = cell * acc;
  }
  return out;
}

Eigen::MatrixXcd assemble_K(const StructureOperators& ops, const Eigen::VectorXcd& gmoments) {
  return hermitized(ops.assemble_from_moments(gmoments));
}

DynamicsOperators::DynamicsOperators(const StructureOperators& ops, const GeneratorMatrix& gen,
                                     double mu, FSolveMethod method)
    : ops_(&ops), gen_(&gen), mu_(mu), method_(method) {
  if (gen.elements.rows() != ops.n_moments())
    throw Error("DynamicsOperators: generator/structure size mismatch");
  if (ops.table().family != BasisFamily::fourier)
    throw Error("DynamicsOperators: dynamics are defined over the Fourier family");
}

Eigen::MatrixXcd DynamicsOperators::compute_Q(const Sdm& s, double* hermiticity_defect) const {
  Sdm tmp{s.matrix};
  Eigen::VectorXcd c = coefficient_map(tmp, ops_->table());
  Eigen::VectorXcd q = gen_->elements.transpose() * c;
  Eigen::MatrixXcd raw = ops_->assemble_from_moments(q);
  if (hermiticity_defect) *hermiticity_defect = (raw - raw.adjoint()).norm();
  return hermitized(raw);
}

Eigen::MatrixXcd DynamicsOperators::rhs_exact(const Sdm& s, const Eigen::MatrixXcd& k_f) const {
  BarrierHessian hess(*ops_, s.matrix, mu_, method_);
  const int n = s.size();
  Eigen::MatrixXcd a = hess.solve(k_f);
  Eigen::MatrixXcd b = hess.solve(Eigen::MatrixXcd::Identity(n, n));
  double lambda = a.trace().real() / b.trace().real();
  return hermitized(a - lambda * b);
}

Eigen::MatrixXcd DynamicsOperators::rhs_closure(const Sdm& s) const {
  return rhs_exact(s, compute_Q(s));
}

ClosureIntegrator::ClosureIntegrator(const DynamicsOperators& dyn, Sdm s0, double dt,
                                     std::function<Eigen::MatrixXcd(double)> k_source)
    : dyn_(&dyn), s_(std::move(s0)), dt_(dt), k_source_(std::move(k_source)) {
  if (dt <= 0.0) throw Error("ClosureIntegrator: dt must be positive");
  SdmDiagnostics diag = validate(s_);
  if (!diag.pass || diag.min_eigenvalue <= 0.0)
    throw PositivityLoss("ClosureIntegrator: initial state is not a strictly PD SDM", 0.0,
                         diag.min_eigenvalue);
}

Eigen::MatrixXcd ClosureIntegrator::rhs(const Sdm& s, double t) const {
  if (k_source_) return dyn_->rhs_exact(s, k_source_(t));
  return dyn_->rhs_closure(s);
}

bool ClosureIntegrator::try_substep(double h) {
  const int n = s_.size();
  Sdm stage;
  Eigen::MatrixXcd k1, k2, k3, k4;
  try {
    k1 = rhs(s_, t_);
    stage.matrix = s_.matrix + 0.5 * h * k1;
    k2 = rhs(stage, t_ + 0.5 * h);
    stage.matrix = s_.matrix + 0.5 * h * k2;
    k3 = rhs(stage, t_ + 0.5 * h);
    stage.matrix = s_.matrix + h * k3;
    k4 = rhs(stage, t_ + h);
  } catch (const PositivityLoss&) {
    return false;  // a stage left the PD cone; caller halves h
  }
  Eigen::MatrixXcd next = s_.matrix + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next = hermitized(next);
  double tr = next.trace().real();
  double drift = std::abs(tr - 1.0);
  Eigen::LLT<Eigen::MatrixXcd> llt(next);
  if (llt.info() != Eigen::Success) return false;
  next /= tr;  // exact renormalization; the flow preserves the trace analytically
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(next, Eigen::EigenvaluesOnly);
  double mineig = es.eigenvalues().minCoeff();
  if (mineig < 1e-12)
    throw PositivityLoss("integrate: positivity breach (min eigenvalue " +
                             std::to_string(mineig) + ") at t=" + std::to_string(t_ + h),
                         t_ + h, mineig);
  s_.matrix = std::move(next);
  t_ += h;
  ++substeps_;
  last_trace_drift_ = drift;
  min_eig_ = mineig;
  return true;
}

StepRecord ClosureIntegrator::step() {
  const double target = t_ + dt_;
  double h = dt_;
  StepRecord rec;
  rec.step_size = dt_;
  rec.trace_drift = 0.0;
  while (t_ < target - 1e-14 * std::max(1.0, std::abs(target))) {
    double take = std::min(h, target - t_);
    if (try_substep(take)) {
      rec.trace_drift = std::max(rec.trace_drift, last_trace_drift_);
      rec.step_size = std::min(rec.step_size, take);
    } else {
      h *= 0.5;
      if (h < dt_ / 1024.0 - 1e-300)
        throw PositivityLoss(
            "integrate: step rejected down to dt/1024 at t=" + std::to_string(t_), t_, 0.0);
    }
  }
  rec.t = t_;
  rec.min_eigenvalue = min_eig_;
  return rec;
}

SdmTrajectory integrate(const DynamicsOperators& dyn, const Sdm& s0, double t_final,
                        double dt, int state_stride,
                        std::function<Eigen::MatrixXcd(double)> k_source) {
  SdmTrajectory traj;
  ClosureIntegrator integ(dyn, s0, dt, std::move(k_source));
  long long steps = llround(t_final / dt);
  if (std::abs(steps * dt - t_final) > 1e-9 * std::max(1.0, t_final))
    steps = static_cast<long long>(std::ceil(t_final / dt - 1e-12));
  for (long long i = 0; i < steps; ++i) {
    StepRecord rec = integ.step();
    traj.records.push_back(rec);
    if (state_stride > 0 && (i + 1) % state_stride == 0) {
      traj.state_times.push_back(rec.t);
      traj.states.push_back(integ.state());
    }
  }
  traj.final_state = integ.state();
  traj.total_substeps = integ.substeps_taken();
  if (traj.state_times.empty() || traj.state_times.back() != integ.time()) {
    traj.state_times.push_back(integ.time());
    traj.states.push_back(integ.state());
  }
  return traj;
}

void write_trajectory_csv(const std::string& path, const SdmTrajectory& traj) {
  std::ostringstream os;
  os << "t,trace_dev,min_eig,step_size\n";
  for (const auto& r : traj.records) {
    os << csv::g17(r.t) << ',' << csv::g17(r.trace_drift) << ',' << csv::g17(r.min_eigenvalue)
       << ',' << csv::g17(r.step_size) << '\n';
  }
  csv::write_file(path, os.str());
}

}  // namespace sdmpdf
