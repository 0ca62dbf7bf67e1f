#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "sdmpdf/approx.hpp"
#include "sdmpdf/density_grid.hpp"
#include "sdmpdf/operators.hpp"
#include "sdmpdf/potential.hpp"
#include "sdmpdf/sdm.hpp"

namespace sdmpdf {

// Matrix elements of the Kolmogorov backward generator of the Smoluchowski
// diffusion over the Fourier basis, restricted to mho:
//   g_{l,m} = <phi_l, G(phi_m)> = V_{l-m} (l-m).m - (sigma^2/2) delta_{lm} |m|^2.
struct GeneratorMatrix {
  Eigen::MatrixXcd elements;  // L x L, mho order
  double sigma = 0.0;
};
GeneratorMatrix generator_matrix(const Potential& pot, double sigma, const IndexSet& mho);

// K(f) = sum_l E_f[G(phi_l)] E_l with the moment expansion truncated to mho:
// E_f[G(phi_l)] ~= sum_{m in mho} g_{m,l} E_f[phi_m].  Exact whenever f's
// spectrum is supported in mho (in particular f = p_S).
Eigen::MatrixXcd compute_K(const GeneratorMatrix& gen, const MomentVector& mv,
                           const StructureOperators& ops);

// Quadrature path: E_f[G(phi_l)] = integral of f * G(phi_l) with
// G(phi_l)(x) = (-i l . grad V(x) - (sigma^2/2)|l|^2) e^{i l.x} evaluated
// analytically; spectrally accurate for smooth f (no mho truncation).
Eigen::VectorXcd generator_moments_from_grid(const Potential& pot, double sigma,
                                             const DensityGrid& f, const IndexSet& mho,
                                             Exec exec = Exec::parallel);
// Assemble K from a vector of generator moments (Hermitized).
Eigen::MatrixXcd assemble_K(const StructureOperators& ops, const Eigen::VectorXcd& gmoments);

// Precomputed contraction for the closed flow: vec(Q(S)) = qmat * vec(S)
// with Q(S) = sum_{l,m} g_{l,m} <E_l, S> E_m = K(p_S).
class DynamicsOperators {
 public:
  DynamicsOperators(const StructureOperators& ops, const GeneratorMatrix& gen, double mu,
                    FSolveMethod method = FSolveMethod::gram_reduction);

  const StructureOperators& ops() const { return *ops_; }
  const GeneratorMatrix& gen() const { return *gen_; }
  double mu() const { return mu_; }
  FSolveMethod method() const { return method_; }

  // Hermitized Q(S); hermiticity_defect (if given) receives the
  // pre-Hermitization defect ||Q - Q^*||_F.
  Eigen::MatrixXcd compute_Q(const Sdm& s, double* hermiticity_defect = nullptr) const;

  // dS/dt = F_S^-1(K) - (tr F_S^-1(K) / tr F_S^-1(I)) F_S^-1(I); trace-zero.
  Eigen::MatrixXcd rhs_exact(const Sdm& s, const Eigen::MatrixXcd& k_f) const;
  // rhs_exact with K = Q(S) (the self-contained closure).
  Eigen::MatrixXcd rhs_closure(const Sdm& s) const;

 private:
  const StructureOperators* ops_;
  const GeneratorMatrix* gen_;
  double mu_;
  FSolveMethod method_;
  Eigen::MatrixXcd qmat_;  // N^2 x N^2
};

struct StepRecord {
  double t = 0.0;          // time after the step
  double trace_drift = 0.0;  // |tr - 1| before renormalization (worst substep)
  double min_eigenvalue = 0.0;
  double step_size = 0.0;  // smallest substep used
};

struct SdmTrajectory {
  std::vector<StepRecord> records;        // one per accepted global step
  std::vector<double> state_times;        // strided snapshots (+ final)
  std::vector<Sdm> states;
  Sdm final_state;
  int total_substeps = 0;
};

// One global step of the guarded RK4 scheme: try dt, halve on any loss of
// positive definiteness in the stages (down to dt/1024), Hermitize and
// renormalize the trace after every substep, abort if the minimum eigenvalue
// drops below 1e-12.
class ClosureIntegrator {
 public:
  // k_source: nullptr for the closure, otherwise K(t) for exact tracking.
  ClosureIntegrator(const DynamicsOperators& dyn, Sdm s0, double dt,
                    std::function<Eigen::MatrixXcd(double)> k_source = nullptr);

  StepRecord step();
  const Sdm& state() const { return s_; }
  double time() const { return t_; }
  int substeps_taken() const { return substeps_; }

 private:
  Eigen::MatrixXcd rhs(const Sdm& s, double t) const;
  bool try_substep(double h);  // false if a stage left the PD cone

  const DynamicsOperators* dyn_;
  Sdm s_;
  double dt_, t_ = 0.0;
  std::function<Eigen::MatrixXcd(double)> k_source_;
  int substeps_ = 0;
  double last_trace_drift_ = 0.0;
  double min_eig_ = 0.0;
};

SdmTrajectory integrate(const DynamicsOperators& dyn, const Sdm& s0, double t_final,
                        double dt, int state_stride = 0,
                        std::function<Eigen::MatrixXcd(double)> k_source = nullptr);

void write_trajectory_csv(const std::string& path, const SdmTrajectory& traj);

}  // namespace sdmpdf
