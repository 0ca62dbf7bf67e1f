#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "sdmpdf/density_grid.hpp"
#include "sdmpdf/dynamics.hpp"
#include "sdmpdf/fpke.hpp"
#include "sdmpdf/potential.hpp"

namespace sdmpdf {

inline constexpr const char* kVersion = "1.0.0";

// Defaults reproduce the reference torus experiment: a seeded random
// trigonometric potential, finite-difference ground truth, and the closed
// SDM flow started from the same uniform density.
struct ExperimentConfig {
  int n = 2;
  int r = 2;        // basis degree (N = (2r+1)^n)
  int cutoff = 5;   // potential cutoff R
  std::uint64_t seed = 1;
  double amplitude_mean = 0.25;
  double sigma = 1.0;
  double mu = 0.01;
  double t_final = 4.0;
  double dt = 0.002;
  int mesh = 100;
  int galerkin_truncation = 8;
  int snapshot_stride = 0;
  std::string out_dir;

  void validate() const;  // sigma, mu, dt > 0; mesh >= max(4R, 4r) + 2
  static ExperimentConfig from_json(const nlohmann::json& j,
                                    std::vector<std::string>* defaults_applied = nullptr);
  static ExperimentConfig from_json_file(const std::string& path,
                                         std::vector<std::string>* defaults_applied = nullptr);
  nlohmann::json to_json() const;
};

struct ErrorRow {
  double t = 0.0;
  double rel_error = 0.0;
  double trace_dev = 0.0;
  double min_eig = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> defaults_applied;
  Potential potential;
  std::vector<ErrorRow> error_series;
  double max_rel_error = 0.0;
  // finite-difference diagnostics, one entry per step including t=0
  std::vector<double> fd_h_norm_sq;
  std::vector<double> fd_renyi_vs_invariant;
  double fd_worst_min = 0.0;
  double potential_max_abs_laplacian = 0.0;
  DensityGrid f_final;
  DensityGrid f_star;
  DensityGrid p_final;
  Sdm s_final;
  SdmTrajectory trajectory;
  double l2_rel_f_vs_star = 0.0;
  double l2_rel_p_vs_star = 0.0;
  double seconds_fd = 0.0;
  double seconds_sdm = 0.0;
  double seconds_total = 0.0;
};

// Runs the lockstep fd + closure experiment; file-free.
ExperimentResult run_experiment(const ExperimentConfig& config);

// error.csv, pdf_final.csv, trajectory.csv, potential files, meta.json,
// sdm_final.csv and strided snapshots.
void write_experiment_outputs(const ExperimentResult& result, const std::string& out_dir);

// run + write + failure capture in meta.json; returns process exit code.
int cmd_experiment(const ExperimentConfig& config,
                   const std::vector<std::string>& defaults_applied = {});

struct FitRequest {
  std::string target = "uniform";  // "uniform" | "gibbs" | grid CSV path
  std::string family = "fourier";
  int n = 2;
  int r = 2;
  double mu = 0.01;
  int mesh = 100;  // quadrature/output mesh (torus targets)
  // gibbs target parameters
  int cutoff = 5;
  std::uint64_t seed = 1;
  double amplitude_mean = 0.25;
  double sigma = 1.0;
  std::optional<std::string> start_sdm;  // warm-start SDM CSV
  std::string out_dir;
};

int cmd_fit(const FitRequest& req);

}  // namespace sdmpdf
