#include "sdmpdf/experiment.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

#include "sdmpdf/csv.hpp"
#include "sdmpdf/errors.hpp"

namespace sdmpdf {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename T>
T take(const nlohmann::json& j, const char* key, T def, std::vector<std::string>* defaults) {
  if (j.contains(key)) return j.at(key).get<T>();
  if (defaults) defaults->push_back(key);
  return def;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1 || n > 3) throw ConfigError("config: n must be in 1..3");
  if (r < 1) throw ConfigError("config: r must be >= 1");
  if (cutoff < 1) throw ConfigError("config: cutoff must be >= 1");
  if (sigma <= 0.0) throw ConfigError("config: sigma must be > 0");
  if (mu <= 0.0) throw ConfigError("config: mu must be > 0");
  if (dt <= 0.0) throw ConfigError("config: dt must be > 0");
  if (t_final < 0.0) throw ConfigError("config: t_final must be >= 0");
  int min_mesh = std::max(4 * cutoff, 4 * r) + 2;
  if (mesh < min_mesh)
    throw ConfigError("config: mesh must be >= max(4R, 4r) + 2 = " + std::to_string(min_mesh));
  if (galerkin_truncation < cutoff)
    throw ConfigError("config: galerkin truncation must be >= potential cutoff");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j,
                                             std::vector<std::string>* defaults_applied) {
  static const char* known[] = {"n",  "r",       "cutoff", "seed", "amplitude_mean",
                                "sigma", "mu",   "t_final", "dt",  "mesh",
                                "galerkin_truncation", "snapshot_stride", "out_dir"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    // a typo'd key would otherwise silently run with the default value
    if (!ok) throw ConfigError("config: unknown key \"" + item.key() + "\"");
  }
  ExperimentConfig c;
  c.n = take(j, "n", c.n, defaults_applied);
  c.r = take(j, "r", c.r, defaults_applied);
  c.cutoff = take(j, "cutoff", c.cutoff, defaults_applied);
  c.seed = take(j, "seed", c.seed, defaults_applied);
  c.amplitude_mean = take(j, "amplitude_mean", c.amplitude_mean, defaults_applied);
  c.sigma = take(j, "sigma", c.sigma, defaults_applied);
  c.mu = take(j, "mu", c.mu, defaults_applied);
  c.t_final = take(j, "t_final", c.t_final, defaults_applied);
  c.dt = take(j, "dt", c.dt, defaults_applied);
  c.mesh = take(j, "mesh", c.mesh, defaults_applied);
  c.galerkin_truncation = take(j, "galerkin_truncation", c.galerkin_truncation, defaults_applied);
  c.snapshot_stride = take(j, "snapshot_stride", c.snapshot_stride, defaults_applied);
  c.out_dir = take<std::string>(j, "out_dir", c.out_dir, nullptr);
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path,
                                                  std::vector<std::string>* defaults_applied) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(csv::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return from_json(j, defaults_applied);
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["r"] = r;
  j["cutoff"] = cutoff;
  j["seed"] = seed;
  j["amplitude_mean"] = amplitude_mean;
  j["sigma"] = sigma;
  j["mu"] = mu;
  j["t_final"] = t_final;
  j["dt"] = dt;
  j["mesh"] = mesh;
  j["galerkin_truncation"] = galerkin_truncation;
  j["snapshot_stride"] = snapshot_stride;
  j["out_dir"] = out_dir;
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();

  ExperimentResult res;
  res.config = config;
  res.potential = Potential::sample(config.n, config.cutoff, config.seed, config.amplitude_mean);

  StructureTable table = build_structure_table(BasisFamily::fourier, config.n, config.r);
  StructureOperators ops(table);
  GeneratorMatrix gen = generator_matrix(res.potential, config.sigma, table.mho);
  DynamicsOperators dyn(ops, gen, config.mu);

  const double beta = 2.0 / (config.sigma * config.sigma);
  res.f_star = gibbs_invariant(res.potential, beta, config.mesh);
  res.potential_max_abs_laplacian = res.potential.max_abs_laplacian(config.mesh);

  FdSolver fd(DensityGrid::uniform(config.n, config.mesh), res.potential, config.sigma,
              config.dt);
  ClosureIntegrator integ(dyn, Sdm::uniform(table.n_basis()), config.dt);

  res.fd_h_norm_sq.push_back(fd.h_norm_sq());
  res.fd_renyi_vs_invariant.push_back(renyi_relative(fd.grid(), res.f_star));

  long long steps = llround(config.t_final / config.dt);
  if (std::abs(steps * config.dt - config.t_final) > 1e-9 * std::max(1.0, config.t_final))
    steps = static_cast<long long>(std::ceil(config.t_final / config.dt - 1e-12));

  double sec_fd = 0.0, sec_sdm = 0.0;
  {
    // Row at t = 0 (uniform vs uniform, zero error up to rounding).
    SdmDiagnostics d = validate(integ.state());
    double rel = proximity(ops, moments_from_grid(fd.grid(), table),
                           grid_renyi_vs_uniform(fd.grid()), integ.state()) /
                 (0.5 * fd.grid().h_norm_sq());
    res.error_series.push_back({0.0, rel, d.trace_deviation, d.min_eigenvalue});
    res.max_rel_error = std::abs(rel);
  }
  for (long long i = 0; i < steps; ++i) {
    auto t_fd = std::chrono::steady_clock::now();
    fd.step();
    sec_fd += seconds_since(t_fd);
    auto t_sdm = std::chrono::steady_clock::now();
    StepRecord rec = integ.step();
    sec_sdm += seconds_since(t_sdm);
    res.trajectory.records.push_back(rec);
    if (config.snapshot_stride > 0 && (i + 1) % config.snapshot_stride == 0) {
      res.trajectory.state_times.push_back(rec.t);
      res.trajectory.states.push_back(integ.state());
    }

    MomentVector mv = moments_from_grid(fd.grid(), table);
    double renyi_f = grid_renyi_vs_uniform(fd.grid());
    double d_fp = proximity(ops, mv, renyi_f, integ.state());
    double d_f0 = 0.5 * fd.grid().h_norm_sq();
    double rel = d_fp / d_f0;
    res.error_series.push_back({(i + 1) * config.dt, rel, rec.trace_drift, rec.min_eigenvalue});
    res.max_rel_error = std::max(res.max_rel_error, rel);
    res.fd_h_norm_sq.push_back(fd.h_norm_sq());
    res.fd_renyi_vs_invariant.push_back(renyi_relative(fd.grid(), res.f_star));
  }
  res.trajectory.final_state = integ.state();
  res.trajectory.total_substeps = integ.substeps_taken();

  res.s_final = integ.state();
  res.f_final = fd.grid();
  res.fd_worst_min = fd.worst_min_value();
  res.p_final = eval_pdf_grid(res.s_final, table, config.mesh);
  double star_norm = res.f_star.l2_norm();
  res.l2_rel_f_vs_star = DensityGrid::l2_distance(res.f_final, res.f_star) / star_norm;
  res.l2_rel_p_vs_star = DensityGrid::l2_distance(res.p_final, res.f_star) / star_norm;
  res.seconds_fd = sec_fd;
  res.seconds_sdm = sec_sdm;
  res.seconds_total = seconds_since(t_start);
  return res;
}

void write_experiment_outputs(const ExperimentResult& res, const std::string& out_dir) {
  csv::ensure_dir(out_dir);

  {
    std::ostringstream os;
    os << "t,rel_error,trace_dev,min_eig\n";
    for (const auto& row : res.error_series)
      os << csv::g17(row.t) << ',' << csv::g17(row.rel_error) << ','
         << csv::g17(row.trace_dev) << ',' << csv::g17(row.min_eig) << '\n';
    csv::write_file(out_dir + "/error.csv", os.str());
  }
  {
    std::ostringstream os;
    for (int d = 1; d <= res.f_final.dim; ++d) os << 'x' << d << ',';
    os << "f,p_sdm,f_star\n";
    std::vector<double> x(res.f_final.dim);
    for (std::size_t i = 0; i < res.f_final.size(); ++i) {
      res.f_final.point(i, x.data());
      for (int d = 0; d < res.f_final.dim; ++d) os << csv::g17(x[d]) << ',';
      os << csv::g17(res.f_final.values[i]) << ',' << csv::g17(res.p_final.values[i]) << ','
         << csv::g17(res.f_star.values[i]) << '\n';
    }
    csv::write_file(out_dir + "/pdf_final.csv", os.str());
  }
  write_trajectory_csv(out_dir + "/trajectory.csv", res.trajectory);
  res.potential.write_csv(out_dir + "/potential.csv");
  res.potential.write_meta_json(out_dir + "/potential.json");

  StructureTable table = build_structure_table(BasisFamily::fourier, res.config.n, res.config.r);
  write_sdm_csv(out_dir + "/sdm_final.csv", res.s_final, table);
  for (std::size_t k = 0; k < res.trajectory.states.size(); ++k) {
    std::vector<std::string> header = {
        "# sdm n=" + std::to_string(res.config.n) + " r=" + std::to_string(res.config.r) +
            " family=fourier",
        "# t=" + csv::g17(res.trajectory.state_times[k])};
    csv::write_complex_matrix(out_dir + "/sdm_snapshot_" + std::to_string(k) + ".csv",
                              res.trajectory.states[k].matrix, header);
  }

  nlohmann::json meta;
  meta["version"] = kVersion;
  meta["config"] = res.config.to_json();
  meta["defaults_applied"] = res.defaults_applied;
  meta["results"] = {{"max_rel_error", res.max_rel_error},
                     {"l2_rel_f_vs_star", res.l2_rel_f_vs_star},
                     {"l2_rel_p_vs_star", res.l2_rel_p_vs_star},
                     {"fd_worst_min", res.fd_worst_min},
                     {"total_substeps", res.trajectory.total_substeps},
                     {"potential_max_abs_laplacian", res.potential_max_abs_laplacian}};
  meta["timings_seconds"] = {{"fd", res.seconds_fd},
                             {"sdm", res.seconds_sdm},
                             {"total", res.seconds_total}};
  csv::write_file(out_dir + "/meta.json", meta.dump(2) + "\n");
}

int cmd_experiment(const ExperimentConfig& config,
                   const std::vector<std::string>& defaults_applied) {
  try {
    ExperimentResult res = run_experiment(config);
    res.defaults_applied = defaults_applied;
    write_experiment_outputs(res, config.out_dir);
    std::cout << "experiment: seed=" << config.seed
              << " max_rel_error=" << res.max_rel_error
              << " l2_rel_p_vs_star=" << res.l2_rel_p_vs_star
              << " l2_rel_f_vs_star=" << res.l2_rel_f_vs_star
              << " (" << res.seconds_total << " s)\n";
    return 0;
  } catch (const std::exception& e) {
    try {
      csv::ensure_dir(config.out_dir);
      nlohmann::json meta;
      meta["version"] = kVersion;
      meta["config"] = config.to_json();
      meta["defaults_applied"] = defaults_applied;
      meta["failed_step"] = e.what();
      csv::write_file(config.out_dir + "/meta.json", meta.dump(2) + "\n");
    } catch (...) {
    }
    std::cerr << "experiment failed: " << e.what() << '\n';
    return 1;
  }
}

int cmd_fit(const FitRequest& req) {
  try {
    BasisFamily family = family_from_name(req.family);
    StructureTable table = build_structure_table(family, req.n, req.r);
    StructureOperators ops(table);

    MomentVector mv;
    double renyi_f = 0.0;
    std::optional<DensityGrid> target_grid;
    if (req.target == "uniform") {
      mv.values = Eigen::VectorXcd::Zero(table.n_moments());
      mv.values[table.zero_moment_pos] = 1.0;
      renyi_f = 0.0;
    } else {
      if (family != BasisFamily::fourier)
        throw ConfigError("fit: grid/gibbs targets require the fourier family");
      if (req.target == "gibbs") {
        Potential pot = Potential::sample(req.n, req.cutoff, req.seed, req.amplitude_mean);
        target_grid = gibbs_invariant(pot, 2.0 / (req.sigma * req.sigma), req.mesh);
      } else {
        target_grid = csv::read_grid(req.target);
        if (target_grid->dim != req.n) throw ConfigError("fit: target grid dimension mismatch");
      }
      mv = moments_from_grid(*target_grid, table);
      renyi_f = grid_renyi_vs_uniform(*target_grid);
    }

    StaticFitOptions opts;
    if (req.start_sdm) opts.start = read_sdm_csv(*req.start_sdm);
    StaticFitResult fit = solve_static(ops, mv, req.mu, opts);
    double prox = proximity(ops, mv, renyi_f, fit.s);

    csv::ensure_dir(req.out_dir);
    write_sdm_csv(req.out_dir + "/sdm.csv", fit.s, table);
    if (family == BasisFamily::fourier) {
      DensityGrid p = eval_pdf_grid(fit.s, table, req.mesh);
      if (target_grid) {
        std::ostringstream os;
        for (int d = 1; d <= req.n; ++d) os << 'x' << d << ',';
        os << "target,p_sdm\n";
        std::vector<double> x(req.n);
        for (std::size_t i = 0; i < p.size(); ++i) {
          p.point(i, x.data());
          for (int d = 0; d < req.n; ++d) os << csv::g17(x[d]) << ',';
          os << csv::g17(target_grid->values[i]) << ',' << csv::g17(p.values[i]) << '\n';
        }
        csv::write_file(req.out_dir + "/fit_pdf.csv", os.str());
      } else {
        csv::write_grid(req.out_dir + "/fit_pdf.csv", p, 0.0, req.sigma, req.seed);
      }
    }

    nlohmann::json rep;
    rep["version"] = kVersion;
    rep["target"] = req.target;
    rep["family"] = req.family;
    rep["n"] = req.n;
    rep["r"] = req.r;
    rep["mu"] = req.mu;
    rep["converged"] = fit.converged;
    rep["iterations"] = fit.iterations;
    rep["residual"] = fit.residual;
    rep["lagrange"] = fit.lagrange;
    rep["objective"] = fit.objective;
    rep["min_eigenvalue"] = fit.min_eigenvalue;
    rep["condition"] = fit.condition;
    rep["proximity"] = prox;
    rep["renyi_target_vs_weight"] = renyi_f;
    rep["renyi_sdm_vs_weight"] = renyi_vs_weight(fit.s, table);
    csv::write_file(req.out_dir + "/fit_report.json", rep.dump(2) + "\n");

    std::cout << "fit: converged=" << (fit.converged ? "yes" : "no")
              << " iterations=" << fit.iterations << " residual=" << fit.residual
              << " proximity=" << prox << '\n';
    return fit.converged ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "fit failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sdmpdf
