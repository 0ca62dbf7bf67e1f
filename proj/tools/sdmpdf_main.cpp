#include <algorithm>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "sdmpdf/checks.hpp"
#include "sdmpdf/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SDM representation, fitting and propagation of probability densities"};
  app.require_subcommand(1);

  // ---- experiment ----
  auto* exp = app.add_subcommand("experiment",
                                 "finite-difference reference vs closed SDM flow, with CSV outputs");
  std::string config_path, out_dir;
  sdmpdf::ExperimentConfig cli;  // receives CLI values; merged over file/defaults below
  exp->add_option("--config", config_path, "JSON config; omitted fields take defaults");
  auto* o_seed = exp->add_option("--seed", cli.seed, "potential seed");
  exp->add_option("--out", out_dir, "output directory")->required();
  auto* o_n = exp->add_option("--n", cli.n, "dimension");
  auto* o_r = exp->add_option("--r", cli.r, "basis degree");
  auto* o_cut = exp->add_option("--cutoff", cli.cutoff, "potential cutoff R");
  auto* o_amp = exp->add_option("--amplitude-mean", cli.amplitude_mean, "mean of |V_k|");
  auto* o_sigma = exp->add_option("--sigma", cli.sigma, "noise intensity");
  auto* o_mu = exp->add_option("--mu", cli.mu, "barrier parameter");
  auto* o_tf = exp->add_option("--t-final", cli.t_final, "integration horizon");
  auto* o_dt = exp->add_option("--dt", cli.dt, "time step");
  auto* o_mesh = exp->add_option("--mesh", cli.mesh, "grid points per axis");
  auto* o_gal = exp->add_option("--galerkin", cli.galerkin_truncation, "galerkin truncation");
  auto* o_stride = exp->add_option("--stride", cli.snapshot_stride, "SDM snapshot stride");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "static SDM fit of a target density");
  sdmpdf::FitRequest freq;
  fit->add_option("--target", freq.target, "'uniform', 'gibbs', or a grid CSV path")
      ->required();
  fit->add_option("--family", freq.family, "fourier|hermite");
  fit->add_option("--n", freq.n, "dimension");
  fit->add_option("--r", freq.r, "basis degree");
  fit->add_option("--mu", freq.mu, "barrier parameter");
  fit->add_option("--mesh", freq.mesh, "quadrature/output mesh");
  fit->add_option("--cutoff", freq.cutoff, "gibbs potential cutoff");
  fit->add_option("--seed", freq.seed, "gibbs potential seed");
  fit->add_option("--amplitude-mean", freq.amplitude_mean, "gibbs potential amplitude mean");
  fit->add_option("--sigma", freq.sigma, "gibbs noise intensity");
  std::string start_path;
  auto* o_start = fit->add_option("--start", start_path, "warm-start SDM CSV");
  fit->add_option("--out", freq.out_dir, "output directory")->required();

  // ---- check ----
  auto* chk = app.add_subcommand("check", "run the property suite");
  bool mutations = false;
  std::string check_json;
  chk->add_flag("--mutations", mutations,
                "flip the generator drift sign; the stationarity check must fail");
  chk->add_option("--json", check_json, "write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (exp->parsed()) {
      std::vector<std::string> defaults;
      sdmpdf::ExperimentConfig cfg;
      if (!config_path.empty())
        cfg = sdmpdf::ExperimentConfig::from_json_file(config_path, &defaults);
      const std::vector<std::pair<CLI::Option*, std::string>> overrides{
          {o_n, "n"},           {o_r, "r"},
          {o_cut, "cutoff"},    {o_seed, "seed"},
          {o_amp, "amplitude_mean"}, {o_sigma, "sigma"},
          {o_mu, "mu"},         {o_tf, "t_final"},
          {o_dt, "dt"},         {o_mesh, "mesh"},
          {o_gal, "galerkin_truncation"}, {o_stride, "snapshot_stride"}};
      if (config_path.empty())
        for (const auto& [opt, key] : overrides)
          if (!opt->count()) defaults.push_back(key);
      for (const auto& [opt, key] : overrides)
        if (opt->count())
          defaults.erase(std::remove(defaults.begin(), defaults.end(), key), defaults.end());
      if (o_n->count()) cfg.n = cli.n;
      if (o_r->count()) cfg.r = cli.r;
      if (o_cut->count()) cfg.cutoff = cli.cutoff;
      if (o_seed->count()) cfg.seed = cli.seed;
      if (o_amp->count()) cfg.amplitude_mean = cli.amplitude_mean;
      if (o_sigma->count()) cfg.sigma = cli.sigma;
      if (o_mu->count()) cfg.mu = cli.mu;
      if (o_tf->count()) cfg.t_final = cli.t_final;
      if (o_dt->count()) cfg.dt = cli.dt;
      if (o_mesh->count()) cfg.mesh = cli.mesh;
      if (o_gal->count()) cfg.galerkin_truncation = cli.galerkin_truncation;
      if (o_stride->count()) cfg.snapshot_stride = cli.snapshot_stride;
      cfg.out_dir = out_dir;
      return sdmpdf::cmd_experiment(cfg, defaults);
    }
    if (fit->parsed()) {
      if (o_start->count()) freq.start_sdm = start_path;
      return sdmpdf::cmd_fit(freq);
    }
    if (chk->parsed()) return sdmpdf::cmd_check(mutations, check_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
