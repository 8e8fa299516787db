// SPDX-License-Identifier: Apache-2.0
//
// delaywave: numerical laboratory for a wave equation with Kelvin-Voigt damping,
// a dynamic boundary condition, and delayed boundary feedback.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "delaywave/config.hpp"
#include "delaywave/format.hpp"
#include "delaywave/spectral.hpp"
#include "delaywave/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace
{

struct GlobalOptions
{
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

delaywave::RunConfig load_with_overrides(const GlobalOptions& opts)
{
  delaywave::RunConfig config = delaywave::load_run_config(opts.config_path);
  if (!opts.out_dir.empty())
    config.outputs = opts.out_dir;
  if (opts.seed)
    config.seed = *opts.seed;
  return config;
}

int run_debug_diag(const std::string& entries, std::ostream& out)
{
  // Hidden hook: spectrum of a diagonal generator given as comma-separated reals.
  delaywave::GeneratorPair pair;
  std::vector<double> diag;
  std::stringstream ss(entries);
  std::string item;
  while (std::getline(ss, item, ','))
    diag.push_back(std::stod(item));
  const int n = static_cast<int>(diag.size());
  pair.A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    pair.A(i, i) = diag[i];
  pair.G = Eigen::MatrixXd::Identity(n, n);
  pair.GA = pair.A;
  pair.mesh.n_cells = 1;
  pair.mesh.n_rho = n;
  const delaywave::SpectrumReport report = delaywave::spectrum(pair);
  out << "abscissa: " << delaywave::format_double(report.abscissa) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"delayed boundary-feedback wave equation laboratory"};
  app.set_version_flag("--version", delaywave::kVersion);
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "JSON config (or sweep plan) path");
  app.add_option("--out", opts.out_dir, "output directory (overrides config)");
  app.add_option("--seed", opts.seed, "seed override");
  app.add_option("--threads", opts.threads, "OpenMP thread count (0 = library default)");

  auto* check = app.add_subcommand("check", "classify the stability case and xi interval");
  auto* simulate = app.add_subcommand("simulate", "integrate the system and record energies");
  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues of the discrete generator");
  std::string debug_diag;
  spectrum_cmd->add_option("--debug-diag", debug_diag, "")->group("");
  auto* sweep = app.add_subcommand("sweep", "batch analysis over a parameter grid");
  auto* constants = app.add_subcommand("constants", "trace and Poincare domain constants");
  for (auto* sub : {check, simulate, spectrum_cmd, sweep, constants})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (opts.threads > 0)
    omp_set_num_threads(opts.threads);
#endif

  try
  {
    if (spectrum_cmd->parsed() && !debug_diag.empty())
      return run_debug_diag(debug_diag, std::cout);

    if (opts.config_path.empty())
    {
      std::cerr << "error: --config is required\n";
      return 1;
    }
    if (check->parsed())
      return delaywave::cmd_check(load_with_overrides(opts), std::cout);
    if (simulate->parsed())
    {
      const delaywave::RunConfig config = load_with_overrides(opts);
      return delaywave::cmd_simulate(config, config.outputs, std::cout);
    }
    if (spectrum_cmd->parsed())
    {
      const delaywave::RunConfig config = load_with_overrides(opts);
      return delaywave::cmd_spectrum(config, config.outputs, std::cout);
    }
    if (sweep->parsed())
    {
      delaywave::SweepConfig config = delaywave::load_sweep_config(opts.config_path);
      if (!opts.out_dir.empty())
        config.outputs = opts.out_dir;
      if (opts.seed)
        config.plan.seed = *opts.seed;
      return delaywave::cmd_sweep(config, config.outputs, std::cout);
    }
    if (constants->parsed())
      return delaywave::cmd_constants(load_with_overrides(opts), std::cout);
  }
  catch (const delaywave::config_error& e)
  {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  catch (const delaywave::infeasible_error& e)
  {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
