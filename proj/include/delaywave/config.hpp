// SPDX-License-Identifier: Apache-2.0

#ifndef DELAYWAVE_CONFIG_HPP
#define DELAYWAVE_CONFIG_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "delaywave/params.hpp"
#include "delaywave/discretization.hpp"
#include "delaywave/simulate.hpp"
#include "delaywave/sweep.hpp"

namespace delaywave
{

// Raised on malformed configs (unknown keys, missing fields, bad values).
struct config_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Initial-datum catalog usable from JSON configs.
//   u0/u1 kinds: zero | sin_quarter (A*sin(pi x / 2L)) | linear (A*x/L) | sine_mode (A*sin(k pi x / L))
//   f0 kinds:    zero | constant (A) | sin (A*sin(s))
struct InitialSpec
{
  std::string kind = "zero";
  double amplitude = 1.0;
  int mode = 1;
};

struct RunConfig
{
  SystemParams params;
  Mesh mesh;
  TimeGrid time;          // dt defaults to tau/(2*n_rho) when omitted
  bool has_time = false;  // whether the config carried a "time" section
  InitialSpec u0{"sin_quarter", 1.0, 1};
  InitialSpec u1{"zero", 1.0, 1};
  InitialSpec f0{"zero", 1.0, 1};
  std::optional<double> epsilon;
  std::optional<std::pair<double, double>> fit_window;  // default [t_end/10, t_end]
  int snapshot_stride = 10;
  std::string outputs = "out";
  std::uint64_t seed = 0;
  nlohmann::json raw;  // config echo for the run manifest
};

struct SweepConfig
{
  SweepPlan plan;
  std::string outputs = "out";
  nlohmann::json raw;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

SweepConfig parse_sweep_config(const nlohmann::json& j);
SweepConfig load_sweep_config(const std::string& path);

std::function<double(double)> spatial_function(const InitialSpec& spec, double length);
std::function<double(double, double)> history_function(const InitialSpec& spec);

// Subcommand bodies. Return the process exit code:
//   0 success, 1 usage/config error, 2 infeasible-parameters signal.
int cmd_check(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, const std::string& out_dir, std::ostream& out);
int cmd_spectrum(const RunConfig& config, const std::string& out_dir, std::ostream& out);
int cmd_sweep(const SweepConfig& config, const std::string& out_dir, std::ostream& out);
int cmd_constants(const RunConfig& config, std::ostream& out);

}  // namespace delaywave

#endif  // DELAYWAVE_CONFIG_HPP
