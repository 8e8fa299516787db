// SPDX-License-Identifier: Apache-2.0

#include "delaywave/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "delaywave/format.hpp"
#include "delaywave/functionals.hpp"
#include "delaywave/spectral.hpp"
#include "delaywave/version.hpp"

namespace delaywave
{

namespace
{

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where)
{
  if (!j.is_object())
    throw config_error(where + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw config_error(where + ": unknown key \"" + item.key() + "\"");
  for (const std::string& key : required)
    if (!j.contains(key))
      throw config_error(where + ": missing key \"" + key + "\"");
}

double get_number(const json& j, const std::string& key, const std::string& where)
{
  if (!j.at(key).is_number())
    throw config_error(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& where)
{
  if (!j.at(key).is_number_integer())
    throw config_error(where + "." + key + ": expected an integer");
  return j.at(key).get<int>();
}

SystemParams parse_params(const json& j, const std::string& where)
{
  require_keys(j, {"alpha", "mu1", "mu2", "tau", "length", "xi"},
               {"alpha", "mu1", "mu2", "tau", "length"}, where);
  SystemParams p;
  p.alpha = get_number(j, "alpha", where);
  p.mu1 = get_number(j, "mu1", where);
  p.mu2 = get_number(j, "mu2", where);
  p.tau = get_number(j, "tau", where);
  p.length = get_number(j, "length", where);
  if (j.contains("xi"))
    p.xi = get_number(j, "xi", where);
  return p;
}

Mesh parse_mesh(const json& j, double length, const std::string& where)
{
  require_keys(j, {"n_cells", "n_rho", "lump_mass"}, {"n_cells", "n_rho"}, where);
  Mesh mesh;
  mesh.n_cells = get_int(j, "n_cells", where);
  mesh.n_rho = get_int(j, "n_rho", where);
  mesh.length = length;
  if (j.contains("lump_mass"))
  {
    if (!j.at("lump_mass").is_boolean())
      throw config_error(where + ".lump_mass: expected a boolean");
    mesh.lump_mass = j.at("lump_mass").get<bool>();
  }
  return mesh;
}

TimeGrid parse_time(const json& j, const SystemParams& params, const Mesh& mesh,
                    const std::string& where)
{
  require_keys(j, {"dt", "t_end", "theta"}, {"t_end"}, where);
  TimeGrid grid;
  grid.t_end = get_number(j, "t_end", where);
  grid.dt = j.contains("dt") ? get_number(j, "dt", where) : default_dt(params, mesh);
  if (j.contains("theta"))
    grid.theta = get_number(j, "theta", where);
  return grid;
}

InitialSpec parse_initial(const json& j, const std::string& where)
{
  require_keys(j, {"kind", "amplitude", "mode"}, {"kind"}, where);
  InitialSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  if (j.contains("amplitude"))
    spec.amplitude = get_number(j, "amplitude", where);
  if (j.contains("mode"))
    spec.mode = get_int(j, "mode", where);
  return spec;
}

std::string plot_energy_script()
{
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set logscale y\n"
         "set xlabel 't'\n"
         "set ylabel 'energy'\n"
         "plot 'energy.csv' using 1:2 with lines title 'E', \\\n"
         "     'energy.csv' using 1:3 with lines title 'E1', \\\n"
         "     'energy.csv' using 1:4 with lines title 'L'\n";
}

std::string plot_spectrum_script()
{
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'Re'\n"
         "set ylabel 'Im'\n"
         "set zeroaxis\n"
         "plot 'eigenvalues.csv' using 1:2 with points pt 7 ps 0.5 title 'spectrum'\n";
}

std::string plot_sweep_script()
{
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'alpha'\n"
         "set ylabel 'tau'\n"
         "set view map\n"
         "splot 'sweep.csv' using 3:4:7 with points pt 5 palette title 'abscissa'\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out)
    throw std::runtime_error("failed writing " + path.string());
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const json& config_echo, std::uint64_t seed)
{
  json manifest;
  manifest["tool"] = "delaywave";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["seed"] = seed;
  manifest["config"] = config_echo;
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// Chooses xi for a single run: explicit value wins (validated), otherwise the
// midpoint policy; outside the proved regimes an explicit xi is required.
double resolve_xi(const SystemParams& params, const StabilityVerdict& verdict)
{
  if (params.xi)
  {
    validate_xi(params, verdict);
    return *params.xi;
  }
  return choose_xi(verdict, XiPolicy::Midpoint);
}

}  // namespace

RunConfig parse_run_config(const json& j)
{
  require_keys(j,
               {"params", "mesh", "time", "initial", "epsilon", "fit_window",
                "snapshot_stride", "outputs", "seed"},
               {"params", "mesh"}, "config");
  RunConfig config;
  config.raw = j;
  config.params = parse_params(j.at("params"), "config.params");
  config.mesh = parse_mesh(j.at("mesh"), config.params.length, "config.mesh");
  try
  {
    config.params.validate();
    config.mesh.validate();
  }
  catch (const std::invalid_argument& e)
  {
    throw config_error(std::string("config: ") + e.what());
  }
  if (j.contains("time"))
  {
    config.time = parse_time(j.at("time"), config.params, config.mesh, "config.time");
    config.has_time = true;
    try
    {
      config.time.validate();
    }
    catch (const std::invalid_argument& e)
    {
      throw config_error(std::string("config.time: ") + e.what());
    }
  }
  if (j.contains("initial"))
  {
    require_keys(j.at("initial"), {"u0", "u1", "f0"}, {}, "config.initial");
    const json& init = j.at("initial");
    if (init.contains("u0"))
      config.u0 = parse_initial(init.at("u0"), "config.initial.u0");
    if (init.contains("u1"))
      config.u1 = parse_initial(init.at("u1"), "config.initial.u1");
    if (init.contains("f0"))
      config.f0 = parse_initial(init.at("f0"), "config.initial.f0");
  }
  if (j.contains("epsilon"))
  {
    config.epsilon = get_number(j, "epsilon", "config");
    if (!(*config.epsilon > 0.0))
      throw config_error("config.epsilon: must be positive");
  }
  if (j.contains("fit_window"))
  {
    const json& w = j.at("fit_window");
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
      throw config_error("config.fit_window: expected [t_start, t_end]");
    config.fit_window = std::make_pair(w[0].get<double>(), w[1].get<double>());
  }
  if (j.contains("snapshot_stride"))
  {
    config.snapshot_stride = get_int(j, "snapshot_stride", "config");
    if (config.snapshot_stride < 1)
      throw config_error("config.snapshot_stride: must be >= 1");
  }
  if (j.contains("outputs"))
    config.outputs = j.at("outputs").get<std::string>();
  if (j.contains("seed"))
    config.seed = j.at("seed").get<std::uint64_t>();
  return config;
}

RunConfig load_run_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open config file: " + path);
  json j;
  try
  {
    in >> j;
  }
  catch (const json::parse_error& e)
  {
    throw config_error("config parse error in " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

SweepConfig parse_sweep_config(const json& j)
{
  require_keys(j, {"axes", "fixed", "per_point", "mesh", "time", "seed", "outputs"},
               {"axes", "fixed", "per_point", "mesh"}, "plan");
  SweepConfig config;
  config.raw = j;
  SweepPlan& plan = config.plan;
  plan.base = parse_params(j.at("fixed"), "plan.fixed");
  plan.mesh = parse_mesh(j.at("mesh"), plan.base.length, "plan.mesh");

  if (!j.at("axes").is_array() || j.at("axes").empty())
    throw config_error("plan.axes: expected a nonempty array");
  for (const json& a : j.at("axes"))
  {
    require_keys(a, {"name", "min", "max", "count", "scale"}, {"name", "min", "max", "count"},
                 "plan.axes[]");
    AxisSpec axis;
    axis.name = a.at("name").get<std::string>();
    axis.min = get_number(a, "min", "plan.axes[]");
    axis.max = get_number(a, "max", "plan.axes[]");
    axis.count = get_int(a, "count", "plan.axes[]");
    if (a.contains("scale"))
    {
      const std::string scale = a.at("scale").get<std::string>();
      if (scale == "log")
        axis.log_scale = true;
      else if (scale != "linear")
        throw config_error("plan.axes[].scale: expected \"linear\" or \"log\"");
    }
    plan.axes.push_back(axis);
  }

  const std::string per_point = j.at("per_point").get<std::string>();
  if (per_point == "spectrum")
    plan.per_point = PerPoint::Spectrum;
  else if (per_point == "trajectory")
    plan.per_point = PerPoint::Trajectory;
  else if (per_point == "both")
    plan.per_point = PerPoint::Both;
  else
    throw config_error("plan.per_point: expected spectrum|trajectory|both");

  if (plan.per_point != PerPoint::Spectrum)
  {
    if (!j.contains("time"))
      throw config_error("plan.time: required for trajectory analyses");
    plan.time = parse_time(j.at("time"), plan.base, plan.mesh, "plan.time");
  }
  if (j.contains("seed"))
    plan.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("outputs"))
    config.outputs = j.at("outputs").get<std::string>();
  try
  {
    plan.validate();
  }
  catch (const std::invalid_argument& e)
  {
    throw config_error(std::string("plan: ") + e.what());
  }
  return config;
}

SweepConfig load_sweep_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open plan file: " + path);
  json j;
  try
  {
    in >> j;
  }
  catch (const json::parse_error& e)
  {
    throw config_error("plan parse error in " + path + ": " + e.what());
  }
  return parse_sweep_config(j);
}

std::function<double(double)> spatial_function(const InitialSpec& spec, double length)
{
  const double A = spec.amplitude;
  if (spec.kind == "zero")
    return [](double) { return 0.0; };
  if (spec.kind == "sin_quarter")
    return [A, length](double x) { return A * std::sin(M_PI * x / (2.0 * length)); };
  if (spec.kind == "linear")
    return [A, length](double x) { return A * x / length; };
  if (spec.kind == "sine_mode")
  {
    const int k = spec.mode;
    return [A, length, k](double x) { return A * std::sin(k * M_PI * x / length); };
  }
  throw config_error("unknown spatial initial kind: " + spec.kind);
}

std::function<double(double, double)> history_function(const InitialSpec& spec)
{
  const double A = spec.amplitude;
  if (spec.kind == "zero")
    return [](double, double) { return 0.0; };
  if (spec.kind == "constant")
    return [A](double, double) { return A; };
  if (spec.kind == "sin")
    return [A](double, double s) { return A * std::sin(s); };
  throw config_error("unknown history initial kind: " + spec.kind);
}

int cmd_check(const RunConfig& config, std::ostream& out)
{
  const DomainConstants constants =
      domain_constants(config.params.length, config.mesh.n_cells);
  const StabilityVerdict verdict = classify_case(config.params, constants);

  out << "case: " << to_string(verdict.tag) << "\n";
  out << "trace constant B: " << format_double(constants.trace_B) << "\n";
  out << "poincare constant C: " << format_double(constants.poincare_C) << "\n";

  json machine;
  machine["case"] = to_string(verdict.tag);
  machine["trace_B"] = constants.trace_B;
  machine["poincare_C"] = constants.poincare_C;
  machine["feasible"] = verdict.feasible();

  if (verdict.feasible())
  {
    const double xi = resolve_xi(config.params, verdict);
    out << "xi interval: [" << format_double(verdict.xi_low) << ", "
        << format_double(verdict.xi_high) << (verdict.tag == CaseTag::Case2 ? ")" : "]")
        << "\n";
    out << "chosen xi: " << format_double(xi) << "\n";
    machine["xi_low"] = verdict.xi_low;
    machine["xi_high"] = verdict.xi_high;
    machine["chosen_xi"] = xi;
  }
  else
  {
    out << "xi interval: empty (no admissible xi)\n";
  }
  out << "machine: " << machine.dump() << "\n";
  return verdict.feasible() ? 0 : 2;
}

int cmd_simulate(const RunConfig& config, const std::string& out_dir, std::ostream& out)
{
  if (!config.has_time)
    throw config_error("simulate: config needs a \"time\" section");
  const DomainConstants constants =
      domain_constants(config.params.length, config.mesh.n_cells);
  const StabilityVerdict verdict = classify_case(config.params, constants);
  SystemParams params = config.params;
  if (!params.xi && !verdict.feasible())
  {
    out << "infeasible parameters and no explicit xi; set params.xi to run anyway\n";
    return 2;
  }
  params.xi = resolve_xi(config.params, verdict);

  const GeneratorPair pair = assemble(params, config.mesh);
  const DiscreteState init = initial_state(
      spatial_function(config.u0, params.length), spatial_function(config.u1, params.length),
      history_function(config.f0), config.mesh, params.tau);
  const Trajectory traj =
      integrate(pack(init, config.mesh), pair, config.time, config.snapshot_stride);

  json manifest_extra;
  double epsilon = config.epsilon.value_or(0.0);
  if (!config.epsilon)
  {
    try
    {
      const EpsilonReport report = epsilon_search(traj);
      epsilon = report.epsilon;
      manifest_extra["epsilon"] = report.epsilon;
      manifest_extra["beta1"] = report.beta1;
      manifest_extra["beta2"] = report.beta2;
    }
    catch (const std::runtime_error& e)
    {
      epsilon = 0.0;  // L falls back to E; recorded in the manifest
      manifest_extra["epsilon_search_error"] = e.what();
    }
  }
  else
  {
    manifest_extra["epsilon"] = epsilon;
  }

  const std::vector<EnergySample> samples = materialize_samples(traj, epsilon);

  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  std::ostringstream energy_csv;
  energy_csv << "t,E,E1,L,dE_residual\n";
  for (const EnergySample& s : samples)
    energy_csv << format_double(s.t) << ',' << format_double(s.E) << ','
               << format_double(s.E1) << ',' << format_double(s.Lyap) << ','
               << format_double(s.dE_residual) << '\n';
  write_text_file(dir / "energy.csv", energy_csv.str());

  std::ostringstream states_csv;
  states_csv << "t,x,u,v\n";
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
  {
    const double t = traj.snapshot_steps[i] * config.time.dt;
    const DiscreteState state = unpack(traj.snapshots[i], config.mesh);
    states_csv << format_double(t) << ",0,0,0\n";  // the clamped node
    for (int jn = 0; jn < config.mesh.n_cells; ++jn)
      states_csv << format_double(t) << ',' << format_double((jn + 1) * config.mesh.h())
                 << ',' << format_double(state.u(jn)) << ',' << format_double(state.v(jn))
                 << '\n';
  }
  write_text_file(dir / "states.csv", states_csv.str());

  std::ostringstream zline_csv;
  zline_csv << "t,rho,z\n";
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
  {
    const double t = traj.snapshot_steps[i] * config.time.dt;
    const DiscreteState state = unpack(traj.snapshots[i], config.mesh);
    for (int k = 0; k <= config.mesh.n_rho; ++k)
      zline_csv << format_double(t) << ',' << format_double(k * config.mesh.d_rho()) << ','
                << format_double(state.z(k)) << '\n';
  }
  write_text_file(dir / "delayline.csv", zline_csv.str());

  // Decay fit over the configured window (defaults skip the transient).
  const double w0 = config.fit_window ? config.fit_window->first : config.time.t_end / 10.0;
  const double w1 = config.fit_window ? config.fit_window->second : config.time.t_end;
  json fit_json;
  fit_json["window"] = {w0, w1};
  try
  {
    std::vector<double> E;
    E.reserve(samples.size());
    for (const EnergySample& s : samples)
      E.push_back(s.E);
    const DecayFit fit = fit_decay(traj.times, E, w0, w1);
    if (std::isfinite(fit.gamma_hat))
      fit_json["gamma_hat"] = fit.gamma_hat;
    else
      fit_json["gamma_hat"] = nullptr;
    fit_json["C_hat"] = fit.C_hat;
    fit_json["r_squared"] = fit.r_squared;
    out << "gamma_hat: " << format_double(fit.gamma_hat) << "\n";
  }
  catch (const std::invalid_argument& e)
  {
    fit_json["gamma_hat"] = nullptr;
    fit_json["error"] = e.what();
    out << "decay fit unavailable: " << e.what() << "\n";
  }
  write_text_file(dir / "fit.json", fit_json.dump(2) + "\n");
  write_text_file(dir / "plot_energy.gp", plot_energy_script());

  json echo = config.raw;
  echo["resolved"] = {{"xi", *params.xi}, {"dt", config.time.dt}};
  for (const auto& item : manifest_extra.items())
    echo["resolved"][item.key()] = item.value();
  write_manifest(dir, "simulate", echo, config.seed);
  out << "wrote " << (dir / "energy.csv").string() << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& config, const std::string& out_dir, std::ostream& out)
{
  const DomainConstants constants =
      domain_constants(config.params.length, config.mesh.n_cells);
  const StabilityVerdict verdict = classify_case(config.params, constants);
  SystemParams params = config.params;
  if (!params.xi && !verdict.feasible())
  {
    out << "infeasible parameters and no explicit xi; set params.xi to run anyway\n";
    return 2;
  }
  params.xi = resolve_xi(config.params, verdict);

  const GeneratorPair pair = assemble(params, config.mesh);
  const SpectrumReport report = spectrum(pair);

  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  std::ostringstream csv;
  csv << "re,im\n";
  for (const auto& ev : report.eigenvalues)
    csv << format_double(ev.real()) << ',' << format_double(ev.imag()) << '\n';
  write_text_file(dir / "eigenvalues.csv", csv.str());
  write_text_file(dir / "plot_spectrum.gp", plot_spectrum_script());

  json echo = config.raw;
  echo["resolved"] = {{"xi", *params.xi}};
  write_manifest(dir, "spectrum", echo, config.seed);

  out << "abscissa: " << format_double(report.abscissa) << "\n";
  out << "unstable eigenvalues: " << report.n_unstable << "\n";
  return 0;
}

int cmd_sweep(const SweepConfig& config, const std::string& out_dir, std::ostream& out)
{
  const std::vector<SweepRecord> records = run_sweep(config.plan);

  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  std::ostringstream csv;
  write_sweep_csv(csv, records);
  write_text_file(dir / "sweep.csv", csv.str());
  write_text_file(dir / "plot_sweep.gp", plot_sweep_script());
  write_manifest(dir, "sweep", config.raw, config.plan.seed);

  std::size_t failed = 0;
  for (const SweepRecord& r : records)
    if (!r.error.empty())
      ++failed;
  out << "points: " << records.size() << ", failed: " << failed << "\n";
  out << "wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_constants(const RunConfig& config, std::ostream& out)
{
  const double L = config.params.length;
  out << "n_cells,trace_B,poincare_C\n";
  int n = std::max(8, config.mesh.n_cells / 8);
  std::vector<int> levels;
  while (n < config.mesh.n_cells)
  {
    levels.push_back(n);
    n *= 2;
  }
  levels.push_back(config.mesh.n_cells);
  for (int level : levels)
  {
    const DomainConstants c = domain_constants(L, level);
    out << level << ',' << format_double(c.trace_B) << ',' << format_double(c.poincare_C)
        << '\n';
  }
  const DomainConstants c = domain_constants(L, config.mesh.n_cells);
  out << "trace constant B: " << format_double(c.trace_B) << " (sqrt(L) = "
      << format_double(std::sqrt(L)) << ")\n";
  out << "poincare constant C: " << format_double(c.poincare_C) << " (2L/pi = "
      << format_double(2.0 * L / M_PI) << ")\n";
  return 0;
}

}  // namespace delaywave
