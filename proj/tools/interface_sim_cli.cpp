// interface-sim: figure data, sweeps, single optimizations, laboratory
// parameters and the analytic check battery.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "interface_sim/checks.hpp"
#include "interface_sim/physical.hpp"
#include "interface_sim/runner.hpp"

namespace {

using namespace isim;

constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

// Raw flag values; converted to typed overrides after parsing so that
// unknown scheme/objective names are reported as config errors.
struct RunFlags {
  std::string config_path;
  std::optional<double> alpha0;
  std::optional<double> r;
  std::optional<std::string> scheme;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::vector<std::string> objectives;
  std::optional<double> eta;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool lossless = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_scheme) {
  cmd->add_option("--config", f.config_path, "Flat JSON config file; flags override it");
  cmd->add_option("--alpha0", f.alpha0, "Resonant optical density");
  cmd->add_option("--r", f.r, "Reflection loss per pass");
  if (with_scheme) cmd->add_option("--scheme", f.scheme, "unswitched | switched | unswitched-disentangle | switched-disentangle");
  cmd->add_option("--n-min", f.n_min, "First pass count");
  cmd->add_option("--n-max", f.n_max, "Last pass count");
  cmd->add_option("--objective", f.objectives, "geof | epr | atomic-p | light-p (repeatable)");
  cmd->add_option("--eta", f.eta, "Fixed depumping per pass instead of optimizing");
  cmd->add_option("--out", f.out, "Output CSV path ('-' for stdout)");
  cmd->add_option("--seed", f.seed, "Seed of the GEOF random restarts");
  cmd->add_flag("--lossless", f.lossless, "eta = zeta = 0, optimize the coupling (decoupling schemes)");
}

ConfigOverrides to_overrides(const RunFlags& f) {
  ConfigOverrides o;
  if (!f.config_path.empty()) o = load_config_file(f.config_path);
  if (f.alpha0) o.alpha0 = f.alpha0;
  if (f.r) o.reflectivity = f.r;
  if (f.scheme) {
    o.scheme = parse_scheme(*f.scheme);
    if (!o.scheme) throw ConfigError("scheme", fmt::format("unknown scheme '{}'", *f.scheme));
  }
  if (f.n_min) o.n_min = f.n_min;
  if (f.n_max) o.n_max = f.n_max;
  if (!f.objectives.empty()) {
    std::vector<Objective> list;
    for (const auto& s : f.objectives) {
      const auto parsed = parse_objective(s);
      if (!parsed) throw ConfigError("objective", fmt::format("unknown objective '{}'", s));
      list.push_back(*parsed);
    }
    o.objectives = list;
  }
  if (f.eta) o.fixed_eta = f.eta;
  if (f.out) o.output_path = f.out;
  if (f.seed) o.seed = f.seed;
  if (f.lossless) o.lossless = true;
  return o;
}

void emit(const std::vector<SweepRecord>& records, const std::string& path) {
  const std::string csv = to_csv(records);
  if (path == "-") {
    std::cout << csv;
    return;
  }
  write_text_file(path, csv);
  std::cerr << fmt::format("wrote {} records to {}\n", records.size(), path);
}

int run_figure_command(int which, const RunFlags& flags) {
  const ConfigOverrides o = to_overrides(flags);
  const auto records = run_figure(which, o);
  emit(records, o.output_path.value_or(fmt::format("fig{}.csv", which)));
  return 0;
}

int run_sweep_command(const RunFlags& flags) {
  const ConfigOverrides o = to_overrides(flags);
  const RunConfig config = apply_overrides(RunConfig{}, o);
  validate(config);
  emit(run_sweep(config), config.output_path.empty() ? "sweep.csv" : config.output_path);
  return 0;
}

struct OptimizeFlags {
  int n = 1;
  double alpha0 = 25.0;
  double r = 0.0;
  std::string scheme = "unswitched";
  std::string objective = "geof";
  std::uint64_t seed = 0x5eedULL;
  bool lossless = false;
};

int run_optimize_command(const OptimizeFlags& f) {
  const auto scheme = parse_scheme(f.scheme);
  if (!scheme) throw ConfigError("scheme", fmt::format("unknown scheme '{}'", f.scheme));
  const auto objective = parse_objective(f.objective);
  if (!objective) throw ConfigError("objective", fmt::format("unknown objective '{}'", f.objective));
  RunConfig c;
  c.alpha0 = f.alpha0;
  c.reflectivity = f.r;
  c.scheme = *scheme;
  c.n_min = c.n_max = f.n;
  c.objectives = {*objective};
  c.seed = f.seed;
  c.lossless = f.lossless;
  const SweepRecord rec = run_sweep(c, "optimize").front();
  auto show = [](const char* name, const std::optional<double>& v) {
    std::cout << fmt::format("{} = {}\n", name, v ? fmt::format("{:.12g}", *v) : std::string("-"));
  };
  std::cout << fmt::format("scheme = {}\nobjective = {}\nn = {}\n", to_string(rec.scheme), to_string(rec.objective), rec.n);
  show("eta_star", rec.eta_star);
  show("kappa", rec.kappa);
  show("kappa_d", rec.kappa_d);
  show("objective_value", rec.objective_value);
  show("geof", rec.geof);
  show("epr", rec.epr);
  show("atomic_p", rec.atomic_p);
  show("light_p", rec.light_p);
  std::cout << fmt::format("at_bracket_edge = {}\n", rec.at_edge);
  return 0;
}

struct PhysicalFlags {
  ExperimentalSetup setup = ExperimentalSetup::rb87_example();
  double diameter_um = 100.0;
  std::optional<double> epsilon;
  std::vector<double> eta_targets;
};

int run_physical_command(PhysicalFlags f) {
  ExperimentalSetup s = f.setup;
  s.area_cm2 = cylinder_area_cm2(f.diameter_um * 1e-4);
  if (f.epsilon) s.detuning_hz = detuning_for_epsilon(s, *f.epsilon);
  const ModelParams p = derive_model_params(s);
  std::cout << fmt::format("area_cm2 = {:.12g}\nalpha0 = {:.12g}\ndetuning_hz = {:.12g}\n", s.area_cm2, p.alpha0,
                           s.detuning_hz);
  std::cout << fmt::format("kappa = {:.12g}\neta = {:.12g}\nepsilon = {:.12g}\nzeta = {:.12g}\neta_over_epsilon = {:.12g}\n",
                           p.pass.kappa, p.pass.eta, p.pass.epsilon, p.pass.zeta(), p.eta_over_epsilon);
  for (double eta : f.eta_targets) {
    std::cout << fmt::format("photons_for_eta({:g}) = {}\n", eta, photons_for_target_eta(s, eta));
  }
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
  return 0;
}

int run_check_command(const std::string& out, double atomic_noise) {
  CheckOptions options;
  options.noise(0) = options.noise(1) = atomic_noise;
  const CheckReport report = run_checks(options);
  const std::string text = report.text();
  std::cout << text;
  if (!out.empty()) write_text_file(out, text);
  return report.passed() ? 0 : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipass light-atom interface simulator"};
  app.require_subcommand(1);

  int figure_which = 0;
  RunFlags figure_flags;
  auto* figure = app.add_subcommand("figure", "Figure data as CSV");
  figure->add_option("which", figure_which, "Figure number 1-4")->required();
  add_run_flags(figure, figure_flags, false);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Per-n optimization sweep as CSV");
  add_run_flags(sweep, sweep_flags, true);

  OptimizeFlags opt;
  auto* optimize = app.add_subcommand("optimize", "Optimize one pass count and print the result");
  optimize->add_option("--n", opt.n, "Pass count")->required();
  optimize->add_option("--alpha0", opt.alpha0, "Resonant optical density");
  optimize->add_option("--r", opt.r, "Reflection loss per pass");
  optimize->add_option("--scheme", opt.scheme, "Protocol scheme");
  optimize->add_option("--objective", opt.objective, "geof | epr | atomic-p | light-p");
  optimize->add_option("--seed", opt.seed, "Seed of the GEOF random restarts");
  optimize->add_flag("--lossless", opt.lossless, "eta = zeta = 0 (decoupling schemes)");

  PhysicalFlags phys;
  auto* physical = app.add_subcommand("physical", "Model parameters from laboratory quantities (Rb-87 defaults)");
  physical->add_option("--diameter-um", phys.diameter_um, "Sample diameter in micrometres");
  physical->add_option("--atoms", phys.setup.n_atoms, "Atom number");
  physical->add_option("--photons", phys.setup.n_photons, "Photons per pulse");
  physical->add_option("--detuning-hz", phys.setup.detuning_hz, "Detuning");
  physical->add_option("--gamma-hz", phys.setup.gamma_hwhm_hz, "Linewidth (HWHM)");
  physical->add_option("--sigma-cm2", phys.setup.sigma_cm2, "Resonant cross section");
  physical->add_option("--r", phys.setup.reflectivity, "Reflection loss per pass");
  physical->add_option("--epsilon", phys.epsilon, "Choose the detuning giving this epsilon");
  physical->add_option("--eta-target", phys.eta_targets, "Report photons needed for this eta (repeatable)");

  std::string check_out = "checks.txt";
  double atomic_noise = default_noise()(0);
  auto* check = app.add_subcommand("check", "Run the analytic check battery");
  check->add_option("--out", check_out, "Report path (empty to skip)");
  check->add_option("--atomic-noise", atomic_noise, "Atomic noise entry of every pass")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*figure) return run_figure_command(figure_which, figure_flags);
    if (*sweep) return run_sweep_command(sweep_flags);
    if (*optimize) return run_optimize_command(opt);
    if (*physical) return run_physical_command(phys);
    if (*check) return run_check_command(check_out, atomic_noise);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
  return 0;
}
