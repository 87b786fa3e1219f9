#pragma once

// Run configuration, per-n sweeps, figure presets and CSV output.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "interface_sim/dynamics.hpp"
#include "interface_sim/optimizer.hpp"

namespace isim {

/// Invalid configuration. `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class EtaMode { Optimize, Fixed };

struct RunConfig {
  double alpha0 = 25.0;
  double reflectivity = 0.0;
  Scheme scheme = Scheme::Unswitched;
  int n_min = 1;
  int n_max = 40;
  std::vector<Objective> objectives{Objective::MaximizeGEOF};
  EtaMode eta_mode = EtaMode::Optimize;
  double fixed_eta = 0.05;
  std::string output_path;
  std::uint64_t seed = 0x5eedULL;
  /// eta = zeta = 0 with the coupling optimized directly (decoupling schemes).
  bool lossless = false;
};

/// Any subset of RunConfig; used both for config files and command-line flags.
struct ConfigOverrides {
  std::optional<double> alpha0;
  std::optional<double> reflectivity;
  std::optional<Scheme> scheme;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::optional<std::vector<Objective>> objectives;
  std::optional<double> fixed_eta;  // switches eta_mode to Fixed
  std::optional<std::string> output_path;
  std::optional<std::uint64_t> seed;
  std::optional<bool> lossless;
};

RunConfig apply_overrides(RunConfig config, const ConfigOverrides& overrides);

/// Flat JSON object with keys alpha0, r, scheme, n_min, n_max, objective
/// (string or list), eta (number or "optimize"), out, seed, lossless.
/// Unknown keys and type mismatches raise ConfigError.
ConfigOverrides parse_config_json(const std::string& text);
ConfigOverrides load_config_file(const std::string& path);

/// Throws ConfigError naming the first invalid field.
void validate(const RunConfig& config);

struct SweepRecord {
  std::string figure;
  Scheme scheme = Scheme::Unswitched;
  double r = 0.0;
  Objective objective = Objective::MaximizeGEOF;
  int n = 0;
  std::optional<double> eta_star;
  double kappa = 0.0;
  std::optional<double> kappa_d;
  std::optional<double> geof;
  std::optional<double> epr;
  std::optional<double> atomic_p;
  std::optional<double> light_p;
  std::optional<double> kappa0;
  std::optional<double> qnd_p;
  double objective_value = 0.0;
  bool at_edge = false;
};

/// One record per (objective, n), sorted by objective order then n.
/// Worker count: INTERFACE_SIM_THREADS (0 = sequential), else the hardware.
std::vector<SweepRecord> run_sweep(const RunConfig& config, const std::string& label = "sweep");

/// Figure presets at alpha0 = 25 over n = 1..40:
///   1  unswitched, geof and epr objectives, r in {0, 0.02}
///   2  as 1 with switching
///   3  both schemes, atomic squeezing after homodyne detection, r = 0.02
///   4  decoupling pass, light squeezing, r = 0.02, with the kappa0 and QND
///      reference columns (lossless override searches kappa directly)
/// A reflectivity override replaces the r set; the scheme override is ignored.
std::vector<SweepRecord> run_figure(int which, const ConfigOverrides& overrides = {});

/// Stable header (see README for column meanings).
const std::vector<std::string>& csv_columns();
std::string to_csv(const std::vector<SweepRecord>& records);

/// Writes through a temporary file so a failed run leaves nothing behind.
void write_text_file(const std::string& path, const std::string& text);

/// -10 log10(v): squeezing below the coherent level in dB.
double to_db(double variance);

/// Worker count from INTERFACE_SIM_THREADS.
unsigned worker_count();

}  // namespace isim
