#include "interface_sim/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

namespace isim {

namespace {

using Json = nlohmann::json;

double number_field(const Json& value, const std::string& key) {
  if (!value.is_number()) throw ConfigError(key, "expected a number");
  return value.get<double>();
}

int integer_field(const Json& value, const std::string& key) {
  if (!value.is_number_integer()) throw ConfigError(key, "expected an integer");
  return value.get<int>();
}

Objective objective_field(const Json& value, const std::string& key) {
  if (!value.is_string()) throw ConfigError(key, "expected a string");
  const auto parsed = parse_objective(value.get<std::string>());
  if (!parsed) {
    throw ConfigError(key, fmt::format("unknown objective '{}' (geof, epr, atomic-p, light-p)", value.get<std::string>()));
  }
  return *parsed;
}

std::string format_number(double v) { return std::isfinite(v) ? fmt::format("{:.12g}", v) : std::string(); }

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string format_db(const std::optional<double>& v) {
  return v && *v > 0.0 ? format_number(to_db(*v)) : std::string();
}

template <class F>
std::optional<double> guarded(F&& f) {
  try {
    const double v = f();
    if (std::isfinite(v)) return v;
  } catch (const NumericalFailure&) {
  } catch (const InvalidStateError&) {
  }
  return std::nullopt;
}

SweepRecord compute_record(const RunConfig& config, Objective objective, int n, const std::string& label) {
  OptimizerOptions options;
  options.geof.seed = config.seed;

  SweepRecord rec;
  rec.figure = label;
  rec.scheme = config.scheme;
  rec.r = config.lossless ? 0.0 : config.reflectivity;
  rec.objective = objective;
  rec.n = n;

  PassParams params;
  if (config.lossless) {
    const OptimizationResult res =
        optimize_disentangle_kappa(n, LossModel{config.alpha0, 0.0, true}, config.scheme, objective, options);
    params = PassParams::from_coupling(res.kappa_star, 0.0, 0.0, 0.0);
    rec.at_edge = res.at_bracket_edge;
  } else if (config.eta_mode == EtaMode::Optimize) {
    const OptimizationResult res = optimize_eta(n, config.alpha0, config.reflectivity, config.scheme, objective, options);
    params = PassParams::from_optical_density(config.alpha0, *res.eta_star, 0.0, config.reflectivity);
    rec.eta_star = res.eta_star;
    rec.at_edge = res.at_bracket_edge;
  } else {
    params = PassParams::from_optical_density(config.alpha0, config.fixed_eta, 0.0, config.reflectivity);
    rec.eta_star = config.fixed_eta;
  }
  rec.kappa = params.kappa;

  double kd = 0.0;
  const ProtocolState state = run_for_objective(n, params, config.scheme, objective, options.geof, &kd);
  if (has_disentangle_pass(config.scheme)) rec.kappa_d = kd;
  rec.objective_value = objective_metric(state, config.scheme, objective, options.geof);

  rec.geof = guarded([&] { return geof(state.gamma, options.geof); });
  rec.epr = epr_variance(state.gamma);
  rec.atomic_p = guarded([&] { return objective_metric(state, config.scheme, Objective::MinimizeAtomicP); });
  rec.light_p = squeezing(state.gamma, Mode::Light, Quadrature::P);
  return rec;
}

}  // namespace

RunConfig apply_overrides(RunConfig config, const ConfigOverrides& o) {
  if (o.alpha0) config.alpha0 = *o.alpha0;
  if (o.reflectivity) config.reflectivity = *o.reflectivity;
  if (o.scheme) config.scheme = *o.scheme;
  if (o.n_min) config.n_min = *o.n_min;
  if (o.n_max) config.n_max = *o.n_max;
  if (o.objectives) config.objectives = *o.objectives;
  if (o.fixed_eta) {
    config.eta_mode = EtaMode::Fixed;
    config.fixed_eta = *o.fixed_eta;
  }
  if (o.output_path) config.output_path = *o.output_path;
  if (o.seed) config.seed = *o.seed;
  if (o.lossless) config.lossless = *o.lossless;
  return config;
}

ConfigOverrides parse_config_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", fmt::format("malformed JSON ({})", e.what()));
  }
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");

  ConfigOverrides o;
  for (const auto& [key, value] : doc.items()) {
    if (key == "alpha0") {
      o.alpha0 = number_field(value, key);
    } else if (key == "r" || key == "reflectivity") {
      o.reflectivity = number_field(value, key);
    } else if (key == "scheme") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      o.scheme = parse_scheme(value.get<std::string>());
      if (!o.scheme) throw ConfigError(key, fmt::format("unknown scheme '{}'", value.get<std::string>()));
    } else if (key == "n_min") {
      o.n_min = integer_field(value, key);
    } else if (key == "n_max") {
      o.n_max = integer_field(value, key);
    } else if (key == "objective" || key == "objectives") {
      std::vector<Objective> list;
      if (value.is_array()) {
        for (const auto& item : value) list.push_back(objective_field(item, key));
      } else {
        list.push_back(objective_field(value, key));
      }
      o.objectives = list;
    } else if (key == "eta") {
      if (value.is_string() && value.get<std::string>() == "optimize") continue;
      o.fixed_eta = number_field(value, key);
    } else if (key == "out") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      o.output_path = value.get<std::string>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ConfigError(key, "expected a non-negative integer");
      o.seed = value.get<std::uint64_t>();
    } else if (key == "lossless") {
      if (!value.is_boolean()) throw ConfigError(key, "expected true or false");
      o.lossless = value.get<bool>();
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  return o;
}

ConfigOverrides load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot read '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

void validate(const RunConfig& c) {
  if (!(std::isfinite(c.alpha0) && c.alpha0 > 0.0)) throw ConfigError("alpha0", "must be positive");
  if (!(c.reflectivity >= 0.0 && c.reflectivity < 1.0)) throw ConfigError("r", "must lie in [0, 1)");
  if (c.n_min < 1) throw ConfigError("n_min", "must be >= 1");
  if (c.n_max < c.n_min) throw ConfigError("n_max", fmt::format("must be >= n_min ({})", c.n_min));
  if (c.n_max > 10000) throw ConfigError("n_max", "must be <= 10000");
  if (c.objectives.empty()) throw ConfigError("objective", "at least one objective is required");
  if (c.eta_mode == EtaMode::Fixed && !(c.fixed_eta > 0.0 && c.fixed_eta < 1.0)) {
    throw ConfigError("eta", "fixed value must lie in (0, 1)");
  }
  if (c.lossless) {
    if (!has_disentangle_pass(c.scheme)) throw ConfigError("lossless", "requires a scheme with a decoupling pass");
    if (c.eta_mode == EtaMode::Fixed) throw ConfigError("lossless", "cannot be combined with a fixed eta");
  }
}

unsigned worker_count() {
  if (const char* env = std::getenv("INTERFACE_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRecord> run_sweep(const RunConfig& config, const std::string& label) {
  validate(config);
  struct Task {
    Objective objective;
    int n;
  };
  std::vector<Task> tasks;
  for (Objective o : config.objectives) {
    for (int n = config.n_min; n <= config.n_max; ++n) tasks.push_back({o, n});
  }
  std::vector<SweepRecord> out(tasks.size());

  const unsigned workers = std::min<std::size_t>(worker_count(), tasks.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = compute_record(config, tasks[i].objective, tasks[i].n, label);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) {
        try {
          out[i] = compute_record(config, tasks[i].objective, tasks[i].n, label);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<SweepRecord> run_figure(int which, const ConfigOverrides& overrides) {
  if (which < 1 || which > 4) throw ConfigError("figure", fmt::format("unknown figure {} (1-4)", which));

  RunConfig base;
  std::vector<Scheme> schemes;
  std::vector<double> rs;
  switch (which) {
    case 1:
    case 2:
      schemes = {which == 1 ? Scheme::Unswitched : Scheme::Switched};
      base.objectives = {Objective::MaximizeGEOF, Objective::MinimizeEPR};
      rs = {0.0, 0.02};
      break;
    case 3:
      schemes = {Scheme::Unswitched, Scheme::Switched};
      base.objectives = {Objective::MinimizeAtomicP};
      rs = {0.02};
      break;
    default:
      schemes = {Scheme::UnswitchedThenDisentangle};
      base.objectives = {Objective::MinimizeLightP};
      rs = {0.02};
      break;
  }
  ConfigOverrides o = overrides;
  o.scheme.reset();
  if (o.reflectivity) rs = {*o.reflectivity};
  if (o.lossless && *o.lossless) rs = {0.0};
  base = apply_overrides(base, o);

  const std::string label = fmt::format("fig{}", which);
  std::vector<SweepRecord> records;
  for (Scheme s : schemes) {
    for (double r : rs) {
      RunConfig c = base;
      c.scheme = s;
      c.reflectivity = r;
      auto part = run_sweep(c, label);
      records.insert(records.end(), part.begin(), part.end());
    }
  }
  if (which == 4) {
    for (auto& rec : records) {
      rec.kappa0 = magic_kappa(rec.n);
      rec.qnd_p = 1.0 / (rec.n + 0.5);
    }
  }
  return records;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "figure",      "scheme",      "r",          "objective",  "n",      "eta_star",  "kappa",
      "kappa_d",     "geof",        "epr",        "epr_db",     "atomic_p_sq", "atomic_p_db", "light_p_sq",
      "light_p_db",  "kappa0",      "qnd_p_sq",   "objective_value", "edge_flag"};
  return cols;
}

std::string to_csv(const std::vector<SweepRecord>& records) {
  std::string out;
  for (std::size_t i = 0; i < csv_columns().size(); ++i) {
    out += (i ? "," : "") + csv_columns()[i];
  }
  out += '\n';
  for (const auto& r : records) {
    const std::vector<std::string> fields{
        r.figure,
        std::string(to_string(r.scheme)),
        format_number(r.r),
        std::string(to_string(r.objective)),
        std::to_string(r.n),
        format_optional(r.eta_star),
        format_number(r.kappa),
        format_optional(r.kappa_d),
        format_optional(r.geof),
        format_optional(r.epr),
        format_db(r.epr),
        format_optional(r.atomic_p),
        format_db(r.atomic_p),
        format_optional(r.light_p),
        format_db(r.light_p),
        format_optional(r.kappa0),
        format_optional(r.qnd_p),
        format_number(r.objective_value),
        r.at_edge ? "1" : "0",
    };
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("out", fmt::format("cannot write '{}'", path));
    f << text;
    if (!f.flush()) throw ConfigError("out", fmt::format("write to '{}' failed", path));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ConfigError("out", fmt::format("cannot move output into '{}'", path));
  }
}

double to_db(double variance) { return -10.0 * std::log10(variance); }

}  // namespace isim
