// Acceptance battery: one PASS/FAIL line per criterion (sub-items for the
// figure-shape criterion). Expected values are computed here from closed
// forms independent of the library code paths where possible.
//
//   acceptance_tests [--criterion N] [--cli PATH] [--work-dir DIR]

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "interface_sim/dynamics.hpp"
#include "interface_sim/measures.hpp"
#include "interface_sim/optimizer.hpp"
#include "interface_sim/physical.hpp"
#include "interface_sim/runner.hpp"
#include "support/random_states.hpp"

using namespace isim;
using isim::testing::StateSampler;

namespace {

struct Context {
  std::string cli;
  std::filesystem::path work_dir = std::filesystem::temp_directory_path();
};

struct Outcome {
  bool passed = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(const std::string& id, const std::string& title, const Outcome& o, double secs) {
  std::cout << fmt::format("{} criterion {}: {} [{}] ({:.2f} s)\n", o.passed ? "PASS" : "FAIL", id, title, o.detail, secs)
            << std::flush;
}

// 1 ------------------------------------------------------------------------

Outcome group_property() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    worst = std::max(worst, (scattering_matrix(a) * scattering_matrix(b) - scattering_matrix(a + b)).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(start);
  return {worst == 0.0 && secs < 1.0, fmt::format("max |S(a)S(b) - S(a+b)| = {:.3g} over 100 pairs", worst)};
}

// 2 ------------------------------------------------------------------------

Mat4 single_congruence(double total_kappa) {
  // S(K) S(K)^T written out: identity plus K on the (x_at, p_ph) and
  // (p_at, x_ph) correlations and K^2 on the x variances.
  Mat4 m = Mat4::Identity();
  m(0, 0) += total_kappa * total_kappa;
  m(2, 2) += total_kappa * total_kappa;
  m(0, 3) = m(3, 0) = total_kappa;
  m(1, 2) = m(2, 1) = total_kappa;
  return m;
}

Outcome lossless_collapse() {
  double worst = 0.0;
  for (double k : {0.05, 0.2, 1.0}) {
    for (int n = 1; n <= 20; ++n) {
      const auto st = run_protocol(n, PassParams::from_coupling(k, 0, 0, 0), Scheme::Unswitched);
      worst = std::max(worst, (st.gamma.matrix() - single_congruence(n * k)).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12, fmt::format("max deviation {:.3g} over n = 1..20, kappa in {{0.05, 0.2, 1}}", worst)};
}

// 3 ------------------------------------------------------------------------

Outcome epr_floor() {
  double worst = 0.0, lowest = 1e300, at_unity = 0.0;
  for (double k : {0.05, 0.2, 1.0}) {
    for (int n = 1; n <= 20; ++n) {
      const double v = epr_variance(run_protocol(n, PassParams::from_coupling(k, 0, 0, 0), Scheme::Unswitched).gamma);
      const double K = n * k;
      worst = std::max(worst, std::abs(v - 0.5 * (1 + (1 - K) * (1 - K))));
      lowest = std::min(lowest, v);
      if (std::abs(K - 1.0) < 1e-12) at_unity = std::max(at_unity, std::abs(v - 0.5));
    }
  }
  return {worst <= 1e-12 && lowest >= 0.5 - 1e-12 && at_unity <= 1e-12,
          fmt::format("max deviation {:.3g}, minimum {:.15g}, |EPR - 0.5| at n kappa = 1: {:.3g}", worst, lowest, at_unity)};
}

// 4 ------------------------------------------------------------------------

Outcome qnd_benchmark() {
  double worst = 0.0;
  for (int n = 1; n <= 50; ++n) {
    const double k0 = std::sqrt(n - 0.5) / n;
    const auto st = run_protocol(n, PassParams::from_coupling(k0, 0, 0, 0), Scheme::Unswitched);
    const double v = condition_on_quadrature(st.gamma, Mode::Light, Quadrature::X)(1, 1);
    worst = std::max(worst, std::abs(v - 1.0 / (n + 0.5)));
  }
  return {worst <= 1e-9, fmt::format("max |var - 1/(n + 1/2)| = {:.3g}, n = 1..50", worst)};
}

// 5 ------------------------------------------------------------------------

Outcome decoupling_law() {
  double law = 0.0, arg = 0.0, value = 0.0, light_p = 0.0, light_x = 1e300;
  for (int n = 1; n <= 50; ++n) {
    auto run = [n](double k) {
      ProtocolOptions o;
      o.disentangle_kappa = k;
      return run_protocol(n, PassParams::from_coupling(k, 0, 0, 0), Scheme::UnswitchedThenDisentangle, o).gamma;
    };
    for (int i = 0; i <= 40; ++i) {
      const double k = 0.025 * i;
      const double w = 1.0 - n * k * k;
      const double expected = w * w + k * k;
      law = std::max(law, std::abs(run(k)(1, 1) - expected) / std::max(1.0, expected));
    }
    const auto best = golden_section_minimize([&](double k) { return run(k)(1, 1); }, 0.0, 2.0, 1e-10);
    arg = std::max(arg, std::abs(best.x - std::sqrt(n - 0.5) / n));
    value = std::max(value, std::abs(best.value - (1.0 / n - 1.0 / (4.0 * n * n))));
    const auto at_best = run(best.x);
    light_p = std::max(light_p, at_best(3, 3));
    light_x = std::min(light_x, at_best(2, 2));
  }
  return {law <= 1e-12 && arg <= 1e-6 && value <= 1e-9 && light_p < 1.0,
          fmt::format("law (relative) {:.3g}, |kappa* - kappa0| {:.3g}, |min - (1/n - 1/4n^2)| {:.3g}, "
                      "max light p {:.6g} (light x >= {:.6g} is the anti-squeezed quadrature)",
                      law, arg, value, light_p, light_x)};
}

// 6 ------------------------------------------------------------------------

Outcome crude_model() {
  const auto start = Clock::now();
  const double alpha0 = 25.0;
  const CrudeModel m = crude_single_pass(alpha0);
  const bool analytic = std::abs(m.eta0 - 0.141421356237) < 1e-11 && std::abs(m.delta_min - 0.565685424949) < 1e-11;
  const auto large = golden_section_minimize([&](double e) { return 1.0 / (alpha0 * e) + 2.0 * e; }, 1e-6, 0.5, 1e-10);
  const auto full = golden_section_minimize([&](double e) { return 1.0 / (1.0 + alpha0 * e) + 2.0 * e; }, 1e-6, 0.5, 1e-10);
  const double d_large = std::max(std::abs(large.x - m.eta0), std::abs(large.value - m.delta_min));
  const double d_full = std::max(std::abs(full.x - m.eta_stationary), std::abs(full.value - m.delta_stationary));
  const double secs = seconds_since(start);
  return {analytic && d_large <= 1e-8 && d_full <= 1e-8 && secs < 1.0,
          fmt::format("(eta0, delta_min) = ({:.9f}, {:.9f}), golden on 1/(a eta) + 2 eta off by {:.2g}; "
                      "1/(1 + a eta) + 2 eta has its minimum {:.6f} ({:.2f} dB) at eta {:.6f}, golden off by {:.2g}",
                      m.eta0, m.delta_min, d_large, m.delta_stationary, -10 * std::log10(m.delta_stationary),
                      m.eta_stationary, d_full)};
}

// 7 ------------------------------------------------------------------------

Outcome physicality() {
  const auto start = Clock::now();
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> loss(0.0, 0.3), coupling(0.0, 1.5);
  std::uniform_int_distribution<int> passes(1, 30);
  double lowest = 1e300, oracle_gap = 0.0;
  long checked = 0, cross_checked = 0;
  for (int i = 0; i < 1000; ++i) {
    ProtocolOptions o;
    o.on_pass = [&](const ProtocolState& st) {
      const double nu = symplectic_eigenvalues(st.gamma).second;
      lowest = std::min(lowest, nu);
      ++checked;
      // The determinant-based oracle loses all precision once entries grow
      // large (switched runs reach 1e7), so compare only where it is reliable.
      if (st.gamma.matrix().cwiseAbs().maxCoeff() < 1e3) {
        oracle_gap = std::max(oracle_gap, std::abs(nu - isim::testing::invariant_symplectic_eigenvalues(st.gamma).second));
        ++cross_checked;
      }
    };
    run_protocol(passes(rng), PassParams::from_coupling(coupling(rng), loss(rng), 0.0, loss(rng)),
                 i % 2 ? Scheme::Switched : Scheme::Unswitched, o);
  }
  const double secs = seconds_since(start);
  return {lowest >= 1.0 - 1e-9 && oracle_gap <= 1e-6 && secs < 30.0,
          fmt::format("smallest nu {:.12g} over {} passes of 1000 runs; invariant oracle agrees within {:.2g} on {} passes",
                      lowest, checked, oracle_gap, cross_checked)};
}

// 8 ------------------------------------------------------------------------

Outcome conditioning_oracle() {
  StateSampler sampler(808);
  std::normal_distribution<double> normal;
  const int samples = 1'000'000;
  double worst_z = 0.0;
  for (int s = 0; s < 20; ++s) {
    const CovarianceMatrix g = sampler.physical_state(1.5);
    const Mode measured = s % 2 ? Mode::Atoms : Mode::Light;
    const Quadrature quad = (s / 2) % 2 ? Quadrature::P : Quadrature::X;
    const int mi = quadrature_index(measured, quad);
    const int kept = measured == Mode::Atoms ? 2 : 0;
    const Mat4 chol = g.matrix().llt().matrixL();
    // Sample covariance of (kept x, kept p, measured quadrature).
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    for (int i = 0; i < samples; ++i) {
      Vec4 z;
      for (int k = 0; k < 4; ++k) z(k) = normal(sampler.engine());
      const Vec4 v = chol * z;
      const Eigen::Vector3d w(v(kept), v(kept + 1), v(mi));
      acc += w * w.transpose();
    }
    acc /= samples;
    const Mat2 expected = condition_on_quadrature(g, measured, quad);
    for (int q = 0; q < 2; ++q) {
      const double residual = acc(q, q) - acc(q, 2) * acc(q, 2) / acc(2, 2);
      const double se = expected(q, q) * std::sqrt(2.0 / (samples - 2));
      worst_z = std::max(worst_z, std::abs(residual - expected(q, q)) / se);
    }
  }
  return {worst_z <= 3.0, fmt::format("largest deviation {:.2f} standard errors over 20 states x 2 quadratures", worst_z)};
}

// 9 ------------------------------------------------------------------------

Outcome geof_consistency() {
  const auto start = Clock::now();
  StateSampler sampler(909);
  double worst_fast = 0.0, worst_general = 0.0;
  int symmetric = 0;
  while (symmetric < 50) {
    const double a = sampler.uniform(1.0, 3.0);
    const double cx = std::sqrt(a * a - 1.0) * sampler.uniform(0.0, 1.0);
    const double cp = -cx * sampler.uniform(0.0, 1.0);
    // Closed form for symmetric states, evaluated directly.
    const double d = std::min((a - cx) * (a + cp), (a + cx) * (a - cp));
    if (d <= 0.0 || (a * a - cx * cx) * (a * a - cp * cp) < 1.0) continue;
    const StandardForm sf{a, a, cx, cp};
    if (!is_physical(sf.matrix(), 0.0)) continue;
    ++symmetric;
    const double delta = std::sqrt(d);
    double closed = 0.0;
    if (delta < 1.0) {
      const double cpl = std::pow(1 / std::sqrt(delta) + std::sqrt(delta), 2) / 4;
      const double cmi = std::pow(1 / std::sqrt(delta) - std::sqrt(delta), 2) / 4;
      closed = cpl * std::log2(cpl) - (cmi > 0 ? cmi * std::log2(cmi) : 0.0);
    }
    const Mat4 l = isim::testing::local(sampler.local_symplectic(0.5), sampler.local_symplectic(0.5));
    const CovarianceMatrix g = apply_linear_map(sf.matrix(), l);
    worst_fast = std::max(worst_fast, std::abs(geof(g) - closed));
    worst_general = std::max(worst_general, std::abs(geof_minimize_general(g).value - closed));
  }
  int mismatches = 0, entangled = 0;
  for (int i = 0; i < 200; ++i) {
    const CovarianceMatrix g = sampler.physical_state(1.5);
    const bool zero_geof = geof(g) <= 1e-6;
    const bool zero_en = log_negativity(g) <= 1e-4;
    mismatches += zero_geof != zero_en;
    entangled += !zero_en;
  }
  const double secs = seconds_since(start);
  return {worst_fast <= 1e-4 && worst_general <= 1e-4 && mismatches == 0 && secs < 300.0,
          fmt::format("symmetric states: fast search off by {:.3g}, general 7-parameter search off by {:.3g}; "
                      "GEOF = 0 <=> EN = 0 mismatches {} of 200 ({} entangled)",
                      worst_fast, worst_general, mismatches, entangled)};
}

// 10 -----------------------------------------------------------------------

struct Curves {
  // (scheme, r, objective) -> value per n
  std::map<std::tuple<Scheme, double, Objective>, std::map<int, double>> values;
  const std::map<int, double>& get(Scheme s, double r, Objective o) const { return values.at({s, r, o}); }
};

Curves figure_curves() {
  Curves c;
  for (int fig : {1, 2}) {
    for (const auto& rec : run_figure(fig)) c.values[{rec.scheme, rec.r, rec.objective}][rec.n] = rec.objective_value;
  }
  return c;
}

// Largest violation of monotonicity (0 when monotone), with numerical slack.
double monotone_violation(const std::map<int, double>& curve, bool increasing) {
  double worst = 0.0;
  double prev = std::nan("");
  for (const auto& entry : curve) {
    const double v = entry.second;
    if (!std::isnan(prev)) worst = std::max(worst, increasing ? prev - v : v - prev);
    prev = v;
  }
  return worst > 1e-9 ? worst : 0.0;
}

int first_violation(const std::map<int, double>& curve, bool increasing) {
  double prev = std::nan("");
  for (const auto& [n, v] : curve) {
    if (!std::isnan(prev) && (increasing ? prev - v : v - prev) > 1e-9) return n;
    prev = v;
  }
  return 0;
}

std::vector<std::pair<std::string, Outcome>> figure_shapes() {
  const Curves c = figure_curves();
  std::vector<std::pair<std::string, Outcome>> out;

  for (double r : {0.0, 0.02}) {
    Outcome o;
    std::vector<std::string> parts;
    for (Scheme s : {Scheme::Unswitched, Scheme::Switched}) {
      const auto& g = c.get(s, r, Objective::MaximizeGEOF);
      const auto& e = c.get(s, r, Objective::MinimizeEPR);
      const double vg = monotone_violation(g, true), ve = monotone_violation(e, false);
      o.passed = o.passed && vg == 0.0 && ve == 0.0;
      parts.push_back(fmt::format("{}: GEOF {} , EPR {}", to_string(s),
                                  vg == 0.0 ? "non-decreasing" : fmt::format("falls from n = {} (by {:.3g})", first_violation(g, true) - 1, vg),
                                  ve == 0.0 ? "non-increasing" : fmt::format("rises from n = {} (by {:.3g})", first_violation(e, false) - 1, ve)));
    }
    o.detail = fmt::format("r = {}: {}; {}", r, parts[0], parts[1]);
    out.emplace_back(r == 0.0 ? "10a (r = 0)" : "10a (r = 0.02)", o);
  }

  {
    const auto& sw = c.get(Scheme::Switched, 0.0, Objective::MaximizeGEOF);
    const auto& un = c.get(Scheme::Unswitched, 0.0, Objective::MaximizeGEOF);
    double lo = 1e300, hi = 0.0;
    for (int n = 5; n <= 30; ++n) {
      const double ratio = sw.at(n) / un.at(n);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    out.emplace_back("10b", Outcome{lo >= 1.3 && hi <= 3.0, fmt::format("switched/unswitched GEOF ratio in [{:.4f}, {:.4f}] for n = 5..30", lo, hi)});
  }
  {
    const auto& sw = c.get(Scheme::Switched, 0.0, Objective::MinimizeEPR);
    const auto& un = c.get(Scheme::Unswitched, 0.0, Objective::MinimizeEPR);
    int first = 0;
    for (const auto& [n, v] : sw) {
      if (v < 0.5) {
        first = n;
        break;
      }
    }
    double un_min = 1e300;
    for (const auto& [n, v] : un) un_min = std::min(un_min, v);
    out.emplace_back("10c", Outcome{first > 0 && first <= 40 && un_min >= 0.5 - 1e-9,
                                    fmt::format("switched EPR below 0.5 from n = {} (n = 40: {:.6f}); unswitched minimum {:.9f}",
                                                first, sw.at(40), un_min)});
  }
  {
    Outcome o;
    std::vector<std::string> parts;
    for (Scheme s : {Scheme::Unswitched, Scheme::Switched}) {
      for (Objective obj : {Objective::MaximizeGEOF, Objective::MinimizeEPR}) {
        const double sign = obj == Objective::MaximizeGEOF ? 1.0 : -1.0;
        const auto& lossless = c.get(s, 0.0, obj);
        const auto& lossy = c.get(s, 0.02, obj);
        const double gain_lossless = sign * (lossless.at(40) - lossless.at(30));
        const double gain_lossy = sign * (lossy.at(40) - lossy.at(30));
        const bool worse = sign * (lossy.at(40) - lossless.at(40)) < 0.0;
        const bool flatter = gain_lossy < gain_lossless;
        o.passed = o.passed && worse && flatter;
        parts.push_back(fmt::format("{} {}: n = 30..40 gain {:.4g} vs {:.4g}", to_string(s), to_string(obj), gain_lossy,
                                    gain_lossless));
      }
    }
    o.detail = fmt::format("{}; {}; {}; {}", parts[0], parts[1], parts[2], parts[3]);
    out.emplace_back("10d", o);
  }
  return out;
}

// 11 -----------------------------------------------------------------------

Outcome rb_example() {
  ExperimentalSetup s = ExperimentalSetup::rb87_example();
  const double area = M_PI * 0.005 * 0.005;  // 100 um diameter
  const double alpha0 = 2e6 * 1e-9 / area;
  const bool density = std::abs(optical_density(s) - alpha0) <= 1e-12 * alpha0 && alpha0 >= 24 && alpha0 <= 27;

  // epsilon = 2e-3 makes N_ph = eta N_at / epsilon span 1e7..1e8 for eta in [0.01, 0.1].
  s.detuning_hz = s.gamma_hwhm_hz * std::sqrt(alpha0 / 2e-3);
  const auto lo = photons_for_target_eta(s, 0.01);
  const auto hi = photons_for_target_eta(s, 0.1);
  s.n_photons = static_cast<double>(lo);
  const ModelParams p = derive_model_params(s);
  const bool identity = std::abs(p.eta_over_epsilon / (s.n_photons / s.n_atoms) - 1.0) <= 4e-16;
  return {density && identity && lo >= 10'000'000 && hi <= 100'000'000,
          fmt::format("alpha0 = {:.6f}, detuning {:.2f} MHz (epsilon = {:.3g}), N_ph = {} .. {}, eta/epsilon - N_ph/N_at = {:.2g}",
                      alpha0, s.detuning_hz / 1e6, p.pass.epsilon, lo, hi, p.eta_over_epsilon - s.n_photons / s.n_atoms)};
}

// 12 -----------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli binary given"};
  const auto a = ctx.work_dir / "determinism_a.csv";
  const auto b = ctx.work_dir / "determinism_b.csv";
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  const std::string base = fmt::format("\"{}\" figure 2 --seed 42 --out ", ctx.cli);
  const int ca = std::system((base + "\"" + a.string() + "\" 2>/dev/null").c_str());
  const int cb = std::system((base + "\"" + b.string() + "\" 2>/dev/null").c_str());
  const std::string sa = slurp(a), sb = slurp(b);
  return {ca == 0 && cb == 0 && !sa.empty() && sa == sb,
          fmt::format("exit codes {} / {}, {} bytes, identical: {}", ca, cb, sa.size(), sa == sb)};
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  int only = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--criterion") only = std::atoi(argv[i + 1]);
    else if (key == "--cli") ctx.cli = argv[i + 1];
    else if (key == "--work-dir") ctx.work_dir = argv[i + 1];
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> simple{
      {"scattering-matrix group property", group_property},
      {"lossless passes collapse to one congruence", lossless_collapse},
      {"unswitched EPR floor", epr_floor},
      {"QND benchmark 1/(n + 1/2)", qnd_benchmark},
      {"decoupling law and optimal coupling", decoupling_law},
      {"crude single-pass model", crude_model},
      {"physicality of 1000 random runs", physicality},
      {"homodyne conditioning vs Monte Carlo", conditioning_oracle},
      {"GEOF minimizer consistency", geof_consistency},
  };

  bool all = true;
  auto run_one = [&](int id) {
    const auto start = Clock::now();
    if (id >= 1 && id <= 9) {
      const Outcome o = simple[id - 1].second();
      report(std::to_string(id), simple[id - 1].first, o, seconds_since(start));
      all = all && o.passed;
    } else if (id == 10) {
      for (const auto& [sub, o] : figure_shapes()) {
        report(sub, "figure shapes", o, seconds_since(start));
        all = all && o.passed;
      }
    } else if (id == 11) {
      const Outcome o = rb_example();
      report("11", "Rb-87 worked example", o, seconds_since(start));
      all = all && o.passed;
    } else if (id == 12) {
      const Outcome o = determinism(ctx);
      report("12", "byte-identical figure 2 output", o, seconds_since(start));
      all = all && o.passed;
    }
  };

  if (only) {
    run_one(only);
  } else {
    for (int id = 1; id <= 12; ++id) run_one(id);
  }
  return all ? 0 : 1;
}
