#include "interface_sim/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "interface_sim/measures.hpp"
#include "interface_sim/optimizer.hpp"
#include "interface_sim/physical.hpp"

namespace isim {

namespace {

constexpr std::uint64_t kCheckSeed = 20040101ULL;

ProtocolOptions with_noise(const CheckOptions& options) {
  ProtocolOptions o;
  o.noise = options.noise;
  return o;
}

CheckLine group_property() {
  std::mt19937_64 rng(kCheckSeed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    worst = std::max(worst, (scattering_matrix(a) * scattering_matrix(b) - scattering_matrix(a + b)).cwiseAbs().maxCoeff());
  }
  return {"scattering group property", worst == 0.0, fmt::format("max deviation {:.3g} over 100 pairs", worst)};
}

CheckLine lossless_collapse(const CheckOptions& options) {
  double worst = 0.0;
  for (double kappa : {0.05, 0.2, 1.0}) {
    for (int n = 1; n <= 20; ++n) {
      const auto st = run_protocol(n, PassParams::from_coupling(kappa, 0, 0, 0), Scheme::Unswitched, with_noise(options));
      const Mat4 s = scattering_matrix(n * kappa);
      worst = std::max(worst, (st.gamma.matrix() - s * s.transpose()).cwiseAbs().maxCoeff());
    }
  }
  return {"lossless passes collapse to S(n kappa)", worst <= 1e-12, fmt::format("max deviation {:.3g}", worst)};
}

CheckLine lossless_epr_floor(const CheckOptions& options) {
  double worst = 0.0, lowest = 1e300;
  for (double kappa : {0.05, 0.2, 1.0}) {
    for (int n = 1; n <= 20; ++n) {
      const double epr =
          epr_variance(run_protocol(n, PassParams::from_coupling(kappa, 0, 0, 0), Scheme::Unswitched, with_noise(options)).gamma);
      const double k = n * kappa;
      worst = std::max(worst, std::abs(epr - 0.5 * (1.0 + (1.0 - k) * (1.0 - k))));
      lowest = std::min(lowest, epr);
    }
  }
  return {"lossless unswitched EPR = [1 + (1 - n kappa)^2] / 2", worst <= 1e-12 && lowest >= 0.5 - 1e-12,
          fmt::format("max deviation {:.3g}, minimum {:.12g}", worst, lowest)};
}

CheckLine lossy_epr_floor(const CheckOptions& options) {
  double lowest = 1e300;
  for (double r : {0.0, 0.02}) {
    for (double eta : {0.01, 0.03, 0.05, 0.1, 0.2}) {
      for (int n = 1; n <= 40; ++n) {
        const auto st = run_protocol(n, PassParams::from_optical_density(25.0, eta, 0.0, r), Scheme::Unswitched,
                                     with_noise(options));
        lowest = std::min(lowest, epr_variance(st.gamma));
      }
    }
  }
  return {"lossy unswitched EPR stays above 0.5", lowest >= 0.5 - 1e-9, fmt::format("minimum {:.12g}", lowest)};
}

CheckLine single_pass_noise(const CheckOptions& options) {
  const double eta = 0.1, zeta = 0.05;
  const auto out = single_pass(CovarianceMatrix::vacuum(), 0.0, eta, zeta, false, options.noise);
  const Vec4 expected(1.0 + eta, 1.0 + eta, 1.0, 1.0);
  const double dev = (out.matrix().diagonal() - expected).cwiseAbs().maxCoeff();
  return {"uncoupled pass: atoms 1 + eta, light stays vacuum", dev <= 1e-12, fmt::format("max deviation {:.3g}", dev)};
}

CheckLine single_pass_epr(const CheckOptions& options) {
  double worst = 0.0;
  for (double kappa : {0.3, 1.0}) {
    for (double eta : {0.05, 0.2}) {
      const double zeta = 0.1;
      const auto g = single_pass(CovarianceMatrix::vacuum(), kappa, eta, zeta, false, options.noise);
      const double c = std::sqrt((1.0 - eta) * (1.0 - zeta)) * kappa;
      const double expected = 0.25 * ((1.0 - eta) * (1.0 + kappa * kappa) + 2.0 * eta + 1.0 - 2.0 * c) +
                              0.25 * (1.0 + eta + (1.0 - zeta) * (1.0 + kappa * kappa) + zeta - 2.0 * c);
      worst = std::max(worst, std::abs(epr_variance(g) - expected));
    }
  }
  return {"single lossy pass EPR closed form", worst <= 1e-12, fmt::format("max deviation {:.3g}", worst)};
}

CheckLine qnd_benchmark(const CheckOptions& options) {
  double worst = 0.0;
  for (int n = 1; n <= 50; ++n) {
    const auto st =
        run_protocol(n, PassParams::from_coupling(magic_kappa(n), 0, 0, 0), Scheme::Unswitched, with_noise(options));
    const double v = condition_on_quadrature(st.gamma, Mode::Light, Quadrature::X)(1, 1);
    worst = std::max(worst, std::abs(v - 1.0 / (n + 0.5)));
  }
  return {"QND conditioning at kappa0 gives 1/(n + 1/2)", worst <= 1e-9, fmt::format("max deviation {:.3g}", worst)};
}

CheckLine decoupling_law(const CheckOptions& options) {
  double law = 0.0, arg = 0.0, value = 0.0, light = 0.0;
  for (int n = 1; n <= 50; ++n) {
    auto atomic_p = [&](double kappa) {
      ProtocolOptions o = with_noise(options);
      o.disentangle_kappa = kappa;
      return run_protocol(n, PassParams::from_coupling(kappa, 0, 0, 0), Scheme::UnswitchedThenDisentangle, o).gamma;
    };
    for (int i = 0; i <= 20; ++i) {
      const double kappa = 0.05 * i;
      const double expected = disentangled_p_variance(n, kappa);
      law = std::max(law, std::abs(atomic_p(kappa)(1, 1) - expected) / std::max(1.0, expected));
    }
    const auto best = golden_section_minimize([&](double k) { return atomic_p(k)(1, 1); }, 0.0, 2.0, 1e-10);
    arg = std::max(arg, std::abs(best.x - magic_kappa(n)));
    value = std::max(value, std::abs(best.value - (1.0 / n - 0.25 / (n * n))));
    light = std::max(light, atomic_p(magic_kappa(n))(3, 3));
  }
  const bool ok = law <= 1e-12 && arg <= 1e-6 && value <= 1e-9 && light < 1.0;
  return {"decoupling pass: (1 - n kappa^2)^2 + kappa^2, optimum kappa0, light p squeezed", ok,
          fmt::format("law (relative) {:.3g}, argmin {:.3g}, minimum {:.3g}, max light p {:.6g}", law, arg, value, light)};
}

CheckLine crude_model() {
  const CrudeModel m = crude_single_pass(25.0);
  const auto large = golden_section_minimize([](double e) { return crude_delta_large_density(25.0, e); }, 1e-6, 0.5, 1e-10);
  const auto full = golden_section_minimize([](double e) { return crude_delta(25.0, e); }, 1e-6, 0.5, 1e-10);
  const double d1 = std::max(std::abs(large.x - m.eta0), std::abs(large.value - m.delta_min));
  const double d2 = std::max(std::abs(full.x - m.eta_stationary), std::abs(full.value - m.delta_stationary));
  const bool ok = std::abs(m.eta0 - 0.1414213562373095) < 1e-12 && std::abs(m.delta_min - 0.565685424949238) < 1e-12 &&
                  d1 <= 1e-8 && d2 <= 1e-8;
  return {"crude single-pass model", ok,
          fmt::format("eta0 {:.9g}, delta_min {:.9g} (golden {:.2g}); stationary {:.9g} -> {:.9g} (golden {:.2g})", m.eta0,
                      m.delta_min, d1, m.eta_stationary, m.delta_stationary, d2)};
}

CheckLine rb_example() {
  ExperimentalSetup s = ExperimentalSetup::rb87_example();
  const double alpha0 = optical_density(s);
  s.detuning_hz = detuning_for_epsilon(s, 2e-3);
  const auto lo = photons_for_target_eta(s, 0.01);
  const auto hi = photons_for_target_eta(s, 0.1);
  const ModelParams p = derive_model_params(s);
  const bool ok = alpha0 >= 24.0 && alpha0 <= 27.0 && lo >= 10'000'000 && hi <= 100'000'000 &&
                  std::abs(p.eta_over_epsilon / (s.n_photons / s.n_atoms) - 1.0) <= 4e-16;
  return {"Rb-87 example", ok,
          fmt::format("alpha0 {:.6g}, detuning {:.4g} MHz, N_ph {} .. {}", alpha0, s.detuning_hz / 1e6, lo, hi)};
}

CheckLine physicality(const CheckOptions& options) {
  std::mt19937_64 rng(kCheckSeed + 1);
  std::uniform_real_distribution<double> loss(0.0, 0.3), coupling(0.0, 1.5);
  std::uniform_int_distribution<int> passes(1, 30);
  double lowest = 1e300;
  for (int i = 0; i < 100; ++i) {
    ProtocolOptions o = with_noise(options);
    o.on_pass = [&](const ProtocolState& st) { lowest = std::min(lowest, symplectic_eigenvalues(st.gamma).second); };
    const PassParams p = PassParams::from_coupling(coupling(rng), loss(rng), 0.0, loss(rng));
    run_protocol(passes(rng), p, i % 2 ? Scheme::Switched : Scheme::Unswitched, o);
  }
  return {"protocol states stay physical", lowest >= 1.0 - 1e-9, fmt::format("smallest nu {:.12g}", lowest)};
}

CheckLine geof_symmetric_states() {
  std::mt19937_64 rng(kCheckSeed + 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int done = 0;
  while (done < 10) {
    const double a = 1.0 + 2.0 * u(rng);
    const double cx = std::sqrt(a * a - 1.0) * u(rng);
    const StandardForm sf{a, a, cx, -cx * u(rng)};
    if (!is_physical(sf.matrix(), 0.0)) continue;
    ++done;
    worst = std::max(worst, std::abs(geof(sf.matrix()) - geof_symmetric(sf)));
  }
  return {"GEOF minimizer matches the symmetric closed form", worst <= 1e-4, fmt::format("max deviation {:.3g}", worst)};
}

}  // namespace

bool CheckReport::passed() const {
  return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.passed; });
}

std::string CheckReport::text() const {
  std::string out;
  int failed = 0;
  for (const auto& l : lines) {
    out += fmt::format("{} {}: {}\n", l.passed ? "PASS" : "FAIL", l.name, l.detail);
    failed += l.passed ? 0 : 1;
  }
  out += fmt::format("{} of {} checks passed\n", static_cast<int>(lines.size()) - failed, lines.size());
  return out;
}

CheckReport run_checks(const CheckOptions& options) {
  CheckReport report;
  auto guarded = [&](const std::string& name, auto&& check) {
    try {
      report.lines.push_back(check());
    } catch (const std::exception& e) {
      report.lines.push_back({name, false, fmt::format("threw: {}", e.what())});
    }
  };
  guarded("scattering group property", [] { return group_property(); });
  guarded("lossless collapse", [&] { return lossless_collapse(options); });
  guarded("lossless EPR floor", [&] { return lossless_epr_floor(options); });
  guarded("lossy EPR floor", [&] { return lossy_epr_floor(options); });
  guarded("single-pass noise", [&] { return single_pass_noise(options); });
  guarded("single-pass EPR", [&] { return single_pass_epr(options); });
  guarded("QND benchmark", [&] { return qnd_benchmark(options); });
  guarded("decoupling law", [&] { return decoupling_law(options); });
  guarded("crude model", [] { return crude_model(); });
  guarded("Rb-87 example", [] { return rb_example(); });
  guarded("physicality", [&] { return physicality(options); });
  guarded("GEOF symmetric states", [] { return geof_symmetric_states(); });
  return report;
}

}  // namespace isim
