#include "interface_sim/dynamics.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace isim {

namespace {

void require_probability(const char* name, double value) {
  if (!(value >= 0.0 && value < 1.0)) {
    throw ParameterError(fmt::format("{} = {} must lie in [0, 1)", name, value));
  }
}

}  // namespace

PassParams PassParams::from_optical_density(double alpha0, double eta, double epsilon, double r) {
  if (!(alpha0 > 0.0)) {
    throw ParameterError(fmt::format("alpha0 = {} must be positive", alpha0));
  }
  PassParams p{std::sqrt(alpha0 * eta), eta, epsilon, r};
  p.validate();
  if (std::abs(p.kappa * p.kappa - eta * alpha0) > 1e-12 * std::max(1.0, eta * alpha0)) {
    throw ParameterError("kappa^2 != eta * alpha0");
  }
  return p;
}

PassParams PassParams::from_coupling(double kappa, double eta, double epsilon, double r) {
  PassParams p{kappa, eta, epsilon, r};
  p.validate();
  return p;
}

void PassParams::validate() const {
  if (!std::isfinite(kappa)) {
    throw ParameterError("kappa must be finite");
  }
  require_probability("eta", eta);
  require_probability("epsilon", epsilon);
  require_probability("r", r);
  require_probability("zeta", zeta());
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Unswitched: return "unswitched";
    case Scheme::Switched: return "switched";
    case Scheme::UnswitchedThenDisentangle: return "unswitched-disentangle";
    case Scheme::SwitchedThenDisentangle: return "switched-disentangle";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view text) {
  for (Scheme s : {Scheme::Unswitched, Scheme::Switched, Scheme::UnswitchedThenDisentangle,
                   Scheme::SwitchedThenDisentangle}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

bool is_switched(Scheme scheme) {
  return scheme == Scheme::Switched || scheme == Scheme::SwitchedThenDisentangle;
}

bool has_disentangle_pass(Scheme scheme) {
  return scheme == Scheme::UnswitchedThenDisentangle || scheme == Scheme::SwitchedThenDisentangle;
}

Mat4 scattering_matrix(double kappa) {
  Mat4 s = Mat4::Identity();
  s(0, 3) = kappa;
  s(2, 1) = kappa;
  return s;
}

const Vec4& default_noise() {
  static const Vec4 noise(2.0, 2.0, 1.0, 1.0);
  return noise;
}

CovarianceMatrix single_pass(const CovarianceMatrix& gamma, double kappa, double eta, double zeta, bool transposed,
                             const Vec4& noise) {
  if (!(eta >= 0.0 && eta <= 1.0) || !(zeta >= 0.0 && zeta <= 1.0)) {
    throw ParameterError(fmt::format("single_pass: eta = {}, zeta = {} must lie in [0, 1]", eta, zeta));
  }
  const Vec4 loss(eta, eta, zeta, zeta);
  const Vec4 keep = (Vec4::Ones() - loss).cwiseSqrt();

  Mat4 m = scattering_matrix(kappa);
  if (transposed) m.transposeInPlace();
  m = keep.asDiagonal() * m;

  Mat4 out = m * gamma.matrix() * m.transpose();
  out.diagonal() += loss.cwiseProduct(noise);
  return CovarianceMatrix(out);
}

std::pair<double, double> switching_angles() {
  static const std::pair<double, double> angles = [] {
    constexpr double h = std::numbers::pi / 2.0;
    const Mat4 s = scattering_matrix(1.0);
    for (double a : {h, -h}) {
      for (double b : {h, -h}) {
        const Mat4 r = local_rotation(a, b);
        if ((r * s * r.transpose() - s.transpose()).cwiseAbs().maxCoeff() < 1e-12) {
          return std::pair{a, b};
        }
      }
    }
    throw NumericalFailure("switching_angles: no angle pair maps S to S^T");
  }();
  return angles;
}

ProtocolState run_protocol(int n, const PassParams& params, Scheme scheme, const ProtocolOptions& options) {
  if (n < 1) {
    throw ParameterError(fmt::format("run_protocol: n = {} must be >= 1", n));
  }
  params.validate();
  if (has_disentangle_pass(scheme) && !options.disentangle_kappa) {
    throw ParameterError("run_protocol: disentangle scheme needs disentangle_kappa");
  }

  const double eta = params.eta;
  const double zeta = params.zeta();
  ProtocolState state;

  auto advance = [&](double kappa, bool transposed) {
    state.gamma = single_pass(state.gamma, state.coupling(kappa), eta, zeta, transposed, options.noise);
    state.jx_factor *= 1.0 - eta;
    state.sx_factor *= 1.0 - zeta;
    ++state.pass_count;
    if (options.on_pass) options.on_pass(state);
  };

  for (int m = 1; m <= n; ++m) {
    advance(params.kappa, is_switched(scheme) && m % 2 == 0);
  }
  if (has_disentangle_pass(scheme)) {
    // S(-kappa_d)^T: p_at -> p_at - kappa_d x_ph, p_ph -> p_ph - kappa_d x_at.
    advance(-*options.disentangle_kappa, true);
  }
  return state;
}

double disentangled_p_variance(int n, double kappa) {
  const double w = 1.0 - n * kappa * kappa;
  return w * w + kappa * kappa;
}

double magic_kappa(int n) { return std::sqrt(n - 0.5) / n; }

}  // namespace isim
