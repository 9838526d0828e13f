#include "sqbath/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sqbath {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void SqueezingInput::validate_and_normalize() {
  if (!(nbar >= 0.0)) {
    throw ValidationError("nbar: must be >= 0, got " + format_double(nbar));
  }
  if (!(r >= 0.0)) {
    throw ValidationError("r: must be >= 0, got " + format_double(r));
  }
  if (!std::isfinite(phi)) {
    throw ValidationError("phi: must be finite");
  }
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
}

void ModeSpec::validate() const {
  if (!(omega > 0.0)) {
    throw ValidationError("omega: must be > 0, got " + format_double(omega));
  }
  if (!(gamma > 0.0)) {
    throw ValidationError("gamma: must be > 0, got " + format_double(gamma));
  }
}

void SystemSpec::validate() const {
  if (modes.size() != 1 && modes.size() != 2) {
    throw ValidationError("modes: expected 1 or 2 modes, got " +
                          std::to_string(modes.size()));
  }
  if (baths.size() != modes.size()) {
    throw ValidationError("baths: expected one bath per mode (" +
                          std::to_string(modes.size()) + "), got " +
                          std::to_string(baths.size()));
  }
  for (const ModeSpec& mode : modes) mode.validate();
  for (std::size_t i = 0; i < baths.size(); ++i) {
    if (!(baths[i].N >= 0.0)) {
      throw ValidationError("baths[" + std::to_string(i) +
                            "].N: must be >= 0, got " +
                            format_double(baths[i].N));
    }
  }
  if (modes.size() == 2) {
    const double g1 = modes[0].gamma;
    const double g2 = modes[1].gamma;
    const double scale = std::max(std::abs(g1), std::abs(g2));
    if (std::abs(g1 - g2) > 1e-12 * scale) {
      throw ValidationError(
          "modes.gamma: two-mode systems require a single shared gamma, got " +
          format_double(g1) + " and " + format_double(g2));
    }
  }
  if (modes.size() == 1 && J != 0.0) {
    throw ValidationError("J: hopping requires two modes, got J = " +
                          format_double(J) + " with one mode");
  }
}

double SystemSpec::shared_gamma() const {
  validate();
  return modes[0].gamma;
}

std::string to_string(DiffusionConvention c) {
  switch (c) {
    case DiffusionConvention::PaperLiteral:
      return "paper";
    case DiffusionConvention::ConsistencyCorrected:
      return "corrected";
  }
  return "corrected";
}

DiffusionConvention convention_from_string(const std::string& name) {
  if (name == "paper") return DiffusionConvention::PaperLiteral;
  if (name == "corrected") return DiffusionConvention::ConsistencyCorrected;
  throw ValidationError(
      "diffusion_convention: must be \"paper\" or \"corrected\", got \"" +
      name + "\"");
}

double CovarianceState::hermitize() {
  const Eigen::MatrixXcd herm = 0.5 * (sigma + sigma.adjoint());
  const double correction = (sigma - herm).norm();
  sigma = herm;
  return correction;
}

double CovarianceState::hermiticity_error() const {
  return (sigma - sigma.adjoint()).norm();
}

BathMoments bath_moments_from_squeezing(const SqueezingInput& raw) {
  SqueezingInput input = raw;
  input.validate_and_normalize();
  const double sh = std::sinh(input.r);
  const double sh2 = std::sinh(2.0 * input.r);
  BathMoments out;
  out.N = input.nbar * std::cosh(2.0 * input.r) + sh * sh;
  out.M = -0.5 * sh2 * (2.0 * input.nbar + 1.0) *
          std::exp(Complex(0.0, 2.0 * input.phi));
  return out;
}

bool check_physical(const BathMoments& moments, double tol) {
  return std::norm(moments.M) <= moments.N * (moments.N + 1.0) + tol;
}

Eigen::Matrix2d wigner_covariance(const SqueezingInput& raw) {
  SqueezingInput input = raw;
  input.validate_and_normalize();
  const double ch2 = std::cosh(2.0 * input.r);
  const double sh2 = std::sinh(2.0 * input.r);
  const double c = std::cos(2.0 * input.phi);
  const double s = std::sin(2.0 * input.phi);
  Eigen::Matrix2d v;
  v << ch2 - sh2 * c, -sh2 * s, -sh2 * s, ch2 + sh2 * c;
  return (input.nbar + 0.5) * v;
}

Eigen::Matrix2cd single_mode_drift(const ModeSpec& mode, Complex M) {
  mode.validate();
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd a;
  a << -i * mode.omega - mode.gamma / 2.0, -mode.gamma * M,
      -mode.gamma * std::conj(M), i * mode.omega - mode.gamma / 2.0;
  return a;
}

Eigen::Matrix2cd thermal_single_mode_drift(const ModeSpec& mode) {
  return single_mode_drift(mode, Complex(0.0, 0.0));
}

Eigen::MatrixXcd two_mode_drift(const SystemSpec& spec) {
  spec.validate();
  if (spec.n_modes() != 2) {
    throw ValidationError("modes: two_mode_drift requires exactly 2 modes");
  }
  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
  a.block<2, 2>(0, 0) = single_mode_drift(spec.modes[0], spec.baths[0].M);
  a.block<2, 2>(2, 2) = single_mode_drift(spec.modes[1], spec.baths[1].M);
  a(0, 2) = -i * spec.J;
  a(2, 0) = -i * spec.J;
  a(1, 3) = i * spec.J;
  a(3, 1) = i * spec.J;
  return a;
}

Eigen::Matrix2cd single_mode_diffusion(double gamma, const BathMoments& bath,
                                       DiffusionConvention convention) {
  Eigen::Matrix2cd d;
  if (convention == DiffusionConvention::PaperLiteral) {
    d << gamma * (bath.N + 2.0), 2.0 * gamma * bath.M, 2.0 * gamma * bath.M,
        gamma * (bath.N + 2.0);
  } else {
    d << gamma * (bath.N + 1.0), gamma * bath.M, gamma * std::conj(bath.M),
        gamma * bath.N;
  }
  return d;
}

Eigen::MatrixXcd two_mode_diffusion(const SystemSpec& spec,
                                    DiffusionConvention convention) {
  spec.validate();
  if (spec.n_modes() != 2) {
    throw ValidationError(
        "modes: two_mode_diffusion requires exactly 2 modes");
  }
  const double gamma = spec.shared_gamma();
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  d.block<2, 2>(0, 0) = single_mode_diffusion(gamma, spec.baths[0], convention);
  d.block<2, 2>(2, 2) = single_mode_diffusion(gamma, spec.baths[1], convention);
  return d;
}

namespace {

Eigen::MatrixXcd drift_with_squeezing(const SystemSpec& spec) {
  if (spec.n_modes() == 1) {
    return single_mode_drift(spec.modes[0], spec.baths[0].M);
  }
  return two_mode_drift(spec);
}

Eigen::MatrixXcd drift_thermal(const SystemSpec& spec) {
  SystemSpec thermal = spec;
  for (BathMoments& bath : thermal.baths) bath.M = Complex(0.0, 0.0);
  return drift_with_squeezing(thermal);
}

Eigen::MatrixXcd diffusion_any(const SystemSpec& spec,
                               DiffusionConvention convention) {
  if (spec.n_modes() == 1) {
    return single_mode_diffusion(spec.modes[0].gamma, spec.baths[0],
                                 convention);
  }
  return two_mode_diffusion(spec, convention);
}

}  // namespace

TransportMatrices transport_matrices(const SystemSpec& spec,
                                     DiffusionConvention convention) {
  spec.validate();
  TransportMatrices out;
  if (convention == DiffusionConvention::ConsistencyCorrected) {
    out.A = drift_thermal(spec);
  } else {
    out.A = drift_with_squeezing(spec);
  }
  out.D = diffusion_any(spec, convention);
  return out;
}

PerturbationSplit perturbation_split(const SystemSpec& spec,
                                     DiffusionConvention convention) {
  spec.validate();
  PerturbationSplit out;
  out.A0 = drift_thermal(spec);
  out.D0 = [&] {
    SystemSpec thermal = spec;
    for (BathMoments& bath : thermal.baths) bath.M = Complex(0.0, 0.0);
    return diffusion_any(thermal, convention);
  }();
  out.A1 = drift_with_squeezing(spec) - out.A0;
  out.D1 = diffusion_any(spec, convention) - out.D0;
  return out;
}

Eigen::MatrixXd particle_hole_permutation(int n_modes) {
  if (n_modes < 1) {
    throw ValidationError("n_modes: must be >= 1, got " +
                          std::to_string(n_modes));
  }
  const int dim = 2 * n_modes;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < n_modes; ++k) {
    p(2 * k, 2 * k + 1) = 1.0;
    p(2 * k + 1, 2 * k) = 1.0;
  }
  return p;
}

}  // namespace sqbath
