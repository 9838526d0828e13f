#include "sqbath/entropy.hpp"

#include "sqbath/gaussian.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sqbath {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

constexpr double kQuietNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

EntropyReport renyi2_single_mode(const QuadratureMoments& v,
                                 double floor_tol) {
  if (!(v.xx > 0.0) || !(v.pp > 0.0)) {
    throw ValidationError("quadratures: xx and pp must be > 0, got xx = " +
                          format_double(v.xx) + ", pp = " +
                          format_double(v.pp));
  }
  const double det_v = v.xx * v.pp - 0.25 * v.xp * v.xp;
  if (det_v < 0.25 - floor_tol) {
    throw NumericsError("det V: uncertainty floor violated, det V = " +
                        format_double(det_v) + " < 0.25");
  }
  EntropyReport report;
  report.det_sigma = det_v;
  report.s2 = 0.5 * std::log(4.0 * det_v);
  report.purity = 1.0 / std::sqrt(4.0 * det_v);
  return report;
}

double det_v_display(double N, double gamma, double omega, double R) {
  const double g2 = gamma * gamma;
  const double w2 = omega * omega;
  const double den = g2 + 8.0 * w2;
  const double num = g2 - 8.0 * w2;
  const double tn = 2.0 * N + 1.0;
  return tn * tn - 4.0 * R * R * (num * num) / (den * den);
}

Eigen::MatrixXd quadrature_covariance_from_moments(
    const Eigen::MatrixXcd& sigma) {
  const Eigen::Index dim = sigma.rows();
  if (sigma.cols() != dim || dim == 0 || dim % 2 != 0) {
    throw ValidationError(
        "sigma: must be a square matrix of even dimension, got " +
        std::to_string(sigma.rows()) + "x" + std::to_string(sigma.cols()));
  }
  if ((sigma - sigma.adjoint()).norm() > 1e-8 * std::max(1.0, sigma.norm())) {
    throw ValidationError("sigma: must be Hermitian");
  }
  const Eigen::Index n_modes = dim / 2;
  const Complex i(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd omega_form = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < n_modes; ++k) {
    // x_k = (a_k + a_k^dag)/sqrt(2), p_k = (a_k - a_k^dag)/(i sqrt(2)).
    t(2 * k, 2 * k) = inv_sqrt2;
    t(2 * k, 2 * k + 1) = inv_sqrt2;
    t(2 * k + 1, 2 * k) = -i * inv_sqrt2;
    t(2 * k + 1, 2 * k + 1) = i * inv_sqrt2;
    omega_form(2 * k, 2 * k + 1) = 1.0;
    omega_form(2 * k + 1, 2 * k) = -1.0;
  }

  const Eigen::MatrixXcd v_complex =
      t * sigma * t.adjoint() - 0.5 * i * omega_form;
  const double imag_norm = v_complex.imag().norm();
  if (imag_norm > 1e-8 * std::max(1.0, v_complex.norm())) {
    throw NumericsError(
        "quadrature covariance: unexpected imaginary residue " +
        format_double(imag_norm) +
        " (sigma lacks the particle-hole structure of <R R^dag>)");
  }
  Eigen::MatrixXd v = v_complex.real();
  v = 0.5 * (v + v.transpose()).eval();
  return v;
}

EntropyReport renyi2_from_covariance(const Eigen::MatrixXcd& sigma) {
  const Eigen::MatrixXd v = quadrature_covariance_from_moments(sigma);
  const double det2v = (2.0 * v).determinant();
  if (!(det2v > 0.0)) {
    throw NumericsError("renyi2: det(2V) must be positive, got " +
                        format_double(det2v));
  }
  EntropyReport report;
  report.det_sigma = det2v / std::pow(2.0, static_cast<double>(v.rows()));
  report.s2 = 0.5 * std::log(det2v);
  report.purity = 1.0 / std::sqrt(det2v);
  return report;
}

std::vector<PurityPoint> purity_vs_R_curve(const ModeSpec& mode, double N,
                                           const std::vector<double>& r_grid) {
  mode.validate();
  if (!(N >= 0.0)) {
    throw ValidationError("N: must be >= 0, got " + format_double(N));
  }
  const double bound = std::sqrt(N * (N + 1.0));
  std::vector<PurityPoint> curve;
  curve.reserve(r_grid.size());
  for (double r : r_grid) {
    PurityPoint point;
    point.R = r;
    point.det_v_display = det_v_display(N, mode.gamma, mode.omega, r);
    if (std::abs(r) > bound + 1e-12) {
      // Beyond the physicality bound: marker row, no entropy values.
      point.physical = false;
      point.quadratures = QuadratureMoments{kQuietNan, kQuietNan, kQuietNan};
      point.det_v = kQuietNan;
      point.s2 = kQuietNan;
      point.purity = kQuietNan;
    } else {
      point.quadratures = quadrature_steady_variances(mode, N, r);
      const EntropyReport report = renyi2_single_mode(point.quadratures);
      point.det_v = report.det_sigma;
      point.s2 = report.s2;
      point.purity = report.purity;
      point.physical = true;
    }
    curve.push_back(point);
  }
  return curve;
}

double thermal_current(double J, double gamma, double n1, double n2) {
  if (!(gamma > 0.0)) {
    throw ValidationError("gamma: must be > 0, got " + format_double(gamma));
  }
  return 2.0 * J * gamma * (n2 - n1) / (4.0 * J * J + gamma * gamma);
}

double thermal_current_from_covariance(const Eigen::MatrixXcd& sigma) {
  if (sigma.rows() != 4 || sigma.cols() != 4) {
    throw ValidationError(
        "sigma: thermal_current_from_covariance requires a 4x4 covariance");
  }
  const Complex value = Complex(0.0, 1.0) * (sigma(0, 2) - sigma(2, 0));
  return value.real();
}

Eigen::MatrixXcd first_order_covariance(const Eigen::MatrixXcd& a0,
                                        const Eigen::MatrixXcd& d0,
                                        const Eigen::MatrixXcd& a1,
                                        const Eigen::MatrixXcd& d1,
                                        const Eigen::MatrixXcd& sigma0,
                                        double stability_threshold) {
  const Eigen::Index n = a0.rows();
  if (a0.cols() != n || d0.rows() != n || d0.cols() != n || a1.rows() != n ||
      a1.cols() != n || d1.rows() != n || d1.cols() != n ||
      sigma0.rows() != n || sigma0.cols() != n) {
    throw ValidationError(
        "first_order_covariance: all matrices must share one square shape");
  }
  const double zeroth_residual = (a0 * sigma0 + sigma0 * a0.adjoint() + d0)
                                     .norm();
  if (zeroth_residual > 1e-6 * std::max(d0.norm(), 1.0)) {
    throw ValidationError(
        "sigma0: does not solve the zeroth-order steady-state equation "
        "(residual " +
        format_double(zeroth_residual) + ")");
  }
  const Eigen::MatrixXcd rhs = a1 * sigma0 + sigma0 * a1.adjoint() + d1;
  return steady_state_lyapunov(a0, rhs, stability_threshold);
}

void PerturbationInput::validate() const {
  if (!(n1() >= 0.0) || !(n2() >= 0.0)) {
    throw ValidationError(
        "n, dn: reconstructed occupations must be >= 0, got N1 = " +
        format_double(n1()) + ", N2 = " + format_double(n2()));
  }
  if (!(eta > 0.0) || eta > 1.0) {
    throw ValidationError("eta: must be in (0, 1], got " +
                          format_double(eta));
  }
}

SystemSpec two_mode_system_from_perturbation(const PerturbationInput& p,
                                             double J, double gamma,
                                             double omega) {
  p.validate();
  SystemSpec spec;
  spec.modes = {ModeSpec{omega, gamma}, ModeSpec{omega, gamma}};
  spec.J = J;
  spec.baths = {BathMoments{p.n1(), Complex(p.m1(), 0.0)},
                BathMoments{p.n2(), Complex(p.m2(), 0.0)}};
  spec.validate();
  return spec;
}

namespace {

Complex sigma_anomalous_closed_form(const PerturbationInput& p, double J,
                                    double gamma, double omega,
                                    double omega_sign, double overall_sign) {
  p.validate();
  const Complex i(0.0, 1.0);
  const Complex gw = Complex(gamma, omega_sign * omega);
  const Complex num =
      overall_sign * 2.0 * i * J * gamma *
      (8.0 * J * J * p.m * (1.0 + p.n) +
       gamma * (2.0 * p.m * (1.0 + p.n) * gamma + p.dm * p.dn * gw));
  const Complex g2w = Complex(gamma, omega_sign * 2.0 * omega);
  const Complex den =
      (4.0 * J * J + gamma * gamma) * (4.0 * J * J + g2w * g2w);
  if (std::abs(den) < 1e-14) {
    throw ValidationError(
        "sigma closed form: singular parameters, |denominator| = " +
        format_double(std::abs(den)) + " < 1e-14");
  }
  return num / den;
}

}  // namespace

Complex sigma14_closed_form(const PerturbationInput& p, double J, double gamma,
                            double omega) {
  return sigma_anomalous_closed_form(p, J, gamma, omega, +1.0, +1.0);
}

Complex sigma23_closed_form(const PerturbationInput& p, double J, double gamma,
                            double omega) {
  return sigma_anomalous_closed_form(p, J, gamma, omega, -1.0, -1.0);
}

double entropy_shift_exact(const Eigen::MatrixXcd& sigma0,
                           const Eigen::MatrixXcd& sigma) {
  const Complex det0 = sigma0.determinant();
  const Complex det1 = sigma.determinant();
  if (std::abs(det0.imag()) > 1e-8 * std::abs(det0) ||
      std::abs(det1.imag()) > 1e-8 * std::abs(det1)) {
    throw NumericsError("entropy_shift_exact: determinants are not real "
                        "(covariances are not Hermitian)");
  }
  if (!(det0.real() > 0.0) || !(det1.real() > 0.0)) {
    throw NumericsError(
        "entropy_shift_exact: determinants must be positive, got det0 = " +
        format_double(det0.real()) + ", det = " + format_double(det1.real()));
  }
  return 0.5 * std::log(det1.real() / det0.real());
}

PerturbativeShift entropy_shift_perturbative(const Eigen::MatrixXcd& sigma0,
                                             const Eigen::MatrixXcd& sigma1) {
  if (sigma0.rows() != sigma0.cols() || sigma1.rows() != sigma1.cols() ||
      sigma0.rows() != sigma1.rows()) {
    throw ValidationError(
        "entropy_shift_perturbative: sigma0 and sigma1 must share one square "
        "shape");
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sigma0);
  const Eigen::MatrixXcd x = lu.solve(sigma1);
  if (!x.allFinite()) {
    throw NumericsError("entropy_shift_perturbative: sigma0 is singular");
  }
  PerturbativeShift shift;
  shift.trace_diagnostic = x.trace().real();
  shift.value = -0.25 * (x * x).trace().real();
  return shift;
}

double entropy_shift_quartic(Complex sigma14_first_order) {
  const double a = std::abs(sigma14_first_order);
  return 0.5 * a * a * a * a;
}

std::pair<double, double> alpha_beta_coefficients(double n, double m,
                                                  double gamma, double J,
                                                  double omega) {
  const double g2 = gamma * gamma;
  const double w2 = omega * omega;
  const double j2 = J * J;
  const double tn = 2.0 * n + 1.0;
  const double np1 = n + 1.0;

  const double alpha_den =
      tn * tn *
      ((g2 + 4.0 * w2) * (g2 + 4.0 * w2) + 16.0 * j2 * j2 +
       8.0 * j2 * (g2 - 4.0 * w2));
  const double beta_den = tn * tn * (g2 + 4.0 * w2);
  if (std::abs(alpha_den) < 1e-14 || std::abs(beta_den) < 1e-14) {
    throw ValidationError("alpha_beta_coefficients: singular denominator");
  }
  const double alpha =
      16.0 * g2 * m * m * np1 * np1 * (g2 + 4.0 * j2 + 4.0 * w2) / alpha_den;
  const double beta = 4.0 * g2 * np1 * np1 / beta_den;
  return {alpha, beta};
}

bool weak_squeezing_ok(Complex M, double omega, double gamma) {
  if (!(gamma > 0.0) || !(omega > 0.0)) {
    throw ValidationError("weak_squeezing_ok: omega and gamma must be > 0");
  }
  return std::abs(M) <= 0.2 * omega / gamma;
}

}  // namespace sqbath
