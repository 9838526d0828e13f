#pragma once

#include "sqbath/lyapunov.hpp"
#include "sqbath/types.hpp"

namespace sqbath {

struct EntropyReport {
  /// Renyi-2 entropy in nats.
  double s2 = 0.0;
  /// State purity in (0, 1] under the module's normalization.
  double purity = 1.0;
  /// Determinant of the quadrature covariance used (det V).
  double det_sigma = 0.25;
};

/// Renyi-2 entropy of a single mode from its quadrature moments, in the
/// normalization where det V = AB - C^2/4 with A = xx, B = pp, C = xp:
/// s2 = 1/2 ln(4 det V), purity = 1/sqrt(4 det V). The uncertainty floor
/// det V >= 1/4 is enforced with tolerance floor_tol. Note this literal
/// normalization gives det V = 1 (not 1/4) at N = R = 0; recorded, not
/// repaired (see README, Known findings).
EntropyReport renyi2_single_mode(const QuadratureMoments& v,
                                 double floor_tol = 1e-9);

/// The companion closed form for det V published alongside the quadrature
/// formulas: (2N+1)^2 - 4 R^2 (gamma^2 - 8 omega^2)^2 / (gamma^2 + 8
/// omega^2)^2. This does NOT equal AB - C^2/4 of the quadrature moments;
/// both are emitted so the discrepancy is visible (Known findings).
double det_v_display(double N, double gamma, double omega, double R);

/// Renyi-2 entropy of an n-mode Gaussian state from sigma = <R R^dag> in the
/// (a1, a1^dag, ...) ordering, via the symmetrized quadrature covariance V
/// (vacuum V = I/2): s2 = 1/2 ln det(2V), purity = det(2V)^{-1/2}. This is
/// the standard Gaussian extension of the single-mode formula; the
/// single-mode literal path above is kept separately because its
/// normalization differs (see README).
EntropyReport renyi2_from_covariance(const Eigen::MatrixXcd& sigma);

/// Symmetrized quadrature covariance V (real symmetric) from sigma =
/// <R R^dag>: V = Re(T sigma T^dag - i Omega / 2) with T the basis change to
/// (x1, p1, ...) and Omega the symplectic form.
Eigen::MatrixXd quadrature_covariance_from_moments(
    const Eigen::MatrixXcd& sigma);

struct PurityPoint {
  double R = 0.0;
  QuadratureMoments quadratures;
  double det_v = 0.0;
  double det_v_display = 0.0;
  double s2 = 0.0;
  double purity = 0.0;
  /// False when R exceeds the physicality bound sqrt(N(N+1)); such points
  /// carry NaN entropy values and are markers, not results.
  bool physical = true;
};

/// Steady-state purity along an R grid at fixed N, composing
/// quadrature_steady_variances with renyi2_single_mode per point.
std::vector<PurityPoint> purity_vs_R_curve(const ModeSpec& mode, double N,
                                           const std::vector<double>& r_grid);

/// Closed-form steady energy current between the two modes driven by bath
/// occupation imbalance (squeezing-free): 2 J gamma (n2 - n1) / (4 J^2 +
/// gamma^2).
double thermal_current(double J, double gamma, double n1, double n2);

/// The same current extracted from a 4x4 steady covariance in the
/// (a1, a1^dag, a2, a2^dag) ordering: Re[i (sigma(0,2) - sigma(2,0))].
double thermal_current_from_covariance(const Eigen::MatrixXcd& sigma);

/// Solves A0 sigma1 + sigma1 A0^dag = -(A1 sigma0 + sigma0 A1^dag + D1) for
/// the first-order covariance correction. Checks that sigma0 solves the
/// zeroth-order equation (residual <= 1e-6 ||D0||_F) and that A0 is stable.
Eigen::MatrixXcd first_order_covariance(const Eigen::MatrixXcd& a0,
                                        const Eigen::MatrixXcd& d0,
                                        const Eigen::MatrixXcd& a1,
                                        const Eigen::MatrixXcd& d1,
                                        const Eigen::MatrixXcd& sigma0,
                                        double stability_threshold = 1e-12);

/// Symmetric/antisymmetric bath parameters: N_i = n +- dn/2,
/// M_i = m +- dm/2 (real), with bookkeeping scale eta in (0, 1].
struct PerturbationInput {
  double n = 0.0;
  double dn = 0.0;
  double m = 0.0;
  double dm = 0.0;
  double eta = 1.0;

  double n1() const { return n + 0.5 * dn; }
  double n2() const { return n - 0.5 * dn; }
  double m1() const { return m + 0.5 * dm; }
  double m2() const { return m - 0.5 * dm; }

  /// Throws ValidationError when a reconstructed occupation is negative or
  /// eta is outside (0, 1].
  void validate() const;
};

/// Builds the two-mode system with shared (omega, gamma), hopping J, and
/// baths (n_i, m_i) from the symmetric parameterization.
SystemSpec two_mode_system_from_perturbation(const PerturbationInput& p,
                                             double J, double gamma,
                                             double omega);

/// Literal closed form for the first-order anomalous inter-mode correlation
/// sigma1(1,4) (1-based indices in the (a1, a1^dag, a2, a2^dag) ordering):
///   2 i J gamma (8 J^2 m (1+n) + gamma [2 m (1+n) gamma
///     + dm dn (gamma + i omega)])
///   / ((4 J^2 + gamma^2)(4 J^2 + (gamma + 2 i omega)^2))
Complex sigma14_closed_form(const PerturbationInput& p, double J, double gamma,
                            double omega);

/// Companion closed form for sigma1(2,3): the sign-flipped,
/// conjugate-denominator variant, implemented from its own display so the
/// two can be cross-checked numerically.
Complex sigma23_closed_form(const PerturbationInput& p, double J, double gamma,
                            double omega);

/// Exact Renyi-2 entropy shift 1/2 ln(det sigma / det sigma0) computed on
/// <R R^dag> covariances directly (the quadrature basis change cancels in
/// the ratio). Both determinants must be positive.
double entropy_shift_exact(const Eigen::MatrixXcd& sigma0,
                           const Eigen::MatrixXcd& sigma);

struct PerturbativeShift {
  /// -1/4 Tr[(sigma0^{-1} sigma1)^2].
  double value = 0.0;
  /// Tr(sigma0^{-1} sigma1); expected to vanish for the symmetric splitting.
  double trace_diagnostic = 0.0;
};

/// Quadratic perturbative entropy shift with its first-order trace
/// diagnostic.
PerturbativeShift entropy_shift_perturbative(const Eigen::MatrixXcd& sigma0,
                                             const Eigen::MatrixXcd& sigma1);

/// The quartic diagnostic 1/2 |sigma14|^4 evaluated on a first-order
/// anomalous correlation value. Emitted alongside the exact and quadratic
/// routes; the three are compared, never merged (Known findings).
double entropy_shift_quartic(Complex sigma14_first_order);

/// Literal closed forms for the quadratic entropy-shift model
/// dS2 ~ alpha + beta dm^2:
///   alpha = 16 g^2 m^2 (n+1)^2 (g^2 + 4J^2 + 4w^2)
///           / ((2n+1)^2 [(g^2+4w^2)^2 + 16 J^4 + 8 J^2 (g^2 - 4w^2)])
///   beta  = 4 g^2 (n+1)^2 / ((2n+1)^2 (g^2 + 4w^2))
std::pair<double, double> alpha_beta_coefficients(double n, double m,
                                                  double gamma, double J,
                                                  double omega);

/// Validity guard for the perturbative machinery: true iff
/// |M| <= 0.2 * omega / gamma (weak squeezing).
bool weak_squeezing_ok(Complex M, double omega, double gamma);

}  // namespace sqbath
