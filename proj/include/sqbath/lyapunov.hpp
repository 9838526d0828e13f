#pragma once

#include "sqbath/types.hpp"

namespace sqbath {

/// Matrix exponential of a dense complex matrix via Pade-13 scaling and
/// squaring (Higham's degree/scale selection).
Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a);

/// Time series of first-moment vectors or covariance matrices.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
};

struct CovarianceTrajectory {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> sigmas;
  /// Frobenius norm of the Hermitization correction applied to each emitted
  /// state, aligned with `times`.
  std::vector<double> herm_corrections;
  double max_herm_correction = 0.0;
};

struct EvolveOptions {
  /// Local error tolerance (absolute and relative) for the embedded
  /// Runge-Kutta pair.
  double tol = 1e-10;
  /// Initial trial step.
  double h_init = 1e-3;
  /// Smallest allowed step before the integration is declared failed.
  double h_min = 1e-13;
  /// Hard cap on accepted steps per trajectory.
  long max_steps = 50'000'000;
};

/// First moments R(t) = exp(A t) r0 evaluated at each grid time via the
/// matrix exponential. t_grid must be non-empty, finite, non-negative and
/// strictly increasing.
Trajectory evolve_first_moments(const Eigen::MatrixXcd& a,
                                const Eigen::VectorXcd& r0,
                                const std::vector<double>& t_grid);

/// Integrates d(sigma)/dt = A sigma + sigma A^dag + D from sigma0 (at t = 0)
/// with an embedded Dormand-Prince 5(4) pair, stepping to each grid time
/// exactly (no interpolation). Every emitted state is re-Hermitized with the
/// applied correction norm logged. Step-size underflow or non-finite values
/// raise NumericsError (stiff or unstable drift).
CovarianceTrajectory evolve_covariance(const Eigen::MatrixXcd& a,
                                       const Eigen::MatrixXcd& d,
                                       const Eigen::MatrixXcd& sigma0,
                                       const std::vector<double>& t_grid,
                                       const EvolveOptions& options = {});

/// Unique Hermitian solution of A sigma + sigma A^dag = -D for Hurwitz A,
/// via Kronecker vectorization and a dense LU solve. Requires Hermitian D
/// and all Re(eigenvalue) < -stability_threshold; enforces the residual
/// bound ||A sigma + sigma A^dag + D||_F <= 1e-10 ||D||_F.
Eigen::MatrixXcd steady_state_lyapunov(const Eigen::MatrixXcd& a,
                                       const Eigen::MatrixXcd& d,
                                       double stability_threshold = 1e-12);

/// Closed-form single-mode steady covariance in the (a, a^dag) ordering:
/// diag (N+1, N), off-diagonal <a^2> = gamma M / (gamma + 2 i omega).
Eigen::Matrix2cd single_mode_steady_closed_form(const ModeSpec& mode,
                                                const BathMoments& bath);

/// Steady second moments of the quadratures x = (a + a^dag)/sqrt(2),
/// p = (a - a^dag)/(i sqrt(2)), in the normalization where the squeezing-free
/// values are xx = pp = 2N + 1.
struct QuadratureMoments {
  double xx = 0.0;
  double pp = 0.0;
  double xp = 0.0;
};

/// Literal closed forms (R is the real part of M):
///   xx = 2N+1 + 2 gamma^2 R / (gamma^2 + 8 omega^2)
///   pp = 2N+1 - 2 gamma^2 R / (gamma^2 + 8 omega^2)
///   xp = 8 gamma omega R / (gamma^2 + 8 omega^2)
QuadratureMoments quadrature_steady_variances(const ModeSpec& mode, double N,
                                              double R);

}  // namespace sqbath
