#pragma once

#include "sqbath/types.hpp"

#include <functional>

namespace sqbath {

/// Dynamical phase of a drift matrix: Unbroken when every eigenvalue keeps a
/// nonzero imaginary part (all modes oscillatory), Broken when at least one
/// eigenvalue is purely real within tolerance (an overdamped mode exists),
/// Degenerate when the eigenvector matrix is numerically singular
/// (defective matrix, coalescence).
enum class PtPhase { Unbroken, Broken, Degenerate };

std::string to_string(PtPhase phase);
/// Stable integer codes used in serialized output: 0 Unbroken, 1 Broken,
/// 2 Degenerate.
int phase_code(PtPhase phase);

struct SpectralOptions {
  /// |Im lambda| at or below this counts as purely real.
  double im_tol = 1e-9;
  /// cond_V above this flags the matrix Degenerate.
  double cond_degenerate = 1e8;
  /// Per-pair eigen residual bound, relative to ||A||_2.
  double residual_tol = 1e-10;
};

struct SpectralReport {
  /// Sorted by real part descending, then imaginary part descending.
  Eigen::VectorXcd eigenvalues;
  /// Right eigenvectors as unit-2-norm columns, aligned with eigenvalues.
  Eigen::MatrixXcd eigenvectors;
  /// 2-norm condition number of the eigenvector matrix (>= 1; may be inf).
  double cond_V = 1.0;
  PtPhase pt_phase = PtPhase::Unbroken;
};

/// Dense eigendecomposition of a general complex matrix (dim <= 8) with the
/// residual contract ||A v - lambda v||_2 <= residual_tol * ||A||_2 per pair.
SpectralReport eigendecompose(const Eigen::MatrixXcd& a,
                              const SpectralOptions& options = {});

/// Closed-form single-mode drift eigenvalues
///   lambda_pm = -gamma/2 +- sqrt(gamma^2 |M|^2 - omega^2)
/// with the principal square root (non-negative real part). Returned as
/// (lambda_plus, lambda_minus).
std::pair<Complex, Complex> single_mode_eigenvalues(const ModeSpec& mode,
                                                    Complex M);

/// Phase classification of a drift matrix (see PtPhase).
PtPhase classify_pt_phase(const Eigen::MatrixXcd& a,
                          const SpectralOptions& options = {});

/// Minimum pairwise eigenvalue distance (0 for fewer than two eigenvalues).
double min_eigenvalue_gap(const Eigen::VectorXcd& eigenvalues);

/// A refined degeneracy candidate on a one-parameter ray.
struct EPPoint {
  /// Ray parameter of the refined point.
  double s = 0.0;
  /// Minimum eigenvalue gap at s.
  double gap = 0.0;
  /// Eigenvector condition number at s.
  double cond_V = 1.0;
  PtPhase phase = PtPhase::Unbroken;
  /// "bisection" when located from a phase change across the bracket,
  /// "gap-min" when located by minimizing the eigenvalue gap (touch-type
  /// degeneracies that do not flip the phase).
  std::string method;
};

using DriftBuilder = std::function<Eigen::MatrixXcd(double)>;

/// Locates a degeneracy of builder(s) inside [s_lo, s_hi].
///
/// If the phase classification differs at the endpoints, bisects on the
/// classification until the bracket is narrower than tol. Otherwise falls
/// back to minimizing the eigenvalue gap over the bracket (golden-section on
/// the best coarse sample); the minimum is accepted as a degeneracy only if
/// the gap closes to gap_tolerance or below, else NumericsError. Endpoints
/// classifying Degenerate raise NumericsError (adjust the bracket).
EPPoint find_ep_on_ray(const DriftBuilder& builder, double s_lo, double s_hi,
                       double tol, const SpectralOptions& options = {},
                       double gap_tolerance = 1e-6, int coarse_samples = 64);

/// One evaluated grid point of the two-parameter squeezing scan.
struct FanGridPoint {
  double gamma = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  Eigen::VectorXcd eigenvalues;
  double cond_V = 1.0;
  PtPhase phase = PtPhase::Unbroken;
  bool physical = true;
};

/// One refined phase-boundary point.
struct FanContourPoint {
  double gamma = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  double gap = 0.0;
  double cond_V = 1.0;
  /// False when refinement failed; such points keep the cell-edge midpoint
  /// location and are flagged, never dropped.
  bool refined_ok = true;
  double angle = 0.0;
};

struct FanScanResult {
  /// Ordered gamma-major, then m1-major, then m2 (row-major grid order).
  std::vector<FanGridPoint> grid;
  /// Ordered by (gamma, angle from origin, m1, m2).
  std::vector<FanContourPoint> contours;
};

/// Classifies the squeezing-carrying two-mode drift over the (M1, M2) grid
/// for each gamma, locating phase-boundary crossings between adjacent grid
/// cells and refining each with find_ep_on_ray along the cell edge. M1, M2
/// are swept as real parameters; each point also records whether (N_i, M_i)
/// passes the physicality bound.
FanScanResult ep_fan_scan(const SystemSpec& base,
                          const std::vector<double>& m1_grid,
                          const std::vector<double>& m2_grid,
                          const std::vector<double>& gammas,
                          const SpectralOptions& options = {},
                          double ep_tol = 1e-10, double gap_tolerance = 1e-6);

}  // namespace sqbath
