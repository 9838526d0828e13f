#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqbath {

using Complex = std::complex<double>;

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user-supplied input (bad parameter range, malformed config, ...).
/// Messages name the offending key/field and the violated constraint.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Numerical failure (unstable drift, solver non-convergence, step-size
/// underflow, residual bound violation, ...).
class NumericsError : public Error {
 public:
  explicit NumericsError(const std::string& what) : Error(what) {}
};

/// Filesystem / serialization failure.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

/// Squeezing parameters of one reservoir: thermal occupation nbar >= 0,
/// squeezing amplitude r >= 0, squeezing phase phi (normalized into [0, 2pi)).
struct SqueezingInput {
  double nbar = 0.0;
  double r = 0.0;
  double phi = 0.0;

  /// Throws ValidationError if nbar or r is negative; normalizes phi.
  void validate_and_normalize();
};

/// Effective second moments of a squeezed thermal reservoir: occupation N and
/// complex anomalous correlation M. Physical states satisfy |M|^2 <= N(N+1).
struct BathMoments {
  double N = 0.0;
  Complex M{0.0, 0.0};
};

/// One bosonic mode: angular frequency omega > 0 and damping rate gamma > 0.
struct ModeSpec {
  double omega = 1.0;
  double gamma = 1.0;

  void validate() const;
};

/// One or two damped modes with optional coherent hopping J and one attached
/// reservoir per mode. Two-mode systems require a single shared gamma.
struct SystemSpec {
  std::vector<ModeSpec> modes;
  double J = 0.0;
  std::vector<BathMoments> baths;

  int n_modes() const { return static_cast<int>(modes.size()); }

  /// Throws ValidationError on size mismatch, invalid modes, or two-mode
  /// specs whose modes disagree on gamma.
  void validate() const;

  /// The common damping rate (validated shared value for two modes).
  double shared_gamma() const;
};

/// Which diffusion-matrix convention a computation uses.
///
/// PaperLiteral keeps the squeezing parameters in both the drift matrix and
/// the literal noise matrix (diagonal gamma*(N+2), off-diagonal 2*gamma*M per
/// mode block). ConsistencyCorrected routes squeezing through the noise
/// matrix only (drift stays thermal; block [[gamma(N+1), gamma M],
/// [gamma M*, gamma N]]), which is the unique choice that closes the moment
/// equations on the steady-state forms <adag a> = N, <a^2> = gamma M /
/// (gamma + 2 i omega). The corrected convention is the default for all
/// physics outputs; the literal one is retained because several closed-form
/// diagnostics reproduce it exactly. Spectral analysis always uses the
/// squeezing-carrying drift regardless of convention.
enum class DiffusionConvention {
  PaperLiteral,
  ConsistencyCorrected,
};

std::string to_string(DiffusionConvention c);
DiffusionConvention convention_from_string(const std::string& name);

/// Second-moment state sigma = <R R^dag> in the operator ordering
/// R = (a1, a1^dag) for one mode and R = (a1, a1^dag, a2, a2^dag) for two.
/// Hermitian up to numerical tolerance.
struct CovarianceState {
  Eigen::MatrixXcd sigma;

  int dim() const { return static_cast<int>(sigma.rows()); }
  int n_modes() const { return dim() / 2; }

  /// Replaces sigma by its Hermitian part and returns the Frobenius norm of
  /// the applied correction.
  double hermitize();

  /// Frobenius-norm deviation from Hermiticity.
  double hermiticity_error() const;
};

}  // namespace sqbath
