#include "sqbath/lyapunov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sqbath {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

void check_square(const Eigen::MatrixXcd& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(name) + ": must be a non-empty square " +
                          "matrix, got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
}

void check_t_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) {
    throw ValidationError("t_grid: must be non-empty");
  }
  double prev = -1.0;
  for (double t : t_grid) {
    if (!std::isfinite(t) || t < 0.0) {
      throw ValidationError("t_grid: times must be finite and >= 0, got " +
                            format_double(t));
    }
    if (t <= prev) {
      throw ValidationError("t_grid: times must be strictly increasing");
    }
    prev = t;
  }
}

// One-norm used by the exponential's scale selection.
double one_norm(const Eigen::MatrixXcd& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a) {
  check_square(a, "matrix_exponential input");
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  // Pade-13 coefficients (Higham 2005).
  static const double b[] = {64764752532480000.0,
                             32382376266240000.0,
                             7771770303897600.0,
                             1187353796428800.0,
                             129060195264000.0,
                             10559470521600.0,
                             670442572800.0,
                             33522128640.0,
                             1323241920.0,
                             40840800.0,
                             960960.0,
                             16380.0,
                             182.0,
                             1.0};
  constexpr double theta13 = 5.371920351148152;

  const double norm = one_norm(a);
  int squarings = 0;
  if (norm > theta13) {
    squarings = std::max(0, static_cast<int>(
                                std::ceil(std::log2(norm / theta13))));
  }
  const Eigen::MatrixXcd as = a / std::pow(2.0, squarings);

  const Eigen::MatrixXcd a2 = as * as;
  const Eigen::MatrixXcd a4 = a2 * a2;
  const Eigen::MatrixXcd a6 = a4 * a2;
  const Eigen::MatrixXcd u =
      as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * id);
  const Eigen::MatrixXcd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                             b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Eigen::MatrixXcd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Trajectory evolve_first_moments(const Eigen::MatrixXcd& a,
                                const Eigen::VectorXcd& r0,
                                const std::vector<double>& t_grid) {
  check_square(a, "A");
  if (r0.size() != a.rows()) {
    throw ValidationError("r0: size must match A, got " +
                          std::to_string(r0.size()) + " vs " +
                          std::to_string(a.rows()));
  }
  check_t_grid(t_grid);

  Trajectory out;
  out.times = t_grid;
  out.states.reserve(t_grid.size());
  for (double t : t_grid) {
    if (t == 0.0) {
      out.states.push_back(r0);
    } else {
      out.states.push_back(matrix_exponential(a * t) * r0);
    }
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order embedded weights.
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                          e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                          e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

}  // namespace

CovarianceTrajectory evolve_covariance(const Eigen::MatrixXcd& a,
                                       const Eigen::MatrixXcd& d,
                                       const Eigen::MatrixXcd& sigma0,
                                       const std::vector<double>& t_grid,
                                       const EvolveOptions& options) {
  check_square(a, "A");
  check_square(d, "D");
  check_square(sigma0, "sigma0");
  if (d.rows() != a.rows() || sigma0.rows() != a.rows()) {
    throw ValidationError("evolve_covariance: A, D, sigma0 dimensions differ");
  }
  if (!(options.tol > 0.0)) {
    throw ValidationError("tol: must be > 0, got " +
                          format_double(options.tol));
  }
  if ((sigma0 - sigma0.adjoint()).norm() > 1e-9 * std::max(1.0, sigma0.norm())) {
    throw ValidationError("sigma0: must be Hermitian");
  }
  check_t_grid(t_grid);

  const auto rhs = [&](const Eigen::MatrixXcd& s) -> Eigen::MatrixXcd {
    return a * s + s * a.adjoint() + d;
  };

  CovarianceTrajectory out;
  out.times = t_grid;
  out.sigmas.reserve(t_grid.size());
  out.herm_corrections.reserve(t_grid.size());

  const auto emit = [&](const Eigen::MatrixXcd& s) {
    CovarianceState state{s};
    const double corr = state.hermitize();
    out.sigmas.push_back(state.sigma);
    out.herm_corrections.push_back(corr);
    out.max_herm_correction = std::max(out.max_herm_correction, corr);
  };

  Eigen::MatrixXcd y = 0.5 * (sigma0 + sigma0.adjoint());
  double t = 0.0;
  double h = options.h_init;
  long steps = 0;

  Eigen::MatrixXcd k1 = rhs(y);  // FSAL: reused across accepted steps.

  for (double t_target : t_grid) {
    const double t_eps = 1e-14 * std::max(1.0, t_target);
    while (t_target - t > t_eps) {
      if (++steps > options.max_steps) {
        throw NumericsError(
            "integration failure: step budget exhausted at t = " +
            format_double(t));
      }
      if (h < options.h_min) {
        throw NumericsError(
            "integration failure: step size underflow at t = " +
            format_double(t) +
            " (stiff or unstable drift; check eigenvalues of A)");
      }
      // Step exactly onto the grid time; the cap is transient and does not
      // feed back into the controller except through the error estimate.
      const double h_use = std::min(h, t_target - t);

      using T = Dopri5;
      const Eigen::MatrixXcd k2 = rhs(y + h_use * (T::a21 * k1));
      const Eigen::MatrixXcd k3 =
          rhs(y + h_use * (T::a31 * k1 + T::a32 * k2));
      const Eigen::MatrixXcd k4 =
          rhs(y + h_use * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
      const Eigen::MatrixXcd k5 = rhs(
          y + h_use * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
      const Eigen::MatrixXcd k6 =
          rhs(y + h_use * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 +
                           T::a64 * k4 + T::a65 * k5));
      const Eigen::MatrixXcd y5 =
          y + h_use * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 +
                       T::b6 * k6);
      const Eigen::MatrixXcd k7 = rhs(y5);
      const Eigen::MatrixXcd y4 =
          y + h_use * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 +
                       T::e6 * k6 + T::e7 * k7);

      // Scaled max-norm local error.
      double err = 0.0;
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
          const double scale =
              options.tol +
              options.tol * std::max(std::abs(y(i, j)), std::abs(y5(i, j)));
          err = std::max(err, std::abs(y5(i, j) - y4(i, j)) / scale);
        }
      }
      if (!std::isfinite(err)) {
        throw NumericsError(
            "integration failure: non-finite values at t = " +
            format_double(t) +
            " (stiff or unstable drift; check eigenvalues of A)");
      }

      if (err <= 1.0) {
        t += h_use;
        y = y5;
        k1 = k7;
      }
      const double factor =
          std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
      h = factor * h_use;
    }
    t = t_target;
    emit(y);
  }
  return out;
}

Eigen::MatrixXcd steady_state_lyapunov(const Eigen::MatrixXcd& a,
                                       const Eigen::MatrixXcd& d,
                                       double stability_threshold) {
  check_square(a, "A");
  check_square(d, "D");
  if (d.rows() != a.rows()) {
    throw ValidationError("steady_state_lyapunov: A, D dimensions differ");
  }
  const double d_norm = d.norm();
  if ((d - d.adjoint()).norm() > 1e-12 * std::max(1.0, d_norm)) {
    throw ValidationError(
        "steady_state_lyapunov: D must be Hermitian (asymmetry " +
        format_double((d - d.adjoint()).norm()) +
        "); the literal diffusion convention is non-Hermitian for complex M");
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericsError("steady_state_lyapunov: eigenvalue computation for "
                        "the stability check failed");
  }
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (!(lambda.real() < -stability_threshold)) {
      throw NumericsError(
          "steady_state_lyapunov: drift is not Hurwitz-stable; eigenvalue " +
          format_complex(lambda) + " has real part >= -" +
          format_double(stability_threshold));
    }
  }

  const Eigen::Index n = a.rows();
  // Column-major vec: vec(A s) = (I (x) A) vec(s), vec(s A^dag) =
  // (conj(A) (x) I) vec(s).
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n * n, n * n);
  const Eigen::MatrixXcd a_conj = a.conjugate();
  for (Eigen::Index block = 0; block < n; ++block) {
    k.block(block * n, block * n, n, n) += a;
  }
  for (Eigen::Index bi = 0; bi < n; ++bi) {
    for (Eigen::Index bj = 0; bj < n; ++bj) {
      k.block(bi * n, bj * n, n, n) +=
          a_conj(bi, bj) * Eigen::MatrixXcd::Identity(n, n);
    }
  }

  Eigen::VectorXcd rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    rhs.segment(j * n, n) = -d.col(j);
  }

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(k);
  const Eigen::VectorXcd v = lu.solve(rhs);
  if (!v.allFinite()) {
    throw NumericsError(
        "steady_state_lyapunov: singular Kronecker system (drift eigenvalue "
        "pair summing to zero)");
  }

  Eigen::MatrixXcd sigma(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sigma.col(j) = v.segment(j * n, n);
  }
  sigma = 0.5 * (sigma + sigma.adjoint()).eval();

  const double residual = (a * sigma + sigma * a.adjoint() + d).norm();
  if (residual > 1e-10 * std::max(d_norm, 1e-300)) {
    throw NumericsError(
        "steady_state_lyapunov: residual bound violated, ||A s + s A^dag + "
        "D||_F = " +
        format_double(residual) + " > 1e-10 * ||D||_F");
  }
  return sigma;
}

Eigen::Matrix2cd single_mode_steady_closed_form(const ModeSpec& mode,
                                                const BathMoments& bath) {
  mode.validate();
  const Complex a2 =
      mode.gamma * bath.M / Complex(mode.gamma, 2.0 * mode.omega);
  Eigen::Matrix2cd sigma;
  sigma << bath.N + 1.0, a2, std::conj(a2), bath.N;
  return sigma;
}

QuadratureMoments quadrature_steady_variances(const ModeSpec& mode, double N,
                                              double R) {
  mode.validate();
  if (!(N >= 0.0)) {
    throw ValidationError("N: must be >= 0, got " + format_double(N));
  }
  const double g2 = mode.gamma * mode.gamma;
  const double den = g2 + 8.0 * mode.omega * mode.omega;
  QuadratureMoments q;
  q.xx = 2.0 * N + 1.0 + 2.0 * g2 * R / den;
  q.pp = 2.0 * N + 1.0 - 2.0 * g2 * R / den;
  q.xp = 8.0 * mode.gamma * mode.omega * R / den;
  return q;
}

}  // namespace sqbath
