#include "sqbath/spectral.hpp"

#include "sqbath/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace sqbath {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double spectral_norm(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace

std::string to_string(PtPhase phase) {
  switch (phase) {
    case PtPhase::Unbroken:
      return "unbroken";
    case PtPhase::Broken:
      return "broken";
    case PtPhase::Degenerate:
      return "degenerate";
  }
  return "unbroken";
}

int phase_code(PtPhase phase) {
  switch (phase) {
    case PtPhase::Unbroken:
      return 0;
    case PtPhase::Broken:
      return 1;
    case PtPhase::Degenerate:
      return 2;
  }
  return 0;
}

SpectralReport eigendecompose(const Eigen::MatrixXcd& a,
                              const SpectralOptions& options) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ValidationError("eigendecompose: matrix must be square, got " +
                          std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()));
  }
  if (a.rows() > 8) {
    throw ValidationError("eigendecompose: dimension must be <= 8, got " +
                          std::to_string(a.rows()));
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, true);
  if (solver.info() != Eigen::Success) {
    throw NumericsError(
        "eigendecompose: QR iteration did not converge (matrix is at or "
        "beyond a defective point; use gap/cond diagnostics nearby)");
  }

  const Eigen::Index n = a.rows();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXcd& raw = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (raw(i).real() != raw(j).real()) return raw(i).real() > raw(j).real();
    return raw(i).imag() > raw(j).imag();
  });
  // Real parts that agree up to eigensolver roundoff must count as ties, or
  // the secondary imaginary-part ordering flips unpredictably between nearby
  // inputs (conjugate pairs would come out in noise-driven order).
  const double tie_band =
      1e-10 * std::max(1.0, raw.cwiseAbs().maxCoeff());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo + 1;
    while (hi < order.size() &&
           raw(order[lo]).real() - raw(order[hi]).real() <= tie_band) {
      ++hi;
    }
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(lo),
              order.begin() + static_cast<std::ptrdiff_t>(hi),
              [&](int i, int j) { return raw(i).imag() > raw(j).imag(); });
    lo = hi;
  }

  SpectralReport report;
  report.eigenvalues.resize(n);
  report.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    report.eigenvalues(k) = raw(order[static_cast<std::size_t>(k)]);
    Eigen::VectorXcd v =
        solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    report.eigenvectors.col(k) = v;
  }

  const double a_norm = spectral_norm(a);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double residual = (a * report.eigenvectors.col(k) -
                             report.eigenvalues(k) * report.eigenvectors.col(k))
                                .norm();
    if (residual > options.residual_tol * std::max(a_norm, 1e-300)) {
      throw NumericsError(
          "eigendecompose: eigenpair residual " + format_double(residual) +
          " exceeds " + format_double(options.residual_tol) + " * ||A||_2");
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(report.eigenvectors);
  const auto& sv = svd.singularValues();
  const double s_min = sv(sv.size() - 1);
  report.cond_V = s_min > 0.0 ? sv(0) / s_min
                              : std::numeric_limits<double>::infinity();

  if (report.cond_V > options.cond_degenerate) {
    report.pt_phase = PtPhase::Degenerate;
  } else {
    bool any_real = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(report.eigenvalues(k).imag()) <= options.im_tol) {
        any_real = true;
        break;
      }
    }
    report.pt_phase = any_real ? PtPhase::Broken : PtPhase::Unbroken;
  }
  return report;
}

std::pair<Complex, Complex> single_mode_eigenvalues(const ModeSpec& mode,
                                                    Complex M) {
  mode.validate();
  const double g = mode.gamma;
  const Complex disc(g * g * std::norm(M) - mode.omega * mode.omega, 0.0);
  const Complex root = std::sqrt(disc);  // principal branch, Re >= 0
  return {Complex(-g / 2.0, 0.0) + root, Complex(-g / 2.0, 0.0) - root};
}

PtPhase classify_pt_phase(const Eigen::MatrixXcd& a,
                          const SpectralOptions& options) {
  return eigendecompose(a, options).pt_phase;
}

double min_eigenvalue_gap(const Eigen::VectorXcd& eigenvalues) {
  const Eigen::Index n = eigenvalues.size();
  if (n < 2) return 0.0;
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      gap = std::min(gap, std::abs(eigenvalues(i) - eigenvalues(j)));
    }
  }
  return gap;
}

namespace {

EPPoint diagnostics_at(const DriftBuilder& builder, double s,
                       const SpectralOptions& options,
                       const std::string& method) {
  const SpectralReport report = eigendecompose(builder(s), options);
  EPPoint point;
  point.s = s;
  point.gap = min_eigenvalue_gap(report.eigenvalues);
  point.cond_V = report.cond_V;
  point.phase = report.pt_phase;
  point.method = method;
  return point;
}

double gap_at(const DriftBuilder& builder, double s,
              const SpectralOptions& options) {
  SpectralReport report;
  // Near a defective point the residual contract can trip; for the scalar
  // gap objective fall back to eigenvalues-only, which stays well defined.
  try {
    report = eigendecompose(builder(s), options);
    return min_eigenvalue_gap(report.eigenvalues);
  } catch (const NumericsError&) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(builder(s), false);
    if (solver.info() != Eigen::Success) {
      return std::numeric_limits<double>::infinity();
    }
    return min_eigenvalue_gap(solver.eigenvalues());
  }
}

}  // namespace

EPPoint find_ep_on_ray(const DriftBuilder& builder, double s_lo, double s_hi,
                       double tol, const SpectralOptions& options,
                       double gap_tolerance, int coarse_samples) {
  if (!(s_lo < s_hi)) {
    throw ValidationError("find_ep_on_ray: require s_lo < s_hi, got [" +
                          format_double(s_lo) + ", " + format_double(s_hi) +
                          "]");
  }
  if (!(tol > 0.0)) {
    throw ValidationError("find_ep_on_ray: tol must be > 0, got " +
                          format_double(tol));
  }

  const PtPhase phase_lo = classify_pt_phase(builder(s_lo), options);
  const PtPhase phase_hi = classify_pt_phase(builder(s_hi), options);
  if (phase_lo == PtPhase::Degenerate || phase_hi == PtPhase::Degenerate) {
    throw NumericsError(
        "find_ep_on_ray: bracket endpoint classifies Degenerate; move the "
        "endpoints off the coalescence before refining");
  }

  if (phase_lo != phase_hi) {
    double lo = s_lo;
    double hi = s_hi;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const PtPhase phase_mid = classify_pt_phase(builder(mid), options);
      if (phase_mid == phase_lo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return diagnostics_at(builder, 0.5 * (lo + hi), options, "bisection");
  }

  // No phase change: look for a touch-type degeneracy as a gap minimum.
  const int samples = std::max(coarse_samples, 4);
  double best_s = s_lo;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double s =
        s_lo + (s_hi - s_lo) * static_cast<double>(i) / samples;
    const double gap = gap_at(builder, s, options);
    if (gap < best_gap) {
      best_gap = gap;
      best_s = s;
    }
  }
  const double step = (s_hi - s_lo) / samples;
  double lo = std::max(s_lo, best_s - step);
  double hi = std::min(s_hi, best_s + step);

  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = gap_at(builder, x1, options);
  double f2 = gap_at(builder, x2, options);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = gap_at(builder, x1, options);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = gap_at(builder, x2, options);
    }
  }
  const double s_star = 0.5 * (lo + hi);
  const double gap_star = gap_at(builder, s_star, options);
  if (gap_star > gap_tolerance) {
    throw NumericsError(
        "find_ep_on_ray: no phase change across the bracket and the minimum "
        "eigenvalue gap " +
        format_double(gap_star) + " exceeds the gap tolerance " +
        format_double(gap_tolerance));
  }
  EPPoint point = diagnostics_at(builder, s_star, options, "gap-min");
  point.gap = gap_star;
  return point;
}

FanScanResult ep_fan_scan(const SystemSpec& base,
                          const std::vector<double>& m1_grid,
                          const std::vector<double>& m2_grid,
                          const std::vector<double>& gammas,
                          const SpectralOptions& options, double ep_tol,
                          double gap_tolerance) {
  base.validate();
  if (base.n_modes() != 2) {
    throw ValidationError("ep_fan_scan: requires a two-mode system");
  }
  if (m1_grid.empty() || m2_grid.empty() || gammas.empty()) {
    throw ValidationError("ep_fan_scan: grids and gamma list must be "
                          "non-empty");
  }

  FanScanResult result;
  result.grid.reserve(gammas.size() * m1_grid.size() * m2_grid.size());

  for (double gamma : gammas) {
    if (!(gamma > 0.0)) {
      throw ValidationError("gammas: must be > 0, got " +
                            format_double(gamma));
    }
    SystemSpec spec = base;
    spec.modes[0].gamma = gamma;
    spec.modes[1].gamma = gamma;

    const auto drift_at = [&spec](double m1, double m2) {
      SystemSpec point = spec;
      point.baths[0].M = Complex(m1, 0.0);
      point.baths[1].M = Complex(m2, 0.0);
      return two_mode_drift(point);
    };

    const std::size_t n1 = m1_grid.size();
    const std::size_t n2 = m2_grid.size();
    std::vector<PtPhase> phases(n1 * n2);

    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        const double m1 = m1_grid[i];
        const double m2 = m2_grid[j];
        const SpectralReport report = eigendecompose(drift_at(m1, m2), options);
        FanGridPoint point;
        point.gamma = gamma;
        point.m1 = m1;
        point.m2 = m2;
        point.eigenvalues = report.eigenvalues;
        point.cond_V = report.cond_V;
        point.phase = report.pt_phase;
        point.physical =
            check_physical({spec.baths[0].N, Complex(m1, 0.0)}, 1e-12) &&
            check_physical({spec.baths[1].N, Complex(m2, 0.0)}, 1e-12);
        phases[i * n2 + j] = report.pt_phase;
        result.grid.push_back(std::move(point));
      }
    }

    // Refine each grid edge whose endpoints classify differently.
    std::vector<FanContourPoint> contours;
    const auto refine_edge = [&](double a1, double a2, double b1, double b2) {
      const double length = std::hypot(b1 - a1, b2 - a2);
      const DriftBuilder builder = [&](double s) {
        const double f = s / length;
        return drift_at(a1 + f * (b1 - a1), a2 + f * (b2 - a2));
      };
      FanContourPoint cp;
      cp.gamma = gamma;
      try {
        const EPPoint ep =
            find_ep_on_ray(builder, 0.0, length, ep_tol, options,
                           gap_tolerance, /*coarse_samples=*/8);
        const double f = ep.s / length;
        cp.m1 = a1 + f * (b1 - a1);
        cp.m2 = a2 + f * (b2 - a2);
        cp.gap = ep.gap;
        cp.cond_V = ep.cond_V;
        cp.refined_ok = true;
      } catch (const Error&) {
        cp.m1 = 0.5 * (a1 + b1);
        cp.m2 = 0.5 * (a2 + b2);
        const SpectralReport mid =
            eigendecompose(drift_at(cp.m1, cp.m2), options);
        cp.gap = min_eigenvalue_gap(mid.eigenvalues);
        cp.cond_V = mid.cond_V;
        cp.refined_ok = false;
      }
      cp.angle = std::atan2(cp.m2, cp.m1);
      contours.push_back(cp);
    };

    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        if (j + 1 < n2 && phases[i * n2 + j] != phases[i * n2 + j + 1]) {
          refine_edge(m1_grid[i], m2_grid[j], m1_grid[i], m2_grid[j + 1]);
        }
        if (i + 1 < n1 && phases[i * n2 + j] != phases[(i + 1) * n2 + j]) {
          refine_edge(m1_grid[i], m2_grid[j], m1_grid[i + 1], m2_grid[j]);
        }
      }
    }

    std::sort(contours.begin(), contours.end(),
              [](const FanContourPoint& a, const FanContourPoint& b) {
                if (a.angle != b.angle) return a.angle < b.angle;
                if (a.m1 != b.m1) return a.m1 < b.m1;
                return a.m2 < b.m2;
              });
    result.contours.insert(result.contours.end(), contours.begin(),
                           contours.end());
  }
  return result;
}

}  // namespace sqbath
