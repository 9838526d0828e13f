#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "sqbath/gaussian.hpp"
#include "sqbath/spectral.hpp"
#include "test_helpers.hpp"

using namespace sqbath;

namespace {

SystemSpec fan_system(double omega, double gamma, double J, double n,
                      double m1, double m2) {
  SystemSpec spec;
  spec.modes = {{omega, gamma}, {omega, gamma}};
  spec.J = J;
  spec.baths = {{n, Complex(m1, 0.0)}, {n, Complex(m2, 0.0)}};
  return spec;
}

// Distance between two eigenvalue multisets: the smallest achievable
// max-pairwise distance over all pairings. Sorted-order pairing is not
// reliable here because near-tied real parts order by roundoff noise; with
// at most 8 values, minimizing over every permutation is exact and cheap.
double multiset_distance(const Eigen::VectorXcd& a,
                         const Eigen::VectorXcd& b) {
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() <= 8);
  std::vector<int> perm(static_cast<std::size_t>(a.size()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      worst = std::max(worst,
                       std::abs(a(k) - b(perm[static_cast<std::size_t>(k)])));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("eigendecomposition basics") {
  SUBCASE("diagonal matrix: sorted values, unit vectors, cond_V = 1") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
    a(0, 0) = Complex(1.0, 0.0);
    a(1, 1) = Complex(0.0, 2.0);
    const SpectralReport report = eigendecompose(a);
    CHECK(std::abs(report.eigenvalues(0) - Complex(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(report.eigenvalues(1) - Complex(0.0, 2.0)) < 1e-14);
    CHECK(report.cond_V == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 2; ++k) {
      CHECK(std::abs(report.eigenvectors.col(k).norm() - 1.0) < 1e-13);
    }
  }
  SUBCASE("sorting is by real part descending, then imaginary descending") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
    a(0, 0) = Complex(-1.0, -2.0);
    a(1, 1) = Complex(-1.0, 2.0);
    a(2, 2) = Complex(-0.5, 0.0);
    a(3, 3) = Complex(-2.0, 0.0);
    const SpectralReport report = eigendecompose(a);
    CHECK(std::abs(report.eigenvalues(0) - Complex(-0.5, 0.0)) < 1e-14);
    CHECK(std::abs(report.eigenvalues(1) - Complex(-1.0, 2.0)) < 1e-14);
    CHECK(std::abs(report.eigenvalues(2) - Complex(-1.0, -2.0)) < 1e-14);
    CHECK(std::abs(report.eigenvalues(3) - Complex(-2.0, 0.0)) < 1e-14);
  }
  SUBCASE("reconstruction V L V^{-1} on random well-conditioned matrices") {
    std::mt19937_64 rng(1234);
    int tested = 0;
    while (tested < 50) {
      const Eigen::MatrixXcd a = testing::random_matrix(rng, 4, 1.0);
      const SpectralReport report = eigendecompose(a);
      if (report.cond_V >= 1e6) continue;
      ++tested;
      const Eigen::MatrixXcd reconstructed =
          report.eigenvectors * report.eigenvalues.asDiagonal() *
          report.eigenvectors.inverse();
      CHECK((reconstructed - a).norm() <= 1e-9 * std::max(a.norm(), 1.0));
    }
  }
  SUBCASE("dimension cap") {
    CHECK_THROWS_AS(eigendecompose(Eigen::MatrixXcd::Zero(9, 9)),
                    ValidationError);
  }
}

TEST_CASE("closed-form single-mode eigenvalues match the dense solver") {
  std::mt19937_64 rng(777);
  int tested = 0;
  while (tested < 100) {
    const ModeSpec mode{testing::uniform(rng, 0.3, 2.0),
                        testing::uniform(rng, 0.1, 2.5)};
    const Complex m = testing::complex_in_disc(rng, 1.5);
    // Stay away from the degeneracy where the branches collide.
    const double discriminant =
        mode.gamma * mode.gamma * std::norm(m) - mode.omega * mode.omega;
    if (std::abs(discriminant) < 1e-3) continue;
    ++tested;
    const auto [plus, minus] = single_mode_eigenvalues(mode, m);
    const SpectralReport report =
        eigendecompose(single_mode_drift(mode, m));
    Eigen::VectorXcd closed(2);
    closed << plus, minus;
    CHECK(multiset_distance(closed, report.eigenvalues) < 1e-10);
  }
}

TEST_CASE("spectral symmetries of the squeezing-carrying drift") {
  SUBCASE("real-squeezing spectrum is closed under conjugation") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 30; ++trial) {
      const SystemSpec spec = fan_system(
          1.0, testing::uniform(rng, 0.1, 1.5), testing::uniform(rng, 0.0, 0.5),
          0.5, testing::uniform(rng, -1.2, 1.2),
          testing::uniform(rng, -1.2, 1.2));
      const Eigen::VectorXcd values =
          eigendecompose(two_mode_drift(spec)).eigenvalues;
      CHECK(multiset_distance(values, values.conjugate()) < 1e-9);
    }
  }
  SUBCASE("flipping the signs of both squeezings preserves the spectrum") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 30; ++trial) {
      const double m1 = testing::uniform(rng, -1.2, 1.2);
      const double m2 = testing::uniform(rng, -1.2, 1.2);
      const double gamma = testing::uniform(rng, 0.1, 1.5);
      const Eigen::VectorXcd a =
          eigendecompose(two_mode_drift(fan_system(1.0, gamma, 0.2, 0.5, m1,
                                                   m2)))
              .eigenvalues;
      const Eigen::VectorXcd b =
          eigendecompose(two_mode_drift(fan_system(1.0, gamma, 0.2, 0.5, -m1,
                                                   -m2)))
              .eigenvalues;
      CHECK(multiset_distance(a, b) < 1e-9);
    }
  }
}

TEST_CASE("phase classification") {
  SUBCASE("oscillatory spectrum is Unbroken") {
    const Eigen::Matrix2cd a =
        single_mode_drift({1.0, 0.5}, Complex(0.0, 0.0));
    CHECK(classify_pt_phase(a) == PtPhase::Unbroken);
  }
  SUBCASE("an eigenvalue pinned to the real axis marks Broken") {
    // gamma |M| = 1.2 > omega = 1: both eigenvalues real.
    const Eigen::Matrix2cd a =
        single_mode_drift({1.0, 2.0}, Complex(0.6, 0.0));
    CHECK(classify_pt_phase(a) == PtPhase::Broken);
  }
  SUBCASE("a defective matrix with blown-up cond_V is Degenerate") {
    Eigen::MatrixXcd a(2, 2);
    a << Complex(-1.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0),
        Complex(-1.0, 0.0);
    CHECK(classify_pt_phase(a) == PtPhase::Degenerate);
  }
  SUBCASE("im_tol controls the Unbroken/Broken boundary") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
    a(0, 0) = Complex(-1.0, 1e-6);
    a(1, 1) = Complex(-1.0, -1e-6);
    SpectralOptions strict;
    strict.im_tol = 1e-9;
    CHECK(classify_pt_phase(a, strict) == PtPhase::Unbroken);
    SpectralOptions loose;
    loose.im_tol = 1e-3;
    CHECK(classify_pt_phase(a, loose) == PtPhase::Broken);
  }
  SUBCASE("phase codes are stable") {
    CHECK(phase_code(PtPhase::Unbroken) == 0);
    CHECK(phase_code(PtPhase::Broken) == 1);
    CHECK(phase_code(PtPhase::Degenerate) == 2);
    CHECK(to_string(PtPhase::Unbroken) == "unbroken");
    CHECK(to_string(PtPhase::Broken) == "broken");
    CHECK(to_string(PtPhase::Degenerate) == "degenerate");
  }
}

TEST_CASE("degeneracy search on a single-mode ray (phase flip: bisection)") {
  SUBCASE("gamma = 2 locates the crossing at M = 0.5") {
    const ModeSpec mode{1.0, 2.0};
    const auto builder = [&mode](double s) {
      return Eigen::MatrixXcd(single_mode_drift(mode, Complex(s, 0.0)));
    };
    const EPPoint ep = find_ep_on_ray(builder, 0.3, 0.7, 1e-10);
    CHECK(ep.method == "bisection");
    CHECK(std::abs(ep.s - 0.5) < 1e-6);
    CHECK(ep.gap < 1e-4);
    // The collision is defective: eigenvectors coalesce.
    const double cond_lo = eigendecompose(builder(0.3)).cond_V;
    const double cond_hi = eigendecompose(builder(0.7)).cond_V;
    CHECK(ep.cond_V > 1e3);
    CHECK(ep.cond_V > 10.0 * std::max(cond_lo, cond_hi));
  }
  SUBCASE("gamma = 0.5 locates the crossing at M = 2") {
    const ModeSpec mode{1.0, 0.5};
    const auto builder = [&mode](double s) {
      return Eigen::MatrixXcd(single_mode_drift(mode, Complex(s, 0.0)));
    };
    const EPPoint ep = find_ep_on_ray(builder, 1.5, 2.5, 1e-10);
    CHECK(ep.method == "bisection");
    CHECK(std::abs(ep.s - 2.0) < 1e-6);
    CHECK(ep.gap < 1e-4);
  }
}

TEST_CASE("degeneracy search without a phase flip (gap minimization)") {
  // Along the anti-diagonal M1 = s, M2 = -s the two-mode spectrum touches at
  // s* = sqrt(omega^2 - J^2) / gamma without changing the phase
  // classification; for omega=1, gamma=0.5, J=0.2 that is 1.9595917942...
  const double omega = 1.0;
  const double gamma = 0.5;
  const double J = 0.2;
  const auto builder = [&](double s) {
    return two_mode_drift(fan_system(omega, gamma, J, 0.5, s, -s));
  };
  const double expected = std::sqrt(omega * omega - J * J) / gamma;

  const EPPoint ep = find_ep_on_ray(builder, 1.5, 2.4, 1e-10);
  CHECK(ep.method == "gap-min");
  CHECK(std::abs(ep.s - expected) < 1e-4);
  CHECK(ep.gap < 1e-9);
  // This touch is NOT defective: the eigenvector basis stays
  // well-conditioned (a diabolic/semisimple crossing, measured cond_V ~ 10),
  // unlike the defective points found by the phase-flip bisection.
  CHECK(ep.cond_V < 1e3);
}

TEST_CASE("degeneracy search failure modes") {
  const ModeSpec mode{1.0, 0.5};
  const auto builder = [&mode](double s) {
    return Eigen::MatrixXcd(single_mode_drift(mode, Complex(s, 0.0)));
  };
  SUBCASE("no flip and no gap closure raises NumericsError") {
    CHECK_THROWS_AS(find_ep_on_ray(builder, 0.1, 0.5, 1e-10), NumericsError);
  }
  SUBCASE("degenerate endpoint raises NumericsError") {
    const auto defective = [](double) {
      Eigen::MatrixXcd a(2, 2);
      a << Complex(-1.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.0),
          Complex(-1.0, 0.0);
      return a;
    };
    CHECK_THROWS_AS(find_ep_on_ray(defective, 0.0, 1.0, 1e-10),
                    NumericsError);
  }
  SUBCASE("invalid bracket raises ValidationError") {
    CHECK_THROWS_AS(find_ep_on_ray(builder, 0.5, 0.5, 1e-10),
                    ValidationError);
    CHECK_THROWS_AS(find_ep_on_ray(builder, 0.3, 0.7, -1.0),
                    ValidationError);
  }
}

TEST_CASE("minimum eigenvalue gap") {
  Eigen::VectorXcd values(3);
  values << Complex(0.0, 0.0), Complex(1.0, 0.0), Complex(0.0, 0.25);
  CHECK(min_eigenvalue_gap(values) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(min_eigenvalue_gap(Eigen::VectorXcd::Zero(1)) == 0.0);
}

TEST_CASE("fan scan over the squeezing plane") {
  const SystemSpec base = fan_system(1.0, 0.5, 0.2, 0.5, 0.0, 0.0);
  std::vector<double> m1;
  std::vector<double> m2;
  for (int k = 0; k <= 8; ++k) {
    m1.push_back(-1.2 + 2.4 * k / 8.0);
    m2.push_back(-1.2 + 2.4 * k / 8.0);
  }

  SUBCASE("grid is complete, ordered, and physically flagged") {
    const FanScanResult result = ep_fan_scan(base, m1, m2, {0.9});
    REQUIRE(result.grid.size() == 81);
    // gamma-major, then m1-major, then m2.
    CHECK(result.grid[0].m1 == doctest::Approx(-1.2));
    CHECK(result.grid[0].m2 == doctest::Approx(-1.2));
    CHECK(result.grid[1].m2 == doctest::Approx(-0.9));
    CHECK(result.grid[9].m1 == doctest::Approx(-0.9));
    for (const FanGridPoint& point : result.grid) {
      CHECK(point.eigenvalues.size() == 4);
      // physicality: |m| <= sqrt(0.5 * 1.5) = 0.866 for both baths
      const bool expect_physical = std::abs(point.m1) <= 0.8660254037844386 &&
                                   std::abs(point.m2) <= 0.8660254037844386;
      CHECK(point.physical == expect_physical);
    }
  }
  SUBCASE("gamma = 0.5 has no broken region on this grid") {
    const FanScanResult result = ep_fan_scan(base, m1, m2, {0.5});
    for (const FanGridPoint& point : result.grid) {
      CHECK(point.phase == PtPhase::Unbroken);
    }
    CHECK(result.contours.empty());
  }
  SUBCASE("gamma = 0.9 develops a broken fan with refined boundary points") {
    const FanScanResult result = ep_fan_scan(base, m1, m2, {0.9});
    int broken = 0;
    for (const FanGridPoint& point : result.grid) {
      if (point.phase == PtPhase::Broken) ++broken;
    }
    CHECK(broken > 0);
    REQUIRE(!result.contours.empty());
    for (const FanContourPoint& point : result.contours) {
      CHECK(point.gamma == doctest::Approx(0.9));
      if (point.refined_ok) {
        // A refined crossing sits essentially on the degeneracy: tiny gap
        // or a conditioned collapse of the eigenbasis.
        CHECK(point.gap < 1e-3);
      }
    }
    // Contours are sorted by angle within the gamma block.
    for (std::size_t k = 1; k < result.contours.size(); ++k) {
      CHECK(result.contours[k].angle >= result.contours[k - 1].angle - 1e-12);
    }
  }
}
