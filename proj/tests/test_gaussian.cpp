#include <cmath>

#include "doctest.h"
#include "sqbath/gaussian.hpp"
#include "test_helpers.hpp"

using namespace sqbath;

namespace {

SystemSpec two_mode_system(double omega, double gamma, double J, double n1,
                           Complex m1, double n2, Complex m2) {
  SystemSpec spec;
  spec.modes = {{omega, gamma}, {omega, gamma}};
  spec.J = J;
  spec.baths = {{n1, m1}, {n2, m2}};
  return spec;
}

}  // namespace

TEST_CASE("bath moments from squeezing parameters: known values") {
  SUBCASE("no squeezing passes the occupation through and zeroes M") {
    const BathMoments out = bath_moments_from_squeezing({0.7, 0.0, 1.3});
    CHECK(out.N == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(std::abs(out.M) == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("squeezed vacuum r=1, phi=0") {
    const BathMoments out = bath_moments_from_squeezing({0.0, 1.0, 0.0});
    const double sh = std::sinh(1.0);
    CHECK(out.N == doctest::Approx(sh * sh).epsilon(1e-14));        // 1.3811
    CHECK(out.M.real() ==
          doctest::Approx(-0.5 * std::sinh(2.0)).epsilon(1e-14));  // -1.8134
    CHECK(out.M.imag() == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("phase rotates M by exp(2 i phi) and leaves N alone") {
    const BathMoments a = bath_moments_from_squeezing({0.3, 0.8, 0.0});
    const BathMoments b = bath_moments_from_squeezing({0.3, 0.8, 0.6});
    CHECK(b.N == doctest::Approx(a.N).epsilon(1e-14));
    const Complex rotated = a.M * std::exp(Complex(0.0, 1.2));
    CHECK(std::abs(b.M - rotated) < 1e-12);
  }
  SUBCASE("negative inputs are rejected with the offending name") {
    CHECK_THROWS_WITH_AS(bath_moments_from_squeezing({-0.1, 0.0, 0.0}),
                         doctest::Contains("nbar"), ValidationError);
    CHECK_THROWS_WITH_AS(bath_moments_from_squeezing({0.1, -1.0, 0.0}),
                         doctest::Contains("r:"), ValidationError);
  }
}

TEST_CASE("bath moments satisfy N(N+1) - |M|^2 = nbar(nbar+1) identically") {
  std::mt19937_64 rng(20260819);
  for (int trial = 0; trial < 200; ++trial) {
    const double nbar = testing::uniform(rng, 0.01, 3.0);
    const double r = testing::uniform(rng, 0.0, 2.0);
    const double phi = testing::uniform(rng, 0.0, 6.283185307179586);
    const BathMoments out = bath_moments_from_squeezing({nbar, r, phi});
    const double lhs = out.N * (out.N + 1.0) - std::norm(out.M);
    const double rhs = nbar * (nbar + 1.0);
    const double scale = std::max(1.0, out.N * (out.N + 1.0));
    CHECK(std::abs(lhs - rhs) <= 1e-11 * scale);
    CHECK(check_physical(out, 1e-9 * scale));
  }
}

TEST_CASE("squeezed vacuum saturates the physicality bound") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const double r = testing::uniform(rng, 0.0, 2.0);
    const double phi = testing::uniform(rng, 0.0, 6.283185307179586);
    const BathMoments out = bath_moments_from_squeezing({0.0, r, phi});
    const double slack = out.N * (out.N + 1.0) - std::norm(out.M);
    CHECK(std::abs(slack) <= 1e-12 * std::max(1.0, out.N * (out.N + 1.0)));
  }
}

TEST_CASE("physicality check brackets the bound at N = 0.5") {
  // sqrt(0.5 * 1.5) = 0.86602540...
  CHECK(check_physical({0.5, Complex(0.866, 0.0)}, 1e-12));
  CHECK_FALSE(check_physical({0.5, Complex(0.8661, 0.0)}, 1e-12));
}

TEST_CASE("Wigner covariance of the squeezed thermal bath state") {
  SUBCASE("determinant is (nbar + 1/2)^2 for any squeezing") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const double nbar = testing::uniform(rng, 0.0, 3.0);
      const double r = testing::uniform(rng, 0.0, 2.0);
      const double phi = testing::uniform(rng, 0.0, 6.283185307179586);
      const Eigen::Matrix2d v = wigner_covariance({nbar, r, phi});
      const double expected = (nbar + 0.5) * (nbar + 0.5);
      CHECK(std::abs(v.determinant() - expected) <=
            1e-12 * std::max(1.0, expected));
      CHECK(std::abs(v(0, 1) - v(1, 0)) <= 1e-15);
    }
  }
  SUBCASE("vacuum gives I/2") {
    const Eigen::Matrix2d v = wigner_covariance({0.0, 0.0, 0.0});
    CHECK((v - 0.5 * Eigen::Matrix2d::Identity()).norm() < 1e-15);
  }
  SUBCASE("phi = 0 squeezes x and stretches p") {
    const double r = 0.7;
    const Eigen::Matrix2d v = wigner_covariance({0.0, r, 0.0});
    CHECK(v(0, 0) == doctest::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-13));
    CHECK(v(1, 1) == doctest::Approx(0.5 * std::exp(2.0 * r)).epsilon(1e-13));
    CHECK(std::abs(v(0, 1)) < 1e-15);
  }
}

TEST_CASE("single-mode drift matrix") {
  const ModeSpec mode{1.0, 0.5};
  SUBCASE("thermal case is diagonal with -i omega - gamma/2") {
    const Eigen::Matrix2cd a = single_mode_drift(mode, Complex(0.0, 0.0));
    CHECK(std::abs(a(0, 0) - Complex(-0.25, -1.0)) < 1e-15);
    CHECK(std::abs(a(1, 1) - Complex(-0.25, 1.0)) < 1e-15);
    CHECK(std::abs(a(0, 1)) < 1e-15);
    CHECK(std::abs(a(1, 0)) < 1e-15);
  }
  SUBCASE("squeezing enters as -gamma M off-diagonals, conjugated below") {
    const Complex m(0.3, -0.2);
    const Eigen::Matrix2cd a = single_mode_drift(mode, m);
    CHECK(std::abs(a(0, 1) - (-0.5 * m)) < 1e-15);
    CHECK(std::abs(a(1, 0) - (-0.5 * std::conj(m))) < 1e-15);
  }
  SUBCASE("trace is -gamma independent of M") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
      const Complex m = testing::complex_in_disc(rng, 2.0);
      const Eigen::Matrix2cd a = single_mode_drift(mode, m);
      CHECK(std::abs(a.trace() - Complex(-0.5, 0.0)) < 1e-14);
    }
  }
  SUBCASE("degenerate point gamma |M| = omega gives a double eigenvalue") {
    const Eigen::Matrix2cd a =
        single_mode_drift({1.0, 2.0}, Complex(0.5, 0.0));
    const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(a);
    CHECK(std::abs(solver.eigenvalues()(0) - Complex(-1.0, 0.0)) < 1e-7);
    CHECK(std::abs(solver.eigenvalues()(1) - Complex(-1.0, 0.0)) < 1e-7);
  }
}

TEST_CASE("two-mode drift matrix") {
  const SystemSpec spec = two_mode_system(1.0, 0.5, 0.2, 0.5, Complex(0.1, 0.0),
                                          0.5, Complex(-0.3, 0.2));
  const Eigen::MatrixXcd a = two_mode_drift(spec);

  SUBCASE("diagonal blocks are the single-mode drifts") {
    CHECK((a.block<2, 2>(0, 0) -
           single_mode_drift(spec.modes[0], spec.baths[0].M))
              .norm() < 1e-15);
    CHECK((a.block<2, 2>(2, 2) -
           single_mode_drift(spec.modes[1], spec.baths[1].M))
              .norm() < 1e-15);
  }
  SUBCASE("hopping enters as -iJ between annihilators, +iJ between creators") {
    CHECK(std::abs(a(0, 2) - Complex(0.0, -0.2)) < 1e-15);
    CHECK(std::abs(a(2, 0) - Complex(0.0, -0.2)) < 1e-15);
    CHECK(std::abs(a(1, 3) - Complex(0.0, 0.2)) < 1e-15);
    CHECK(std::abs(a(3, 1) - Complex(0.0, 0.2)) < 1e-15);
    CHECK(std::abs(a(0, 3)) < 1e-15);
    CHECK(std::abs(a(1, 2)) < 1e-15);
  }
  SUBCASE("trace is -2 gamma") {
    CHECK(std::abs(a.trace() - Complex(-1.0, 0.0)) < 1e-14);
  }
  SUBCASE("J = 0 decouples into a direct sum") {
    SystemSpec decoupled = spec;
    decoupled.J = 0.0;
    const Eigen::MatrixXcd a0 = two_mode_drift(decoupled);
    CHECK(a0.block<2, 2>(0, 2).norm() < 1e-15);
    CHECK(a0.block<2, 2>(2, 0).norm() < 1e-15);
  }
  SUBCASE("thermal eigenvalues are -gamma/2 - i(omega +- J) and conjugates") {
    const SystemSpec thermal = two_mode_system(
        1.0, 0.5, 0.2, 0.5, Complex(0.0, 0.0), 0.5, Complex(0.0, 0.0));
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(
        two_mode_drift(thermal));
    std::vector<Complex> expected = {Complex(-0.25, -1.2), Complex(-0.25, -0.8),
                                     Complex(-0.25, 0.8), Complex(-0.25, 1.2)};
    for (const Complex& want : expected) {
      double best = 1e9;
      for (int k = 0; k < 4; ++k) {
        best = std::min(best, std::abs(solver.eigenvalues()(k) - want));
      }
      CHECK(best < 1e-12);
    }
  }
}

TEST_CASE("particle-hole symmetry of the drift with real squeezing") {
  const Eigen::MatrixXd p = particle_hole_permutation(2);
  CHECK((p * p - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-15);

  const SystemSpec spec = two_mode_system(1.0, 0.5, 0.2, 0.5, Complex(0.4, 0.0),
                                          0.5, Complex(-0.7, 0.0));
  const Eigen::MatrixXcd a = two_mode_drift(spec);
  CHECK((p * a.conjugate() * p - a).norm() < 1e-14);

  const Eigen::MatrixXd p1 = particle_hole_permutation(1);
  const Eigen::MatrixXcd a1 =
      single_mode_drift({1.0, 0.5}, Complex(0.8, 0.0));
  CHECK((p1 * a1.conjugate() * p1 - a1).norm() < 1e-14);
}

TEST_CASE("diffusion matrix blocks under both conventions") {
  SUBCASE("corrected convention at N = 0, M = 0 is diag(gamma, 0)") {
    const Eigen::Matrix2cd d = single_mode_diffusion(
        1.0, {0.0, Complex(0.0, 0.0)}, DiffusionConvention::ConsistencyCorrected);
    Eigen::Matrix2cd expected;
    expected << 1.0, 0.0, 0.0, 0.0;
    CHECK((d - expected).norm() < 1e-15);
  }
  SUBCASE("paper convention at N = 0, M = 0 is diag(2 gamma, 2 gamma)") {
    const Eigen::Matrix2cd d = single_mode_diffusion(
        1.0, {0.0, Complex(0.0, 0.0)}, DiffusionConvention::PaperLiteral);
    Eigen::Matrix2cd expected;
    expected << 2.0, 0.0, 0.0, 2.0;
    CHECK((d - expected).norm() < 1e-15);
  }
  SUBCASE("corrected convention entries") {
    const Complex m(0.2, 0.1);
    const Eigen::Matrix2cd d = single_mode_diffusion(
        0.5, {0.8, m}, DiffusionConvention::ConsistencyCorrected);
    CHECK(std::abs(d(0, 0) - Complex(0.5 * 1.8, 0.0)) < 1e-15);
    CHECK(std::abs(d(1, 1) - Complex(0.5 * 0.8, 0.0)) < 1e-15);
    CHECK(std::abs(d(0, 1) - 0.5 * m) < 1e-15);
    CHECK(std::abs(d(1, 0) - 0.5 * std::conj(m)) < 1e-15);
    CHECK((d - d.adjoint()).norm() < 1e-15);  // Hermitian for any M
  }
  SUBCASE("paper convention entries (not conjugated below the diagonal)") {
    const Complex m(0.2, 0.1);
    const Eigen::Matrix2cd d =
        single_mode_diffusion(0.5, {0.8, m}, DiffusionConvention::PaperLiteral);
    CHECK(std::abs(d(0, 0) - Complex(0.5 * 2.8, 0.0)) < 1e-15);
    CHECK(std::abs(d(1, 1) - Complex(0.5 * 2.8, 0.0)) < 1e-15);
    CHECK(std::abs(d(0, 1) - m) < 1e-15);
    CHECK(std::abs(d(1, 0) - m) < 1e-15);
    CHECK((d - d.adjoint()).norm() > 0.01);  // non-Hermitian for complex M
  }
  SUBCASE("two-mode diffusion is block diagonal") {
    const SystemSpec spec = two_mode_system(
        1.0, 0.5, 0.2, 0.8, Complex(0.2, 0.1), 0.3, Complex(-0.1, 0.0));
    for (const auto convention : {DiffusionConvention::PaperLiteral,
                                  DiffusionConvention::ConsistencyCorrected}) {
      const Eigen::MatrixXcd d = two_mode_diffusion(spec, convention);
      CHECK(d.block<2, 2>(0, 2).norm() < 1e-15);
      CHECK(d.block<2, 2>(2, 0).norm() < 1e-15);
      CHECK((d.block<2, 2>(0, 0) -
             single_mode_diffusion(0.5, spec.baths[0], convention))
                .norm() < 1e-15);
      CHECK((d.block<2, 2>(2, 2) -
             single_mode_diffusion(0.5, spec.baths[1], convention))
                .norm() < 1e-15);
    }
  }
}

TEST_CASE("transport pairing: which drift goes with which diffusion") {
  const SystemSpec spec = two_mode_system(1.0, 0.5, 0.2, 0.5, Complex(0.3, 0.0),
                                          0.5, Complex(0.1, 0.0));
  SystemSpec thermal = spec;
  thermal.baths[0].M = thermal.baths[1].M = Complex(0.0, 0.0);

  SUBCASE("corrected: thermal drift + Hermitian squeezing diffusion") {
    const TransportMatrices tm =
        transport_matrices(spec, DiffusionConvention::ConsistencyCorrected);
    CHECK((tm.A - two_mode_drift(thermal)).norm() < 1e-15);
    CHECK((tm.D - two_mode_diffusion(
                      spec, DiffusionConvention::ConsistencyCorrected))
              .norm() < 1e-15);
  }
  SUBCASE("paper: squeezing-carrying drift + literal diffusion") {
    const TransportMatrices tm =
        transport_matrices(spec, DiffusionConvention::PaperLiteral);
    CHECK((tm.A - two_mode_drift(spec)).norm() < 1e-15);
    CHECK((tm.D - two_mode_diffusion(spec, DiffusionConvention::PaperLiteral))
              .norm() < 1e-15);
  }
}

TEST_CASE("perturbation split reassembles and isolates the squeezing entries") {
  const SystemSpec spec = two_mode_system(
      1.0, 0.5, 0.2, 0.6, Complex(0.07, 0.0), 0.4, Complex(0.03, 0.0));
  for (const auto convention : {DiffusionConvention::PaperLiteral,
                                DiffusionConvention::ConsistencyCorrected}) {
    const PerturbationSplit split = perturbation_split(spec, convention);
    // A0 is the thermal drift; A1 carries exactly the -gamma M entries of
    // the squeezing drift under BOTH conventions.
    SystemSpec thermal = spec;
    thermal.baths[0].M = thermal.baths[1].M = Complex(0.0, 0.0);
    CHECK((split.A0 - two_mode_drift(thermal)).norm() < 1e-15);
    CHECK((split.A0 + split.A1 - two_mode_drift(spec)).norm() < 1e-15);
    CHECK((split.D0 + split.D1 - two_mode_diffusion(spec, convention)).norm() <
          1e-15);
    CHECK((split.D0 - two_mode_diffusion(thermal, convention)).norm() < 1e-15);
    // A1 is zero outside the four anomalous entries.
    Eigen::MatrixXcd a1 = split.A1;
    a1(0, 1) = a1(1, 0) = a1(2, 3) = a1(3, 2) = Complex(0.0, 0.0);
    CHECK(a1.norm() < 1e-15);
    CHECK(std::abs(split.A1(0, 1) - (-0.5 * Complex(0.07, 0.0))) < 1e-15);
  }
}

TEST_CASE("system validation rejects inconsistent setups by name") {
  SUBCASE("mismatched gammas") {
    const SystemSpec spec = two_mode_system(1.0, 0.5, 0.2, 0.5, {}, 0.5, {});
    SystemSpec bad = spec;
    bad.modes[1].gamma = 0.6;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("gamma"),
                         ValidationError);
  }
  SUBCASE("hopping with one mode") {
    SystemSpec bad;
    bad.modes = {{1.0, 0.5}};
    bad.baths = {{0.5, Complex(0.0, 0.0)}};
    bad.J = 0.1;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("J"),
                         ValidationError);
  }
  SUBCASE("negative occupation") {
    SystemSpec bad;
    bad.modes = {{1.0, 0.5}};
    bad.baths = {{-0.1, Complex(0.0, 0.0)}};
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("N"),
                         ValidationError);
  }
  SUBCASE("bath count must match mode count") {
    SystemSpec bad;
    bad.modes = {{1.0, 0.5}, {1.0, 0.5}};
    bad.baths = {{0.5, Complex(0.0, 0.0)}};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
  }
}
