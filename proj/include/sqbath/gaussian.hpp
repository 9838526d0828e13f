#pragma once

#include "sqbath/types.hpp"

namespace sqbath {

/// Effective reservoir moments generated by a squeezed thermal state:
///   N = nbar*cosh(2r) + sinh^2(r)
///   M = -1/2 * sinh(2r) * exp(2 i phi) * (2*nbar + 1)
/// The result always satisfies |M|^2 <= N(N+1), with equality iff nbar = 0.
BathMoments bath_moments_from_squeezing(const SqueezingInput& input);

/// True iff |M|^2 <= N(N+1) + tol.
bool check_physical(const BathMoments& moments, double tol);

/// 2x2 quadrature covariance of the squeezed thermal reservoir state:
///   (nbar + 1/2) * [[cosh2r - sinh2r*cos2phi, -sinh2r*sin2phi],
///                   [-sinh2r*sin2phi,          cosh2r + sinh2r*cos2phi]]
/// Symmetric, determinant (nbar + 1/2)^2 independent of r and phi.
Eigen::Matrix2d wigner_covariance(const SqueezingInput& input);

/// Single-mode squeezing-carrying drift matrix in the (a, a^dag) ordering:
///   [[-i*omega - gamma/2, -gamma*M], [-gamma*conj(M), +i*omega - gamma/2]].
/// M is a free complex parameter here (scans sweep it directly).
Eigen::Matrix2cd single_mode_drift(const ModeSpec& mode, Complex M);

/// Thermal (M = 0) single-mode drift: diag(-i*omega - gamma/2,
/// +i*omega - gamma/2).
Eigen::Matrix2cd thermal_single_mode_drift(const ModeSpec& mode);

/// 4x4 squeezing-carrying drift in the ordering (a1, a1^dag, a2, a2^dag):
/// diagonal 2x2 blocks are single_mode_drift(mode_i, M_i); the off-diagonal
/// blocks couple equal-type operators, entries -iJ between (a1, a2) and
/// +iJ between (a1^dag, a2^dag). Requires exactly two modes sharing gamma.
Eigen::MatrixXcd two_mode_drift(const SystemSpec& spec);

/// One reservoir's 2x2 diffusion block in the (a, a^dag) ordering.
///   PaperLiteral:         [[gamma*(N+2), 2*gamma*M], [2*gamma*M, gamma*(N+2)]]
///   ConsistencyCorrected: [[gamma*(N+1), gamma*M], [gamma*conj(M), gamma*N]]
/// The literal block is non-Hermitian for complex M; that property is kept
/// verbatim and rejected later by solvers that require Hermitian noise.
Eigen::Matrix2cd single_mode_diffusion(double gamma, const BathMoments& bath,
                                       DiffusionConvention convention);

/// Block-diagonal 4x4 diffusion matrix; inter-mode blocks are exactly zero.
Eigen::MatrixXcd two_mode_diffusion(const SystemSpec& spec,
                                    DiffusionConvention convention);

/// Drift/diffusion pair used for time evolution and steady states.
///
/// ConsistencyCorrected pairs the thermal drift (squeezing enters only the
/// noise matrix) with the corrected diffusion blocks; PaperLiteral pairs the
/// squeezing-carrying drift with the literal diffusion blocks. Works for one
/// or two modes.
struct TransportMatrices {
  Eigen::MatrixXcd A;
  Eigen::MatrixXcd D;
};
TransportMatrices transport_matrices(const SystemSpec& spec,
                                     DiffusionConvention convention);

/// Splitting of the generator into a squeezing-free part (A0, D0) and the
/// first-order squeezing part (A1, D1). Under both conventions A1 carries
/// exactly the -gamma*M_i drift entries; D1 carries the M_i entries of the
/// chosen diffusion convention. The perturbative hierarchy therefore studies
/// the family steady(A0 + eta*A1, D0 + eta*D1), which keeps squeezing in the
/// drift even under ConsistencyCorrected (unlike transport_matrices, whose
/// corrected pairing routes squeezing through the noise matrix only).
struct PerturbationSplit {
  Eigen::MatrixXcd A0;
  Eigen::MatrixXcd D0;
  Eigen::MatrixXcd A1;
  Eigen::MatrixXcd D1;
};
PerturbationSplit perturbation_split(const SystemSpec& spec,
                                     DiffusionConvention convention);

/// Permutation that swaps each (a_i, a_i^dag) index pair: P = antidiag(1,1)
/// per mode block. Drift matrices satisfy P * conj(A) * P = A.
Eigen::MatrixXd particle_hole_permutation(int n_modes);

}  // namespace sqbath
