// algebra.hpp — Generalized Gell-Mann generators of su(d), Hermitian assembly,
// and the unitary exponential exp(-iH) with its exact directional derivative.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace quditml {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Hermiticity guard for exp_minus_i / exp_derivative inputs.
inline constexpr double kHermitianTol = 1e-9;
// Eigenvalue gap below which the divided-difference kernel switches to its limit.
inline constexpr double kDegenerateGapTol = 1e-12;

// Ordered basis of the d^2-1 generalized Gell-Mann matrices, normalized to
// trace(g_i g_j) = 2 delta_ij. Canonical order: symmetric off-diagonal pairs
// in row-major (j<k) order, then antisymmetric pairs in the same order, then
// diagonal generators by increasing rank. For d=2 this is (sigma_x, sigma_y,
// sigma_z); for d=3 the eight Gell-Mann matrices.
struct GeneratorBasis {
    int dim = 0;                                     // qudit dimension d
    std::vector<Matrix> generators;                  // D = d^2-1 entries
    std::optional<std::uint64_t> permutation_seed;   // nullopt = canonical order

    int size() const { return static_cast<int>(generators.size()); }
};

// Canonical ordering.
GeneratorBasis build_generator_basis(int dim);
// Canonical set shuffled by a seeded permutation (deterministic per seed).
GeneratorBasis build_generator_basis(int dim, std::uint64_t permutation_seed);

// max_ij |M - M^dagger|, the Hermiticity residual.
double hermiticity_residual(const Matrix& m);

// Sum_j coeffs[j] * g_j. Hermitian by construction.
Matrix assemble_hermitian(const RVector& coeffs, const GeneratorBasis& basis);

// Spectral data of a Hermitian H, cached for exp(-iH) and its derivative:
// H = V diag(lambda) V^dagger, U = V exp(-i lambda) V^dagger, and the
// divided-difference kernel K_ab = (e^{-i la} - e^{-i lb}) / (la - lb)
// with the limit -i e^{-i la} on (near-)degenerate pairs.
struct SpectralExp {
    RVector eigenvalues;
    Matrix eigenvectors;
    Matrix unitary;
    Matrix kernel;
};

SpectralExp spectral_exp(const Matrix& hermitian);

// exp(-iH) via the spectral decomposition. Throws ContractViolation when the
// Hermiticity residual exceeds kHermitianTol.
Matrix exp_minus_i(const Matrix& hermitian);

// Directional (Frechet) derivative of H |-> exp(-iH) in direction dH:
// V (K ∘ (V^dagger dH V)) V^dagger in H's eigenbasis.
Matrix exp_derivative(const Matrix& hermitian, const Matrix& direction);
Matrix exp_derivative_with(const SpectralExp& ctx, const Matrix& direction);

// exp(-i angle Sum_j axis[j] g_j); axis must be unit-norm within 1e-9.
Matrix rotation_gate(const RVector& axis, double angle, const GeneratorBasis& basis);

} // namespace quditml
