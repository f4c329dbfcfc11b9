#include "quditml/algebra.hpp"

#include "quditml/errors.hpp"
#include "quditml/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <string>

namespace quditml {

namespace {

std::vector<Matrix> canonical_generators(int dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    std::vector<Matrix> generators;
    generators.reserve(static_cast<std::size_t>(dim) * dim - 1);

    // Symmetric pairs: |j><k| + |k><j|, row-major over j < k.
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            Matrix g = Matrix::Zero(n, n);
            g(j, k) = 1.0;
            g(k, j) = 1.0;
            generators.push_back(std::move(g));
        }
    }
    // Antisymmetric pairs: -i|j><k| + i|k><j|, same order.
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j + 1; k < n; ++k) {
            Matrix g = Matrix::Zero(n, n);
            g(j, k) = Complex(0.0, -1.0);
            g(k, j) = Complex(0.0, 1.0);
            generators.push_back(std::move(g));
        }
    }
    // Diagonal generators of increasing rank l, scaled so trace(g^2) = 2.
    for (Eigen::Index l = 1; l < n; ++l) {
        Matrix g = Matrix::Zero(n, n);
        const double scale = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
        for (Eigen::Index j = 0; j < l; ++j) g(j, j) = scale;
        g(l, l) = -scale * static_cast<double>(l);
        generators.push_back(std::move(g));
    }
    return generators;
}

} // namespace

GeneratorBasis build_generator_basis(int dim) {
    if (dim < 2) {
        throw InvalidInput("build_generator_basis: dimension must be >= 2, got " +
                           std::to_string(dim));
    }
    return GeneratorBasis{dim, canonical_generators(dim), std::nullopt};
}

GeneratorBasis build_generator_basis(int dim, std::uint64_t permutation_seed) {
    GeneratorBasis basis = build_generator_basis(dim);
    Rng rng(permutation_seed);
    rng.shuffle(basis.generators);
    basis.permutation_seed = permutation_seed;
    return basis;
}

double hermiticity_residual(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ShapeError("hermiticity_residual: matrix is not square");
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix assemble_hermitian(const RVector& coeffs, const GeneratorBasis& basis) {
    if (coeffs.size() != basis.size()) {
        throw ShapeError("assemble_hermitian: " + std::to_string(coeffs.size()) +
                         " coefficients for a basis of size " +
                         std::to_string(basis.size()));
    }
    Matrix sum = Matrix::Zero(basis.dim, basis.dim);
    for (int j = 0; j < basis.size(); ++j) {
        if (coeffs[j] != 0.0) {
            sum += coeffs[j] * basis.generators[static_cast<std::size_t>(j)];
        }
    }
    return sum;
}

SpectralExp spectral_exp(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    if (solver.info() != Eigen::Success) {
        throw ContractViolation("spectral_exp: eigendecomposition failed");
    }
    SpectralExp ctx;
    ctx.eigenvalues = solver.eigenvalues();
    ctx.eigenvectors = solver.eigenvectors();

    const Eigen::Index n = ctx.eigenvalues.size();
    CVector phases(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        phases[a] = std::exp(Complex(0.0, -ctx.eigenvalues[a]));
    }
    ctx.unitary = ctx.eigenvectors * phases.asDiagonal() * ctx.eigenvectors.adjoint();

    ctx.kernel.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const double gap = ctx.eigenvalues[a] - ctx.eigenvalues[b];
            if (std::abs(gap) < kDegenerateGapTol) {
                ctx.kernel(a, b) = Complex(0.0, -1.0) * phases[a];
            } else {
                ctx.kernel(a, b) = (phases[a] - phases[b]) / gap;
            }
        }
    }
    return ctx;
}

Matrix exp_minus_i(const Matrix& hermitian) {
    const double residual = hermiticity_residual(hermitian);
    if (residual > kHermitianTol) {
        throw ContractViolation("exp_minus_i: input is not Hermitian (residual " +
                                std::to_string(residual) + ")");
    }
    return spectral_exp(hermitian).unitary;
}

Matrix exp_derivative_with(const SpectralExp& ctx, const Matrix& direction) {
    if (direction.rows() != ctx.kernel.rows() || direction.cols() != ctx.kernel.cols()) {
        throw ShapeError("exp_derivative: direction dimension mismatch");
    }
    const Matrix tilted = ctx.eigenvectors.adjoint() * direction * ctx.eigenvectors;
    return ctx.eigenvectors * ctx.kernel.cwiseProduct(tilted) * ctx.eigenvectors.adjoint();
}

Matrix exp_derivative(const Matrix& hermitian, const Matrix& direction) {
    if (hermitian.rows() != direction.rows() || hermitian.cols() != direction.cols()) {
        throw ShapeError("exp_derivative: dimension mismatch");
    }
    const double residual = hermiticity_residual(hermitian);
    if (residual > kHermitianTol) {
        throw ContractViolation("exp_derivative: input is not Hermitian (residual " +
                                std::to_string(residual) + ")");
    }
    return exp_derivative_with(spectral_exp(hermitian), direction);
}

Matrix rotation_gate(const RVector& axis, double angle, const GeneratorBasis& basis) {
    if (axis.size() != basis.size()) {
        throw ShapeError("rotation_gate: axis length " + std::to_string(axis.size()) +
                         " does not match basis size " + std::to_string(basis.size()));
    }
    if (std::abs(axis.norm() - 1.0) > 1e-9) {
        throw InvalidInput("rotation_gate: axis is not unit-norm");
    }
    return exp_minus_i(assemble_hermitian(angle * axis, basis));
}

} // namespace quditml
