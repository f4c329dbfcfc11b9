// Shared helpers for the unit suites.

#pragma once

#include "quditml/algebra.hpp"
#include "quditml/rng.hpp"

namespace quditml::testing {

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double unitarity_residual(const Matrix& u) {
    return (u * u.adjoint() - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

inline RVector random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
    RVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.gaussian();
    return v;
}

inline Matrix random_hermitian(const GeneratorBasis& basis, Rng& rng, double scale = 1.0) {
    return assemble_hermitian(random_vector(basis.size(), rng, scale), basis);
}

inline CVector random_state(Eigen::Index dim, Rng& rng) {
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(rng.gaussian(), rng.gaussian());
    return v / v.norm();
}

} // namespace quditml::testing
