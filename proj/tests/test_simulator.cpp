#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "quditml/errors.hpp"
#include "quditml/simulator.hpp"

#include <cmath>

using namespace quditml;
using namespace quditml::testing;

TEST_CASE("ground_state") {
    const QuantumState g9 = ground_state(9);
    CHECK(g9.dim() == 9);
    CHECK(g9.amplitudes[0] == Complex(1, 0));
    CHECK(g9.amplitudes.tail(8).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(g9.amplitudes.norm() - 1.0) == 0.0);
    CHECK(ground_state(2).amplitudes[0] == Complex(1, 0));
    CHECK_THROWS_AS(ground_state(1), InvalidInput);
}

TEST_CASE("apply_unitary") {
    SUBCASE("identity leaves the state unchanged") {
        Rng rng(1);
        const QuantumState psi{random_state(9, rng)};
        const QuantumState out = apply_unitary(psi, Matrix::Identity(9, 9));
        CHECK((out.amplitudes - psi.amplitudes).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("qubit rotation has the closed-form amplitudes") {
        const GeneratorBasis b2 = build_generator_basis(2);
        RVector c(3);
        c << 3.14159265358979323846 / 2, 0, 0;
        const QuantumState out =
            apply_unitary(ground_state(2), exp_minus_i(assemble_hermitian(c, b2)));
        CHECK(std::abs(out.amplitudes[0]) < 1e-12);                       // cos(pi/2)
        CHECK(std::abs(out.amplitudes[1] - Complex(0, -1)) < 1e-12);      // -i sin(pi/2)
    }
    SUBCASE("norm survives 100 random gates with drift < 1e-9") {
        const GeneratorBasis b9 = build_generator_basis(9);
        Rng rng(5);
        QuantumState psi = ground_state(9);
        for (int k = 0; k < 100; ++k) {
            psi = apply_unitary(psi, exp_minus_i(random_hermitian(b9, rng)));
        }
        CHECK(std::abs(psi.amplitudes.squaredNorm() - 1.0) < 1e-9);
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(apply_unitary(ground_state(9), Matrix::Identity(3, 3)),
                        ShapeError);
    }
}

TEST_CASE("measurement_probabilities") {
    SUBCASE("ground state puts all mass on outcome 0") {
        const RVector p = measurement_probabilities(ground_state(9));
        CHECK(p[0] == 1.0);
        CHECK(p.tail(8).maxCoeff() == 0.0);
    }
    SUBCASE("uniform superposition gives 1/9 each") {
        const RVector p =
            measurement_probabilities(QuantumState{CVector::Constant(9, Complex(1.0 / 3, 0))});
        for (int k = 0; k < 9; ++k) CHECK(p[k] == doctest::Approx(1.0 / 9).epsilon(1e-12));
    }
    SUBCASE("random states sum to one") {
        Rng rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            CHECK(std::abs(measurement_probabilities(QuantumState{random_state(9, rng)})
                               .sum() -
                           1.0) < 1e-9);
        }
    }
    SUBCASE("phase gates leave probabilities unchanged") {
        Rng rng(9);
        const QuantumState psi{random_state(9, rng)};
        CVector phases(9);
        for (int k = 0; k < 9; ++k) phases[k] = std::exp(Complex(0, rng.uniform() * 6.28));
        const Matrix diag_unitary = phases.asDiagonal();
        const RVector before = measurement_probabilities(psi);
        const RVector after = measurement_probabilities(apply_unitary(psi, diag_unitary));
        CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("expectation_value") {
    SUBCASE("diagonal observable on the ground state reads the first eigenvalue") {
        RVector lambda(9);
        for (int k = 0; k < 9; ++k) lambda[k] = 0.5 + k;
        const Matrix obs = lambda.cast<Complex>().asDiagonal();
        CHECK(expectation_value(ground_state(9), obs) == doctest::Approx(0.5));
    }
    SUBCASE("sigma_z on |1> is -1") {
        CVector one(2);
        one << 0, 1;
        Matrix sz(2, 2);
        sz << 1, 0, 0, -1;
        CHECK(expectation_value(QuantumState{one}, sz) == doctest::Approx(-1.0));
    }
    SUBCASE("matches the brute-force double sum") {
        const GeneratorBasis b9 = build_generator_basis(9);
        Rng rng(11);
        const QuantumState psi{random_state(9, rng)};
        const Matrix obs = random_hermitian(b9, rng);
        Complex brute = 0.0;
        for (int a = 0; a < 9; ++a) {
            for (int b = 0; b < 9; ++b) {
                brute += std::conj(psi.amplitudes[a]) * obs(a, b) * psi.amplitudes[b];
            }
        }
        CHECK(expectation_value(psi, obs) == doctest::Approx(brute.real()).epsilon(1e-10));
    }
    SUBCASE("non-Hermitian observable with complex expectation is rejected") {
        CVector amps(2);
        amps << std::sqrt(0.5), std::sqrt(0.5);
        Matrix ladder = Matrix::Zero(2, 2);
        ladder(0, 1) = Complex(0, 1);
        CHECK_THROWS_AS(expectation_value(QuantumState{amps}, ladder), ContractViolation);
    }
}

TEST_CASE("embed_single_qubit_gate") {
    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;

    SUBCASE("identity embeds to the identity") {
        for (int target = 0; target < 3; ++target) {
            CHECK(max_abs_diff(embed_single_qubit_gate(Matrix::Identity(2, 2), target, 3),
                               Matrix::Identity(8, 8)) == 0.0);
        }
    }
    SUBCASE("sigma_x on qubit 1 of |00> gives |01>") {
        const Matrix embedded = embed_single_qubit_gate(sx, 1, 2);
        const QuantumState out = apply_unitary(ground_state(4), embedded);
        CHECK(std::abs(out.amplitudes[1] - Complex(1, 0)) < 1e-15);
    }
    SUBCASE("embedded gates stay unitary") {
        const GeneratorBasis b2 = build_generator_basis(2);
        Rng rng(13);
        const Matrix u2 = exp_minus_i(random_hermitian(b2, rng));
        CHECK(unitarity_residual(embed_single_qubit_gate(u2, 2, 4)) < 1e-10);
    }
    SUBCASE("target out of range throws") {
        CHECK_THROWS_AS(embed_single_qubit_gate(sx, 3, 3), InvalidInput);
    }
}

TEST_CASE("cnot_gate") {
    SUBCASE("flips the target when the control is set") {
        const Matrix cnot = cnot_gate(0, 1, 2);
        CVector ten = CVector::Zero(4);
        ten[2] = 1.0;   // |10>
        const CVector out = cnot * ten;
        CHECK(std::abs(out[3] - Complex(1, 0)) < 1e-15);   // |11>
    }
    SUBCASE("leaves |00> alone") {
        const Matrix cnot = cnot_gate(0, 1, 2);
        const QuantumState out = apply_unitary(ground_state(4), cnot);
        CHECK(std::abs(out.amplitudes[0] - Complex(1, 0)) < 1e-15);
    }
    SUBCASE("is an involution") {
        const Matrix cnot = cnot_gate(1, 3, 4);
        CHECK(max_abs_diff(cnot * cnot, Matrix::Identity(16, 16)) == 0.0);
    }
    SUBCASE("entries are all 0 or 1") {
        const Matrix cnot = cnot_gate(2, 0, 3);
        for (Eigen::Index r = 0; r < cnot.rows(); ++r) {
            for (Eigen::Index c = 0; c < cnot.cols(); ++c) {
                const double v = std::abs(cnot(r, c));
                CHECK((v == 0.0 || v == 1.0));
            }
        }
    }
    SUBCASE("control == target throws") {
        CHECK_THROWS_AS(cnot_gate(1, 1, 3), InvalidInput);
    }
}

TEST_CASE("CNOT cascade over 4 qubits fixes |0000> and is unitary") {
    const Matrix cascade =
        cnot_gate(2, 3, 4) * cnot_gate(1, 2, 4) * cnot_gate(0, 1, 4);
    const QuantumState out = apply_unitary(ground_state(16), cascade);
    CHECK(std::abs(out.amplitudes[0] - Complex(1, 0)) < 1e-15);
    CHECK(unitarity_residual(cascade) < 1e-12);
}
