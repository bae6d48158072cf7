#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rfiqkd/qstate.hpp"

using namespace rfiqkd;

namespace {

ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m(r, c) = {g(rng), g(rng)};
    return m;
}

ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    const ComplexMatrix m = random_matrix(n, rng);
    return (m + m.adjoint()) * 0.5;
}

}  // namespace

TEST(Kron, PauliXZExplicitBlocks) {
    const ComplexMatrix xz = tensor_product(pauli_matrix(Pauli::X), pauli_matrix(Pauli::Z));
    const ComplexMatrix expected{{0, 0, 1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
    EXPECT_TRUE(approx_equal(xz, expected));
}

TEST(Kron, IndexRuleOnRectangularSizes) {
    std::mt19937_64 rng(11);
    const ComplexMatrix a = random_matrix(2, rng), b = random_matrix(3, rng);
    const ComplexMatrix k = tensor_product(a, b);
    ASSERT_EQ(k.dim(), 6u);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t p = 0; p < 3; ++p)
                for (std::size_t q = 0; q < 3; ++q) EXPECT_EQ(k(3 * i + p, 3 * j + q), a(i, j) * b(p, q));
}

TEST(Kron, AssociativeAndTraceMultiplicative) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(2, rng), b = random_matrix(3, rng), c = random_matrix(2, rng);
        EXPECT_LT(max_abs_diff(tensor_product(tensor_product(a, b), c), tensor_product(a, tensor_product(b, c))), 1e-12);
        EXPECT_LT(std::abs(tensor_product(a, b).trace() - a.trace() * b.trace()), 1e-12);
    }
}

TEST(Kron, MixedProductRule) {
    std::mt19937_64 rng(6);
    const ComplexMatrix a = random_matrix(2, rng), b = random_matrix(2, rng), c = random_matrix(3, rng),
                        d = random_matrix(3, rng);
    EXPECT_LT(max_abs_diff(tensor_product(a, c) * tensor_product(b, d), tensor_product(a * b, c * d)), 1e-12);
}

TEST(Linalg, TraceOfProductMatchesFullProduct) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_matrix(4, rng), b = random_matrix(4, rng);
        EXPECT_LT(std::abs(trace_of_product(a, b) - oracle::trace_via_product(a, b)), 1e-12);
    }
}

TEST(Linalg, DimensionMismatchThrows) {
    EXPECT_THROW(ComplexMatrix::identity(2) + ComplexMatrix::identity(3), std::invalid_argument);
    EXPECT_THROW(ComplexMatrix::identity(2) * ComplexMatrix::identity(3), std::invalid_argument);
}

TEST(Eigh, EigenvaluesAreRootsOfCharacteristicPolynomial) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        const ComplexMatrix a = random_hermitian(4, rng);
        const auto eig = eigh(a);
        double scale = 1;
        for (const double l : eig.values) scale = std::max(scale, std::abs(l));
        for (const double l : eig.values) {
            EXPECT_LT(std::abs(oracle::determinant(a - ComplexMatrix::identity(4) * l)), 1e-9 * std::pow(scale, 4));
        }
        double s1 = 0, s2 = 0;
        for (const double l : eig.values) {
            s1 += l;
            s2 += l * l;
        }
        EXPECT_NEAR(s1, a.trace().real(), 1e-10);
        EXPECT_NEAR(s2, oracle::trace_via_product(a, a).real(), 1e-9);
        for (std::size_t k = 0; k + 1 < 4; ++k) EXPECT_LE(eig.values[k], eig.values[k + 1]);
        EXPECT_LT(unitarity_residual(eig.vectors), 1e-10);
    }
}

TEST(Bell, OrthonormalBasis) {
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) {
            const cplx ip = inner(bell_vector(i), bell_vector(j));
            EXPECT_NEAR(std::abs(ip - cplx{i == j ? 1.0 : 0.0}), 0.0, 1e-15);
        }
    EXPECT_THROW(bell_vector(0), std::out_of_range);
    EXPECT_THROW(bell_vector(5), std::out_of_range);
}

TEST(Bell, PhiPlusCorrelators) {
    const DensityMatrix phi = bell_state(BellIndex::PhiPlus);
    EXPECT_NEAR(expectation(phi, pauli_product(Pauli::X, Pauli::X)), 1.0, 1e-15);
    EXPECT_NEAR(expectation(phi, pauli_product(Pauli::Y, Pauli::Y)), -1.0, 1e-15);
    EXPECT_NEAR(expectation(phi, pauli_product(Pauli::Z, Pauli::Z)), 1.0, 1e-15);
    EXPECT_NEAR(expectation(phi, pauli_product(Pauli::X, Pauli::Y)), 0.0, 1e-15);
    EXPECT_NEAR(phi.purity(), 1.0, 1e-14);
}

TEST(Werner, EigenvaluesAndSupport) {
    for (const double q : {0.0, 0.05, 0.2, 0.5}) {
        const auto ev = eigenvalues_hermitian(werner_state(q).matrix());
        EXPECT_NEAR(ev[3], 1.0 - 1.5 * q, 1e-12);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(ev[static_cast<std::size_t>(k)], q / 2.0, 1e-12);
    }
    EXPECT_THROW(werner_state(-0.01), std::domain_error);
    EXPECT_THROW(werner_state(0.51), std::domain_error);
}

TEST(Werner, XXExpectationMatchesExplicitTrace) {
    const DensityMatrix w = werner_state(0.05);
    const ComplexMatrix xx = tensor_product(pauli_matrix(Pauli::X), pauli_matrix(Pauli::X));
    const double by_trace = oracle::trace_via_product(w.matrix(), xx).real();
    EXPECT_NEAR(by_trace, 0.9, 1e-15);
    EXPECT_NEAR(expectation(w, pauli_product(Pauli::X, Pauli::X)), by_trace, 1e-15);
}

TEST(DensityMatrix, RejectsInvalidMatrices) {
    EXPECT_THROW(DensityMatrix({2, 2}, ComplexMatrix::identity(4)), std::invalid_argument);
    ComplexMatrix skew = ComplexMatrix::identity(4) * 0.25;
    skew(0, 1) = cplx{0, 0.1};
    EXPECT_THROW(DensityMatrix({2, 2}, skew), std::invalid_argument);
    const ComplexMatrix neg = ComplexMatrix::diagonal(ComplexVector{1.2, -0.2, 0, 0});
    EXPECT_THROW(DensityMatrix({2, 2}, neg), std::invalid_argument);
    EXPECT_THROW(DensityMatrix({2, 3}, ComplexMatrix::identity(4) * 0.25), std::invalid_argument);
}

TEST(Observable, RejectsNonHermitian) {
    ComplexMatrix m = ComplexMatrix::identity(2);
    m(0, 1) = 1.0;
    EXPECT_THROW(Observable(m, "bad"), std::invalid_argument);
}

TEST(Expectation, LinearInTheState) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit;
    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix a = random_density_matrix({2, 2}, rng), b = random_density_matrix({2, 2}, rng);
        const double w = unit(rng);
        const DensityMatrix m = mix(a, b, w);
        for (const Pauli p : kPaulis)
            for (const Pauli q : kPaulis) {
                const Observable o = pauli_product(p, q);
                EXPECT_NEAR(expectation(m, o), w * expectation(a, o) + (1 - w) * expectation(b, o), 1e-12);
            }
    }
}

TEST(Expectation, IdentityObservableGivesOne) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix r = random_density_matrix({3, 3}, rng);
        EXPECT_NEAR(expectation(r, Observable(ComplexMatrix::identity(9), "I")), 1.0, 1e-12);
        EXPECT_LE(r.purity(), 1.0 + 1e-12);
        EXPECT_GE(r.purity(), 1.0 / 9.0 - 1e-12);
    }
}

TEST(LocalUnitary, PreservesSpectrum) {
    std::mt19937_64 rng(12);
    const DensityMatrix r = random_density_matrix({2, 2}, rng);
    const ComplexMatrix u = eigh(random_hermitian(2, rng)).vectors;
    const auto before = eigenvalues_hermitian(r.matrix());
    const auto after = eigenvalues_hermitian(r.with_bob_unitary(u).with_alice_unitary(u.adjoint()).matrix());
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(before[k], after[k], 1e-12);
}
