// qstate.hpp
// Bipartite density matrices, observables and the standard two-qubit states.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "linalg.hpp"

namespace rfiqkd {

/// Subsystem dimensions (d_A, d_B). Alice is the outer tensor factor.
struct Dims {
    std::size_t alice = 2;
    std::size_t bob = 2;

    std::size_t total() const noexcept { return alice * bob; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

/// Trace-one positive semidefinite operator on a d_A x d_B space.
/// Validated on construction; immutable afterwards.
class DensityMatrix {
public:
    DensityMatrix(Dims dims, ComplexMatrix matrix) : dims_(dims), matrix_(std::move(matrix)) {
        if (matrix_.dim() != dims_.total()) {
            throw std::invalid_argument("DensityMatrix: matrix dim " + std::to_string(matrix_.dim()) +
                                        " does not match d_A*d_B = " + std::to_string(dims_.total()));
        }
        if (!is_hermitian(matrix_, kAlgebraTol)) {
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        }
        if (std::abs(matrix_.trace() - cplx{1.0}) > kAlgebraTol) {
            throw std::invalid_argument("DensityMatrix: trace differs from 1");
        }
        const auto ev = eigenvalues_hermitian(matrix_);
        if (!ev.empty() && ev.front() < -kEigenTol) {
            throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(ev.front()));
        }
    }

    static DensityMatrix from_pure(Dims dims, std::span<const cplx> psi) {
        double norm2 = 0;
        for (const cplx z : psi) norm2 += std::norm(z);
        ComplexMatrix m = ComplexMatrix::outer(psi, psi);
        m *= 1.0 / norm2;
        return {dims, std::move(m)};
    }

    static DensityMatrix maximally_mixed(Dims dims) {
        ComplexMatrix m = ComplexMatrix::identity(dims.total());
        m *= 1.0 / static_cast<double>(dims.total());
        return {dims, std::move(m)};
    }

    Dims dims() const noexcept { return dims_; }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    std::size_t dim() const noexcept { return matrix_.dim(); }

    double purity() const { return trace_of_product(matrix_, matrix_).real(); }

    /// (I ⊗ U) rho (I ⊗ U)†
    DensityMatrix with_bob_unitary(const ComplexMatrix& u) const {
        return apply_local(ComplexMatrix::identity(dims_.alice), u);
    }

    DensityMatrix with_alice_unitary(const ComplexMatrix& u) const {
        return apply_local(u, ComplexMatrix::identity(dims_.bob));
    }

private:
    DensityMatrix apply_local(const ComplexMatrix& ua, const ComplexMatrix& ub) const {
        if (ua.dim() != dims_.alice || ub.dim() != dims_.bob) {
            throw std::invalid_argument("DensityMatrix: local unitary dimension mismatch");
        }
        return {dims_, conjugate_by(matrix_, tensor_product(ua, ub))};
    }

    Dims dims_;
    ComplexMatrix matrix_;
};

/// Mixture w*a + (1-w)*b.
inline DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double w) {
    if (!(a.dims() == b.dims())) throw std::invalid_argument("mix: dimension mismatch");
    return {a.dims(), a.matrix() * w + b.matrix() * (1.0 - w)};
}

class Observable {
public:
    Observable(ComplexMatrix matrix, std::string label)
        : matrix_(std::move(matrix)), label_(std::move(label)) {
        if (!is_hermitian(matrix_, kAlgebraTol)) {
            throw std::invalid_argument("Observable '" + label_ + "' is not Hermitian");
        }
    }

    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    const std::string& label() const noexcept { return label_; }

private:
    ComplexMatrix matrix_;
    std::string label_;
};

enum class Pauli { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Pauli, 3> kPaulis{Pauli::X, Pauli::Y, Pauli::Z};

inline char pauli_name(Pauli p) { return "XYZ"[static_cast<int>(p)]; }

inline ComplexMatrix pauli_matrix(Pauli p) {
    const cplx i{0, 1};
    switch (p) {
        case Pauli::X: return {{0, 1}, {1, 0}};
        case Pauli::Y: return {{0, -i}, {i, 0}};
        case Pauli::Z: return {{1, 0}, {0, -1}};
    }
    throw std::invalid_argument("pauli_matrix: bad Pauli");
}

/// P_A ⊗ Q_B
inline Observable pauli_product(Pauli a, Pauli b) {
    return {tensor_product(pauli_matrix(a), pauli_matrix(b)),
            std::string{pauli_name(a)} + "_A" + pauli_name(b) + "_B"};
}

/// Tr(M rho) for an arbitrary (possibly non-Hermitian) operator.
inline cplx expectation_complex(const DensityMatrix& rho, const ComplexMatrix& op) {
    if (op.dim() != rho.dim()) {
        throw std::invalid_argument("expectation: operator dim " + std::to_string(op.dim()) +
                                    " vs state dim " + std::to_string(rho.dim()));
    }
    return trace_of_product(op, rho.matrix());
}

inline double expectation(const DensityMatrix& rho, const Observable& obs) {
    return expectation_complex(rho, obs.matrix()).real();
}

enum class BellIndex { PhiPlus = 1, PhiMinus = 2, PsiPlus = 3, PsiMinus = 4 };

/// Bell vector in the computational basis |00>,|01>,|10>,|11>.
inline ComplexVector bell_vector(int k) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (k) {
        case 1: return {s, 0, 0, s};
        case 2: return {s, 0, 0, -s};
        case 3: return {0, s, s, 0};
        case 4: return {0, s, -s, 0};
        default: throw std::out_of_range("bell_state: index must be 1..4, got " + std::to_string(k));
    }
}

/// k = 1..4 maps to Φ+, Φ-, Ψ+, Ψ-.
inline DensityMatrix bell_state(int k) {
    return DensityMatrix::from_pure({2, 2}, bell_vector(k));
}

inline DensityMatrix bell_state(BellIndex k) { return bell_state(static_cast<int>(k)); }

/// p Φ+ + (1-p) I/4 with p = 1 - 2q, so that the QBER of the result is q.
inline DensityMatrix werner_state(double qber) {
    if (!(qber >= 0.0 && qber <= 0.5)) {
        throw std::domain_error("werner_state: QBER must lie in [0, 0.5]");
    }
    const double p = 1.0 - 2.0 * qber;
    return mix(bell_state(1), DensityMatrix::maximally_mixed({2, 2}), p);
}

/// Ginibre-distributed random mixed state: G G† / Tr(G G†).
template <class Rng>
DensityMatrix random_density_matrix(Dims dims, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = dims.total();
    ComplexMatrix g(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) g(r, c) = cplx{normal(rng), normal(rng)};
    ComplexMatrix m = g * g.adjoint();
    m *= 1.0 / m.trace().real();
    // Remove rounding-level anti-Hermitian residue.
    m = (m + m.adjoint()) * 0.5;
    return {dims, std::move(m)};
}

}  // namespace rfiqkd
