// linalg.hpp
// Dense complex matrices for small quantum systems (dim <= 36).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rfiqkd {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;

/// Default tolerance for algebraic identities.
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for eigenvalue positivity (eigensolver noise).
inline constexpr double kEigenTol = 1e-10;

inline constexpr double kPi = 3.14159265358979323846;

/// Engine for one (seed, stream) pair; both words enter the seed sequence in full.
inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

/// Square matrix of complex amplitudes, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

    ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
        : dim_(dim), entries_(std::move(entries)) {
        if (entries_.size() != dim_ * dim_) {
            throw std::invalid_argument("ComplexMatrix: expected " + std::to_string(dim_ * dim_) +
                                        " entries, got " + std::to_string(entries_.size()));
        }
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) : dim_(rows.size()) {
        entries_.reserve(dim_ * dim_);
        for (const auto& row : rows) {
            if (row.size() != dim_) {
                throw std::invalid_argument("ComplexMatrix: rows must form a square array");
            }
            entries_.insert(entries_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const cplx> diag) {
        ComplexMatrix m(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
        return m;
    }

    /// |v><w|
    static ComplexMatrix outer(std::span<const cplx> v, std::span<const cplx> w) {
        if (v.size() != w.size()) throw std::invalid_argument("outer: size mismatch");
        ComplexMatrix m(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::span<const cplx> entries() const noexcept { return entries_; }

    cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * dim_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }

    ComplexVector column(std::size_t c) const {
        ComplexVector v(dim_);
        for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
        return v;
    }

    ComplexVector row(std::size_t r) const {
        return ComplexVector(entries_.begin() + static_cast<std::ptrdiff_t>(r * dim_),
                             entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * dim_));
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix m(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) m(c, r) = (*this)(r, c);
        return m;
    }

    ComplexMatrix conj() const {
        ComplexMatrix m(*this);
        for (auto& z : m.entries_) z = std::conj(z);
        return m;
    }

    cplx trace() const {
        cplx t = 0;
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
        return *this;
    }

    ComplexMatrix& operator*=(cplx s) {
        for (auto& z : entries_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.require_same_dim(b);
        const std::size_t n = a.dim_;
        ComplexMatrix m(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k) {
                const cplx ark = a(r, k);
                if (ark == cplx{}) continue;
                for (std::size_t c = 0; c < n; ++c) m(r, c) += ark * b(k, c);
            }
        return m;
    }

    friend ComplexVector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
        if (v.size() != a.dim_) throw std::invalid_argument("matrix-vector: size mismatch");
        ComplexVector out(a.dim_);
        for (std::size_t r = 0; r < a.dim_; ++r)
            for (std::size_t c = 0; c < a.dim_; ++c) out[r] += a(r, c) * v[c];
        return out;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    void require_same_dim(const ComplexMatrix& o) const {
        if (o.dim_ != dim_) {
            throw std::invalid_argument("ComplexMatrix: dimension mismatch (" + std::to_string(dim_) +
                                        " vs " + std::to_string(o.dim_) + ")");
        }
    }

    std::size_t dim_ = 0;
    std::vector<cplx> entries_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) return INFINITY;
    double worst = 0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
    return worst;
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol = kAlgebraTol) {
    return max_abs_diff(a, b) <= tol;
}

/// Kronecker product; `a` indexes the outer (slow) factor.
inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    ComplexMatrix m(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) m(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return m;
}

inline ComplexVector tensor_product(std::span<const cplx> a, std::span<const cplx> b) {
    ComplexVector v;
    v.reserve(a.size() * b.size());
    for (const cplx x : a)
        for (const cplx y : b) v.push_back(x * y);
    return v;
}

inline cplx inner(std::span<const cplx> v, std::span<const cplx> w) {
    cplx s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::conj(v[i]) * w[i];
    return s;
}

/// <w|M|w>
inline cplx quadratic_form(const ComplexMatrix& m, std::span<const cplx> w) {
    cplx s = 0;
    const std::size_t n = m.dim();
    for (std::size_t r = 0; r < n; ++r) {
        if (w[r] == cplx{}) continue;
        cplx row = 0;
        for (std::size_t c = 0; c < n; ++c) row += m(r, c) * w[c];
        s += std::conj(w[r]) * row;
    }
    return s;
}

/// Tr(a*b) without forming the product.
inline cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_of_product: dimension mismatch");
    cplx t = 0;
    const std::size_t n = a.dim();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) t += a(i, k) * b(k, i);
    return t;
}

inline double hermiticity_residual(const ComplexMatrix& m) { return max_abs_diff(m, m.adjoint()); }

inline bool is_hermitian(const ComplexMatrix& m, double tol = kAlgebraTol) {
    return hermiticity_residual(m) <= tol;
}

/// max |(U†U - I)_jk|
inline double unitarity_residual(const ComplexMatrix& u) {
    return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.dim()));
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kAlgebraTol) {
    return unitarity_residual(u) <= tol;
}

/// U M U†
inline ComplexMatrix conjugate_by(const ComplexMatrix& m, const ComplexMatrix& u) {
    return u * m * u.adjoint();
}

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // orthonormal columns
};

inline HermitianEigen eigh(const ComplexMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.dim());
    Eigen::MatrixXcd em(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            em(r, c) = m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    // Symmetrize so the solver sees an exactly Hermitian operand.
    em = (0.5 * (em + em.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(em);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
    HermitianEigen out{std::vector<double>(m.dim()), ComplexMatrix(m.dim())};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        for (Eigen::Index r = 0; r < n; ++r)
            out.vectors(static_cast<std::size_t>(r), static_cast<std::size_t>(i)) =
                solver.eigenvectors()(r, i);
    }
    return out;
}

inline std::vector<double> eigenvalues_hermitian(const ComplexMatrix& m) { return eigh(m).values; }

}  // namespace rfiqkd
