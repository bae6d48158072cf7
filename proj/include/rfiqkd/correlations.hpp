// correlations.hpp
// Correlation records shared by the exact and sampled estimation paths.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "qstate.hpp"

namespace rfiqkd {

/// Raised when a transcript lacks counts for a basis pair an estimator needs.
class InsufficientDataError : public std::runtime_error {
public:
    InsufficientDataError(std::string alice_basis, std::string bob_basis)
        : std::runtime_error("insufficient data: no counts for basis pair (" + alice_basis + "," + bob_basis + ")"),
          alice_(std::move(alice_basis)),
          bob_(std::move(bob_basis)) {}

    const std::string& alice_basis() const noexcept { return alice_; }
    const std::string& bob_basis() const noexcept { return bob_; }

private:
    std::string alice_;
    std::string bob_;
};

/// The nine correlators <P_A Q_B>. Sampled records carry standard errors.
struct QubitCorrelations {
    std::array<std::optional<double>, 9> values{};
    std::optional<std::array<double, 9>> standard_errors;

    static constexpr std::size_t slot(Pauli a, Pauli b) {
        return 3 * static_cast<std::size_t>(a) + static_cast<std::size_t>(b);
    }

    bool has(Pauli a, Pauli b) const { return values[slot(a, b)].has_value(); }

    double at(Pauli a, Pauli b) const {
        const auto& v = values[slot(a, b)];
        if (!v) throw InsufficientDataError(std::string{pauli_name(a)}, std::string{pauli_name(b)});
        return *v;
    }

    /// Zero for exact records.
    double standard_error(Pauli a, Pauli b) const {
        return standard_errors ? (*standard_errors)[slot(a, b)] : 0.0;
    }

    bool exact() const noexcept { return !standard_errors.has_value(); }
};

/// Complex table e_ij = Tr(τ_i ⊗ τ_j ρ) over signed Weyl indices ±1..±4.
struct QutritCorrelations {
    std::array<std::optional<cplx>, 64> values{};
    std::optional<std::array<double, 64>> standard_errors;

    /// ±1..±4 -> 0..7 (positive indices first).
    static std::size_t index_slot(int signed_index) {
        const int k = std::abs(signed_index);
        if (k < 1 || k > 4) throw std::out_of_range("Weyl index must be in ±1..±4, got " + std::to_string(signed_index));
        return static_cast<std::size_t>(signed_index > 0 ? k - 1 : 3 + k);
    }

    static std::size_t slot(int i, int j) { return 8 * index_slot(i) + index_slot(j); }

    bool has(int i, int j) const { return values[slot(i, j)].has_value(); }

    cplx at(int i, int j) const {
        const auto& v = values[slot(i, j)];
        if (!v) throw InsufficientDataError(std::to_string(i), std::to_string(j));
        return *v;
    }

    double standard_error(int i, int j) const {
        return standard_errors ? (*standard_errors)[slot(i, j)] : 0.0;
    }

    bool exact() const noexcept { return !standard_errors.has_value(); }
};

using CorrelationRecord = std::variant<QubitCorrelations, QutritCorrelations>;

/// A derived quantity together with its propagated standard error (0 when exact).
struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;
};

}  // namespace rfiqkd
