// qutrit.hpp
// d = 3: Weyl clock/shift operators, the four mutually unbiased bases,
// the maximally entangled qutrit pair and the phase-invariant sum C3.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "channel.hpp"
#include "correlations.hpp"
#include "linalg.hpp"
#include "qstate.hpp"

namespace rfiqkd {

inline const cplx& omega3() {
    static const cplx w = std::polar(1.0, 2.0 * kPi / 3.0);
    return w;
}

/// Z3 = diag(1, ω, ω²)
inline ComplexMatrix clock_matrix() {
    const cplx w = omega3();
    return {{1, 0, 0}, {0, w, 0}, {0, 0, w * w}};
}

/// X3 |k> = |k+1 mod 3>
inline ComplexMatrix shift_matrix() { return {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}; }

/// The eight Weyl matrices τ_{±1..±4}. τ1 = Z3 is the key basis; τ2..τ4 are
/// X3, X3Z3, X3Z3² in the default order; τ_{-k} = τ_k†.
///
/// `order` permutes which non-computational generator receives which of the
/// indices 2, 3, 4.
class WeylSet {
public:
    explicit WeylSet(std::array<int, 3> order = {0, 1, 2}) {
        const ComplexMatrix x = shift_matrix();
        const ComplexMatrix z = clock_matrix();
        const std::array<ComplexMatrix, 3> generators{x, x * z, x * z * z};
        std::array<bool, 3> used{};
        taus_[0] = z;
        for (std::size_t m = 0; m < 3; ++m) {
            const int g = order[m];
            if (g < 0 || g > 2 || used[static_cast<std::size_t>(g)]) {
                throw std::invalid_argument("WeylSet: order must be a permutation of {0,1,2}");
            }
            used[static_cast<std::size_t>(g)] = true;
            taus_[m + 1] = generators[static_cast<std::size_t>(g)];
        }
        for (std::size_t k = 0; k < 4; ++k) taus_[k + 4] = taus_[k].adjoint();
    }

    const ComplexMatrix& operator()(int signed_index) const {
        return taus_[QutritCorrelations::index_slot(signed_index)];
    }

private:
    std::array<ComplexMatrix, 8> taus_;
};

/// Eigenbasis of an order-3 unitary (τ³ = I) as matrix columns, column k
/// holding the eigenvalue ω^k. Built from the spectral projectors
/// P_k = (1/3) Σ_m (ω^{-k} τ)^m, so no eigensolver phase ambiguity enters.
inline ComplexMatrix order3_eigenbasis(const ComplexMatrix& tau) {
    if (tau.dim() != 3) throw std::invalid_argument("order3_eigenbasis: expected a 3x3 operator");
    ComplexMatrix basis(3);
    for (std::size_t k = 0; k < 3; ++k) {
        const ComplexMatrix t = tau * std::pow(omega3(), -static_cast<double>(k));
        ComplexMatrix proj = ComplexMatrix::identity(3) + t + t * t;
        proj *= 1.0 / 3.0;
        std::size_t best = 0;
        double best_norm = -1;
        for (std::size_t c = 0; c < 3; ++c) {
            double nrm = 0;
            for (std::size_t r = 0; r < 3; ++r) nrm += std::norm(proj(r, c));
            if (nrm > best_norm + 1e-12) {
                best_norm = nrm;
                best = c;
            }
        }
        const double scale = 1.0 / std::sqrt(best_norm);
        for (std::size_t r = 0; r < 3; ++r) basis(r, k) = proj(r, best) * scale;
    }
    return basis;
}

/// Four orthonormal bases; bases[b] holds the eigenvectors of τ_{b+1}.
struct MubFamily {
    std::array<ComplexMatrix, 4> bases;
};

inline MubFamily mub_family(const WeylSet& weyl = WeylSet{}) {
    MubFamily f;
    for (int b = 0; b < 4; ++b) f.bases[static_cast<std::size_t>(b)] = order3_eigenbasis(weyl(b + 1));
    return f;
}

/// (|00> + |11> + |22>)/√3
inline DensityMatrix qutrit_bell() {
    const double s = 1.0 / std::sqrt(3.0);
    ComplexVector psi(9);
    psi[0] = psi[4] = psi[8] = s;
    return DensityMatrix::from_pure({3, 3}, psi);
}

/// p * Bell + (1 - p) * I/9
inline DensityMatrix isotropic_qutrit_state(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("isotropic_qutrit_state: p must lie in [0, 1]");
    return mix(qutrit_bell(), DensityMatrix::maximally_mixed({3, 3}), p);
}

inline QutritCorrelations expectation_table(const DensityMatrix& rho, const WeylSet& weyl = WeylSet{}) {
    if (!(rho.dims() == Dims{3, 3})) throw std::invalid_argument("expectation_table: expected a 3x3 bipartite state");
    QutritCorrelations e;
    constexpr std::array<int, 8> idx{1, 2, 3, 4, -1, -2, -3, -4};
    for (const int i : idx)
        for (const int j : idx)
            e.values[QutritCorrelations::slot(i, j)] = expectation_complex(rho, tensor_product(weyl(i), weyl(j)));
    return e;
}

/// C3 = Σ_{i,j=2..4} |e_ij|² + Σ_{i=2..4, j=-2..-4} |e_ij|²
inline double compute_C3(const QutritCorrelations& e) {
    double c3 = 0;
    for (int i = 2; i <= 4; ++i)
        for (int j = 2; j <= 4; ++j) c3 += std::norm(e.at(i, j)) + std::norm(e.at(i, -j));
    return c3;
}

/// C3 with linearly propagated standard error. `bias_bound` is Σ se², the
/// upward bias of the plug-in |ê|² terms.
struct C3Estimate {
    double value = 0.0;
    double standard_error = 0.0;
    double bias_bound = 0.0;
};

inline C3Estimate compute_C3_estimate(const QutritCorrelations& e) {
    C3Estimate out{compute_C3(e), 0.0, 0.0};
    double var = 0;
    for (int i = 2; i <= 4; ++i)
        for (const int j : {2, 3, 4, -2, -3, -4}) {
            const double se = e.standard_error(i, j);
            var += std::pow(2.0 * std::abs(e.at(i, j)) * se, 2);
            out.bias_bound += se * se;
        }
    out.standard_error = std::sqrt(var);
    return out;
}

/// diag(1, e^{iφ1}, e^{iφ2}) acting on Bob's qutrit.
inline ComplexMatrix phase_drift_unitary(double phi1, double phi2) {
    return {{1, 0, 0}, {0, std::polar(1.0, phi1), 0}, {0, 0, std::polar(1.0, phi2)}};
}

// ---------- phase drift ----------

enum class PhaseDriftKind {
    None,
    Fixed,       // given (φ1, φ2) for the whole run
    RandomFixed, // one seeded uniform draw per run, unknown to the parties
    Iid,         // fresh uniform phases every signal
    Walk,        // Gaussian random walk of both phases
};

struct PhaseDriftModel {
    PhaseDriftKind kind = PhaseDriftKind::None;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double step = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const PhaseDriftModel&, const PhaseDriftModel&) = default;
};

class PhaseTrajectory {
public:
    explicit PhaseTrajectory(const PhaseDriftModel& m)
        : model_(m), rng_(seeded_engine(m.seed, 0x9a5e)) {
        switch (m.kind) {
            case PhaseDriftKind::None: break;
            case PhaseDriftKind::Fixed:
            case PhaseDriftKind::Walk:
                phi1_ = m.phi1;
                phi2_ = m.phi2;
                break;
            case PhaseDriftKind::RandomFixed:
            case PhaseDriftKind::Iid:
                phi1_ = uniform_(rng_);
                phi2_ = uniform_(rng_);
                break;
        }
    }

    double phi1() const noexcept { return phi1_; }
    double phi2() const noexcept { return phi2_; }

    /// Returns true when the phases changed.
    bool advance() {
        switch (model_.kind) {
            case PhaseDriftKind::Iid:
                phi1_ = uniform_(rng_);
                phi2_ = uniform_(rng_);
                return true;
            case PhaseDriftKind::Walk:
                phi1_ += model_.step * normal_(rng_);
                phi2_ += model_.step * normal_(rng_);
                return model_.step != 0.0;
            default: return false;
        }
    }

private:
    PhaseDriftModel model_;
    double phi1_ = 0.0;
    double phi2_ = 0.0;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 2.0 * kPi};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// `none`, `fixed:PHI1:PHI2`, `random[:SEED]`, `iid[:SEED]`, `walk:STEP[:SEED]`.
inline PhaseDriftModel parse_phase_drift(std::string_view spec, std::uint64_t default_seed = 0) {
    const auto parts = detail::split(spec, ':');
    const std::string& kind = parts.front();
    PhaseDriftModel m;
    m.seed = default_seed;
    if (kind == "none" && parts.size() == 1) return m;
    if (kind == "fixed" && parts.size() == 3) {
        m.kind = PhaseDriftKind::Fixed;
        m.phi1 = detail::parse_double(parts[1], "phase phi1");
        m.phi2 = detail::parse_double(parts[2], "phase phi2");
        return m;
    }
    if ((kind == "random" || kind == "iid") && parts.size() <= 2) {
        m.kind = kind == "random" ? PhaseDriftKind::RandomFixed : PhaseDriftKind::Iid;
        if (parts.size() == 2) m.seed = detail::parse_u64(parts[1], "phase seed");
        return m;
    }
    if (kind == "walk" && (parts.size() == 2 || parts.size() == 3)) {
        m.kind = PhaseDriftKind::Walk;
        m.step = detail::parse_double(parts[1], "phase step");
        if (m.step < 0) throw std::invalid_argument("phase drift: walk step must be nonnegative");
        if (parts.size() == 3) m.seed = detail::parse_u64(parts[2], "phase seed");
        return m;
    }
    throw std::invalid_argument("phase drift: expected none, fixed:P1:P2, random[:SEED], iid[:SEED] or walk:STEP[:SEED], got '" +
                                std::string(spec) + "'");
}

inline std::string to_string(const PhaseDriftModel& m) {
    using detail::format_double;
    switch (m.kind) {
        case PhaseDriftKind::None: return "none";
        case PhaseDriftKind::Fixed: return "fixed:" + format_double(m.phi1) + ":" + format_double(m.phi2);
        case PhaseDriftKind::RandomFixed: return "random:" + std::to_string(m.seed);
        case PhaseDriftKind::Iid: return "iid:" + std::to_string(m.seed);
        case PhaseDriftKind::Walk: return "walk:" + format_double(m.step) + ":" + std::to_string(m.seed);
    }
    return "none";
}

}  // namespace rfiqkd
