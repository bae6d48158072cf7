// photonic.hpp
// Single-photon model of the integrated circuits for qutrit measurement:
// directional couplers, the qutrit Hadamard chip, the 3 -> 6 mode state
// splitter and the four-basis random projection device.
//
// Circuits act on first-quantized amplitude vectors; a ModeUnitary U maps
// input mode amplitudes ψ to output amplitudes Uψ.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "protocol.hpp"
#include "qstate.hpp"
#include "qutrit.hpp"

namespace rfiqkd {

class ModeUnitary {
public:
    explicit ModeUnitary(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
        if (!is_unitary(matrix_, kAlgebraTol)) {
            throw std::invalid_argument("ModeUnitary: U†U != I (residual " + std::to_string(unitarity_residual(matrix_)) + ")");
        }
    }

    std::size_t n_modes() const noexcept { return matrix_.dim(); }
    const ComplexMatrix& matrix() const noexcept { return matrix_; }

private:
    ComplexMatrix matrix_;
};

struct PovmElement {
    std::size_t basis = 0;    // 0 = computational, 1..3 = τ2..τ4
    std::size_t outcome = 0;  // eigenvalue ω^outcome of the basis operator
    ComplexMatrix element;
};

/// Measurement on a 3-dimensional input: Σ E = I and every E ⪰ 0.
class Povm {
public:
    explicit Povm(std::vector<PovmElement> elements) : elements_(std::move(elements)) {
        if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
        if (completeness_residual() > kEigenTol) throw std::invalid_argument("Povm: elements do not sum to identity");
        for (const auto& e : elements_) {
            if (!is_hermitian(e.element, kEigenTol) || eigenvalues_hermitian(e.element).front() < -kEigenTol) {
                throw std::invalid_argument("Povm: element is not positive semidefinite");
            }
        }
    }

    const std::vector<PovmElement>& elements() const noexcept { return elements_; }
    double completeness_residual() const { return completeness_residual(elements_); }

    static double completeness_residual(const std::vector<PovmElement>& elements) {
        const std::size_t d = elements.front().element.dim();
        ComplexMatrix sum(d);
        for (const auto& e : elements) sum += e.element;
        return max_abs_diff(sum, ComplexMatrix::identity(d));
    }

    /// Σ_k Tr(E_{b,k}) / d; equals the branch probability for rank-one elements p_b |v><v|.
    double basis_weight(std::size_t basis) const {
        double w = 0;
        for (const auto& e : elements_)
            if (e.basis == basis) w += e.element.trace().real();
        return w / static_cast<double>(elements_.front().element.dim());
    }

private:
    std::vector<PovmElement> elements_;
};

// ---------- couplers ----------

/// Embeds a 2x2 block on modes (m0, m1) of an n-mode identity.
inline ComplexMatrix embed_pair(const ComplexMatrix& block, std::size_t n, std::size_t m0, std::size_t m1) {
    ComplexMatrix u = ComplexMatrix::identity(n);
    u(m0, m0) = block(0, 0);
    u(m0, m1) = block(0, 1);
    u(m1, m0) = block(1, 0);
    u(m1, m1) = block(1, 1);
    return u;
}

/// Embeds a k-mode matrix acting on `modes` (logical index l -> physical modes[l]).
inline ComplexMatrix embed(const ComplexMatrix& u, const std::vector<std::size_t>& modes, std::size_t n) {
    if (modes.size() != u.dim()) throw std::invalid_argument("embed: mode list does not match matrix size");
    ComplexMatrix out = ComplexMatrix::identity(n);
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = 0; j < modes.size(); ++j) out(modes[i], modes[j]) = u(i, j);
    return out;
}

enum class CouplerKind { DC2, DC3, DC4 };

/// DC2 = (σz + σx)_{12}/√2, DC3 = (σz + √2σx)_{01}/√3, DC4 = (σz + σy)_{12}/√2.
/// `dc3_prefactor` exists for fault injection only.
inline ComplexMatrix coupler_matrix(CouplerKind kind, double dc3_prefactor = 1.0 / std::sqrt(3.0)) {
    const double s2 = 1.0 / std::sqrt(2.0);
    const cplx i{0, 1};
    switch (kind) {
        case CouplerKind::DC2: return embed_pair(ComplexMatrix{{s2, s2}, {s2, -s2}}, 3, 1, 2);
        case CouplerKind::DC3: {
            const double r2 = std::sqrt(2.0);
            return embed_pair(ComplexMatrix{{dc3_prefactor, dc3_prefactor * r2}, {dc3_prefactor * r2, -dc3_prefactor}}, 3, 0, 1);
        }
        case CouplerKind::DC4: return embed_pair(ComplexMatrix{{s2, -i * s2}, {i * s2, -s2}}, 3, 1, 2);
    }
    throw std::invalid_argument("coupler_matrix: bad kind");
}

inline ModeUnitary coupler(CouplerKind kind) { return ModeUnitary(coupler_matrix(kind)); }

/// The three couplers of the Hadamard chip, possibly perturbed.
struct CouplerSet {
    ComplexMatrix dc2 = coupler_matrix(CouplerKind::DC2);
    ComplexMatrix dc3 = coupler_matrix(CouplerKind::DC3);
    ComplexMatrix dc4 = coupler_matrix(CouplerKind::DC4);

    static CouplerSet nominal() { return {}; }

    /// DC3 with prefactor 1/√2 in place of 1/√3.
    static CouplerSet with_faulty_dc3() {
        CouplerSet s;
        s.dc3 = coupler_matrix(CouplerKind::DC3, 1.0 / std::sqrt(2.0));
        return s;
    }

    /// DC4·DC3·DC2 (DC2 acts first).
    ComplexMatrix hadamard() const { return dc4 * dc3 * dc2; }
};

inline ModeUnitary hadamard_chip() { return ModeUnitary(CouplerSet::nominal().hadamard()); }

/// max_jk | |U_jk|² - 1/d |
inline double hadamard_modulus_residual(const ComplexMatrix& u) {
    const double target = 1.0 / static_cast<double>(u.dim());
    double worst = 0;
    for (const cplx z : u.entries()) worst = std::max(worst, std::abs(std::norm(z) - target));
    return worst;
}

/// Input phase layer: chip · diag(phases on `placement`).
inline ComplexMatrix hadamard_variant_matrix(const ComplexMatrix& chip, std::array<double, 2> phases,
                                             std::array<std::size_t, 2> placement) {
    if (placement[0] == placement[1] || placement[0] > 2 || placement[1] > 2) {
        throw std::invalid_argument("hadamard_variant: placement must name two distinct modes of 0..2");
    }
    ComplexVector diag{1.0, 1.0, 1.0};
    diag[placement[0]] = std::polar(1.0, phases[0]);
    diag[placement[1]] = std::polar(1.0, phases[1]);
    return chip * ComplexMatrix::diagonal(diag);
}

inline ModeUnitary hadamard_variant(std::array<double, 2> phases, std::array<std::size_t, 2> placement) {
    return ModeUnitary(hadamard_variant_matrix(hadamard_chip().matrix(), phases, placement));
}

/// Measured vectors of a chip followed by detectors: column j is w_j with
/// detector-j amplitude <w_j|ψ>, i.e. the conjugated row j.
inline ComplexMatrix measured_basis(const ComplexMatrix& chip) { return chip.adjoint(); }

/// The phase setting that makes a Hadamard variant measure a given basis.
struct VariantAssignment {
    std::array<std::size_t, 2> placement{1, 2};
    std::array<int, 2> phase_steps{0, 0};  // multiples of 2π/3
    std::array<double, 2> phases{0.0, 0.0};
    /// Σ_j (1 - max_k |<w_j|t_k>|²); zero when the bases coincide up to phases.
    double distance = 0.0;
    /// detector j reports basis outcome outcome_of_detector[j]
    std::array<std::size_t, 3> outcome_of_detector{0, 1, 2};
    ComplexMatrix unitary;
};

/// Searches the third-roots-of-unity phase grid over all mode placements for
/// the variant closest to `target` (columns = target basis vectors).
inline VariantAssignment find_variant_for_basis(const ComplexMatrix& target, const ComplexMatrix& chip) {
    const std::array<std::array<std::size_t, 2>, 3> placements{{{1, 2}, {0, 1}, {0, 2}}};
    VariantAssignment best;
    best.distance = INFINITY;
    for (const auto& pl : placements)
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 3; ++c) {
                const std::array<double, 2> ph{2.0 * kPi * a / 3.0, 2.0 * kPi * c / 3.0};
                const ComplexMatrix u = hadamard_variant_matrix(chip, ph, pl);
                const ComplexMatrix w = measured_basis(u);
                VariantAssignment cand{pl, {a, c}, ph, 0.0, {0, 0, 0}, u};
                for (std::size_t j = 0; j < 3; ++j) {
                    double best_overlap = -1;
                    for (std::size_t k = 0; k < 3; ++k) {
                        double ov = 0;
                        cplx s = 0;
                        for (std::size_t r = 0; r < 3; ++r) s += std::conj(w(r, j)) * target(r, k);
                        ov = std::norm(s);
                        if (ov > best_overlap) {
                            best_overlap = ov;
                            cand.outcome_of_detector[j] = k;
                        }
                    }
                    cand.distance += 1.0 - best_overlap;
                }
                if (cand.distance < best.distance - 1e-9) best = cand;
            }
    return best;
}

inline VariantAssignment find_variant_for_basis(const ComplexMatrix& target) {
    return find_variant_for_basis(target, hadamard_chip().matrix());
}

// ---------- state splitter ----------

/// 2x2 coupler of reflectivity r: [[√r, i√(1-r)], [i√(1-r), √r]].
inline ComplexMatrix directional_coupler(double r) {
    const double a = std::sqrt(r), b = std::sqrt(1.0 - r);
    return {{a, cplx{0, b}}, {cplx{0, b}, a}};
}

/// Two balanced couplers around an internal phase on the upper arm.
inline ComplexMatrix mach_zehnder(double internal_phase) {
    const ComplexMatrix dc = directional_coupler(0.5);
    return dc * ComplexMatrix{{std::polar(1.0, internal_phase), 0}, {0, 1}} * dc;
}

/// The swap configuration of the MZ with its global phase removed: at zero
/// internal phase the MZ is i·[[0,1],[1,0]].
inline ComplexMatrix mach_zehnder_swap() { return mach_zehnder(0.0) * cplx{0, -1}; }

/// 6-mode splitter. Input modes 0..2 carry the qutrit, 3..5 are vacuum; output
/// modes 0..2 carry √r·ψ and 3..5 carry i√(1-r)·ψ.
///
/// Internally the inputs interleave with their vacuum partners (physical
/// positions 0,2,4 and 1,3,5), one coupler acts on each pair, and three MZ
/// swaps on (1,2), (3,4), (2,3) regroup the copies into triples.
inline ComplexMatrix state_splitter_matrix(double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("state_splitter: reflectivity must lie in (0, 1)");
    constexpr std::array<std::size_t, 6> position{0, 2, 4, 1, 3, 5};
    ComplexMatrix interleave(6);
    for (std::size_t l = 0; l < 6; ++l) interleave(position[l], l) = 1.0;
    const ComplexMatrix dc = directional_coupler(r);
    const ComplexMatrix couplers = embed_pair(dc, 6, 0, 1) * embed_pair(dc, 6, 2, 3) * embed_pair(dc, 6, 4, 5);
    const ComplexMatrix sw = mach_zehnder_swap();
    const ComplexMatrix swaps = embed_pair(sw, 6, 2, 3) * embed_pair(sw, 6, 3, 4) * embed_pair(sw, 6, 1, 2);
    return swaps * couplers * interleave;
}

inline ModeUnitary state_splitter(double r) { return ModeUnitary(state_splitter_matrix(r)); }

// ---------- four-basis measurement device ----------

/// Branch probabilities of the balanced splitter tree: r1 separates the
/// (computational, τ2) pair from the (τ3, τ4) pair, r2 and r3 split each pair.
inline std::array<double, 4> cascade_branch_probabilities(std::array<double, 3> r) {
    return {r[0] * r[1], r[0] * (1.0 - r[1]), (1.0 - r[0]) * r[2], (1.0 - r[0]) * (1.0 - r[2])};
}

struct MeasurementDevice {
    std::array<double, 3> reflectivities{0.5, 0.5, 0.5};
    std::array<double, 4> branch_probabilities{};
    std::array<VariantAssignment, 3> variants;  // τ2, τ3, τ4 branches
    ComplexMatrix circuit;                      // 12 modes; input on 0..2
    std::vector<PovmElement> elements;          // 12 elements, unvalidated

    /// Output mode 3b + j belongs to basis b, detector j.
    static constexpr std::size_t kModes = 12;
};

namespace detail {

inline MeasurementDevice assemble_device(std::array<double, 3> r, const CouplerSet& couplers) {
    for (const double x : r)
        if (!(x > 0.0 && x < 1.0)) throw std::domain_error("measurement_device: reflectivities must lie in (0, 1)");
    MeasurementDevice dev;
    dev.reflectivities = r;
    dev.branch_probabilities = cascade_branch_probabilities(r);

    constexpr std::size_t n = MeasurementDevice::kModes;
    const ComplexMatrix s1 = embed(state_splitter_matrix(r[0]), {0, 1, 2, 6, 7, 8}, n);
    const ComplexMatrix s2 = embed(state_splitter_matrix(r[1]), {0, 1, 2, 3, 4, 5}, n);
    const ComplexMatrix s3 = embed(state_splitter_matrix(r[2]), {6, 7, 8, 9, 10, 11}, n);

    const ComplexMatrix chip = couplers.hadamard();
    const MubFamily mubs = mub_family();
    ComplexMatrix chips = ComplexMatrix::identity(n);
    for (std::size_t b = 1; b < 4; ++b) {
        dev.variants[b - 1] = find_variant_for_basis(mubs.bases[b], chip);
        chips = chips * embed(dev.variants[b - 1].unitary, {3 * b, 3 * b + 1, 3 * b + 2}, n);
    }
    dev.circuit = chips * s2 * s3 * s1;

    for (std::size_t m = 0; m < n; ++m) {
        const std::size_t b = m / 3, j = m % 3;
        ComplexVector w(3);
        for (std::size_t k = 0; k < 3; ++k) w[k] = std::conj(dev.circuit(m, k));
        const std::size_t outcome = b == 0 ? j : dev.variants[b - 1].outcome_of_detector[j];
        dev.elements.push_back({b, outcome, ComplexMatrix::outer(w, w)});
    }
    return dev;
}

}  // namespace detail

inline MeasurementDevice build_measurement_device(std::array<double, 3> reflectivities = {0.5, 0.5, 0.5}) {
    MeasurementDevice dev = detail::assemble_device(reflectivities, CouplerSet::nominal());
    if (!is_unitary(dev.circuit, kAlgebraTol)) throw std::runtime_error("measurement_device: circuit not unitary");
    return dev;
}

/// 12 rank-one elements E_{b,k} = p_b |v_{b,k}><v_{b,k}|.
inline Povm measurement_device(std::array<double, 3> reflectivities = {0.5, 0.5, 0.5}) {
    return Povm(build_measurement_device(reflectivities).elements);
}

/// Joint sampling of two POVMs on a 3x3 state. Element labels become basis
/// and outcome indices of the transcript.
inline Transcript sample_povm_transcript(const DensityMatrix& rho, const Povm& alice, const Povm& bob, std::uint64_t n,
                                         std::uint64_t seed) {
    if (!(rho.dims() == Dims{3, 3})) throw std::invalid_argument("sample_povm_transcript: expected a 3x3 state");
    const auto& ea = alice.elements();
    const auto& eb = bob.elements();
    std::vector<double> p;
    p.reserve(ea.size() * eb.size());
    for (const auto& a : ea)
        for (const auto& b : eb) p.push_back(std::max(0.0, trace_of_product(tensor_product(a.element, b.element), rho.matrix()).real()));
    std::mt19937_64 rng = seeded_engine(seed, detail::kOutcomeStream);
    std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
    std::vector<std::uint64_t> hits(p.size(), 0);
    for (std::uint64_t i = 0; i < n; ++i) ++hits[dist(rng)];

    Transcript t;
    t.dims = {3, 3};
    t.n_signals = n;
    t.seed = seed;
    t.drift = "none";
    for (std::size_t ia = 0; ia < ea.size(); ++ia)
        for (std::size_t ib = 0; ib < eb.size(); ++ib) {
            const std::uint64_t c = hits[ia * eb.size() + ib];
            if (!c) continue;
            t.counts[CountKey{static_cast<std::uint8_t>(ea[ia].basis), static_cast<std::uint8_t>(eb[ib].basis),
                              static_cast<std::uint8_t>(ea[ia].outcome), static_cast<std::uint8_t>(eb[ib].outcome)}] += c;
        }
    return t;
}

// ---------- verification report ----------

struct VerificationCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed() const { return residual <= tolerance; }
};

struct ChipVerification {
    std::vector<VerificationCheck> checks;
    MeasurementDevice device;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed()) return false;
        return true;
    }
};

/// Runs every circuit check on the given couplers. Nothing here throws on a
/// faulty circuit; failures show up as residuals above tolerance.
inline ChipVerification verify_chips(const CouplerSet& couplers = CouplerSet::nominal(),
                                     std::array<double, 3> reflectivities = {0.5, 0.5, 0.5}) {
    ChipVerification v;
    auto add = [&](std::string name, double residual, double tol) { v.checks.push_back({std::move(name), residual, tol}); };

    add("unitarity DC2", unitarity_residual(couplers.dc2), kAlgebraTol);
    add("unitarity DC3", unitarity_residual(couplers.dc3), kAlgebraTol);
    add("unitarity DC4", unitarity_residual(couplers.dc4), kAlgebraTol);
    const ComplexMatrix chip = couplers.hadamard();
    add("unitarity hadamard chip", unitarity_residual(chip), kAlgebraTol);
    add("hadamard modulus |U_jk|^2 = 1/3", hadamard_modulus_residual(chip), kAlgebraTol);

    for (const double r : reflectivities) {
        const ComplexMatrix s = state_splitter_matrix(r);
        add("unitarity state splitter r=" + detail::format_double(r), unitarity_residual(s), kAlgebraTol);
        // Top-left block must be √r I and the lower-left block i√(1-r) I.
        ComplexMatrix top(3), low(3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                top(i, j) = s(i, j);
                low(i, j) = s(i + 3, j);
            }
        const double copy_res = std::max(max_abs_diff(top, ComplexMatrix::identity(3) * std::sqrt(r)),
                                         max_abs_diff(low, ComplexMatrix::identity(3) * cplx{0, std::sqrt(1.0 - r)}));
        add("state splitter copies r=" + detail::format_double(r), copy_res, kAlgebraTol);
    }

    v.device = detail::assemble_device(reflectivities, couplers);
    for (std::size_t b = 0; b < 3; ++b) {
        add("hadamard variant basis tau" + std::to_string(b + 2), v.device.variants[b].distance, kAlgebraTol);
    }
    add("unitarity measurement device", unitarity_residual(v.device.circuit), kAlgebraTol);
    add("POVM completeness", Povm::completeness_residual(v.device.elements), kEigenTol);
    double neg = 0;
    for (const auto& e : v.device.elements) {
        neg = std::max(neg, hermiticity_residual(e.element));
        neg = std::max(neg, -eigenvalues_hermitian(e.element).front());
    }
    add("POVM positivity", neg, kEigenTol);
    double branch = 0;
    for (std::size_t b = 0; b < 4; ++b) {
        double w = 0;
        for (const auto& e : v.device.elements)
            if (e.basis == b) w += e.element.trace().real();
        branch = std::max(branch, std::abs(w / 3.0 - v.device.branch_probabilities[b]));
    }
    add("POVM branch probabilities", branch, kAlgebraTol);
    return v;
}

}  // namespace rfiqkd
