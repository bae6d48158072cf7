// protocol.hpp
// Monte-Carlo protocol runs and estimation of the frame-invariant quantities.
//
// Basis indices are 0-based: qubits 0,1,2 = X,Y,Z; qutrits 0..3 = τ1..τ4.
// Outcome k of a qubit basis is the eigenvalue (-1)^k; outcome k of a qutrit
// basis is the eigenvalue ω^k of the corresponding Weyl operator.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "correlations.hpp"
#include "linalg.hpp"
#include "qstate.hpp"
#include "qutrit.hpp"

namespace rfiqkd {

/// Per-party basis probabilities.
struct BasisChoice {
    std::vector<double> alice;
    std::vector<double> bob;

    static BasisChoice uniform(std::size_t n_bases) {
        std::vector<double> p(n_bases, 1.0 / static_cast<double>(n_bases));
        return {p, p};
    }

    /// Both parties always use the given bases.
    static BasisChoice forced(std::size_t n_bases, std::size_t alice_basis, std::size_t bob_basis) {
        BasisChoice c{std::vector<double>(n_bases, 0.0), std::vector<double>(n_bases, 0.0)};
        c.alice.at(alice_basis) = 1.0;
        c.bob.at(bob_basis) = 1.0;
        return c;
    }

    void validate(std::size_t n_bases) const {
        for (const auto* p : {&alice, &bob}) {
            if (p->size() != n_bases) {
                throw std::invalid_argument("BasisChoice: expected " + std::to_string(n_bases) + " probabilities");
            }
            double sum = 0;
            for (const double x : *p) {
                if (!(x >= 0.0)) throw std::invalid_argument("BasisChoice: probabilities must be nonnegative");
                sum += x;
            }
            if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("BasisChoice: probabilities must sum to 1");
        }
    }
};

inline std::string basis_label(std::size_t d, std::size_t basis) {
    if (d == 2) return std::string{pauli_name(static_cast<Pauli>(basis))};
    return std::to_string(basis + 1);
}

struct CountKey {
    std::uint8_t alice_basis = 0;
    std::uint8_t bob_basis = 0;
    std::uint8_t alice_outcome = 0;
    std::uint8_t bob_outcome = 0;

    friend auto operator<=>(const CountKey&, const CountKey&) = default;
};

/// Outcome counts of a protocol run.
struct Transcript {
    Dims dims{2, 2};
    std::uint64_t n_signals = 0;
    std::uint64_t seed = 0;
    std::string drift = "constant:0";
    std::map<CountKey, std::uint64_t> counts;

    std::size_t n_bases() const { return dims.alice + 1; }

    std::uint64_t count(std::size_t a, std::size_t b, std::size_t x, std::size_t y) const {
        const auto it = counts.find(CountKey{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                             static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)});
        return it == counts.end() ? 0 : it->second;
    }

    std::uint64_t pair_total(std::size_t a, std::size_t b) const {
        std::uint64_t n = 0;
        for (std::size_t x = 0; x < dims.alice; ++x)
            for (std::size_t y = 0; y < dims.bob; ++y) n += count(a, b, x, y);
        return n;
    }

    void validate() const {
        if (dims.alice != dims.bob || (dims.alice != 2 && dims.alice != 3)) {
            throw std::invalid_argument("Transcript: only 2x2 and 3x3 runs are supported");
        }
        std::uint64_t total = 0;
        for (const auto& [k, c] : counts) {
            if (k.alice_basis >= n_bases() || k.bob_basis >= n_bases() || k.alice_outcome >= dims.alice ||
                k.bob_outcome >= dims.bob) {
                throw std::invalid_argument("Transcript: basis or outcome index out of range");
            }
            total += c;
        }
        if (total != n_signals) throw std::invalid_argument("Transcript: counts do not sum to n_signals");
    }

    friend bool operator==(const Transcript&, const Transcript&) = default;
};

// ---------- measurement bases ----------

/// Columns are the eigenvectors of X, Y, Z; column 0 has eigenvalue +1.
inline std::array<ComplexMatrix, 3> qubit_measurement_bases() {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i{0, 1};
    return {ComplexMatrix{{s, s}, {s, -s}}, ComplexMatrix{{s, s}, {i * s, -i * s}},
            ComplexMatrix::identity(2)};
}

// ---------- exact correlations ----------

inline QubitCorrelations exact_qubit_correlations(const DensityMatrix& rho) {
    if (!(rho.dims() == Dims{2, 2})) throw std::invalid_argument("exact_correlations: expected a two-qubit state");
    QubitCorrelations c;
    for (const Pauli a : kPaulis)
        for (const Pauli b : kPaulis) c.values[QubitCorrelations::slot(a, b)] = expectation(rho, pauli_product(a, b));
    return c;
}

inline CorrelationRecord exact_correlations(const DensityMatrix& rho) {
    if (rho.dims() == Dims{2, 2}) return exact_qubit_correlations(rho);
    if (rho.dims() == Dims{3, 3}) return expectation_table(rho);
    throw std::invalid_argument("exact_correlations: unsupported dimension (only 2x2 and 3x3)");
}

// ---------- sampling ----------

namespace detail {

inline constexpr std::uint64_t kBasisStream = 1;
inline constexpr std::uint64_t kOutcomeStream = 2;

/// Born-rule sampler over (basis pair, joint outcome). `frame` supplies Bob's
/// per-signal frame unitary V: `unitary()` and `advance()` (true on change).
/// Probability tables are cached per basis pair until the frame changes.
template <class FrameSource>
Transcript sample_bases(const DensityMatrix& rho, std::span<const ComplexMatrix> bases, const BasisChoice& choice,
                        std::uint64_t n, std::uint64_t seed, FrameSource& frame, std::string drift_description) {
    const std::size_t d = rho.dims().alice;
    const std::size_t nb = bases.size();
    choice.validate(nb);

    std::mt19937_64 basis_rng = seeded_engine(seed, kBasisStream);
    std::mt19937_64 outcome_rng = seeded_engine(seed, kOutcomeStream);
    std::discrete_distribution<std::size_t> alice_dist(choice.alice.begin(), choice.alice.end());
    std::discrete_distribution<std::size_t> bob_dist(choice.bob.begin(), choice.bob.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::vector<double>> tables(nb * nb);
    std::vector<bool> valid(nb * nb, false);
    std::vector<std::uint64_t> flat(nb * nb * d * d, 0);

    auto build_table = [&](std::size_t a, std::size_t b) {
        const ComplexMatrix vdag = frame.unitary().adjoint();
        std::vector<double>& t = tables[a * nb + b];
        t.assign(d * d, 0.0);
        double total = 0;
        for (std::size_t x = 0; x < d; ++x) {
            const ComplexVector alpha = bases[a].column(x);
            for (std::size_t y = 0; y < d; ++y) {
                const ComplexVector beta = vdag * bases[b].column(y);
                const ComplexVector w = tensor_product(alpha, beta);
                const double p = std::max(0.0, quadratic_form(rho.matrix(), w).real());
                t[x * d + y] = p;
                total += p;
            }
        }
        for (double& p : t) p /= total;
        valid[a * nb + b] = true;
    };

    for (std::uint64_t i = 0; i < n; ++i) {
        if (i > 0 && frame.advance()) std::fill(valid.begin(), valid.end(), false);
        const std::size_t a = alice_dist(basis_rng);
        const std::size_t b = bob_dist(basis_rng);
        if (!valid[a * nb + b]) build_table(a, b);
        const auto& t = tables[a * nb + b];
        const double u = unit(outcome_rng);
        std::size_t k = 0;
        double acc = t[0];
        while (u >= acc && k + 1 < t.size()) acc += t[++k];
        ++flat[(a * nb + b) * d * d + k];
    }

    Transcript out;
    out.dims = rho.dims();
    out.n_signals = n;
    out.seed = seed;
    out.drift = std::move(drift_description);
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t x = 0; x < d; ++x)
                for (std::size_t y = 0; y < d; ++y) {
                    const std::uint64_t c = flat[(a * nb + b) * d * d + x * d + y];
                    if (c) {
                        out.counts[CountKey{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                            static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y)}] = c;
                    }
                }
    return out;
}

class QubitFrame {
public:
    explicit QubitFrame(const FrameDriftModel& m) : traj_(m), u_(frame_rotation_unitary(traj_.value())) {}
    const ComplexMatrix& unitary() const { return u_; }
    bool advance() {
        const double before = traj_.value();
        traj_.advance();
        if (traj_.value() == before) return false;
        u_ = frame_rotation_unitary(traj_.value());
        return true;
    }

private:
    DriftTrajectory traj_;
    ComplexMatrix u_;
};

class QutritFrame {
public:
    explicit QutritFrame(const PhaseDriftModel& m) : traj_(m), u_(current()) {}
    const ComplexMatrix& unitary() const { return u_; }
    bool advance() {
        if (!traj_.advance()) return false;
        u_ = current();
        return true;
    }

private:
    ComplexMatrix current() const { return phase_drift_unitary(traj_.phi1(), traj_.phi2()); }
    PhaseTrajectory traj_;
    ComplexMatrix u_;
};

}  // namespace detail

/// Qubit run: signal i sees Bob's frame rotated by beta_at(drift, i).
inline Transcript sample_transcript(const DensityMatrix& rho_source, std::uint64_t n, const BasisChoice& bases,
                                    const FrameDriftModel& drift, std::uint64_t seed) {
    if (!(rho_source.dims() == Dims{2, 2})) throw std::invalid_argument("sample_transcript: expected a two-qubit state");
    if (n < 1) throw std::invalid_argument("sample_transcript: n must be >= 1");
    const auto mbases = qubit_measurement_bases();
    detail::QubitFrame frame(drift);
    return detail::sample_bases(rho_source, mbases, bases, n, seed, frame, to_string(drift));
}

/// Qutrit run over the four MUBs; Bob's computational phases follow `drift`.
inline Transcript sample_qutrit_transcript(const DensityMatrix& rho_source, std::uint64_t n, const BasisChoice& bases,
                                           const PhaseDriftModel& drift, std::uint64_t seed) {
    if (!(rho_source.dims() == Dims{3, 3})) throw std::invalid_argument("sample_qutrit_transcript: expected a 3x3 state");
    if (n < 1) throw std::invalid_argument("sample_qutrit_transcript: n must be >= 1");
    const MubFamily mubs = mub_family();
    detail::QutritFrame frame(drift);
    return detail::sample_bases(rho_source, mubs.bases, bases, n, seed, frame, to_string(drift));
}

// ---------- estimation ----------

inline QubitCorrelations estimate_qubit_correlations(const Transcript& t) {
    constexpr std::array<std::array<Pauli, 2>, 5> required{
        {{Pauli::X, Pauli::X}, {Pauli::X, Pauli::Y}, {Pauli::Y, Pauli::X}, {Pauli::Y, Pauli::Y}, {Pauli::Z, Pauli::Z}}};
    for (const auto& [a, b] : required) {
        if (t.pair_total(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) == 0) {
            throw InsufficientDataError(std::string{pauli_name(a)}, std::string{pauli_name(b)});
        }
    }
    QubitCorrelations c;
    c.standard_errors.emplace();
    for (const Pauli a : kPaulis)
        for (const Pauli b : kPaulis) {
            const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
            const std::uint64_t same = t.count(ia, ib, 0, 0) + t.count(ia, ib, 1, 1);
            const std::uint64_t diff = t.count(ia, ib, 0, 1) + t.count(ia, ib, 1, 0);
            const std::uint64_t total = same + diff;
            if (total == 0) continue;
            const double v = (static_cast<double>(same) - static_cast<double>(diff)) / static_cast<double>(total);
            c.values[QubitCorrelations::slot(a, b)] = v;
            (*c.standard_errors)[QubitCorrelations::slot(a, b)] = std::sqrt(std::max(0.0, 1.0 - v * v) / static_cast<double>(total));
        }
    return c;
}

/// e_ij estimated as the empirical mean of ω^{s_i a + s_j b} over the counts of
/// basis pair (|i|, |j|), s = sign of the index.
inline QutritCorrelations estimate_qutrit_correlations(const Transcript& t) {
    for (std::size_t a = 1; a < 4; ++a)
        for (std::size_t b = 1; b < 4; ++b)
            if (t.pair_total(a, b) == 0) throw InsufficientDataError(std::to_string(a + 1), std::to_string(b + 1));
    QutritCorrelations e;
    e.standard_errors.emplace();
    for (int ai = 1; ai <= 4; ++ai)
        for (int bi = 1; bi <= 4; ++bi) {
            const auto a = static_cast<std::size_t>(ai - 1), b = static_cast<std::size_t>(bi - 1);
            const std::uint64_t total = t.pair_total(a, b);
            if (total == 0) continue;
            for (const int si : {1, -1})
                for (const int sj : {1, -1}) {
                    cplx sum = 0;
                    for (std::size_t x = 0; x < 3; ++x)
                        for (std::size_t y = 0; y < 3; ++y) {
                            const std::uint64_t c = t.count(a, b, x, y);
                            if (!c) continue;
                            const int power = ((si * static_cast<int>(x) + sj * static_cast<int>(y)) % 3 + 3) % 3;
                            sum += static_cast<double>(c) * std::pow(omega3(), power);
                        }
                    const cplx v = sum / static_cast<double>(total);
                    const std::size_t s = QutritCorrelations::slot(si * ai, sj * bi);
                    e.values[s] = v;
                    (*e.standard_errors)[s] = std::sqrt(std::max(0.0, 1.0 - std::norm(v)) / static_cast<double>(total));
                }
        }
    return e;
}

inline CorrelationRecord estimate_correlations(const Transcript& t) {
    t.validate();
    if (t.dims.alice == 2) return estimate_qubit_correlations(t);
    return estimate_qutrit_correlations(t);
}

/// Q = (1 - <Z_A Z_B>)/2
inline double compute_Q(const QubitCorrelations& c) { return (1.0 - c.at(Pauli::Z, Pauli::Z)) / 2.0; }

/// C = <XX>² + <XY>² + <YX>² + <YY>²
inline double compute_C(const QubitCorrelations& c) {
    double s = 0;
    for (const Pauli a : {Pauli::X, Pauli::Y})
        for (const Pauli b : {Pauli::X, Pauli::Y}) s += std::pow(c.at(a, b), 2);
    return s;
}

inline Estimate estimate_Q(const QubitCorrelations& c) {
    return {compute_Q(c), c.standard_error(Pauli::Z, Pauli::Z) / 2.0};
}

inline Estimate estimate_C(const QubitCorrelations& c) {
    double var = 0;
    for (const Pauli a : {Pauli::X, Pauli::Y})
        for (const Pauli b : {Pauli::X, Pauli::Y}) var += std::pow(2.0 * c.at(a, b) * c.standard_error(a, b), 2);
    return {compute_C(c), std::sqrt(var)};
}

// ---------- transcript text format ----------
//
//   #dims 2 2
//   #n 1000000
//   #seed 42
//   #drift walk:0:0.001:7
//   X Z 0 1 12345
//
// One line per nonzero count: aliceBasis bobBasis aliceOutcome bobOutcome count.
// Qubit bases are written X/Y/Z, qutrit bases 1..4.

inline void write_transcript(std::ostream& os, const Transcript& t) {
    os << "#dims " << t.dims.alice << ' ' << t.dims.bob << '\n';
    os << "#n " << t.n_signals << '\n';
    os << "#seed " << t.seed << '\n';
    os << "#drift " << t.drift << '\n';
    for (const auto& [k, c] : t.counts) {
        os << basis_label(t.dims.alice, k.alice_basis) << ' ' << basis_label(t.dims.bob, k.bob_basis) << ' '
           << int{k.alice_outcome} << ' ' << int{k.bob_outcome} << ' ' << c << '\n';
    }
}

inline std::size_t parse_basis_label(std::size_t d, const std::string& s) {
    if (d == 2) {
        if (s == "X") return 0;
        if (s == "Y") return 1;
        if (s == "Z") return 2;
    } else if (s.size() == 1 && s[0] >= '1' && s[0] <= '4') {
        return static_cast<std::size_t>(s[0] - '1');
    }
    throw std::invalid_argument("transcript: bad basis label '" + s + "'");
}

inline Transcript read_transcript(std::istream& is) {
    Transcript t;
    t.counts.clear();
    bool have_dims = false;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string key;
            ls >> key;
            if (key == "#dims") {
                ls >> t.dims.alice >> t.dims.bob;
                have_dims = true;
            } else if (key == "#n") {
                ls >> t.n_signals;
            } else if (key == "#seed") {
                ls >> t.seed;
            } else if (key == "#drift") {
                ls >> t.drift;
            }
            if (ls.fail()) throw std::invalid_argument("transcript: malformed header line '" + line + "'");
            continue;
        }
        if (!have_dims) throw std::invalid_argument("transcript: #dims must precede count lines");
        std::string ab, bb;
        int x = -1, y = -1;
        std::uint64_t c = 0;
        ls >> ab >> bb >> x >> y >> c;
        if (ls.fail() || x < 0 || y < 0) throw std::invalid_argument("transcript: malformed count line '" + line + "'");
        const CountKey key{static_cast<std::uint8_t>(parse_basis_label(t.dims.alice, ab)),
                           static_cast<std::uint8_t>(parse_basis_label(t.dims.bob, bb)), static_cast<std::uint8_t>(x),
                           static_cast<std::uint8_t>(y)};
        t.counts[key] += c;
    }
    t.validate();
    return t;
}

}  // namespace rfiqkd
