#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rfiqkd/protocol.hpp"
#include "rfiqkd/qutrit.hpp"

using namespace rfiqkd;

namespace {

constexpr std::array<int, 8> kIdx{1, 2, 3, 4, -1, -2, -3, -4};

std::vector<DensityMatrix> random_qutrit_states(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<DensityMatrix> out;
    for (int i = 0; i < n; ++i) out.push_back(random_density_matrix({3, 3}, rng));
    return out;
}

}  // namespace

TEST(Weyl, UnitaryOrderThreeAndTraceless) {
    const WeylSet w;
    for (const int i : kIdx) {
        EXPECT_TRUE(is_unitary(w(i)));
        EXPECT_LT(max_abs_diff(w(i) * w(i) * w(i), ComplexMatrix::identity(3)), 1e-12);
        EXPECT_LT(std::abs(w(i).trace()), 1e-12);
    }
    for (int k = 1; k <= 4; ++k) EXPECT_LT(max_abs_diff(w(-k), w(k).adjoint()), 1e-15);
}

TEST(Weyl, GeneratorsAreClockAndShiftProducts) {
    const WeylSet w;
    const ComplexMatrix x = shift_matrix(), z = clock_matrix();
    EXPECT_LT(max_abs_diff(w(1), z), 1e-15);
    EXPECT_LT(max_abs_diff(w(2), x), 1e-15);
    EXPECT_LT(max_abs_diff(w(3), x * z), 1e-15);
    EXPECT_LT(max_abs_diff(w(4), x * z * z), 1e-15);
    // Z X = ω X Z
    EXPECT_LT(max_abs_diff(z * x, x * z * omega3()), 1e-15);
}

TEST(Weyl, DistinctGeneratorsAreHilbertSchmidtOrthogonal) {
    const WeylSet w;
    for (const int i : kIdx)
        for (const int j : kIdx) {
            const cplx ip = oracle::trace_via_product(w(i).adjoint(), w(j)) / 3.0;
            EXPECT_NEAR(std::abs(ip), i == j ? 1.0 : 0.0, 1e-12) << i << ',' << j;
        }
}

TEST(Weyl, OrderMustBePermutation) {
    EXPECT_THROW(WeylSet({0, 0, 1}), std::invalid_argument);
    EXPECT_THROW(WeylSet({0, 1, 3}), std::invalid_argument);
    EXPECT_THROW(WeylSet{}(5), std::out_of_range);
}

TEST(Mub, EigenbasesDiagonalizeTheirOperators) {
    const WeylSet w;
    const MubFamily f = mub_family(w);
    for (int b = 0; b < 4; ++b) {
        const ComplexMatrix& v = f.bases[static_cast<std::size_t>(b)];
        EXPECT_TRUE(is_unitary(v));
        for (std::size_t k = 0; k < 3; ++k) {
            const ComplexVector col = v.column(k);
            const ComplexVector tv = w(b + 1) * std::span<const cplx>(col);
            const cplx ev = std::pow(omega3(), static_cast<double>(k));
            for (std::size_t r = 0; r < 3; ++r) EXPECT_LT(std::abs(tv[r] - ev * col[r]), 1e-12);
        }
    }
}

TEST(Mub, MutuallyUnbiased) {
    const MubFamily f = mub_family();
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t k = 0; k < 3; ++k) {
                    const double ov = std::norm(inner(f.bases[a].column(j), f.bases[b].column(k)));
                    EXPECT_NEAR(ov, a == b ? (j == k ? 1.0 : 0.0) : 1.0 / 3.0, 1e-12);
                }
}

TEST(QutritBell, CorrelationsMatchTransposeTraceRule) {
    // <A⊗B> on (|00>+|11>+|22>)/√3 equals Tr(A Bᵀ)/3.
    const WeylSet w;
    const QutritCorrelations e = expectation_table(qutrit_bell());
    for (const int i : kIdx)
        for (const int j : kIdx) {
            const cplx expected = oracle::trace_via_product(w(i), w(j).transpose()) / 3.0;
            EXPECT_LT(std::abs(e.at(i, j) - expected), 1e-12) << i << ',' << j;
        }
    EXPECT_LT(std::abs(e.at(1, -1) - cplx{1.0}), 1e-15);
}

TEST(C3, BellStateAttainsThree) {
    const QutritCorrelations e = expectation_table(qutrit_bell());
    EXPECT_NEAR(compute_C3(e), 3.0, 1e-12);
    EXPECT_NEAR(std::abs(e.at(2, 2)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e.at(3, 4)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(e.at(4, 3)), 1.0, 1e-12);
}

TEST(C3, IsotropicStateScalesQuadratically) {
    for (const double p : {0.0, 0.25, 0.5, 0.8, 1.0}) EXPECT_NEAR(compute_C3(expectation_table(isotropic_qutrit_state(p))), 3 * p * p, 1e-12);
    EXPECT_THROW(isotropic_qutrit_state(1.1), std::domain_error);
}

TEST(C3, InvariantUnderGeneratorRelabelling) {
    const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    for (const DensityMatrix& r : random_qutrit_states(20, 5)) {
        const double base = compute_C3(expectation_table(r));
        for (const auto& p : perms) EXPECT_NEAR(compute_C3(expectation_table(r, WeylSet(p))), base, 1e-12);
    }
}

TEST(C3, InvariantUnderBobPhaseDrift) {
    std::vector<DensityMatrix> states{qutrit_bell(), isotropic_qutrit_state(0.7)};
    states.push_back(random_qutrit_states(1, 6).front());
    for (const DensityMatrix& r : states) {
        const double base = compute_C3(expectation_table(r));
        for (int a = 0; a < 20; ++a)
            for (int b = 0; b < 20; ++b) {
                const DensityMatrix d = r.with_bob_unitary(phase_drift_unitary(2 * kPi * a / 20, 2 * kPi * b / 20));
                EXPECT_NEAR(compute_C3(expectation_table(d)), base, 1e-12);
            }
    }
}

TEST(C3, BoundedByThreeOnRandomStates) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    double largest = 0;
    for (int t = 0; t < 1000; ++t) {
        if (t % 2 == 0) {
            const DensityMatrix r = random_density_matrix({3, 3}, rng);
            largest = std::max(largest, compute_C3(expectation_table(r)));
        } else {
            ComplexVector psi(9);
            for (auto& z : psi) z = {g(rng), g(rng)};
            const DensityMatrix r = DensityMatrix::from_pure({3, 3}, psi);
            largest = std::max(largest, compute_C3(expectation_table(r)));
        }
    }
    EXPECT_LE(largest, 3.0 + 1e-12);
    EXPECT_GT(largest, 0.0);
}

TEST(C3, PhaseDriftUnitaryIsDiagonalUnitary) {
    const ComplexMatrix u = phase_drift_unitary(0.3, -1.2);
    EXPECT_TRUE(is_unitary(u));
    EXPECT_EQ(u(0, 0), cplx{1.0});
    EXPECT_NEAR(std::arg(u(1, 1)), 0.3, 1e-15);
    EXPECT_NEAR(std::arg(u(2, 2)), -1.2, 1e-15);
}

TEST(PhaseDrift, ParseRoundTrip) {
    EXPECT_EQ(parse_phase_drift("none").kind, PhaseDriftKind::None);
    const PhaseDriftModel f = parse_phase_drift("fixed:0.5:1.5");
    EXPECT_EQ(f.kind, PhaseDriftKind::Fixed);
    EXPECT_EQ(f.phi1, 0.5);
    EXPECT_EQ(parse_phase_drift("random", 9).seed, 9u);
    EXPECT_EQ(parse_phase_drift("iid:4", 9).seed, 4u);
    EXPECT_EQ(parse_phase_drift("walk:0.01:2").step, 0.01);
    for (const char* s : {"none", "fixed:0.25:-1", "random:3", "iid:5", "walk:0.001:8"}) {
        EXPECT_EQ(parse_phase_drift(to_string(parse_phase_drift(s))), parse_phase_drift(s)) << s;
    }
    for (const char* bad : {"", "fixed:1", "random:x", "walk:-1", "spin"}) {
        EXPECT_THROW(parse_phase_drift(bad), std::invalid_argument) << bad;
    }
}

TEST(PhaseDrift, RandomDrawIsFixedPerRunAndIidChanges) {
    PhaseTrajectory fixed(parse_phase_drift("random:3"));
    const double p1 = fixed.phi1();
    EXPECT_FALSE(fixed.advance());
    EXPECT_EQ(fixed.phi1(), p1);
    PhaseTrajectory iid(parse_phase_drift("iid:3"));
    const double q1 = iid.phi1();
    EXPECT_TRUE(iid.advance());
    EXPECT_NE(iid.phi1(), q1);
}

TEST(QutritSampling, EstimatesMatchExactTable) {
    const DensityMatrix rho = isotropic_qutrit_state(0.8);
    const Transcript t = sample_qutrit_transcript(rho, 400000, BasisChoice::uniform(4), PhaseDriftModel{}, 11);
    const QutritCorrelations est = estimate_qutrit_correlations(t);
    const QutritCorrelations ex = expectation_table(rho);
    for (int i = 2; i <= 4; ++i)
        for (const int j : {2, 3, 4, -2, -3, -4}) {
            const double se = est.standard_error(i, j);
            EXPECT_LT(std::abs(est.at(i, j) - ex.at(i, j)), 5 * std::sqrt(2.0) * se + 1e-12) << i << ',' << j;
        }
    const C3Estimate c3 = compute_C3_estimate(est);
    EXPECT_LT(std::abs(c3.value - 1.92), 5 * c3.standard_error + c3.bias_bound);
}

TEST(QutritSampling, FixedUnknownPhasesLeaveC3AtThree) {
    const Transcript t = sample_qutrit_transcript(qutrit_bell(), 300000, BasisChoice::uniform(4), parse_phase_drift("random:21"), 2);
    const C3Estimate c3 = compute_C3_estimate(estimate_qutrit_correlations(t));
    EXPECT_LT(std::abs(c3.value - 3.0), 5 * c3.standard_error + c3.bias_bound);
}

TEST(QutritSampling, IidPhasesSmearC3) {
    const Transcript t = sample_qutrit_transcript(qutrit_bell(), 200000, BasisChoice::uniform(4), parse_phase_drift("iid:21"), 2);
    const C3Estimate c3 = compute_C3_estimate(estimate_qutrit_correlations(t));
    EXPECT_LT(c3.value, 3.0 - 10 * c3.standard_error - c3.bias_bound);
    EXPECT_LT(c3.value, 1.0);
}

TEST(QutritSampling, MissingPairIsReported) {
    const Transcript t = sample_qutrit_transcript(qutrit_bell(), 1000, BasisChoice::forced(4, 1, 1), PhaseDriftModel{}, 2);
    EXPECT_THROW(estimate_qutrit_correlations(t), InsufficientDataError);
}
