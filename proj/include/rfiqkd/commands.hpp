// commands.hpp
// Subcommand implementations behind the rfiqkd CLI. Each run_* validates its
// config before computing, writes its report to `out`, diagnostics to `err`,
// and returns the process exit code.

#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "photonic.hpp"
#include "protocol.hpp"
#include "qutrit.hpp"
#include "security.hpp"

namespace rfiqkd {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerificationFailure = 1,
    kExitConfigError = 2,
    kExitInsufficientData = 3,
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

/// Runs `body`, mapping config and data errors onto exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInsufficientData;
    }
}

inline void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

inline void write_meta(std::ostream& out, const std::string& command) {
    out << "#schema=1\n#command=" << command << '\n';
}

}  // namespace detail

// ---------- rates ----------

struct RatesConfig {
    double qmin = 0.0;
    double qmax = 0.15;
    int steps = 151;
    std::optional<double> c_const;  // C(Q) = constant
    std::vector<double> c_poly;     // C(Q) = Σ a_k Q^k
};

inline std::vector<double> rates_grid(const RatesConfig& cfg) {
    if (cfg.qmax == cfg.qmin || cfg.steps == 1) return {cfg.qmin};
    std::vector<double> q(static_cast<std::size_t>(cfg.steps));
    for (int i = 0; i < cfg.steps; ++i) q[static_cast<std::size_t>(i)] = cfg.qmin + (cfg.qmax - cfg.qmin) * i / (cfg.steps - 1);
    return q;
}

inline CofQ rates_source(const RatesConfig& cfg) {
    if (cfg.c_const) {
        const double c = *cfg.c_const;
        return [c](double) { return c; };
    }
    if (!cfg.c_poly.empty()) {
        const std::vector<double> a = cfg.c_poly;
        return [a](double q) {
            double s = 0;
            for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * q + *it;
            return s;
        };
    }
    return werner_C;
}

inline void validate(const RatesConfig& cfg) {
    using detail::require;
    require(cfg.qmin >= 0.0 && cfg.qmin < 0.5, "--qmin must lie in [0, 0.5)");
    require(cfg.qmax >= cfg.qmin && cfg.qmax < 0.5, "--qmax must lie in [qmin, 0.5)");
    require(cfg.steps >= 1, "--steps must be >= 1");
    require(!(cfg.c_const && !cfg.c_poly.empty()), "--c-const and --c-poly are mutually exclusive");
    if (cfg.c_const) require(*cfg.c_const >= 0.0, "--c-const must be nonnegative");
    const CofQ c = rates_source(cfg);
    for (const double q : rates_grid(cfg)) {
        require(c(q) >= 0.0, "C(Q) must be nonnegative on the grid (Q=" + detail::format_double(q) + ")");
    }
}

inline int run_rates(const RatesConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        validate(cfg);
        const auto grid = rates_grid(cfg);
        const CofQ c_of_q = rates_source(cfg);
        const auto curve = key_rate_curve(grid, c_of_q);
        write_key_rate_csv(out, curve);
        const auto zero = locate_rate_crossing(curve, c_of_q);
        out << "#zero_crossing=" << (zero ? detail::format_double(*zero) : std::string("none")) << '\n';
        return int{kExitOk};
    });
}

// ---------- simulate ----------

struct SimulateConfig {
    std::uint64_t n = 1'000'000;
    std::uint64_t seed = 1;
    std::string drift = "constant:0";
    double noise = 0.0;  // Werner QBER of the source
    std::vector<double> bases{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    std::string transcript_path;
};

inline void validate(const SimulateConfig& cfg) {
    using detail::require;
    require(cfg.n >= 1, "--n must be >= 1");
    require(cfg.noise >= 0.0 && cfg.noise <= 0.5, "--noise must lie in [0, 0.5]");
    try {
        parse_drift(cfg.drift, cfg.seed);
        BasisChoice{cfg.bases, cfg.bases}.validate(3);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace detail {

inline void write_security_row(std::ostream& out, const std::string& label, Estimate q, Estimate c) {
    const SecurityEstimate s = eve_information(std::clamp(q.value, 0.0, 0.5 - 1e-12), c.value);
    const Estimate r = key_rate_estimate(s.Q, q.standard_error, c.value, c.standard_error);
    out << label << ',' << format_double(q.value) << ',' << format_double(q.standard_error) << ','
        << format_double(c.value) << ',' << format_double(c.standard_error) << ',' << format_double(s.I_E) << ','
        << format_double(s.r) << ',' << format_double(r.standard_error) << ',' << format_double(s.u_opt) << ','
        << format_double(s.v_opt) << ',' << to_string(s.method) << ',' << (s.feasible ? 1 : 0) << '\n';
}

}  // namespace detail

inline int run_simulate(const SimulateConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        validate(cfg);
        const FrameDriftModel drift = parse_drift(cfg.drift, cfg.seed);
        const DensityMatrix source = werner_state(cfg.noise);
        const Transcript t = sample_transcript(source, cfg.n, BasisChoice{cfg.bases, cfg.bases}, drift, cfg.seed);
        if (!cfg.transcript_path.empty()) {
            std::ofstream f(cfg.transcript_path);
            if (!f) throw ConfigError("cannot open transcript path '" + cfg.transcript_path + "'");
            write_transcript(f, t);
        }
        const QubitCorrelations est = estimate_qubit_correlations(t);
        const QubitCorrelations exact = exact_qubit_correlations(source);

        detail::write_meta(out, "simulate");
        out << "#n=" << cfg.n << "\n#seed=" << cfg.seed << "\n#drift=" << to_string(drift)
            << "\n#noise=" << detail::format_double(cfg.noise) << '\n';
        out << "source,Q,Q_se,C,C_se,I_E,r,r_se,u_opt,v_opt,method,feasible\n";
        detail::write_security_row(out, "estimated", estimate_Q(est), estimate_C(est));
        detail::write_security_row(out, "exact", estimate_Q(exact), estimate_C(exact));
        return int{kExitOk};
    });
}

// ---------- qutrit ----------

struct QutritConfig {
    std::uint64_t n = 1'000'000;
    std::uint64_t seed = 1;
    std::string phase_drift = "none";
    double visibility = 1.0;  // weight of the Bell state against white noise
    bool device = false;      // sample through the photonic measurement devices
    std::array<double, 3> reflectivities{0.5, 0.5, 0.5};
};

inline void validate(const QutritConfig& cfg) {
    using detail::require;
    require(cfg.n >= 1, "--n must be >= 1");
    require(cfg.visibility >= 0.0 && cfg.visibility <= 1.0, "--visibility must lie in [0, 1]");
    PhaseDriftModel m;
    try {
        m = parse_phase_drift(cfg.phase_drift, cfg.seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.device) {
        require(m.kind == PhaseDriftKind::None || m.kind == PhaseDriftKind::Fixed || m.kind == PhaseDriftKind::RandomFixed,
                "--device supports only static phases (none, fixed, random)");
        for (const double r : cfg.reflectivities) require(r > 0.0 && r < 1.0, "--reflectivities must lie in (0, 1)");
    }
}

inline int run_qutrit(const QutritConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        validate(cfg);
        const PhaseDriftModel drift = parse_phase_drift(cfg.phase_drift, cfg.seed);
        const DensityMatrix source = isotropic_qutrit_state(cfg.visibility);
        Transcript t;
        if (cfg.device) {
            const PhaseTrajectory phases(drift);
            const DensityMatrix seen = source.with_bob_unitary(phase_drift_unitary(phases.phi1(), phases.phi2()));
            const Povm povm = measurement_device(cfg.reflectivities);
            t = sample_povm_transcript(seen, povm, povm, cfg.n, cfg.seed);
            t.drift = to_string(drift);
        } else {
            t = sample_qutrit_transcript(source, cfg.n, BasisChoice::uniform(4), drift, cfg.seed);
        }
        const C3Estimate sampled = compute_C3_estimate(estimate_qutrit_correlations(t));
        const double exact = compute_C3(expectation_table(source));

        using detail::format_double;
        detail::write_meta(out, "qutrit");
        out << "#n=" << cfg.n << "\n#seed=" << cfg.seed << "\n#phase_drift=" << to_string(drift)
            << "\n#visibility=" << format_double(cfg.visibility) << "\n#device=" << (cfg.device ? 1 : 0) << '\n';
        out << "source,C3,C3_se,C3_bias_bound\n";
        out << "exact," << format_double(exact) << ",0,0\n";
        out << "sampled," << format_double(sampled.value) << ',' << format_double(sampled.standard_error) << ','
            << format_double(sampled.bias_bound) << '\n';
        return int{kExitOk};
    });
}

// ---------- chip-verify ----------

struct ChipVerifyConfig {
    bool inject_dc3_fault = false;
    std::array<double, 3> reflectivities{0.5, 0.5, 0.5};
};

inline int run_chip_verify(const ChipVerifyConfig& cfg, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        for (const double r : cfg.reflectivities) detail::require(r > 0.0 && r < 1.0, "--reflectivities must lie in (0, 1)");
        const CouplerSet couplers = cfg.inject_dc3_fault ? CouplerSet::with_faulty_dc3() : CouplerSet::nominal();
        const ChipVerification v = verify_chips(couplers, cfg.reflectivities);

        using detail::format_double;
        detail::write_meta(out, "chip-verify");
        out << "check,residual,tolerance,status\n";
        for (const auto& c : v.checks) {
            out << c.name << ',' << format_double(c.residual) << ',' << format_double(c.tolerance) << ','
                << (c.passed() ? "ok" : "FAIL") << '\n';
        }
        out << "#povm_elements=" << v.device.elements.size() << '\n';
        out << "basis,outcome,branch_probability,trace\n";
        for (const auto& e : v.device.elements) {
            out << e.basis + 1 << ',' << e.outcome << ',' << format_double(v.device.branch_probabilities[e.basis]) << ','
                << format_double(e.element.trace().real()) << '\n';
        }
        for (std::size_t b = 0; b < 3; ++b) {
            const auto& a = v.device.variants[b];
            out << "#variant tau" << b + 2 << ": modes " << a.placement[0] << ',' << a.placement[1] << " phases "
                << a.phase_steps[0] << "*2pi/3," << a.phase_steps[1] << "*2pi/3\n";
        }
        out << "#result=" << (v.passed() ? "PASS" : "FAIL") << '\n';
        if (!v.passed()) {
            for (const auto& c : v.checks)
                if (!c.passed()) err << "failed: " << c.name << " (residual " << format_double(c.residual) << ")\n";
            return int{kExitVerificationFailure};
        }
        return int{kExitOk};
    });
}

}  // namespace rfiqkd
