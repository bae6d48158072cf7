// channel.hpp
// Reference-frame rotation, drift of the frame angle, and Kraus channels.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "linalg.hpp"
#include "qstate.hpp"

namespace rfiqkd {

/// Bob's frame rotation about Z: U(β) = diag(e^{iβ/2}, e^{-iβ/2}).
/// Satisfies U†XU = cosβ X + sinβ Y and U†YU = cosβ Y - sinβ X, so a
/// state transformed as (I⊗U)ρ(I⊗U)† shows Bob the rotated X_B, Y_B.
inline ComplexMatrix frame_rotation_unitary(double beta) {
    const cplx phase = std::polar(1.0, beta / 2.0);
    return {{phase, 0}, {0, std::conj(phase)}};
}

inline DensityMatrix rotate_bob_frame(const DensityMatrix& rho, double beta) {
    return rho.with_bob_unitary(frame_rotation_unitary(beta));
}

enum class Subsystem { A, B, Both };

class KrausChannel {
public:
    explicit KrausChannel(std::vector<ComplexMatrix> operators) : ops_(std::move(operators)) {
        if (ops_.empty()) throw std::invalid_argument("KrausChannel: empty operator list");
        const std::size_t d = ops_.front().dim();
        ComplexMatrix sum(d);
        for (const auto& k : ops_) {
            if (k.dim() != d) throw std::invalid_argument("KrausChannel: operators differ in dimension");
            sum += k.adjoint() * k;
        }
        if (!approx_equal(sum, ComplexMatrix::identity(d), kEigenTol)) {
            throw std::invalid_argument("KrausChannel: sum K†K != I (not trace preserving)");
        }
    }

    std::size_t dim() const noexcept { return ops_.front().dim(); }
    const std::vector<ComplexMatrix>& operators() const noexcept { return ops_; }

private:
    std::vector<ComplexMatrix> ops_;
};

inline KrausChannel identity_channel(std::size_t dim) {
    return KrausChannel({ComplexMatrix::identity(dim)});
}

/// Qubit depolarizing: {√(1-3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}.
inline KrausChannel depolarizing_channel(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("depolarizing_channel: p must lie in [0, 1]");
    const double a = std::sqrt(1.0 - 3.0 * p / 4.0);
    const double b = std::sqrt(p / 4.0);
    return KrausChannel({ComplexMatrix::identity(2) * a, pauli_matrix(Pauli::X) * b,
                         pauli_matrix(Pauli::Y) * b, pauli_matrix(Pauli::Z) * b});
}

inline DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch, Subsystem where) {
    const Dims dims = rho.dims();
    const auto& ops = ch.operators();
    std::vector<ComplexMatrix> joint;
    switch (where) {
        case Subsystem::A:
            if (ch.dim() != dims.alice) throw std::invalid_argument("apply_channel: channel dim != d_A");
            for (const auto& k : ops) joint.push_back(tensor_product(k, ComplexMatrix::identity(dims.bob)));
            break;
        case Subsystem::B:
            if (ch.dim() != dims.bob) throw std::invalid_argument("apply_channel: channel dim != d_B");
            for (const auto& k : ops) joint.push_back(tensor_product(ComplexMatrix::identity(dims.alice), k));
            break;
        case Subsystem::Both:
            if (ch.dim() != dims.alice || ch.dim() != dims.bob) {
                throw std::invalid_argument("apply_channel: channel dim must match both subsystems");
            }
            for (const auto& ka : ops)
                for (const auto& kb : ops) joint.push_back(tensor_product(ka, kb));
            break;
    }
    ComplexMatrix out(rho.dim());
    for (const auto& k : joint) out += conjugate_by(rho.matrix(), k);
    out = (out + out.adjoint()) * 0.5;
    return {dims, std::move(out)};
}

// ---------- frame drift ----------

enum class DriftKind { Constant, LinearRamp, RandomWalk };

/// β as a function of the signal index.
struct FrameDriftModel {
    DriftKind kind = DriftKind::Constant;
    double beta0 = 0.0;
    double rate = 0.0;  // ramp slope, or random-walk step standard deviation
    std::uint64_t seed = 0;

    static FrameDriftModel constant(double beta0) { return {DriftKind::Constant, beta0, 0.0, 0}; }
    static FrameDriftModel ramp(double beta0, double rate) { return {DriftKind::LinearRamp, beta0, rate, 0}; }
    static FrameDriftModel walk(double beta0, double step, std::uint64_t seed) {
        return {DriftKind::RandomWalk, beta0, step, seed};
    }

    friend bool operator==(const FrameDriftModel&, const FrameDriftModel&) = default;
};

/// Sequential evaluation of a drift model: value() is β at index(), advance() moves to the
/// next signal. The random walk draws its steps from a generator seeded by the model only.
class DriftTrajectory {
public:
    explicit DriftTrajectory(const FrameDriftModel& model)
        : model_(model), beta_(model.beta0), rng_(seeded_engine(model.seed, 0x5eed)) {}

    double value() const noexcept { return beta_; }
    std::uint64_t index() const noexcept { return n_; }

    void advance() {
        ++n_;
        switch (model_.kind) {
            case DriftKind::Constant: break;
            case DriftKind::LinearRamp: beta_ = model_.beta0 + model_.rate * static_cast<double>(n_); break;
            case DriftKind::RandomWalk: beta_ += model_.rate * step_(rng_); break;
        }
    }

private:
    FrameDriftModel model_;
    double beta_;
    std::uint64_t n_ = 0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> step_{0.0, 1.0};
};

/// β at signal n. O(n) for the random walk; samplers use DriftTrajectory directly.
inline double beta_at(const FrameDriftModel& model, std::uint64_t n) {
    switch (model.kind) {
        case DriftKind::Constant: return model.beta0;
        case DriftKind::LinearRamp: return model.beta0 + model.rate * static_cast<double>(n);
        case DriftKind::RandomWalk: {
            DriftTrajectory t(model);
            while (t.index() < n) t.advance();
            return t.value();
        }
    }
    return model.beta0;
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw std::invalid_argument(std::string(what) + ": cannot parse number '" + std::string(s) + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        throw std::invalid_argument(std::string(what) + ": cannot parse integer '" + std::string(s) + "'");
    }
    return v;
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parses `constant:B0`, `ramp:B0:RATE` or `walk:B0:STEP[:SEED]`. A walk without an
/// explicit seed uses `default_seed`.
inline FrameDriftModel parse_drift(std::string_view spec, std::uint64_t default_seed = 0) {
    const auto parts = detail::split(spec, ':');
    const std::string& kind = parts.front();
    if (kind == "constant" && parts.size() == 2) {
        return FrameDriftModel::constant(detail::parse_double(parts[1], "drift beta0"));
    }
    if (kind == "ramp" && parts.size() == 3) {
        return FrameDriftModel::ramp(detail::parse_double(parts[1], "drift beta0"),
                                     detail::parse_double(parts[2], "drift rate"));
    }
    if (kind == "walk" && (parts.size() == 3 || parts.size() == 4)) {
        const double step = detail::parse_double(parts[2], "drift step");
        if (step < 0) throw std::invalid_argument("drift: walk step must be nonnegative");
        return FrameDriftModel::walk(detail::parse_double(parts[1], "drift beta0"), step,
                                     parts.size() == 4 ? detail::parse_u64(parts[3], "drift seed") : default_seed);
    }
    throw std::invalid_argument("drift: expected constant:B0, ramp:B0:RATE or walk:B0:STEP[:SEED], got '" +
                                std::string(spec) + "'");
}

inline std::string to_string(const FrameDriftModel& m) {
    switch (m.kind) {
        case DriftKind::Constant: return "constant:" + detail::format_double(m.beta0);
        case DriftKind::LinearRamp:
            return "ramp:" + detail::format_double(m.beta0) + ":" + detail::format_double(m.rate);
        case DriftKind::RandomWalk:
            return "walk:" + detail::format_double(m.beta0) + ":" + detail::format_double(m.rate) + ":" +
                   std::to_string(m.seed);
    }
    return "constant:0";
}

}  // namespace rfiqkd
