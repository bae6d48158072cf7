// security.hpp
// Bell-diagonal reduction of a two-qubit state and Eve's information I_E(Q, C)
// under collective attacks, giving the secret key rate r = 1 - h(Q) - I_E.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "channel.hpp"
#include "correlations.hpp"
#include "linalg.hpp"
#include "qstate.hpp"

namespace rfiqkd {

/// Largest Q for which I_E is taken at u_max without a numeric search.
inline constexpr double kClosedFormQMax = 0.159;

/// Binary entropy in bits; arguments within 1e-15 of 0 or 1 give exactly 0.
inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
    if (x < 1e-15 || x > 1.0 - 1e-15) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// ---------- twirling ----------

/// Applies ρ̃ = ½(ρ + ZZ ρ ZZ) and then ρ' = ½(ρ̃ + XX ρ̃* XX). The second
/// step maps the Bell-block coherences a -> -a*, leaving only i·Im(a).
inline DensityMatrix twirl(const DensityMatrix& rho) {
    if (!(rho.dims() == Dims{2, 2})) throw std::invalid_argument("twirl: expected a two-qubit state");
    const ComplexMatrix zz = tensor_product(pauli_matrix(Pauli::Z), pauli_matrix(Pauli::Z));
    const ComplexMatrix xx = tensor_product(pauli_matrix(Pauli::X), pauli_matrix(Pauli::X));
    const ComplexMatrix tilde = (rho.matrix() + zz * rho.matrix() * zz) * 0.5;
    const ComplexMatrix prime = (tilde + xx * tilde.conj() * xx) * 0.5;
    return {rho.dims(), prime};
}

struct BellDiagonalSpectrum {
    std::array<double, 4> lambdas{};  // λ1 >= λ2 (Φ block), λ3 >= λ4 (Ψ block)
    double chi = 0.0;
    double chi_prime = 0.0;

    /// 2[(λ1-λ2)² + (λ3-λ4)²]
    double C() const {
        return 2.0 * (std::pow(lambdas[0] - lambdas[1], 2) + std::pow(lambdas[2] - lambdas[3], 2));
    }
    /// λ3 + λ4
    double Q() const { return lambdas[2] + lambdas[3]; }
};

namespace detail {

/// Phase angle of the dominant eigenvector of a Bell block, read off the
/// relative phase of its two computational components (e^{iχ}, ±e^{-iχ}).
inline double block_phase(const ComplexMatrix& rho, std::size_t lo, std::size_t hi) {
    ComplexMatrix block{{rho(lo, lo), rho(lo, hi)}, {rho(hi, lo), rho(hi, hi)}};
    const HermitianEigen eig = eigh(block);
    if (eig.values[1] - eig.values[0] < 1e-14) return 0.0;
    const cplx c_lo = eig.vectors(0, 1), c_hi = eig.vectors(1, 1);
    if (std::abs(c_lo) < 1e-14 || std::abs(c_hi) < 1e-14) return 0.0;
    return 0.5 * std::arg(c_lo / c_hi);
}

}  // namespace detail

/// λ1,2 = ½(μ1 + μ2 ± A'), A' = √((μ1-μ2)² + A²), A = Im(a), and likewise for
/// λ3,4 from (μ3, μ4, B). χ, χ' come from the eigenvectors of the twirled state.
inline BellDiagonalSpectrum bell_spectrum(const DensityMatrix& rho) {
    if (!(rho.dims() == Dims{2, 2})) throw std::invalid_argument("bell_spectrum: expected a two-qubit state");
    const DensityMatrix t = twirl(rho);
    const ComplexMatrix& m = t.matrix();
    std::array<ComplexVector, 4> bell{bell_vector(1), bell_vector(2), bell_vector(3), bell_vector(4)};
    std::array<double, 4> mu{};
    for (std::size_t k = 0; k < 4; ++k) mu[k] = quadratic_form(m, bell[k]).real();
    // a/2 = <Φ-|ρ|Φ+>, b/2 = <Ψ-|ρ|Ψ+>
    const cplx a = 2.0 * inner(bell[1], m * std::span<const cplx>(bell[0]));
    const cplx b = 2.0 * inner(bell[3], m * std::span<const cplx>(bell[2]));
    const double ap = std::hypot(mu[0] - mu[1], a.imag());
    const double bp = std::hypot(mu[2] - mu[3], b.imag());

    BellDiagonalSpectrum s;
    s.lambdas = {0.5 * (mu[0] + mu[1] + ap), 0.5 * (mu[0] + mu[1] - ap), 0.5 * (mu[2] + mu[3] + bp),
                 0.5 * (mu[2] + mu[3] - bp)};
    for (double& l : s.lambdas) l = std::clamp(l, 0.0, 1.0);
    s.chi = detail::block_phase(m, 0, 3);        // |00>, |11>
    s.chi_prime = detail::block_phase(m, 1, 2);  // |01>, |10>
    return s;
}

// ---------- Eve's information ----------

enum class BoundMethod { ClosedForm, Numeric, None };

inline std::string to_string(BoundMethod m) {
    switch (m) {
        case BoundMethod::ClosedForm: return "closed-form";
        case BoundMethod::Numeric: return "numeric";
        case BoundMethod::None: return "none";
    }
    return "none";
}

struct SecurityEstimate {
    double Q = 0.0;
    double C = 0.0;
    double I_E = std::numeric_limits<double>::quiet_NaN();
    double r = std::numeric_limits<double>::quiet_NaN();
    double u_opt = std::numeric_limits<double>::quiet_NaN();
    double v_opt = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;
    BoundMethod method = BoundMethod::None;
};

/// (1-Q) h((1+u)/2) + Q h((1+v)/2)
inline double eve_information_uv(double Q, double u, double v) {
    return (1.0 - Q) * binary_entropy((1.0 + u) / 2.0) + Q * binary_entropy((1.0 + v) / 2.0);
}

/// Largest C compatible with Q: 2[(1-Q)² + Q²].
inline double max_feasible_C(double Q) { return 2.0 * ((1.0 - Q) * (1.0 - Q) + Q * Q); }

/// Feasible u interval for (Q > 0, C) on the constraint C = 2[(1-Q)²u² + Q²v²].
struct UInterval {
    double lo = 0.0;
    double hi = 0.0;
};

inline UInterval u_interval(double Q, double C) {
    const double half = C / 2.0;
    const double lo = std::sqrt(std::max(half - Q * Q, 0.0)) / (1.0 - Q);
    const double hi = std::min(std::sqrt(half) / (1.0 - Q), 1.0);
    return {std::min(lo, hi), hi};
}

/// v(u) = √(C/2 - (1-Q)²u²)/Q, clamped to [0, 1].
inline double v_of_u(double Q, double C, double u) {
    const double rad = C / 2.0 - (1.0 - Q) * (1.0 - Q) * u * u;
    return std::min(std::sqrt(std::max(rad, 0.0)) / Q, 1.0);
}

/// I_E along the constraint, as a function of u.
inline double eve_information_along(double Q, double C, double u) {
    return eve_information_uv(Q, u, v_of_u(Q, C, u));
}

/// dI_E/du along the constraint:
/// (1-Q)/2 · [(1-Q) u L(v) / (Q v) - L(u)], L(x) = log2((1+x)/(1-x)), L(v)/v -> 2/ln 2 at v = 0.
inline double eve_information_slope(double Q, double C, double u) {
    const auto L = [](double x) { return x >= 1.0 ? INFINITY : std::log2((1.0 + x) / (1.0 - x)); };
    const double v = v_of_u(Q, C, u);
    const double lv_over_v = v < 1e-8 ? 2.0 / std::log(2.0) : L(v) / v;
    return 0.5 * (1.0 - Q) * ((1.0 - Q) * u * lv_over_v / Q - L(u));
}

namespace detail {

/// Bounded maximization of f on [lo, hi]: grid bracketing then golden section.
template <class F>
std::pair<double, double> maximize_bounded(F&& f, double lo, double hi, int grid = 256) {
    if (hi - lo <= 0.0) return {lo, f(lo)};
    double best_x = lo, best_f = f(lo);
    int best_i = 0;
    for (int i = 1; i <= grid; ++i) {
        const double x = lo + (hi - lo) * i / grid;
        const double fx = f(x);
        if (fx > best_f) {
            best_f = fx;
            best_x = x;
            best_i = i;
        }
    }
    double a = lo + (hi - lo) * std::max(best_i - 1, 0) / grid;
    double b = lo + (hi - lo) * std::min(best_i + 1, grid) / grid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx > best_f) return {x, fx};
    return {best_x, best_f};
}

/// Maximizes I_E(Q, u, v(u)) over [iv.lo, iv.hi]. When the interval ends at the
/// cap u = 1 the log term makes the slope diverge to -inf there, so the peak can
/// sit within ~1e-6 of the end; a geometric scan toward u = 1 brackets it.
inline std::pair<double, double> maximize_along_u(double Q, double C, UInterval iv) {
    auto f = [&](double x) { return eve_information_along(Q, C, x); };
    auto best = maximize_bounded(f, iv.lo, iv.hi);
    if (iv.hi < 1.0 || iv.hi <= iv.lo) return best;
    const double span = iv.hi - iv.lo;
    std::vector<double> xs{iv.lo};
    for (int k = 1; k <= 60; ++k) xs.push_back(iv.hi - span * std::ldexp(1.0, -k));
    xs.push_back(iv.hi);
    std::size_t k_best = 0;
    double f_best = f(xs[0]);
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double fk = f(xs[k]);
        if (fk > f_best) {
            f_best = fk;
            k_best = k;
        }
    }
    const double a = xs[k_best == 0 ? 0 : k_best - 1];
    const double b = xs[std::min(k_best + 1, xs.size() - 1)];
    const auto near_cap = maximize_bounded(f, a, b, 64);
    return near_cap.second > best.second ? near_cap : best;
}

inline constexpr double kFeasibilitySlack = 1e-12;

}  // namespace detail

/// I_E(Q, C) = max over the constraint manifold. Closed form at u_max for
/// Q <= 0.159 while the slope there is nonnegative; bounded numeric search
/// above 0.159 and wherever the slope turns negative near u = 1. Infeasible
/// pairs are flagged.
inline SecurityEstimate eve_information(double Q, double C) {
    if (!(Q >= 0.0 && Q < 0.5)) throw std::domain_error("eve_information: Q must lie in [0, 0.5)");
    if (!(C >= 0.0)) throw std::domain_error("eve_information: C must be nonnegative");
    SecurityEstimate est;
    est.Q = Q;
    est.C = C;
    if (C > 2.0 + detail::kFeasibilitySlack || C / 2.0 > (1.0 - Q) * (1.0 - Q) + Q * Q + detail::kFeasibilitySlack) {
        return est;
    }
    est.feasible = true;
    if (Q == 0.0) {
        est.u_opt = std::min(std::sqrt(C / 2.0), 1.0);
        est.v_opt = 0.0;
        est.I_E = binary_entropy((1.0 + est.u_opt) / 2.0);
        est.method = BoundMethod::ClosedForm;
    } else if (Q <= kClosedFormQMax && eve_information_slope(Q, C, u_interval(Q, C).hi) >= 0.0) {
        est.u_opt = u_interval(Q, C).hi;
        est.v_opt = v_of_u(Q, C, est.u_opt);
        est.I_E = eve_information_uv(Q, est.u_opt, est.v_opt);
        est.method = BoundMethod::ClosedForm;
    } else {
        const auto [u, ie] = detail::maximize_along_u(Q, C, u_interval(Q, C));
        est.u_opt = u;
        est.v_opt = v_of_u(Q, C, u);
        est.I_E = ie;
        est.method = BoundMethod::Numeric;
    }
    est.I_E = std::clamp(est.I_E, 0.0, 1.0);
    est.r = 1.0 - binary_entropy(Q) - est.I_E;
    return est;
}

/// Secret key rate with standard error propagated from (se_Q, se_C) by
/// central differences of r(Q, C). NaN when infeasible.
inline Estimate key_rate_estimate(double Q, double se_Q, double C, double se_C) {
    const SecurityEstimate s = eve_information(Q, C);
    if (!s.feasible) return {s.r, std::numeric_limits<double>::quiet_NaN()};
    auto rate = [](double q, double c) {
        q = std::clamp(q, 0.0, 0.5 - 1e-12);
        c = std::clamp(c, 0.0, max_feasible_C(q));
        return eve_information(q, c).r;
    };
    const double hq = 1e-6, hc = 1e-6;
    const double dq = (rate(Q + hq, C) - rate(Q - hq, C)) / (std::min(Q + hq, 0.5 - 1e-12) - std::max(Q - hq, 0.0));
    const double dc = (rate(Q, C + hc) - rate(Q, C - hc)) / (2.0 * hc);
    return {s.r, std::hypot(dq * se_Q, dc * se_C)};
}

struct SixStateRate {
    double I_E = 0.0;
    double r = 0.0;
};

/// I_E(Q) = Q + (1-Q) h((1 - 3Q/2)/(1-Q))
inline SixStateRate six_state_reference(double Q) {
    if (!(Q >= 0.0 && Q < 2.0 / 3.0)) throw std::domain_error("six_state_reference: Q must lie in [0, 2/3)");
    const double arg = std::clamp((1.0 - 1.5 * Q) / (1.0 - Q), 0.0, 1.0);
    const double ie = Q + (1.0 - Q) * binary_entropy(arg);
    return {ie, 1.0 - binary_entropy(Q) - ie};
}

/// C(Q) = 2(1 - 2Q)²
inline double werner_C(double Q) { return 2.0 * (1.0 - 2.0 * Q) * (1.0 - 2.0 * Q); }

using CofQ = std::function<double(double)>;

inline std::vector<SecurityEstimate> key_rate_curve(std::span<const double> q_grid, const CofQ& c_of_q) {
    std::vector<SecurityEstimate> out;
    out.reserve(q_grid.size());
    for (const double q : q_grid) out.push_back(eve_information(q, c_of_q(q)));
    return out;
}

/// Bisection for r(Q) = 0 on [lo, hi] along C(Q); requires a sign change.
inline std::optional<double> find_rate_zero(const CofQ& c_of_q, double lo, double hi, double tol = 1e-12) {
    auto rate = [&](double q) {
        const SecurityEstimate s = eve_information(q, c_of_q(q));
        return s.feasible ? s.r : std::numeric_limits<double>::quiet_NaN();
    };
    double flo = rate(lo), fhi = rate(hi);
    if (std::isnan(flo) || std::isnan(fhi) || (flo > 0) == (fhi > 0)) return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = rate(mid);
        if (std::isnan(fm)) return std::nullopt;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// First zero crossing of r along a sampled curve, refined by bisection.
inline std::optional<double> locate_rate_crossing(const std::vector<SecurityEstimate>& curve, const CofQ& c_of_q) {
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto& a = curve[i - 1];
        const auto& b = curve[i];
        if (!a.feasible || !b.feasible) continue;
        if ((a.r > 0) != (b.r > 0)) return find_rate_zero(c_of_q, a.Q, b.Q);
    }
    return std::nullopt;
}

// ---------- CSV ----------
//
//   #schema=1
//   Q,C,I_E,r,u_opt,v_opt,method,feasible
//
// Infeasible rows keep their place with nan values, method "none" and feasible 0.

inline constexpr const char* kKeyRateCsvHeader = "Q,C,I_E,r,u_opt,v_opt,method,feasible";

inline void write_key_rate_csv(std::ostream& os, const std::vector<SecurityEstimate>& rows) {
    using detail::format_double;
    os << "#schema=1\n" << kKeyRateCsvHeader << '\n';
    for (const auto& s : rows) {
        os << format_double(s.Q) << ',' << format_double(s.C) << ',' << format_double(s.I_E) << ','
           << format_double(s.r) << ',' << format_double(s.u_opt) << ',' << format_double(s.v_opt) << ','
           << to_string(s.method) << ',' << (s.feasible ? 1 : 0) << '\n';
    }
}

inline std::vector<SecurityEstimate> read_key_rate_csv(std::istream& is) {
    std::vector<SecurityEstimate> rows;
    std::string line;
    bool seen_header = false;
    auto num = [](const std::string& s) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        return detail::parse_double(s, "key-rate csv");
    };
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            if (line != kKeyRateCsvHeader) throw std::invalid_argument("key-rate csv: unexpected header '" + line + "'");
            seen_header = true;
            continue;
        }
        const auto f = detail::split(line, ',');
        if (f.size() != 8) throw std::invalid_argument("key-rate csv: expected 8 fields in '" + line + "'");
        SecurityEstimate s;
        s.Q = num(f[0]);
        s.C = num(f[1]);
        s.I_E = num(f[2]);
        s.r = num(f[3]);
        s.u_opt = num(f[4]);
        s.v_opt = num(f[5]);
        if (f[6] == "closed-form") s.method = BoundMethod::ClosedForm;
        else if (f[6] == "numeric") s.method = BoundMethod::Numeric;
        else if (f[6] == "none") s.method = BoundMethod::None;
        else throw std::invalid_argument("key-rate csv: unknown method '" + f[6] + "'");
        if (f[7] != "0" && f[7] != "1") throw std::invalid_argument("key-rate csv: feasible must be 0 or 1");
        s.feasible = f[7] == "1";
        rows.push_back(s);
    }
    return rows;
}

}  // namespace rfiqkd
