#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dgbm/params.hpp"
#include "dgbm/piecewise_poly.hpp"

namespace dgbm {

/// Long-time behaviour of u'(t) = -u(t - tau). Boundary values go to the
/// stable side at tau = 1/e and to the unstable side at tau = pi/2.
enum class RegimeClass {
    monotone_stable,
    oscillatory_stable,
    unstable,
};

inline const char* regime_name(RegimeClass r) {
    switch (r) {
        case RegimeClass::monotone_stable: return "monotone_stable";
        case RegimeClass::oscillatory_stable: return "oscillatory_stable";
        case RegimeClass::unstable: return "unstable";
    }
    throw std::invalid_argument("regime_name: unknown regime");
}

inline RegimeClass classify_regime(double tau) {
    if (!(tau > 0.0)) throw std::domain_error("classify_regime: tau must be positive");
    if (tau <= inv_e) return RegimeClass::monotone_stable;
    if (tau < half_pi) return RegimeClass::oscillatory_stable;
    return RegimeClass::unstable;
}

/// Raised when the squared fundamental solution has no finite integral
/// (tau >= pi/2, the unstable regime).
struct NotSquareIntegrable : std::domain_error {
    using std::domain_error::domain_error;
};

/// Certified value of the integral of r(t)^2 over [0, inf).
struct L2Result {
    double value = 0.0;       // partial sum plus the tail bound
    double tail_bound = 0.0;  // geometric-envelope bound on the dropped tail
    std::size_t pieces = 0;   // delay intervals integrated exactly
};

namespace detail {

inline constexpr std::size_t l2_max_pieces = 4096;  // coverage cap, not a degree cap
inline constexpr int l2_envelope_scan = 64;         // per-piece max sampling resolution

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double term = x - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
};

// Exact integral of p(s)^2 over [0, tau] by coefficient convolution.
inline double piece_square_integral(const std::vector<double>& c, double tau) {
    const std::size_t d = c.size();
    KahanSum total;
    for (std::size_t j = 0; j <= 2 * (d - 1); ++j) {
        double q = 0.0;
        const std::size_t lo = j >= d ? j - d + 1 : 0;
        const std::size_t hi = std::min(j, d - 1);
        for (std::size_t i = lo; i <= hi; ++i) q += c[i] * c[j - i];
        total.add(q * std::pow(tau, static_cast<double>(j + 1)) /
                  static_cast<double>(j + 1));
    }
    return total.sum;
}

inline double piece_abs_max(const std::vector<double>& c, double tau) {
    double best = 0.0;
    for (int i = 0; i <= l2_envelope_scan; ++i) {
        const double s = tau * static_cast<double>(i) / l2_envelope_scan;
        double v = 0.0;
        for (std::size_t j = c.size(); j-- > 0;) v = v * s + c[j];
        best = std::max(best, std::abs(v));
    }
    return best;
}

}  // namespace detail

/// Integral of the squared fundamental solution over [0, inf), accumulated
/// piece by piece with exact polynomial integration until a geometric
/// envelope fitted to the last three piece maxima bounds the remaining tail
/// below tol. Throws NotSquareIntegrable for tau >= pi/2.
inline L2Result l2_norm_sq(double tau, double tol) {
    if (!(tau > 0.0)) throw std::domain_error("l2_norm_sq: tau must be positive");
    if (!(tol > 0.0)) throw std::domain_error("l2_norm_sq: tol must be positive");
    if (tau >= half_pi)
        throw NotSquareIntegrable("l2_norm_sq: fundamental solution is not square-integrable for tau >= pi/2");

    detail::KahanSum partial;
    std::vector<double> piece = {1.0};
    double max2 = 0.0;  // piece maxima, two back
    double max1 = 0.0;  // one back
    for (std::size_t k = 0; k < detail::l2_max_pieces; ++k) {
        partial.add(detail::piece_square_integral(piece, tau));
        const double max0 = detail::piece_abs_max(piece, tau);
        if (k >= 2 && max0 < max2) {
            const double rho = std::sqrt(max0 / max2);
            const double amp = std::max({max0, max1 * rho, max2 * rho * rho});
            // future piece k+i bounded by amp * rho^i; 1.5x guards envelope misfit
            const double tail =
                1.5 * tau * amp * amp * rho * rho / (1.0 - rho * rho);
            if (tail < tol) {
                return L2Result{partial.sum + tail, tail, k + 1};
            }
        }
        max2 = max1;
        max1 = max0;
        piece = detail::advance_piece(piece, tau);
    }
    throw std::runtime_error("l2_norm_sq: tail tolerance not reached within the piece cap");
}

/// Outcome of the necessary-and-sufficient mean-square stability criterion:
/// stable iff the L2 norm of the fundamental solution stays under 1/sigma^2.
struct ApplebyVerdict {
    bool ok = false;
    double l2 = 0.0;      // NaN when divergent
    double budget = 0.0;  // 1/sigma^2, +inf for sigma = 0
    std::string reason;
    explicit operator bool() const { return ok; }
};

/// Evaluate the iff-criterion with margin tol. sigma = 0 degenerates to the
/// deterministic regime question; tau = 0 uses the exact integral 1/2 of
/// exp(-2t).
inline ApplebyVerdict appleby_ok(ReducedParams p, double tol) {
    ApplebyVerdict v;
    v.budget = p.sigma > 0.0 ? 1.0 / (p.sigma * p.sigma)
                             : std::numeric_limits<double>::infinity();
    try {
        v.l2 = p.tau == 0.0 ? 0.5 : l2_norm_sq(p.tau, tol).value;
    } catch (const NotSquareIntegrable&) {
        v.l2 = std::numeric_limits<double>::quiet_NaN();
        v.ok = false;
        v.reason = "fundamental solution not square-integrable (tau >= pi/2)";
        return v;
    }
    if (p.sigma == 0.0) {
        v.ok = true;
        v.reason = "noise-free and square-integrable";
        return v;
    }
    v.ok = (v.budget - v.l2) > tol;
    v.reason = v.ok ? "l2 norm within noise budget" : "l2 norm at or above noise budget";
    return v;
}

/// Initial data on [-tau, 0] for delayed evolutions.
struct History {
    enum class Kind { constant, fundamental, sampled };
    Kind kind = Kind::constant;
    double value = 1.0;
    std::function<double(double)> sample;

    static History constant(double w0) { return History{Kind::constant, w0, {}}; }
    /// 0 on (-tau, 0), exactly 1 at t = 0.
    static History fundamental() { return History{Kind::fundamental, 1.0, {}}; }
    static History sampled(std::function<double(double)> fn) {
        return History{Kind::sampled, 0.0, std::move(fn)};
    }

    /// Value at a history time t <= 0.
    double at(double t) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::fundamental: return t < 0.0 ? 0.0 : 1.0;
            case Kind::sampled: return sample(t);
        }
        throw std::logic_error("History::at: unknown kind");
    }

    /// Left limit at t = 0; differs from at(0) only for the jump history.
    double left_limit() const { return kind == Kind::fundamental ? 0.0 : at(0.0); }
};

/// Uniform-grid solution of u'(t) = -u(t - tau).
struct SampledSolution {
    double tau = 0.0;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<double> values;
    History history;
};

namespace detail {

inline constexpr double grid_divide_rel_tol = 1e-9;

inline std::size_t delay_steps(double tau, double dt) {
    // pre: tau > 0
    const double ratio = tau / dt;
    const auto m = static_cast<std::size_t>(std::llround(ratio));
    if (m < 1 || std::abs(static_cast<double>(m) * dt - tau) > grid_divide_rel_tol * tau)
        throw std::invalid_argument("dt must divide tau exactly");
    return m;
}

}  // namespace detail

/// Explicit trapezoidal stepping with the delayed value read from the stored
/// grid (dt = tau/m keeps the delayed index exact; no interpolation). In the
/// no-delay limit tau = 0 the step degenerates to Heun's method for u' = -u.
/// Second-order accurate and deterministic.
inline SampledSolution dde_solve(double tau, const History& history, double T, double dt) {
    if (!(tau >= 0.0)) throw std::domain_error("dde_solve: tau must be nonnegative");
    if (!(dt > 0.0)) throw std::invalid_argument("dde_solve: dt must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("dde_solve: T must be positive");
    const std::size_t m = tau > 0.0 ? detail::delay_steps(tau, dt) : 0;
    const auto n_steps = static_cast<std::size_t>(std::ceil(T / dt - detail::grid_divide_rel_tol));

    SampledSolution out;
    out.tau = tau;
    out.dt = dt;
    out.history = history;
    out.times.resize(n_steps + 1);
    out.values.resize(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) out.times[k] = static_cast<double>(k) * dt;

    out.values[0] = history.at(0.0);
    if (m == 0) {
        const double factor = 1.0 - dt + 0.5 * dt * dt;
        for (std::size_t k = 0; k < n_steps; ++k) out.values[k + 1] = out.values[k] * factor;
        return out;
    }
    const auto delayed = [&](std::size_t k) {
        // value at time (k - m) dt; negative indices fall into the history
        return k >= m ? out.values[k - m]
                      : history.at((static_cast<double>(k) - static_cast<double>(m)) * dt);
    };
    for (std::size_t k = 0; k < n_steps; ++k) {
        // Right quadrature endpoint at delayed time exactly 0 takes the
        // history's left limit: the integrand on that step lies left of any
        // jump between the history and the initial value.
        const double right = k + 1 == m ? history.left_limit() : delayed(k + 1);
        out.values[k + 1] = out.values[k] - 0.5 * dt * (delayed(k) + right);
    }
    return out;
}

}  // namespace dgbm
