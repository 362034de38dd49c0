#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "dgbm/params.hpp"

namespace dgbm {

// All region conditions below are strict inequalities; boundary points
// classify as outside.

/// Largest admissible noise level for asymptotic mean-square decay at a
/// given delay: sqrt(2 - tau) - sqrt(tau). Zero for tau >= 1 (empty region).
inline double asymptotic_sigma_max(double tau) {
    if (!(tau >= 0.0)) throw std::domain_error("asymptotic_sigma_max: tau must be >= 0");
    if (tau >= 1.0) return 0.0;
    return std::sqrt(2.0 - tau) - std::sqrt(tau);
}

/// The same region boundary resolved for the delay: largest admissible tau
/// at a given noise level, 1 - sqrt(sigma^2 - sigma^4/4). Zero for sigma^2 >= 2.
inline double asymptotic_tau_max(double sigma) {
    if (!(sigma >= 0.0)) throw std::domain_error("asymptotic_tau_max: sigma must be >= 0");
    const double s2 = sigma * sigma;
    if (s2 >= 2.0) return 0.0;
    return 1.0 - std::sqrt(s2 - 0.25 * s2 * s2);
}

/// Sufficient condition for E[w(t)^2] -> 0: sigma^2 < 2 and
/// tau < 1 - sqrt(sigma^2 - sigma^4/4).
inline bool asymptotic_ok(ReducedParams p) {
    const double s2 = p.sigma * p.sigma;
    if (!(s2 < 2.0)) return false;
    return p.tau < 1.0 - std::sqrt(s2 - 0.25 * s2 * s2);
}

/// Comparison bound on the delay from the earlier exponential-Hilbert-space
/// estimate: (1/4) * (-2 sigma^2 + sqrt(4 sigma^4 + 2 (2 - sigma^2)^2)).
/// More restrictive than asymptotic_tau_max everywhere on sigma^2 < 2.
inline double ehs_tau_max(double sigma) {
    if (!(sigma >= 0.0)) throw std::domain_error("ehs_tau_max: sigma must be >= 0");
    const double s2 = sigma * sigma;
    if (s2 >= 2.0) return 0.0;
    const double rest = 2.0 - s2;
    return 0.25 * (-2.0 * s2 + std::sqrt(4.0 * s2 * s2 + 2.0 * rest * rest));
}

/// Decay margin of the Lyapunov descent, 2 - tau - (sigma + sqrt(tau))^2.
/// Positive exactly on the asymptotic region.
inline double decay_margin(ReducedParams p) {
    const double root = p.sigma + std::sqrt(p.tau);
    return 2.0 - p.tau - root * root;
}

/// Growth factor G(s) = sqrt((e^{2s} - 1) / (2s)) with the continuous
/// extension G(0) = 1. Monotone increasing on s >= 0.
inline double g_factor(double s) {
    if (!(s >= 0.0)) throw std::domain_error("g_factor: s must be >= 0");
    if (s == 0.0) return 1.0;
    // expm1 keeps full relative accuracy near s = 0
    return std::sqrt(std::expm1(2.0 * s) / (2.0 * s));
}

/// Noise bound from the two-sided rate condition: e^{-mu tau} * sqrt(2 mu - 2 e^{mu tau}),
/// or zero when the radicand is nonpositive (mu outside the admissible window).
inline double exp_sigma_bound1(double tau, double mu) {
    const double rad = 2.0 * mu - 2.0 * std::exp(mu * tau);
    if (!(rad > 0.0)) return 0.0;
    return std::exp(-mu * tau) * std::sqrt(rad);
}

/// Noise bound from the descent condition:
/// -G(mu tau) sqrt(tau) + sqrt(G(mu tau)^2 tau - 2 G(mu tau) tau + 2).
/// Strictly decreasing in mu at fixed tau < 1/e.
inline double exp_sigma_bound2(double tau, double mu) {
    const double g = g_factor(mu * tau);
    const double rad = g * g * tau - 2.0 * g * tau + 2.0;
    return -g * std::sqrt(tau) + std::sqrt(std::max(rad, 0.0));
}

/// Interval of mu > 1 on which mu > e^{mu tau} holds.
struct MuWindow {
    double lo;
    double hi;
};

namespace detail {

inline constexpr double mu_window_cap = 1e6;   // stand-in for the unbounded window at tau = 0
inline constexpr double mu_root_tol = 1e-10;   // absolute bisection tolerance on mu

template <typename F>
double bisect_root(F&& f, double a, double b, double tol) {
    // pre: f(a) and f(b) straddle zero
    double fa = f(a);
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fa > 0.0) == (fm > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Roots of mu = e^{mu tau} bracketing the admissible search interval of the
/// exponential-decay condition. Empty for tau >= 1/e (the window closes).
/// At tau = 0 the window is (1, inf); hi is reported as a large finite cap.
inline std::optional<MuWindow> mu_window(double tau) {
    if (!(tau >= 0.0)) throw std::domain_error("mu_window: tau must be >= 0");
    if (tau == 0.0) return MuWindow{1.0, detail::mu_window_cap};
    if (tau >= inv_e) return std::nullopt;
    const auto gap = [tau](double mu) { return mu - std::exp(mu * tau); };
    // gap is concave with maximum at mu_star; gap(1) < 0 < gap(mu_star)
    const double mu_star = -std::log(tau) / tau;
    const double lo = detail::bisect_root(gap, 1.0, mu_star, detail::mu_root_tol);
    double upper = 2.0 * mu_star;
    while (gap(upper) > 0.0) upper *= 2.0;
    const double hi = detail::bisect_root(gap, mu_star, upper, detail::mu_root_tol);
    return MuWindow{lo, hi};
}

/// A value of mu certifying the exponential condition, together with
/// min(exp_sigma_bound1, exp_sigma_bound2) there.
struct ExponentialWitness {
    double mu;
    double bound;
};

struct ExponentialBound {
    double sigma_max = 0.0;
    std::optional<ExponentialWitness> witness;
};

namespace detail {

inline constexpr int maxmin_grid = 2048;           // coarse bracket scan
inline constexpr double maxmin_mu_tol = 1e-10;     // golden-section width
inline constexpr double invphi = 0.6180339887498949;

inline double maxmin_objective(double tau, double mu) {
    return std::min(exp_sigma_bound1(tau, mu), exp_sigma_bound2(tau, mu));
}

}  // namespace detail

/// Largest noise level with a certified exponential decay at the given
/// delay: max over mu in the window of min(exp_sigma_bound1, exp_sigma_bound2).
/// Zero with no witness when the window is empty (tau >= 1/e).
inline ExponentialBound exponential_sigma_max(double tau) {
    if (!(tau >= 0.0)) throw std::domain_error("exponential_sigma_max: tau must be >= 0");
    if (tau == 0.0) {
        // bound2 is identically sqrt(2) and bound1 exceeds it for mu >= 2,
        // so the supremum sqrt(2) is attained; report an interior witness
        return ExponentialBound{sqrt2, ExponentialWitness{3.0, sqrt2}};
    }
    const auto win = mu_window(tau);
    if (!win) return ExponentialBound{0.0, std::nullopt};

    // coarse scan guards against missed brackets; the objective is unimodal
    // in practice but that is unproven
    const double span = win->hi - win->lo;
    double best_val = -1.0;
    int best_idx = 0;
    for (int i = 0; i <= detail::maxmin_grid; ++i) {
        const double mu = win->lo + span * static_cast<double>(i) / detail::maxmin_grid;
        const double v = detail::maxmin_objective(tau, mu);
        if (v > best_val) {
            best_val = v;
            best_idx = i;
        }
    }
    double a = win->lo + span * static_cast<double>(std::max(best_idx - 1, 0)) / detail::maxmin_grid;
    double b = win->lo + span * static_cast<double>(std::min(best_idx + 1, detail::maxmin_grid)) /
                             detail::maxmin_grid;

    // golden-section refinement of the bracket
    double x1 = b - detail::invphi * (b - a);
    double x2 = a + detail::invphi * (b - a);
    double v1 = detail::maxmin_objective(tau, x1);
    double v2 = detail::maxmin_objective(tau, x2);
    while (b - a > detail::maxmin_mu_tol) {
        if (v1 < v2) {
            a = x1;
            x1 = x2;
            v1 = v2;
            x2 = a + detail::invphi * (b - a);
            v2 = detail::maxmin_objective(tau, x2);
        } else {
            b = x2;
            x2 = x1;
            v2 = v1;
            x1 = b - detail::invphi * (b - a);
            v1 = detail::maxmin_objective(tau, x1);
        }
    }
    const double mu_best = 0.5 * (a + b);
    const double val = detail::maxmin_objective(tau, mu_best);
    return ExponentialBound{val, ExponentialWitness{mu_best, val}};
}

struct ExponentialVerdict {
    bool ok = false;
    std::optional<ExponentialWitness> witness;
    explicit operator bool() const { return ok; }
};

namespace detail {
inline constexpr double solver_slack = 1e-9;  // keeps numerically-boundary points outside
}

/// Certified exponential mean-square decay: sigma below the max-min bound
/// with a small slack. On success the witness mu satisfies both noise
/// bounds strictly.
inline ExponentialVerdict exponential_ok(ReducedParams p) {
    const ExponentialBound bound = exponential_sigma_max(p.tau);
    if (p.sigma < bound.sigma_max - detail::solver_slack) {
        return ExponentialVerdict{true, bound.witness};
    }
    return ExponentialVerdict{false, std::nullopt};
}

}  // namespace dgbm
