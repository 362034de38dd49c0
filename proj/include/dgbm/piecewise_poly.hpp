#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgbm {

/// Piecewise-polynomial function on [0, tau * pieces.size()). pieces[k][j] is
/// the coefficient of s^j in the local variable s = t - k*tau, valid on
/// [k*tau, (k+1)*tau).
struct PiecewisePoly {
    double tau = 0.0;
    std::vector<std::vector<double>> pieces;

    double end() const { return tau * static_cast<double>(pieces.size()); }
};

namespace detail {

// Kahan-compensated sum of c[j] * x^j. The terms alternate in sign for the
// delayed-decay recurrence, so compensation keeps breakpoint values exact
// enough for the 1e-12 continuity invariant.
inline double poly_value_compensated(const std::vector<double>& c, double x) {
    double sum = 0.0;
    double comp = 0.0;
    double power = 1.0;
    for (const double cj : c) {
        const double term = cj * power - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        power *= x;
    }
    return sum;
}

inline constexpr double piece_trunc_rel = 1e-30;  // relative cutoff for trailing terms

// Advance one delay interval: next(s) = prev(tau) - integral of prev over [0, s].
// Trailing coefficients whose contribution on [0, tau] is below piece_trunc_rel
// of the piece scale are dropped; they sit far beneath double rounding at any
// evaluation point and keep degrees bounded when tau is small.
inline std::vector<double> advance_piece(const std::vector<double>& prev, double tau) {
    std::vector<double> next(prev.size() + 1);
    next[0] = poly_value_compensated(prev, tau);
    for (std::size_t j = 0; j < prev.size(); ++j) {
        next[j + 1] = -prev[j] / static_cast<double>(j + 1);
    }
    double scale = 0.0;
    double power = 1.0;
    for (const double cj : next) {
        scale = std::max(scale, std::abs(cj) * power);
        power *= tau;
    }
    std::size_t keep = next.size();
    power = std::pow(tau, static_cast<double>(next.size() - 1));
    while (keep > 1 && std::abs(next[keep - 1]) * power < piece_trunc_rel * scale) {
        --keep;
        power /= tau;
    }
    next.resize(keep);
    return next;
}

}  // namespace detail

inline constexpr std::size_t max_fundamental_pieces = 256;

/// Fundamental solution of u'(t) = -u(t - tau) with history 0 on (-tau, 0)
/// and u(0) = 1, built interval by interval. Piece k is the restriction to
/// [k*tau, (k+1)*tau); piece 0 is identically 1.
inline PiecewisePoly fundamental_solution(double tau, std::size_t n_pieces) {
    if (!(tau > 0.0)) throw std::domain_error("fundamental_solution: tau must be positive");
    if (n_pieces < 1) throw std::invalid_argument("fundamental_solution: n_pieces must be >= 1");
    if (n_pieces > max_fundamental_pieces)
        throw std::invalid_argument("fundamental_solution: n_pieces exceeds the cap of 256");
    PiecewisePoly poly;
    poly.tau = tau;
    poly.pieces.reserve(n_pieces);
    poly.pieces.push_back({1.0});
    for (std::size_t k = 1; k < n_pieces; ++k) {
        std::vector<double> next = detail::advance_piece(poly.pieces.back(), tau);
        for (const double cj : next) {
            if (!std::isfinite(cj))
                throw std::overflow_error("fundamental_solution: coefficient overflow after " +
                                          std::to_string(k) + " pieces");
        }
        poly.pieces.push_back(std::move(next));
    }
    return poly;
}

/// Evaluate at a covered time. Horner in the local variable of the covering piece.
inline double evaluate(const PiecewisePoly& poly, double t) {
    if (!(t >= 0.0) || !(t < poly.end()))
        throw std::domain_error("evaluate: t outside the covered range");
    const auto k = std::min(static_cast<std::size_t>(t / poly.tau), poly.pieces.size() - 1);
    const double s = t - static_cast<double>(k) * poly.tau;
    const std::vector<double>& c = poly.pieces[k];
    double v = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) v = v * s + c[j];
    return v;
}

namespace detail {

inline constexpr int sign_scan_points = 256;  // per-piece crossing scan resolution

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Locate the crossing inside a bracket with opposite-sign endpoint values.
inline double refine_crossing(const PiecewisePoly& poly, double a, double b) {
    double fa = evaluate(poly, a);
    const double tol = 1e-13 * poly.tau;
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        const double fm = evaluate(poly, mid);
        if (fm == 0.0) return mid;
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

/// Count sign changes of the function on [0, horizon]. Crossings are found on
/// a 256-point scan of each piece and confirmed by bisection; grid values that
/// are exactly zero do not count until the sign actually flips.
inline std::size_t sign_changes(const PiecewisePoly& poly, double horizon) {
    if (!(horizon > 0.0) || !(horizon <= poly.end()))
        throw std::domain_error("sign_changes: horizon outside the covered range");
    std::size_t count = 0;
    int prev_sign = 0;
    double prev_t = 0.0;
    for (std::size_t k = 0; k < poly.pieces.size(); ++k) {
        const double lo = static_cast<double>(k) * poly.tau;
        if (lo >= horizon) break;
        const double hi = std::min(lo + poly.tau, horizon);
        for (int i = 0; i <= detail::sign_scan_points; ++i) {
            const double frac = static_cast<double>(i) / detail::sign_scan_points;
            double t = lo + frac * (hi - lo);
            if (t >= poly.end()) t = std::nextafter(poly.end(), 0.0);
            const int s = detail::sign_of(evaluate(poly, t));
            if (s != 0) {
                if (prev_sign != 0 && s != prev_sign) {
                    detail::refine_crossing(poly, prev_t, t);
                    ++count;
                }
                prev_sign = s;
                prev_t = t;
            }
        }
    }
    return count;
}

}  // namespace dgbm
