#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dgbm/stability.hpp"

namespace dgbm {

/// Which stability region a boundary curve belongs to.
enum class RegionKind {
    asymptotic,   // closed-form sqrt(2 - tau) - sqrt(tau)
    ehs,          // exponential-Hilbert-space comparison bound, inverted numerically
    exponential,  // max-min search over the mu window
};

inline const char* region_kind_name(RegionKind kind) {
    switch (kind) {
        case RegionKind::asymptotic: return "asymptotic";
        case RegionKind::ehs: return "ehs";
        case RegionKind::exponential: return "exponential";
    }
    throw std::invalid_argument("region_kind_name: unknown kind");
}

inline RegionKind parse_region_kind(const std::string& name) {
    if (name == "asymptotic") return RegionKind::asymptotic;
    if (name == "ehs") return RegionKind::ehs;
    if (name == "exponential") return RegionKind::exponential;
    throw std::invalid_argument("parse_region_kind: unknown kind '" + name + "'");
}

struct RegionPoint {
    double tau;
    double sigma_max;
};

/// Sampled boundary sigma_max(tau) of one stability region.
struct RegionCurve {
    RegionKind kind;
    std::vector<RegionPoint> points;  // taus strictly increasing
};

namespace detail {

inline constexpr double ehs_invert_tol = 1e-10;  // bisection tolerance on sigma

// Largest sigma with tau < ehs_tau_max(sigma), i.e. the comparison curve
// read as sigma(tau). ehs_tau_max is strictly decreasing on [0, sqrt(2)],
// so plain bisection applies.
inline double ehs_sigma_max(double tau) {
    if (tau >= ehs_tau_max(0.0)) return 0.0;
    double lo = 0.0;
    double hi = sqrt2;
    while (hi - lo > ehs_invert_tol) {
        const double mid = 0.5 * (lo + hi);
        if (ehs_tau_max(mid) > tau) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Sample the boundary curve of the requested region on a tau grid.
/// Grids may extend past the region's domain; sigma_max is 0 there.
inline RegionCurve region_curve(RegionKind kind, const std::vector<double>& tau_grid) {
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (!(tau_grid[i] >= 0.0))
            throw std::invalid_argument("region_curve: tau grid must be nonnegative");
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
            throw std::invalid_argument("region_curve: tau grid must be strictly increasing");
    }
    RegionCurve curve{kind, {}};
    curve.points.reserve(tau_grid.size());
    for (const double tau : tau_grid) {
        double sigma = 0.0;
        switch (kind) {
            case RegionKind::asymptotic:
                sigma = asymptotic_sigma_max(tau);
                break;
            case RegionKind::ehs:
                sigma = detail::ehs_sigma_max(tau);
                break;
            case RegionKind::exponential:
                sigma = exponential_sigma_max(tau).sigma_max;
                break;
        }
        curve.points.push_back(RegionPoint{tau, sigma});
    }
    return curve;
}

}  // namespace dgbm
