#pragma once

#include <cmath>
#include <stdexcept>

namespace dgbm {

inline constexpr double inv_e = 0.36787944117144233;   // 1/e, delay limit of the mu window
inline constexpr double sqrt2 = 1.4142135623730951;    // noise limit of the no-delay conditions
inline constexpr double half_pi = 1.5707963267948966;  // delay limit of deterministic stability

/// Physical parameters of the delay geometric Brownian motion
///   dw(t) = -lambda * w(t - tau) dt + sigma * w(t - tau) dB_t.
struct RawParams {
    double lambda;  // drift rate, 1/time
    double tau;     // delay, time
    double sigma;   // noise intensity, 1/sqrt(time)
};

/// Dimensionless pair (lambda*tau, sigma/sqrt(lambda)). After rescaling
/// time by 1/lambda these are the only parameters the dynamics depends on.
struct ReducedParams {
    double tau = 0.0;
    double sigma = 0.0;
};

/// Rescale raw parameters to the reduced pair.
inline ReducedParams reduce(const RawParams& raw) {
    if (!(raw.lambda > 0.0)) throw std::domain_error("reduce: lambda must be positive");
    if (!(raw.tau >= 0.0)) throw std::domain_error("reduce: tau must be nonnegative");
    if (!(raw.sigma >= 0.0)) throw std::domain_error("reduce: sigma must be nonnegative");
    return ReducedParams{raw.lambda * raw.tau, raw.sigma / std::sqrt(raw.lambda)};
}

}  // namespace dgbm
