#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dgbm/philox.hpp"
#include "dgbm/simulate.hpp"
#include "dgbm/stability.hpp"

namespace dgbm {

/// Weights of the descent functional
///   L(t) = w(t)^2 + q * int_{t-tau}^t w(s)^2 ds
///        + p * int_{t-tau}^t int_theta^t w(s - tau)^2 ds dtheta.
struct LyapCoeffs {
    double delta;
    double p;
    double q;
};

/// The weight choice that balances the cross terms of dE[L]/dt and yields
/// the decay margin 2 - tau - (sigma + sqrt(tau))^2 in front of E[w(t-tau)^2].
inline LyapCoeffs lyapunov_coeffs(ReducedParams prm) {
    if (!(prm.tau > 0.0))
        throw std::domain_error("lyapunov_coeffs: tau must be positive (functional degenerates)");
    if (!(prm.sigma >= 0.0)) throw std::domain_error("lyapunov_coeffs: sigma must be nonnegative");
    const double root = prm.sigma + std::sqrt(prm.tau);
    const double delta = 1.0 / std::sqrt(prm.tau * root * root);
    return LyapCoeffs{delta, delta * root * root, 2.0 - 1.0 / delta};
}

/// Ensemble average of the functional on the stored grid restricted to t >= tau.
struct LyapunovSeries {
    std::vector<double> times;
    std::vector<double> L;
    std::vector<double> std_error;
    std::size_t n_paths = 0;
};

namespace detail {

// Grid values of one path extended with its history samples: index offset m,
// entry m + k holds w at step k, entries 0..m-1 hold w on [-tau, 0).
inline void path_with_history(const SimConfig& cfg, const SimGrid& grid,
                              std::uint64_t path_index, std::vector<double>& vals) {
    const std::size_t m = grid.delay_steps;
    vals.resize(m + grid.n_steps + 1);
    for (std::size_t j = 1; j <= m; ++j) {
        vals[m - j] = cfg.history.at(-static_cast<double>(j) * cfg.dt);
    }
    run_path(cfg, grid, path_index, [&](std::size_t k, double w) { vals[m + k] = w; });
}

// First stored index with time >= tau (= step m).
inline std::size_t first_stored_at_delay(const SimConfig& cfg, const SimGrid& grid) {
    return (grid.delay_steps + cfg.store_every - 1) / cfg.store_every;
}

// Functional value at step i from extended grid values. Composite trapezoid
// on the simulation grid; the double integral is reduced to
// int_{t-tau}^t (s - (t - tau)) w(s - tau)^2 ds by exchanging the order.
inline double lyapunov_at_step(const std::vector<double>& vals, std::size_t m, double dt,
                               const LyapCoeffs& c, std::size_t i) {
    // pre: i >= m; vals extends m entries before step 0, so step k lives at
    // vals[m + k] and the window base step i - m lives at vals[i]
    const std::size_t base = i;
    const double w = vals[m + i];
    KahanSum inner;
    KahanSum weighted;
    for (std::size_t j = 0; j <= m; ++j) {
        const double trap = (j == 0 || j == m) ? 0.5 : 1.0;
        const double wj = vals[base + j];        // w at step i - m + j
        const double wdel = vals[base - m + j];  // w at step i - 2m + j
        inner.add(trap * wj * wj);
        weighted.add(trap * static_cast<double>(j) * wdel * wdel);
    }
    return w * w + c.q * dt * inner.sum + c.p * dt * dt * weighted.sum;
}

}  // namespace detail

/// Monte Carlo estimate of E[L(t)] for t on the stored grid with t >= tau.
/// Same blocked deterministic reduction as ensemble_mean_square.
inline LyapunovSeries estimate_lyapunov(const SimConfig& cfg, const LyapCoeffs& coeffs) {
    const SimGrid grid = sim_grid(cfg);
    const std::size_t m = grid.delay_steps;
    if (m == 0) throw std::domain_error("estimate_lyapunov: tau must be positive");
    const std::size_t i0 = detail::first_stored_at_delay(cfg, grid);
    if (i0 >= grid.n_stored)
        throw std::domain_error("estimate_lyapunov: horizon shorter than the delay");
    const std::size_t n_out = grid.n_stored - i0;

    const std::size_t n_blocks =
        (cfg.n_paths + detail::ensemble_block - 1) / detail::ensemble_block;
    std::vector<std::vector<double>> block_sum(n_blocks), block_sum2(n_blocks);
    std::vector<double> vals;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t lo = b * detail::ensemble_block;
        const std::size_t hi = std::min(lo + detail::ensemble_block, cfg.n_paths);
        std::vector<detail::KahanSum> sl(n_out), sl2(n_out);
        for (std::size_t p = lo; p < hi; ++p) {
            detail::path_with_history(cfg, grid, p, vals);
            for (std::size_t o = 0; o < n_out; ++o) {
                const std::size_t step = (i0 + o) * cfg.store_every;
                const double L = detail::lyapunov_at_step(vals, m, cfg.dt, coeffs, step);
                sl[o].add(L);
                sl2[o].add(L * L);
            }
        }
        block_sum[b].resize(n_out);
        block_sum2[b].resize(n_out);
        for (std::size_t o = 0; o < n_out; ++o) {
            block_sum[b][o] = sl[o].sum;
            block_sum2[b][o] = sl2[o].sum;
        }
    }

    LyapunovSeries series;
    series.n_paths = cfg.n_paths;
    series.times.resize(n_out);
    series.L.resize(n_out);
    series.std_error.resize(n_out);
    const auto n = static_cast<double>(cfg.n_paths);
    for (std::size_t o = 0; o < n_out; ++o) {
        detail::KahanSum s, s2;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            s.add(block_sum[b][o]);
            s2.add(block_sum2[b][o]);
        }
        const double mean = s.sum / n;
        double se = 0.0;
        if (cfg.n_paths > 1) {
            const double var = std::max(0.0, (s2.sum - n * mean * mean) / (n - 1.0));
            se = std::sqrt(var / n);
        }
        series.times[o] = static_cast<double>((i0 + o) * cfg.store_every) * cfg.dt;
        series.L[o] = mean;
        series.std_error[o] = se;
    }
    return series;
}

/// One stored interval of the descent statistic
///   D = (L(t_hi) - L(t_lo)) / (t_hi - t_lo) + kappa * avg w(t - tau)^2,
/// whose expectation is nonpositive when the decay margin kappa is positive.
struct DescentInterval {
    double t_lo;
    double t_hi;
    double mean;       // ensemble mean of D
    double std_error;  // paired per-path standard error
};

struct DescentReport {
    bool ok = false;
    double kappa = 0.0;
    std::vector<DescentInterval> intervals;
    explicit operator bool() const { return ok; }
};

/// Empirical check of the descent inequality dE[L]/dt <= -kappa E[w(t-tau)^2]
/// on consecutive stored times t >= tau. The statistic is paired per path, so
/// its standard error accounts for the correlation between L(t_lo), L(t_hi)
/// and the delayed square.
inline DescentReport lyapunov_descent_check(const SimConfig& cfg, const LyapCoeffs& coeffs,
                                            double z_slack) {
    const SimGrid grid = sim_grid(cfg);
    const std::size_t m = grid.delay_steps;
    if (m == 0) throw std::domain_error("lyapunov_descent_check: tau must be positive");
    const double kappa = decay_margin(ReducedParams{cfg.tau, cfg.sigma});
    const std::size_t i0 = detail::first_stored_at_delay(cfg, grid);
    if (i0 + 1 >= grid.n_stored)
        throw std::domain_error("lyapunov_descent_check: need at least two stored times past tau");
    const std::size_t n_int = grid.n_stored - i0 - 1;
    const double step_dt = static_cast<double>(cfg.store_every) * cfg.dt;

    const std::size_t n_blocks =
        (cfg.n_paths + detail::ensemble_block - 1) / detail::ensemble_block;
    std::vector<std::vector<double>> block_sum(n_blocks), block_sum2(n_blocks);
    std::vector<double> vals;
    std::vector<double> L(n_int + 1), wt2(n_int + 1);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t lo = b * detail::ensemble_block;
        const std::size_t hi = std::min(lo + detail::ensemble_block, cfg.n_paths);
        std::vector<detail::KahanSum> sd(n_int), sd2(n_int);
        for (std::size_t p = lo; p < hi; ++p) {
            detail::path_with_history(cfg, grid, p, vals);
            for (std::size_t o = 0; o <= n_int; ++o) {
                const std::size_t step = (i0 + o) * cfg.store_every;
                L[o] = detail::lyapunov_at_step(vals, m, cfg.dt, coeffs, step);
                const double wd = vals[step];  // w at step - m, offset m cancels
                wt2[o] = wd * wd;
            }
            for (std::size_t o = 0; o < n_int; ++o) {
                const double d =
                    (L[o + 1] - L[o]) / step_dt + kappa * 0.5 * (wt2[o] + wt2[o + 1]);
                sd[o].add(d);
                sd2[o].add(d * d);
            }
        }
        block_sum[b].resize(n_int);
        block_sum2[b].resize(n_int);
        for (std::size_t o = 0; o < n_int; ++o) {
            block_sum[b][o] = sd[o].sum;
            block_sum2[b][o] = sd2[o].sum;
        }
    }

    DescentReport report;
    report.kappa = kappa;
    report.ok = true;
    report.intervals.resize(n_int);
    const auto n = static_cast<double>(cfg.n_paths);
    for (std::size_t o = 0; o < n_int; ++o) {
        detail::KahanSum s, s2;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            s.add(block_sum[b][o]);
            s2.add(block_sum2[b][o]);
        }
        const double mean = s.sum / n;
        double se = 0.0;
        if (cfg.n_paths > 1) {
            const double var = std::max(0.0, (s2.sum - n * mean * mean) / (n - 1.0));
            se = std::sqrt(var / n);
        }
        const double t_lo = static_cast<double>((i0 + o) * cfg.store_every) * cfg.dt;
        report.intervals[o] = DescentInterval{t_lo, t_lo + step_dt, mean, se};
        if (mean > z_slack * se) report.ok = false;
    }
    return report;
}

/// Result of sampling the two-sided bound
///   exp(-2 mu s) y(t) < y(t - s) < exp(2 mu s) y(t).
struct ForwardBackwardReport {
    bool ok = false;
    std::size_t n_pairs = 0;
    std::size_t violations = 0;
    explicit operator bool() const { return ok; }
};

/// Check the forward-backward bound on random (t, s) pairs from the stored
/// grid, with z_slack standard errors of slack per side. Requires a constant
/// nonzero history (y extends as w0^2/2 for negative times) and a rate mu
/// satisfying 2 e^{mu tau} + sigma^2 e^{2 mu tau} <= 2 mu.
inline ForwardBackwardReport forward_backward_check(const MeanSquareSeries& series, double mu,
                                                    std::size_t sample_pairs, double z_slack,
                                                    std::uint64_t pair_seed = 0x5eedfb01u) {
    if (!series.constant_history || series.w0 == 0.0)
        throw std::invalid_argument("forward_backward_check: requires constant nonzero history");
    const double e1 = std::exp(mu * series.tau);
    if (!(2.0 * e1 + series.sigma * series.sigma * e1 * e1 <= 2.0 * mu))
        throw std::invalid_argument("forward_backward_check: mu violates the rate condition");
    if (series.times.size() < 2)
        throw std::invalid_argument("forward_backward_check: series too short");

    const std::size_t n = series.times.size();
    const double step_dt = series.times[1] - series.times[0];
    ForwardBackwardReport report;
    report.n_pairs = sample_pairs;
    const std::uint64_t stream = ~std::uint64_t{0};  // disjoint from path streams
    for (std::size_t i = 0; i < sample_pairs; ++i) {
        const auto draw = [&](std::uint64_t d) {
            const double u = uniform01(pair_seed, stream, 2 * i + d);
            return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
        };
        const std::size_t it = draw(0);
        const std::size_t ks = draw(1);  // s = ks * step_dt, t - s may go negative
        const double s = static_cast<double>(ks) * step_dt;
        const double yt = series.y[it];
        const double se_t = series.std_error[it];
        double yref, se_ref;
        if (it >= ks) {
            yref = series.y[it - ks];
            se_ref = series.std_error[it - ks];
        } else {
            yref = 0.5 * series.w0 * series.w0;  // constant extension before t = 0
            se_ref = 0.0;
        }
        const double up = std::exp(2.0 * mu * s);
        const double down = std::exp(-2.0 * mu * s);
        const bool upper_bad = yref - up * yt > z_slack * (se_ref + up * se_t);
        const bool lower_bad = down * yt - yref > z_slack * (se_ref + down * se_t);
        if (upper_bad || lower_bad) ++report.violations;
    }
    report.ok = report.violations == 0;
    return report;
}

}  // namespace dgbm
