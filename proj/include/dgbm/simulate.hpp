#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dgbm/dde.hpp"
#include "dgbm/params.hpp"
#include "dgbm/philox.hpp"

namespace dgbm {

/// Full description of one Monte Carlo run of
///   dw(t) = -w(t - tau) dt + sigma * w(t - tau) dB_t.
/// Identical configs produce bit-identical results at any thread count.
struct SimConfig {
    double tau = 0.0;
    double sigma = 0.0;
    double dt = 0.01;  // must divide tau exactly when tau > 0
    double T = 1.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 12345;
    History history = History::constant(1.0);
    std::size_t store_every = 1;  // output-grid thinning, in steps
    unsigned threads = 0;         // 0 = hardware concurrency
};

/// Step counts implied by a config.
struct SimGrid {
    std::size_t n_steps;      // time steps, grid has n_steps + 1 points
    std::size_t delay_steps;  // m with dt = tau/m; 0 for tau = 0
    std::size_t n_stored;     // points on the thinned output grid
};

inline SimGrid sim_grid(const SimConfig& cfg) {
    if (!(cfg.tau >= 0.0)) throw std::invalid_argument("sim_grid: tau must be nonnegative");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("sim_grid: dt must be positive");
    if (!(cfg.T >= cfg.dt)) throw std::invalid_argument("sim_grid: T must be at least dt");
    if (cfg.n_paths < 1) throw std::invalid_argument("sim_grid: n_paths must be >= 1");
    if (cfg.store_every < 1) throw std::invalid_argument("sim_grid: store_every must be >= 1");
    const std::size_t m = cfg.tau > 0.0 ? detail::delay_steps(cfg.tau, cfg.dt) : 0;
    const auto n_steps =
        static_cast<std::size_t>(std::ceil(cfg.T / cfg.dt - detail::grid_divide_rel_tol));
    return SimGrid{n_steps, m, n_steps / cfg.store_every + 1};
}

namespace detail {

// Ring of the last m+1 state values, preloaded with the history samples.
// The delayed read at step k returns the value stored m steps earlier
// exactly; slot k+1 is only overwritten after the read, since
// k+1 = k-m (mod m+1).
class PathBuffer {
  public:
    PathBuffer(const History& history, double dt, std::size_t delay_steps)
        : ring_(delay_steps + 1) {
        const auto m = static_cast<long long>(delay_steps);
        for (long long j = 1; j <= m; ++j) {
            ring_[slot(-j)] = history.at(-static_cast<double>(j) * dt);
        }
        ring_[0] = history.at(0.0);
    }

    double initial() const { return ring_[0]; }
    double delayed(std::size_t k) const {
        return ring_[slot(static_cast<long long>(k) - (static_cast<long long>(ring_.size()) - 1))];
    }
    void push(std::size_t k_next, double w) { ring_[slot(static_cast<long long>(k_next))] = w; }

  private:
    std::size_t slot(long long step) const {
        const auto size = static_cast<long long>(ring_.size());
        return static_cast<std::size_t>(((step % size) + size) % size);
    }
    std::vector<double> ring_;
};

// Euler-Maruyama stepping of one path; sink(k, w_k) is invoked on every grid
// point in order. sigma = 0 never touches the generator, so the drift-only
// run is bit-identical to explicit Euler for the deterministic equation.
template <typename Sink>
void run_path(const SimConfig& cfg, const SimGrid& grid, std::uint64_t path_index, Sink&& sink) {
    PathBuffer buf(cfg.history, cfg.dt, grid.delay_steps);
    GaussianStream noise(cfg.seed, path_index);
    const double sqdt = cfg.sigma * std::sqrt(cfg.dt);
    double w = buf.initial();
    sink(std::size_t{0}, w);
    for (std::size_t k = 0; k < grid.n_steps; ++k) {
        const double wd = buf.delayed(k);
        w -= wd * cfg.dt;
        if (cfg.sigma != 0.0) w += sqdt * wd * noise.at(k);
        buf.push(k + 1, w);
        sink(k + 1, w);
    }
}

}  // namespace detail

/// All grid values of one path. Pure in (cfg, path_index).
inline std::vector<double> simulate_path(const SimConfig& cfg, std::uint64_t path_index) {
    const SimGrid grid = sim_grid(cfg);
    std::vector<double> values(grid.n_steps + 1);
    detail::run_path(cfg, grid, path_index,
                     [&](std::size_t k, double w) { values[k] = w; });
    return values;
}

/// Monte Carlo estimate of y(t) = E[w(t)^2 / 2] on the thinned output grid.
struct MeanSquareSeries {
    std::vector<double> times;
    std::vector<double> y;
    std::vector<double> std_error;  // sample standard deviation / sqrt(n_paths)
    std::size_t n_paths = 0;
    double tau = 0.0;
    double sigma = 0.0;
    double w0 = 0.0;  // history value at t = 0
    bool constant_history = false;
};

namespace detail {

inline constexpr std::size_t ensemble_block = 256;  // paths per reduction block

struct BlockSums {
    std::vector<double> sum_y;   // sum of w^2/2 per stored point
    std::vector<double> sum_y2;  // sum of (w^2/2)^2 per stored point
};

inline BlockSums ensemble_block_sums(const SimConfig& cfg, const SimGrid& grid,
                                     std::size_t path_begin, std::size_t path_end) {
    std::vector<KahanSum> sy(grid.n_stored);
    std::vector<KahanSum> sy2(grid.n_stored);
    for (std::size_t p = path_begin; p < path_end; ++p) {
        run_path(cfg, grid, p, [&](std::size_t k, double w) {
            if (k % cfg.store_every == 0) {
                const double v = 0.5 * w * w;
                const std::size_t i = k / cfg.store_every;
                sy[i].add(v);
                sy2[i].add(v * v);
            }
        });
    }
    BlockSums out;
    out.sum_y.resize(grid.n_stored);
    out.sum_y2.resize(grid.n_stored);
    for (std::size_t i = 0; i < grid.n_stored; ++i) {
        out.sum_y[i] = sy[i].sum;
        out.sum_y2[i] = sy2[i].sum;
    }
    return out;
}

}  // namespace detail

/// Ensemble mean square with per-time standard errors. Paths are reduced in
/// fixed blocks of 256 combined in index order with compensated summation,
/// so the result does not depend on the thread count.
inline MeanSquareSeries ensemble_mean_square(const SimConfig& cfg) {
    const SimGrid grid = sim_grid(cfg);

    MeanSquareSeries series;
    series.n_paths = cfg.n_paths;
    series.tau = cfg.tau;
    series.sigma = cfg.sigma;
    series.w0 = cfg.history.at(0.0);
    series.constant_history = cfg.history.kind == History::Kind::constant;

    if (cfg.sigma == 0.0) {
        // noise-free ensembles collapse to a single deterministic path with
        // exactly zero standard error
        series.times.reserve(grid.n_stored);
        series.y.reserve(grid.n_stored);
        detail::run_path(cfg, grid, 0, [&](std::size_t k, double w) {
            if (k % cfg.store_every == 0) {
                series.times.push_back(static_cast<double>(k) * cfg.dt);
                series.y.push_back(0.5 * w * w);
            }
        });
        series.std_error.assign(series.y.size(), 0.0);
        return series;
    }

    const std::size_t n_blocks = (cfg.n_paths + detail::ensemble_block - 1) / detail::ensemble_block;
    std::vector<detail::BlockSums> blocks(n_blocks);

    unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(n_blocks)));

    const auto run_blocks = [&](std::atomic<std::size_t>& next) {
        for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) {
            const std::size_t lo = b * detail::ensemble_block;
            const std::size_t hi = std::min(lo + detail::ensemble_block, cfg.n_paths);
            blocks[b] = detail::ensemble_block_sums(cfg, grid, lo, hi);
        }
    };
    std::atomic<std::size_t> next_block{0};
    if (n_threads == 1) {
        run_blocks(next_block);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back([&] { run_blocks(next_block); });
        for (auto& th : pool) th.join();
    }

    series.times.resize(grid.n_stored);
    series.y.resize(grid.n_stored);
    series.std_error.resize(grid.n_stored);

    const auto n = static_cast<double>(cfg.n_paths);
    for (std::size_t i = 0; i < grid.n_stored; ++i) {
        detail::KahanSum sy;
        detail::KahanSum sy2;
        for (const auto& b : blocks) {
            sy.add(b.sum_y[i]);
            sy2.add(b.sum_y2[i]);
        }
        const double mean = sy.sum / n;
        double se = 0.0;
        if (cfg.n_paths > 1) {
            const double var = std::max(0.0, (sy2.sum - n * mean * mean) / (n - 1.0));
            se = std::sqrt(var / n);
        }
        series.times[i] = static_cast<double>(i * cfg.store_every) * cfg.dt;
        series.y[i] = mean;
        series.std_error[i] = se;
    }
    return series;
}

/// Least-squares exponential-decay fit of a mean-square series.
struct DecayFit {
    double rate = 0.0;       // slope of log y over t
    double intercept = 0.0;  // log y extrapolated to t = 0
    double t_lo = 0.0;
    double t_hi = 0.0;
    double r_squared = 0.0;
    double rate_std_error = 0.0;  // from the per-point standard errors
    std::size_t n_points = 0;
};

/// Fit log y against t over [t_lo, t_hi]. The rate's standard error
/// propagates the per-time Monte Carlo errors through the regression
/// weights; with positively correlated noise across times it is
/// conservative.
inline DecayFit fit_decay(const MeanSquareSeries& series, double t_lo, double t_hi) {
    if (!(t_lo < t_hi)) throw std::invalid_argument("fit_decay: window must be nonempty");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        if (series.times[i] >= t_lo - 1e-12 && series.times[i] <= t_hi + 1e-12) idx.push_back(i);
    }
    if (idx.size() < 2) throw std::invalid_argument("fit_decay: fewer than two points in window");
    for (const std::size_t i : idx) {
        if (!(series.y[i] > 0.0))
            throw std::domain_error("fit_decay: nonpositive mean square in window");
    }

    const auto n = static_cast<double>(idx.size());
    double t_mean = 0.0;
    double l_mean = 0.0;
    for (const std::size_t i : idx) {
        t_mean += series.times[i];
        l_mean += std::log(series.y[i]);
    }
    t_mean /= n;
    l_mean /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const std::size_t i : idx) {
        const double dt_ = series.times[i] - t_mean;
        const double dl = std::log(series.y[i]) - l_mean;
        sxx += dt_ * dt_;
        sxy += dt_ * dl;
        syy += dl * dl;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_decay: degenerate time window");

    DecayFit fit;
    fit.rate = sxy / sxx;
    fit.intercept = l_mean - fit.rate * t_mean;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.n_points = idx.size();
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    double var_rate = 0.0;
    for (const std::size_t i : idx) {
        const double a = (series.times[i] - t_mean) / sxx;
        const double se_log = series.std_error[i] / series.y[i];
        var_rate += a * a * se_log * se_log;
    }
    fit.rate_std_error = std::sqrt(var_rate);
    return fit;
}

/// Monotone decrease up to statistical noise: every consecutive stored pair
/// must satisfy y_{k+1} <= y_k + z_slack * (se_k + se_{k+1}).
inline bool check_monotone(const MeanSquareSeries& series, double z_slack) {
    for (std::size_t i = 0; i + 1 < series.y.size(); ++i) {
        const double slack = z_slack * (series.std_error[i] + series.std_error[i + 1]);
        if (series.y[i + 1] > series.y[i] + slack) return false;
    }
    return true;
}

}  // namespace dgbm
