// Command-line front end: region curves, Monte Carlo simulation, fundamental
// solution diagnostics, and grid verification, all emitting CSV/JSON with
// reproducibility manifests.
//
// Exit codes: 0 success (divergent/unstable verdicts are answers, not
// failures), 2 usage or configuration error, 3 I/O error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dgbm/dgbm.hpp"
#include "dgbm/io.hpp"

namespace {

using nlohmann::json;

constexpr std::uint64_t default_seed = 12345;

// Output sink: file plus manifest sidecar, or stdout when no path was given.
void emit(const std::optional<std::string>& out_path, const std::string& payload,
          const json& manifest) {
    if (out_path) {
        dgbm::write_text_file(*out_path, payload);
        dgbm::write_text_file(*out_path + ".manifest.json", manifest.dump(2) + "\n");
    } else {
        std::cout << payload;
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = n == 1 ? lo
                         : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return grid;
}

// ---------------------------------------------------------------- region ---

struct RegionArgs {
    std::string kinds = "all";
    double tau_min = 0.0;
    double tau_max = 0.7;
    std::size_t n_points = 200;
    std::optional<std::string> out;
};

int run_region(const RegionArgs& args) {
    if (!(args.tau_min >= 0.0) || !(args.tau_max > args.tau_min))
        throw std::invalid_argument("region: need 0 <= tau-min < tau-max");
    if (args.n_points < 2) throw std::invalid_argument("region: need n-points >= 2");

    std::vector<dgbm::RegionKind> kinds;
    if (args.kinds == "all") {
        kinds = {dgbm::RegionKind::asymptotic, dgbm::RegionKind::ehs,
                 dgbm::RegionKind::exponential};
    } else {
        std::string token;
        std::istringstream stream(args.kinds);
        while (std::getline(stream, token, ',')) kinds.push_back(dgbm::parse_region_kind(token));
        if (kinds.empty()) throw std::invalid_argument("region: no kinds requested");
    }

    const std::vector<double> grid = linspace(args.tau_min, args.tau_max, args.n_points);
    std::vector<dgbm::RegionCurve> curves;
    curves.reserve(kinds.size());
    for (const auto kind : kinds) curves.push_back(dgbm::region_curve(kind, grid));

    dgbm::CsvWriter csv;
    std::vector<std::string> header = {"tau"};
    for (const auto kind : kinds) header.push_back(std::string("sigma_") + dgbm::region_kind_name(kind));
    csv.row(header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row = {grid[i]};
        for (const auto& curve : curves) row.push_back(curve.points[i].sigma_max);
        csv.numeric_row(row);
    }

    json kind_names = json::array();
    for (const auto kind : kinds) kind_names.push_back(dgbm::region_kind_name(kind));
    const json params = {{"kinds", kind_names},
                         {"tau_min", args.tau_min},
                         {"tau_max", args.tau_max},
                         {"n_points", args.n_points}};
    emit(args.out, csv.str(), dgbm::run_manifest("region", params, 0));
    return 0;
}

// -------------------------------------------------------------- simulate ---

struct SimulateArgs {
    double tau = 0.0;
    double sigma = 0.0;
    double w0 = 1.0;
    std::size_t dt_divisor = 20;
    double dt = 1e-3;  // used only when tau = 0
    double T = 5.0;
    std::size_t n_paths = 10000;
    std::uint64_t seed = default_seed;
    std::size_t store_every = 1;
    bool checks = true;
    unsigned threads = 0;
    std::optional<std::string> out;
};

json simulate_verdict(const SimulateArgs& args, const dgbm::MeanSquareSeries& series) {
    const dgbm::ReducedParams p{args.tau, args.sigma};
    json verdict;
    verdict["asymptotic_ok"] = dgbm::asymptotic_ok(p);
    const auto expo = dgbm::exponential_ok(p);
    verdict["exponential_ok"] = expo.ok;
    verdict["witness_mu"] = expo.witness ? json(expo.witness->mu) : json(nullptr);
    const auto appleby = dgbm::appleby_ok(p, 1e-8);
    verdict["appleby_ok"] = appleby.ok;
    verdict["appleby_reason"] = appleby.reason;
    verdict["kappa"] = dgbm::decay_margin(p);
    verdict["regime"] =
        args.tau > 0.0 ? json(dgbm::regime_name(dgbm::classify_regime(args.tau))) : json(nullptr);
    try {
        const auto fit = dgbm::fit_decay(series, 0.0, args.T);
        verdict["fitted_rate"] = fit.rate;
        verdict["fitted_rate_std_error"] = fit.rate_std_error;
    } catch (const std::exception&) {
        // mean square hit the Monte Carlo noise floor; no rate to report
        verdict["fitted_rate"] = nullptr;
        verdict["fitted_rate_std_error"] = nullptr;
    }
    verdict["monotone"] = dgbm::check_monotone(series, 3.0);
    return verdict;
}

int run_simulate(const SimulateArgs& args) {
    dgbm::SimConfig cfg;
    cfg.tau = args.tau;
    cfg.sigma = args.sigma;
    cfg.dt = args.tau > 0.0 ? args.tau / static_cast<double>(args.dt_divisor) : args.dt;
    cfg.T = args.T;
    cfg.n_paths = args.n_paths;
    cfg.seed = args.seed;
    cfg.history = dgbm::History::constant(args.w0);
    cfg.store_every = args.store_every;
    cfg.threads = args.threads;
    if (args.tau > 0.0 && args.dt_divisor < 1)
        throw std::invalid_argument("simulate: dt-divisor must be >= 1");

    const dgbm::MeanSquareSeries series = dgbm::ensemble_mean_square(cfg);

    dgbm::CsvWriter csv;
    csv.row({"t", "y", "stderr"});
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        csv.numeric_row({series.times[i], series.y[i], series.std_error[i]});
    }

    const json params = {{"tau", args.tau},       {"sigma", args.sigma},
                         {"w0", args.w0},         {"dt", cfg.dt},
                         {"T", args.T},           {"n_paths", args.n_paths},
                         {"store_every", args.store_every}};
    const json manifest = dgbm::run_manifest("simulate", params, args.seed);

    json verdict;
    if (args.checks) {
        verdict = simulate_verdict(args, series);
        verdict["schema"] = 1;
        verdict["params"] = params;
        verdict["seed"] = args.seed;
    }

    if (args.out) {
        dgbm::write_text_file(*args.out, csv.str());
        dgbm::write_text_file(*args.out + ".manifest.json", manifest.dump(2) + "\n");
        if (args.checks)
            dgbm::write_text_file(*args.out + ".verdict.json", verdict.dump(2) + "\n");
    } else {
        std::cout << csv.str();
        if (args.checks) std::cout << "\n" << verdict.dump(2) << "\n";
    }
    return 0;
}

// ----------------------------------------------------------- fundamental ---

struct FundamentalArgs {
    double tau = 0.0;
    double tol = 1e-10;
    double horizon = 0.0;  // 0 = auto (20 tau)
    std::size_t samples = 512;
    std::optional<std::string> out;
};

int run_fundamental(const FundamentalArgs& args) {
    if (!(args.tau > 0.0)) throw std::invalid_argument("fundamental: need tau > 0");
    if (!(args.tol > 0.0)) throw std::invalid_argument("fundamental: need tol > 0");
    if (args.samples < 2) throw std::invalid_argument("fundamental: need samples >= 2");
    double horizon = args.horizon;
    if (horizon == 0.0) horizon = 20.0 * args.tau;
    if (!(horizon > 0.0)) throw std::invalid_argument("fundamental: need horizon > 0");
    const auto pieces_needed = static_cast<std::size_t>(horizon / args.tau) + 1;
    if (pieces_needed > dgbm::max_fundamental_pieces)
        throw std::invalid_argument("fundamental: horizon exceeds the covered piece cap");

    const dgbm::PiecewisePoly poly = dgbm::fundamental_solution(args.tau, pieces_needed);
    dgbm::CsvWriter csv;
    csv.row({"t", "r"});
    for (std::size_t i = 0; i < args.samples; ++i) {
        const double t =
            horizon * static_cast<double>(i) / static_cast<double>(args.samples - 1);
        csv.numeric_row({t, dgbm::evaluate(poly, std::min(t, std::nextafter(poly.end(), 0.0)))});
    }

    json report;
    report["schema"] = 1;
    report["regime"] = dgbm::regime_name(dgbm::classify_regime(args.tau));
    report["sign_changes"] = dgbm::sign_changes(poly, horizon);
    try {
        const dgbm::L2Result l2 = dgbm::l2_norm_sq(args.tau, args.tol);
        report["divergent"] = false;
        report["l2_norm_sq"] = l2.value;
        report["l2_tail_bound"] = l2.tail_bound;
        report["l2_pieces"] = l2.pieces;
    } catch (const dgbm::NotSquareIntegrable&) {
        report["divergent"] = true;  // a valid answer, not a failure
        report["l2_norm_sq"] = nullptr;
    }

    const json params = {{"tau", args.tau},
                         {"tol", args.tol},
                         {"horizon", horizon},
                         {"samples", args.samples}};
    report["params"] = params;
    const json manifest = dgbm::run_manifest("fundamental", params, 0);

    if (args.out) {
        dgbm::write_text_file(*args.out, csv.str());
        dgbm::write_text_file(*args.out + ".manifest.json", manifest.dump(2) + "\n");
        dgbm::write_text_file(*args.out + ".report.json", report.dump(2) + "\n");
    } else {
        std::cout << csv.str() << "\n" << report.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- verify ---

struct VerifyArgs {
    double tau_min = 0.0;
    double tau_max = 0.5;
    std::size_t tau_points = 5;
    double sigma_min = 0.0;
    double sigma_max = 1.2;
    std::size_t sigma_points = 5;
    std::size_t n_paths = 2000;
    double T = 4.0;
    std::uint64_t seed = default_seed;
    unsigned threads = 0;
    std::optional<std::string> out;
};

int run_verify(const VerifyArgs& args) {
    if (!(args.tau_min >= 0.0) || !(args.tau_max <= 2.0) || !(args.tau_min <= args.tau_max))
        throw std::invalid_argument("verify: tau grid must lie within [0, 2]");
    if (!(args.sigma_min >= 0.0) || !(args.sigma_max <= 2.0) ||
        !(args.sigma_min <= args.sigma_max))
        throw std::invalid_argument("verify: sigma grid must lie within [0, 2]");

    const std::vector<double> taus = linspace(args.tau_min, args.tau_max, args.tau_points);
    const std::vector<double> sigmas = linspace(args.sigma_min, args.sigma_max, args.sigma_points);

    json points = json::array();
    std::size_t violations_asymptotic = 0;
    std::size_t violations_exponential = 0;
    std::size_t mc_agrees_appleby = 0;
    std::size_t mc_points = 0;

    for (const double tau : taus) {
        for (const double sigma : sigmas) {
            const dgbm::ReducedParams p{tau, sigma};
            const bool asym = dgbm::asymptotic_ok(p);
            const bool expo = dgbm::exponential_ok(p).ok;
            const auto appleby = dgbm::appleby_ok(p, 1e-8);
            if (asym && !appleby.ok) ++violations_asymptotic;
            if (expo && !asym) ++violations_exponential;

            dgbm::SimConfig cfg;
            cfg.tau = tau;
            cfg.sigma = sigma;
            cfg.dt = tau > 0.0 ? tau / 16.0 : 0.01;
            cfg.T = args.T;
            cfg.n_paths = args.n_paths;
            cfg.seed = args.seed;
            cfg.threads = args.threads;
            const auto series = dgbm::ensemble_mean_square(cfg);
            json mc_rate = nullptr;
            bool mc_decay = true;  // a series at the noise floor has decayed
            try {
                const auto fit = dgbm::fit_decay(series, 0.0, args.T);
                mc_rate = fit.rate;
                mc_decay = fit.rate < 0.0;
            } catch (const std::exception&) {
            }
            ++mc_points;
            if (mc_decay == appleby.ok) ++mc_agrees_appleby;

            points.push_back(json{{"tau", tau},
                                  {"sigma", sigma},
                                  {"asymptotic_ok", asym},
                                  {"exponential_ok", expo},
                                  {"appleby_ok", appleby.ok},
                                  {"mc_rate", mc_rate},
                                  {"mc_decay", mc_decay}});
        }
    }

    const json params = {{"tau_min", args.tau_min},       {"tau_max", args.tau_max},
                         {"tau_points", args.tau_points}, {"sigma_min", args.sigma_min},
                         {"sigma_max", args.sigma_max},   {"sigma_points", args.sigma_points},
                         {"n_paths", args.n_paths},       {"T", args.T}};
    json report;
    report["schema"] = 1;
    report["params"] = params;
    report["seed"] = args.seed;
    report["points"] = points;
    report["summary"] = {{"n_points", mc_points},
                         {"violations_asymptotic_in_appleby", violations_asymptotic},
                         {"violations_exponential_in_asymptotic", violations_exponential},
                         {"mc_agrees_appleby", mc_agrees_appleby}};

    emit(args.out, report.dump(2) + "\n", dgbm::run_manifest("verify", params, args.seed));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability analysis of the delay geometric Brownian motion in reduced parameters"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dgbm::version_string);

    RegionArgs region;
    auto* region_cmd = app.add_subcommand("region", "Sample stability-region boundary curves");
    region_cmd->add_option("--kinds", region.kinds,
                           "Comma list of asymptotic,ehs,exponential or 'all'");
    region_cmd->add_option("--tau-min", region.tau_min, "Grid start");
    region_cmd->add_option("--tau-max", region.tau_max, "Grid end");
    region_cmd->add_option("--n-points", region.n_points, "Grid size (>= 2)");
    std::string region_out;
    region_cmd->add_option("--out", region_out, "Output CSV path (stdout when omitted)");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo mean-square trajectory");
    sim_cmd->add_option("--tau", sim.tau, "Reduced delay")->required();
    sim_cmd->add_option("--sigma", sim.sigma, "Reduced noise")->required();
    sim_cmd->add_option("--w0", sim.w0, "Constant initial datum");
    sim_cmd->add_option("--dt-divisor", sim.dt_divisor, "Steps per delay (dt = tau/m)");
    sim_cmd->add_option("--dt", sim.dt, "Step size when tau = 0");
    sim_cmd->add_option("--T", sim.T, "Horizon");
    sim_cmd->add_option("--n-paths", sim.n_paths, "Ensemble size");
    sim_cmd->add_option("--seed", sim.seed, "Master seed");
    sim_cmd->add_option("--store-every", sim.store_every, "Output-grid thinning");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = auto)");
    sim_cmd->add_flag("--checks,!--no-checks", sim.checks, "Emit the JSON verdict");
    std::string sim_out;
    sim_cmd->add_option("--out", sim_out, "Output CSV path (stdout when omitted)");

    FundamentalArgs fun;
    auto* fun_cmd = app.add_subcommand("fundamental", "Fundamental-solution diagnostics");
    fun_cmd->add_option("--tau", fun.tau, "Delay (> 0)")->required();
    fun_cmd->add_option("--tol", fun.tol, "L2 tail tolerance");
    fun_cmd->add_option("--horizon", fun.horizon, "Sampling horizon (0 = 20 tau)");
    fun_cmd->add_option("--samples", fun.samples, "CSV sample count");
    std::string fun_out;
    fun_cmd->add_option("--out", fun_out, "Output CSV path (stdout when omitted)");

    VerifyArgs ver;
    auto* ver_cmd = app.add_subcommand("verify", "Grid verification report");
    ver_cmd->add_option("--tau-min", ver.tau_min, "Tau grid start (within [0, 2])");
    ver_cmd->add_option("--tau-max", ver.tau_max, "Tau grid end (within [0, 2])");
    ver_cmd->add_option("--tau-points", ver.tau_points, "Tau grid size (0 = empty report)");
    ver_cmd->add_option("--sigma-min", ver.sigma_min, "Sigma grid start (within [0, 2])");
    ver_cmd->add_option("--sigma-max", ver.sigma_max, "Sigma grid end (within [0, 2])");
    ver_cmd->add_option("--sigma-points", ver.sigma_points, "Sigma grid size");
    ver_cmd->add_option("--n-paths", ver.n_paths, "Paths per grid point");
    ver_cmd->add_option("--T", ver.T, "Horizon per grid point");
    ver_cmd->add_option("--seed", ver.seed, "Master seed");
    ver_cmd->add_option("--threads", ver.threads, "Worker threads (0 = auto)");
    std::string ver_out;
    ver_cmd->add_option("--out", ver_out, "Output JSON path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (region_cmd->parsed()) {
            if (region_cmd->count("--out") > 0) region.out = region_out;
            return run_region(region);
        }
        if (sim_cmd->parsed()) {
            if (sim_cmd->count("--out") > 0) sim.out = sim_out;
            return run_simulate(sim);
        }
        if (fun_cmd->parsed()) {
            if (fun_cmd->count("--out") > 0) fun.out = fun_out;
            return run_fundamental(fun);
        }
        if (ver_cmd->parsed()) {
            if (ver_cmd->count("--out") > 0) ver.out = ver_out;
            return run_verify(ver);
        }
    } catch (const dgbm::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
