#include <catch2/catch_amalgamated.hpp>

#include <dgbm/philox.hpp>
#include <dgbm/stability.hpp>

#include <cmath>
#include <stdexcept>

using namespace dgbm;
using Catch::Approx;

TEST_CASE("asymptotic_sigma_max endpoints and frozen values") {
    CHECK(asymptotic_sigma_max(0.0) == sqrt2);
    CHECK(asymptotic_sigma_max(1.0) == 0.0);
    CHECK(asymptotic_sigma_max(1.5) == 0.0);
    // sqrt(1.5) - sqrt(0.5)
    CHECK(asymptotic_sigma_max(0.5) == Approx(0.5176380902050415).epsilon(1e-15));
    CHECK_THROWS_AS(asymptotic_sigma_max(-0.1), std::domain_error);
}

TEST_CASE("asymptotic_sigma_max is strictly decreasing on [0, 1)") {
    double prev = asymptotic_sigma_max(0.0);
    for (int i = 1; i <= 100; ++i) {
        const double tau = 0.01 * i * 0.99;
        const double cur = asymptotic_sigma_max(tau);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("asymptotic_tau_max endpoints and frozen values") {
    CHECK(asymptotic_tau_max(0.0) == 1.0);
    // 1 - sqrt(3)/2
    CHECK(asymptotic_tau_max(1.0) == Approx(0.13397459621556135).epsilon(1e-15));
    CHECK(asymptotic_tau_max(sqrt2) == 0.0);
    CHECK(asymptotic_tau_max(2.0) == 0.0);
    CHECK_THROWS_AS(asymptotic_tau_max(-1.0), std::domain_error);
}

TEST_CASE("asymptotic condition: sigma form and tau form agree") {
    // random points with a skip band around the numerical boundary
    int checked = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double tau = 1.2 * uniform01(7001, 0, i);
        const double sigma = 1.6 * uniform01(7001, 1, i);
        const ReducedParams p{tau, sigma};
        const double gap = sigma - asymptotic_sigma_max(tau);
        if (std::abs(gap) < 1e-12) continue;
        const bool by_sigma = gap < 0.0;
        const bool by_tau = tau < asymptotic_tau_max(sigma) && sigma < sqrt2;
        CHECK(asymptotic_ok(p) == by_sigma);
        CHECK(by_sigma == by_tau);
        ++checked;
    }
    CHECK(checked > 19000);
}

TEST_CASE("decay margin positive exactly on the asymptotic region") {
    CHECK(decay_margin({0.25, 0.5}) == 0.75);
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double tau = 1.5 * uniform01(7002, 0, i);
        const double sigma = 1.6 * uniform01(7002, 1, i);
        const ReducedParams p{tau, sigma};
        const double kappa = decay_margin(p);
        if (std::abs(kappa) < 1e-9) continue;
        CHECK(asymptotic_ok(p) == (kappa > 0.0));
    }
}

TEST_CASE("ehs_tau_max endpoints and frozen values") {
    // sqrt(8)/4 = 1/sqrt(2)
    CHECK(ehs_tau_max(0.0) == 0.7071067811865476);
    // (sqrt(6) - 2)/4
    CHECK(ehs_tau_max(1.0) == Approx(0.11237243569579453).epsilon(1e-15));
    CHECK(ehs_tau_max(sqrt2) == 0.0);
    CHECK_THROWS_AS(ehs_tau_max(-0.5), std::domain_error);
}

TEST_CASE("ehs bound is strictly inside the asymptotic bound") {
    for (int i = 0; i < 200; ++i) {
        const double sigma = sqrt2 * (i + 0.5) / 200.5;
        CHECK(ehs_tau_max(sigma) < asymptotic_tau_max(sigma));
    }
}

TEST_CASE("g_factor values and monotonicity") {
    CHECK(g_factor(0.0) == 1.0);
    CHECK(g_factor(0.4) == Approx(1.2377100470690154).epsilon(1e-15));
    // G(0.5) = sqrt(e - 1)
    CHECK(g_factor(0.5) == Approx(1.3108324944320862).epsilon(1e-15));
    CHECK(g_factor(1e-8) == Approx(1.000000005).epsilon(1e-12));
    double prev = g_factor(0.0);
    for (int i = 1; i <= 50; ++i) {
        const double cur = g_factor(0.1 * i);
        CHECK(cur > prev);
        prev = cur;
    }
    CHECK_THROWS_AS(g_factor(-1e-9), std::domain_error);
}

TEST_CASE("exp_sigma_bound1 frozen values and zero region") {
    CHECK(exp_sigma_bound1(0.2, 2.0) == Approx(0.6757778957598478).epsilon(1e-14));
    CHECK(exp_sigma_bound1(0.1, 3.0) == Approx(1.3458207069296872).epsilon(1e-14));
    // mu below the window: 2 mu <= 2 e^{mu tau}
    CHECK(exp_sigma_bound1(0.2, 1.0) == 0.0);
    // tau > 1/e: the radicand is negative for every mu
    CHECK(exp_sigma_bound1(0.4, 2.0) == 0.0);
    CHECK(exp_sigma_bound1(0.4, 10.0) == 0.0);
}

TEST_CASE("exp_sigma_bound2 frozen values and tau = 0 limit") {
    CHECK(exp_sigma_bound2(0.2, 2.0) == Approx(0.7923251496013484).epsilon(1e-14));
    CHECK(exp_sigma_bound2(0.1, 3.0) == Approx(1.009297778976926).epsilon(1e-14));
    CHECK(exp_sigma_bound2(0.0, 5.0) == sqrt2);
    CHECK(exp_sigma_bound2(0.0, 1.0) == sqrt2);
}

TEST_CASE("exp_sigma_bound1 equivalent to the two-sided rate condition") {
    int checked = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double tau = 0.36 * uniform01(7003, 0, i);
        const double mu = 1.0 + 9.0 * uniform01(7003, 1, i);
        const double sigma = 1.6 * uniform01(7003, 2, i);
        const double lhs = 2.0 * std::exp(mu * tau) +
                           sigma * sigma * std::exp(2.0 * mu * tau);
        if (std::abs(lhs - 2.0 * mu) < 1e-12 * (1.0 + 2.0 * mu)) continue;
        const bool rate_ok = lhs < 2.0 * mu;
        const bool bound_ok = sigma < exp_sigma_bound1(tau, mu);
        CHECK(rate_ok == bound_ok);
        ++checked;
    }
    CHECK(checked > 19000);
}

TEST_CASE("exp_sigma_bound2 equivalent to the descent condition") {
    int checked = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const double tau = 0.36 * uniform01(7004, 0, i);
        const double mu = 1.0 + 9.0 * uniform01(7004, 1, i);
        const double sigma = 1.6 * uniform01(7004, 2, i);
        const double g = g_factor(mu * tau);
        const double lhs = (std::sqrt(tau) + sigma) * std::sqrt(tau) * g +
                           0.5 * sigma * sigma;
        if (std::abs(lhs - 1.0) < 1e-12) continue;
        const bool descent_ok = lhs < 1.0;
        const bool bound_ok = sigma < exp_sigma_bound2(tau, mu);
        CHECK(descent_ok == bound_ok);
        ++checked;
    }
    CHECK(checked > 19000);
}

TEST_CASE("mu_window frozen roots") {
    struct Row {
        double tau, lo, hi;
    };
    const Row rows[] = {
        {0.05, 1.0541196710309269, 89.99510577046975},
        {0.1, 1.1183255915896297, 35.77152063957297},
        {0.2, 1.2958555090953687, 12.713206788867632},
        {0.3, 1.6313407572673833, 5.9377900780720925},
        {0.35, 2.0475394755887826, 3.856335006263568},
    };
    for (const Row& r : rows) {
        const auto win = mu_window(r.tau);
        REQUIRE(win.has_value());
        CHECK(win->lo == Approx(r.lo).margin(1e-9));
        CHECK(win->hi == Approx(r.hi).margin(1e-8));
    }
}

TEST_CASE("mu_window membership and closure") {
    for (const double tau : {0.05, 0.1, 0.2, 0.3, 0.35}) {
        const auto win = mu_window(tau);
        REQUIRE(win.has_value());
        CHECK(win->lo > 1.0);
        CHECK(win->hi > win->lo);
        const double mid = 0.5 * (win->lo + win->hi);
        CHECK(std::exp(mid * tau) < mid);
        CHECK(std::exp((win->lo - 1e-6) * tau) > win->lo - 1e-6);
        CHECK(std::exp((win->hi + 1e-6) * tau) > win->hi + 1e-6);
    }
    const auto zero = mu_window(0.0);
    REQUIRE(zero.has_value());
    CHECK(zero->lo == 1.0);
    CHECK(zero->hi == 1e6);
    CHECK_FALSE(mu_window(inv_e).has_value());
    CHECK_FALSE(mu_window(0.4).has_value());
    CHECK_THROWS_AS(mu_window(-0.1), std::domain_error);
}

TEST_CASE("mu_window shrinks as the delay grows") {
    const double taus[] = {0.05, 0.1, 0.2, 0.3, 0.35};
    for (int i = 0; i + 1 < 5; ++i) {
        const auto a = mu_window(taus[i]);
        const auto b = mu_window(taus[i + 1]);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(b->lo > a->lo);
        CHECK(b->hi < a->hi);
    }
}

TEST_CASE("exponential_sigma_max frozen values") {
    struct Row {
        double tau, sigma, mu;
    };
    const Row rows[] = {
        {0.05, 1.1616982579158595, 1.9180997732582181},
        {0.1, 1.027940844495612, 2.0133071775674916},
        {0.2, 0.7702036211112868, 2.374874307545088},
        {0.3, 0.4247098469410267, 2.838198893262829},
        {0.35, 0.19614183363007356, 2.727352517125941},
    };
    for (const Row& r : rows) {
        const ExponentialBound b = exponential_sigma_max(r.tau);
        CHECK(b.sigma_max == Approx(r.sigma).margin(1e-9));
        REQUIRE(b.witness.has_value());
        CHECK(b.witness->mu == Approx(r.mu).margin(1e-5));
        CHECK(b.witness->bound == b.sigma_max);
    }
}

TEST_CASE("exponential_sigma_max limits") {
    const ExponentialBound at_zero = exponential_sigma_max(0.0);
    CHECK(at_zero.sigma_max == sqrt2);
    REQUIRE(at_zero.witness.has_value());
    CHECK(at_zero.witness->mu == 3.0);
    CHECK(at_zero.witness->bound == sqrt2);

    for (const double tau : {inv_e, 0.368, 0.5, 1.0}) {
        const ExponentialBound b = exponential_sigma_max(tau);
        CHECK(b.sigma_max == 0.0);
        CHECK_FALSE(b.witness.has_value());
    }
    CHECK_THROWS_AS(exponential_sigma_max(-1e-9), std::domain_error);
}

TEST_CASE("exponential_sigma_max strictly decreasing toward the window closure") {
    double prev = exponential_sigma_max(0.0).sigma_max;
    for (int i = 1; i <= 72; ++i) {
        const double tau = 0.005 * i;
        const double cur = exponential_sigma_max(tau).sigma_max;
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("exponential witness certifies both noise bounds") {
    for (const double tau : {0.05, 0.1, 0.2, 0.3, 0.35}) {
        const ExponentialBound b = exponential_sigma_max(tau);
        REQUIRE(b.witness.has_value());
        const double sigma = b.sigma_max - 1e-6;
        CHECK(exp_sigma_bound1(tau, b.witness->mu) > sigma);
        CHECK(exp_sigma_bound2(tau, b.witness->mu) > sigma);
    }
}

TEST_CASE("exponential_ok verdict") {
    const ExponentialVerdict yes = exponential_ok({0.1, 0.5});
    CHECK(yes.ok);
    CHECK(static_cast<bool>(yes));
    REQUIRE(yes.witness.has_value());
    CHECK(yes.witness->mu == Approx(2.0133071775674916).margin(1e-5));

    const ExponentialVerdict no = exponential_ok({0.1, 1.03});
    CHECK_FALSE(no.ok);
    CHECK_FALSE(no.witness.has_value());

    CHECK_FALSE(exponential_ok({0.5, 0.1}).ok);
    CHECK(exponential_ok({0.0, 1.0}).ok);
}

TEST_CASE("exponential region sits inside the asymptotic region") {
    for (int i = 0; i < 40; ++i) {
        const double tau = inv_e * (i + 0.5) / 40.0;
        CHECK(exponential_sigma_max(tau).sigma_max <=
              asymptotic_sigma_max(tau) + 1e-12);
    }
}
