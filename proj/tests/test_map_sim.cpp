#include <doctest.h>

#include <cstdlib>

#include "freqbound/bounds.hpp"
#include "freqbound/map_sim.hpp"
#include "freqbound/testpoints.hpp"
#include "freqbound/wwb.hpp"
#include "oracles.hpp"

using namespace freqbound;

namespace {

SignalConfig signal_at(int k, double snr_db) {
    SignalConfig c;
    c.k = k;
    c.snr = from_db(snr_db);
    return c;
}

// Reference MAP by direct evaluation of the objective on the same grid.
double brute_force_grid_max(const SignalConfig& c, const VonMisesPrior& prior, const ObservationVector& obs, int n) {
    double best = -INFINITY, arg = 0.0;
    for (int m = 0; m < n; ++m) {
        const double t = -oracle::pi + 2 * oracle::pi * m / n;
        const double v = ambiguity_at(c, obs, prior, t);
        if (v > best) {
            best = v;
            arg = t;
        }
    }
    return arg;
}

}  // namespace

TEST_SUITE("map_sim") {

TEST_CASE("wrap_error") {
    CHECK(wrap_error(0.1, 0.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(wrap_error(1.5 * oracle::pi, 0.0) == doctest::Approx(-0.5 * oracle::pi).epsilon(1e-15));
    CHECK(wrap_error(-0.5 * oracle::pi, 0.0) == doctest::Approx(-0.5 * oracle::pi).epsilon(1e-15));
    CHECK(wrap_error(oracle::pi - 0.01, -oracle::pi + 0.01) == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK(wrap_error(oracle::pi, 0.0) == doctest::Approx(-oracle::pi));
    CHECK_THROWS_AS(wrap_error(NAN, 0.0), std::domain_error);
}

TEST_CASE("noiseless MAP lands within a grid cell") {
    const auto c = signal_at(20, 0);
    const auto obs = generate_noiseless(c, 0.4 * oracle::pi);
    const VonMisesPrior flat(0, 0);
    CHECK(std::abs(map_estimate(c, flat, obs, 4096, false) - 0.4 * oracle::pi) <= 2 * oracle::pi / 4096);
    CHECK(std::abs(map_estimate(c, flat, obs, 4096, true) - 0.4 * oracle::pi) < 1e-8);
    CHECK(std::abs(map_estimate(c, flat, obs, 64, true) - 0.4 * oracle::pi) < 1e-8);
}

TEST_CASE("grid search agrees with direct evaluation, including folded K > N") {
    for (auto [k, n] : {std::pair{20, 4096}, std::pair{20, 64}, std::pair{100, 64}, std::pair{300, 128}}) {
        SignalConfig c = signal_at(k, -8);
        c.phi = 0.7;
        const VonMisesPrior prior(1.0, 2.0);
        for (int t = 0; t < 10; ++t) {
            auto rng = derive_stream(19, static_cast<std::uint64_t>(t));
            const auto obs = generate(c, prior.sample(rng), rng);
            CHECK(map_estimate(c, prior, obs, n, false) == doctest::Approx(brute_force_grid_max(c, prior, obs, n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("refinement never lowers the objective") {
    const auto c = signal_at(20, -3);
    const VonMisesPrior prior(0, 1);
    for (int t = 0; t < 50; ++t) {
        auto rng = derive_stream(4, static_cast<std::uint64_t>(t));
        const auto obs = generate(c, prior.sample(rng), rng);
        const double coarse = map_estimate(c, prior, obs, 256, false);
        const double fine = map_estimate(c, prior, obs, 256, true);
        CHECK(fine >= -oracle::pi);
        CHECK(fine < oracle::pi);
        CHECK(ambiguity_at(c, obs, prior, fine) >= ambiguity_at(c, obs, prior, coarse) - 1e-12);
    }
}

TEST_CASE("strong prior pins the estimate to mu") {
    const auto c = signal_at(20, -20);
    const VonMisesPrior prior(0.8, 500);
    for (int t = 0; t < 20; ++t) {
        auto rng = derive_stream(6, static_cast<std::uint64_t>(t));
        const auto obs = generate(c, -2.0, rng);
        CHECK(std::abs(map_estimate(c, prior, obs) - 0.8) < 0.05);
    }
}

TEST_CASE("uniform prior gives the ML estimate") {
    const auto c = signal_at(20, 0);
    const VonMisesPrior flat(0.5, 0);
    for (int t = 0; t < 20; ++t) {
        auto rng = derive_stream(12, static_cast<std::uint64_t>(t));
        const auto obs = generate(c, 1.0, rng);
        // ML: maximize the data term alone, which is the same objective with no prior term.
        const double ml = brute_force_grid_max(c, VonMisesPrior(-2.0, 0), obs, 4096);
        CHECK(map_estimate(c, flat, obs, 4096, false) == doctest::Approx(ml).epsilon(1e-14));
    }
}

TEST_CASE("McConfig validation") {
    McConfig mc;
    mc.trials = 0;
    CHECK_THROWS_AS(mc.validate(), std::invalid_argument);
    mc.trials = 1;
    mc.grid_size = 32;
    CHECK_THROWS_AS(mc.validate(), std::invalid_argument);
    CHECK_THROWS_AS(map_estimate(signal_at(4, 0), VonMisesPrior(0, 0), generate_noiseless(signal_at(4, 0), 0), 10), std::invalid_argument);
}

TEST_CASE("Monte Carlo is reproducible and thread-count independent") {
    const auto c = signal_at(20, -6);
    const VonMisesPrior prior(0, 1);
    McConfig mc;
    mc.trials = 1;
    mc.seed = 123;
    const auto a = run_monte_carlo(c, prior, mc);
    const auto b = run_monte_carlo(c, prior, mc);
    CHECK(a.mse == b.mse);
    CHECK(a.trials_used == 1);

    mc.trials = 3000;
    setenv("FREQBOUND_THREADS", "1", 1);
    const auto serial = run_monte_carlo(c, prior, mc);
    setenv("FREQBOUND_THREADS", "4", 1);
    const auto threaded = run_monte_carlo(c, prior, mc);
    unsetenv("FREQBOUND_THREADS");
    CHECK(serial.mse == threaded.mse);
    CHECK(serial.mse_stderr == threaded.mse_stderr);
    CHECK(serial.outlier_fraction == threaded.outlier_fraction);
    CHECK(serial.rmse_db == doctest::Approx(10 * std::log10(serial.mse)).epsilon(1e-14));
}

TEST_CASE("asymptotic and no-information regimes") {
    const VonMisesPrior prior(0, 1);
    McConfig mc;
    mc.trials = 10000;
    mc.seed = 1;
    const auto high = run_monte_carlo(signal_at(20, 10), prior, mc);
    CHECK(std::abs(high.rmse_db - to_db(bcrb(prior, 20, from_db(10)))) < 1.0);
    const auto low = run_monte_carlo(signal_at(20, -20), prior, mc);
    CHECK(std::abs(low.rmse_db - to_db(prior.prior_variance())) < 1.5);
}

TEST_CASE("outlier fraction falls with SNR; MSE stays above WWB") {
    const VonMisesPrior prior(0, 1);
    const auto points = build({2, 9, 10, 0.5}, 20);
    McConfig mc;
    mc.trials = 4000;
    mc.seed = 9;
    double prev = 1.0;
    int violations = 0;
    for (double db = -20.0; db <= 10.0; db += 2.0) {
        const auto r = run_monte_carlo(signal_at(20, db), prior, mc);
        CHECK(r.outlier_fraction >= 0.0);
        CHECK(r.outlier_fraction <= 1.0);
        const double se = std::sqrt(prev * (1.0 - prev) / mc.trials + 1e-12);
        if (r.outlier_fraction > prev + 3.0 * std::sqrt(2.0) * se) ++violations;
        prev = r.outlier_fraction;
        const double w = wwb_value(prior, signal_at(20, db), points).mse_bound;
        CAPTURE(db);
        CHECK(r.mse >= w - 3 * r.mse_stderr);
    }
    CHECK(violations == 0);
    CHECK(prev == 0.0);
}

TEST_CASE("fixed frequency and linear error modes") {
    const VonMisesPrior prior(0, 0);
    McConfig mc;
    mc.trials = 500;
    mc.fixed_theta = oracle::pi - 0.001;
    mc.seed = 2;
    const auto wrapped = run_monte_carlo(signal_at(20, 5), prior, mc);
    mc.error_mode = ErrorMode::Linear;
    const auto linear = run_monte_carlo(signal_at(20, 5), prior, mc);
    // Near the seam, unwrapped errors of about 2 pi inflate the linear score.
    CHECK(linear.mse > wrapped.mse);
    CHECK(wrapped.mse < 1e-3);
}

}
