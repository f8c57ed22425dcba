#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "freqbound/bounds.hpp"
#include "freqbound/signal.hpp"
#include "oracles.hpp"

using namespace freqbound;

TEST_SUITE("bounds") {

TEST_CASE("fisher_information") {
    CHECK(fisher_information(1, 3.0) == 0.0);
    CHECK(fisher_information(20, 1.0) == doctest::Approx(4940.0).epsilon(1e-15));
    for (int k = 1; k <= 100; ++k) {
        double sq = 0.0;
        for (int i = 0; i < k; ++i) sq += static_cast<double>(i) * i;
        CHECK(fisher_information(k, 0.7) == doctest::Approx(2 * 0.7 * sq).epsilon(1e-13));
    }
    CHECK_THROWS_AS(fisher_information(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fisher_information(5, 0.0), std::invalid_argument);
}

TEST_CASE("bcrb") {
    CHECK(bcrb(VonMisesPrior(0, 0), 20, 1.0) == doctest::Approx(1.0 / 4940).epsilon(1e-15));
    CHECK(bcrb(VonMisesPrior(0, 1e-9), 20, 1.0) == doctest::Approx(1.0 / 4940).epsilon(1e-12));
    CHECK_THROWS_AS(bcrb(VonMisesPrior(0, 0), 1, 1.0), std::domain_error);
    CHECK(bcrb(VonMisesPrior(0, 2), 1, 1.0) > 0.0);
}

TEST_CASE("bcrb prior information equals the expected prior curvature") {
    // J_P = E[-d^2/dtheta^2 ln p(theta)] = E[kappa cos(theta - mu)].
    for (double kappa : {0.5, 2.0, 7.0}) {
        const VonMisesPrior prior(0.3, kappa);
        const double jp = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double t) { return kappa * std::cos(t - 0.3) * prior.pdf(t); }, -oracle::pi, oracle::pi, 20, 1e-15);
        const double from_bound = 1.0 / bcrb(prior, 20, 0.01) - fisher_information(20, 0.01);
        CAPTURE(kappa);
        CHECK(std::abs(from_bound - jp) < 1e-8 * jp);
        CHECK(std::abs(kappa * prior.bessel_ratio() - jp) < 1e-8 * jp);
    }
}

TEST_CASE("zzb limits") {
    const VonMisesPrior prior(0, 1);
    for (int k : {2, 20, 60}) {
        // K snr >= 60: ZZB -> 1/J_F.
        const double snr = 60.0 / k;
        CHECK(std::abs(zzb(prior, k, snr) * fisher_information(k, snr) - 1.0) < 1e-3);
        // K snr -> 0: ZZB -> prior variance.
        const double tiny = 1e-6 / k;
        CHECK(std::abs(zzb(prior, k, tiny) / prior.prior_variance() - 1.0) < 1e-3);
    }
    CHECK_THROWS_AS(zzb(prior, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(zzb(prior, 20, -1.0), std::invalid_argument);
}

TEST_CASE("zzb non-increasing in SNR") {
    for (double kappa : {0.0, 1.0, 5.0}) {
        const VonMisesPrior prior(0, kappa);
        double prev = INFINITY;
        for (double db = -20.0; db <= 15.0; db += 0.25) {
            const double v = zzb(prior, 20, from_db(db));
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("bound invariants") {
    for (double kappa : {0.0, 0.5, 2.0, 20.0})
        for (double db = -20.0; db <= 20.0; db += 2.0) {
            const VonMisesPrior prior(0, kappa);
            const double snr = from_db(db);
            CHECK(bcrb(prior, 20, snr) <= 1.0 / fisher_information(20, snr));
        }
    // High K snr: ZZB and BCRB converge.
    for (int k : {10, 20, 60})
        for (double ksnr : {100.0, 300.0, 1e4}) {
            const VonMisesPrior prior(0, 1);
            const double snr = ksnr / k;
            CHECK(std::abs(zzb(prior, k, snr) / bcrb(prior, k, snr) - 1.0) < 0.01);
        }
    // Both decrease in kappa.
    for (double db : {-15.0, -5.0, 5.0}) {
        double prev_b = INFINITY, prev_z = INFINITY;
        for (double kappa : {0.0, 0.5, 1.0, 2.0, 5.0, 20.0}) {
            const VonMisesPrior prior(0, kappa);
            const double b = bcrb(prior, 20, from_db(db));
            const double z = zzb(prior, 20, from_db(db));
            CHECK(b < prev_b);
            CHECK(z <= prev_z);
            prev_b = b;
            prev_z = z;
        }
    }
}

TEST_CASE("bound points and kind names") {
    const auto p = zzb_point(VonMisesPrior(0, 1), 20, 2.0);
    CHECK(p.kind == BoundKind::ZZB);
    CHECK(p.db == doctest::Approx(10 * std::log10(p.mse_bound)).epsilon(1e-14));
    CHECK(bcrb_point(VonMisesPrior(0, 1), 20, 2.0).mse_bound > 0);
    for (auto k : {BoundKind::WWB, BoundKind::BCRB, BoundKind::ZZB, BoundKind::MAP}) CHECK(parse_kind(kind_name(k)) == k);
    CHECK(parse_kind("zzb") == BoundKind::ZZB);
    CHECK_THROWS_AS(parse_kind("crb"), std::invalid_argument);
}

}
