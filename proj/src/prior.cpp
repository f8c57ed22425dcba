#include "freqbound/prior.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "freqbound/numerics.hpp"

namespace freqbound {

namespace {

double wrap_to_pi(double x) {
    const double r = std::remainder(x, kTwoPi);
    return r == kPi ? -kPi : r;
}

}  // namespace

VonMisesPrior::VonMisesPrior(double mu, double kappa) : mu_(mu), kappa_(kappa) {
    if (!std::isfinite(mu) || mu < -kPi || mu > kPi) {
        std::ostringstream os;
        os << "VonMisesPrior: mu = " << mu << " outside [-pi, pi]";
        throw std::invalid_argument(os.str());
    }
    if (!std::isfinite(kappa) || kappa < 0.0 || kappa > 500.0) {
        std::ostringstream os;
        os << "VonMisesPrior: kappa = " << kappa << " outside [0, 500]";
        throw std::invalid_argument(os.str());
    }
    log_norm_ = std::log(kTwoPi) + log_bessel_i0(kappa);
}

double VonMisesPrior::pdf(double theta) const {
    if (!(theta >= -kPi && theta <= kPi)) return 0.0;
    return std::exp(kappa_ * std::cos(theta - mu_) - log_norm_);
}

double VonMisesPrior::log_pdf(double theta) const {
    if (!(theta >= -kPi && theta <= kPi))
        throw std::domain_error("VonMisesPrior::log_pdf: theta outside [-pi, pi]");
    return kappa_ * std::cos(theta - mu_) - log_norm_;
}

double VonMisesPrior::sample(RandomStream& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Tiny kappa makes the Best-Fisher envelope ill-conditioned; rejection
    // from the uniform envelope is exact and efficient there.
    if (kappa_ < 1e-3) {
        if (kappa_ == 0.0) return -kPi + kTwoPi * unit(rng);
        for (;;) {
            const double theta = -kPi + kTwoPi * unit(rng);
            if (unit(rng) <= std::exp(kappa_ * (std::cos(theta - mu_) - 1.0))) return theta;
        }
    }

    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa_ * kappa_);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa_);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;) {
        const double u1 = unit(rng);
        const double z = std::cos(kPi * u1);
        const double f = (1.0 + r * z) / (r + z);
        const double c = kappa_ * (r - f);
        const double u2 = unit(rng);
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double u3 = unit(rng);
            const double offset = u3 > 0.5 ? std::acos(f) : -std::acos(f);
            return wrap_to_pi(mu_ + offset);
        }
    }
}

double VonMisesPrior::bessel_ratio() const { return bessel_i1_over_i0(kappa_); }

double VonMisesPrior::prior_variance() const {
    const double ratio = bessel_ratio();
    if (ratio <= 0.0) return kUniformVariance;
    return std::clamp(-2.0 * std::log(ratio), 0.0, kUniformVariance);
}

}  // namespace freqbound
