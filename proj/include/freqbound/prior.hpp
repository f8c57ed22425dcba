#pragma once

#include "freqbound/random.hpp"

namespace freqbound {

/// Von Mises density of the normalized frequency, supported on [-pi, pi].
class VonMisesPrior {
public:
    /// mu in [-pi, pi], kappa in [0, 500].
    VonMisesPrior(double mu, double kappa);

    double mu() const noexcept { return mu_; }
    double kappa() const noexcept { return kappa_; }

    /// ln(2 pi I0(kappa)).
    double log_normalizer() const noexcept { return log_norm_; }

    /// Zero outside [-pi, pi].
    double pdf(double theta) const;

    /// Throws std::domain_error outside [-pi, pi].
    double log_pdf(double theta) const;

    /// Best-Fisher rejection draw, wrapped into [-pi, pi].
    double sample(RandomStream& rng) const;

    /// I1(kappa) / I0(kappa); 0 for the uniform prior.
    double bessel_ratio() const;

    /// Normal-approximation variance -2 ln(I1/I0), capped at the uniform
    /// variance pi^2/3 (which is also the kappa = 0 value).
    double prior_variance() const;

private:
    double mu_;
    double kappa_;
    double log_norm_;
};

/// Variance of the uniform density on [-pi, pi].
inline constexpr double kUniformVariance = 3.28986813369645287294;  // pi^2 / 3

}  // namespace freqbound
