#include "freqbound/signal.hpp"

#include <cmath>
#include <stdexcept>

#include "freqbound/numerics.hpp"

namespace freqbound {

void SignalConfig::validate() const {
    if (k < 1) throw std::invalid_argument("SignalConfig: K must be >= 1");
    if (!(snr > 0.0) || !std::isfinite(snr)) throw std::invalid_argument("SignalConfig: snr must be > 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("SignalConfig: sigma2 must be > 0");
    if (!std::isfinite(phi)) throw std::invalid_argument("SignalConfig: phi must be finite");
}

double snr_from_cn0(double cn0_dbhz, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("snr_from_cn0: bandwidth must be > 0");
    return std::pow(10.0, cn0_dbhz / 10.0) / bandwidth_hz;
}

double cn0_from_snr(double snr, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("cn0_from_snr: bandwidth must be > 0");
    if (!(snr > 0.0)) throw std::invalid_argument("cn0_from_snr: snr must be > 0");
    return 10.0 * std::log10(snr * bandwidth_hz);
}

ObservationVector generate_noiseless(const SignalConfig& config, double theta) {
    config.validate();
    if (!(theta >= -kPi && theta <= kPi)) throw std::domain_error("generate: theta outside [-pi, pi]");
    const double a = config.amplitude();
    ObservationVector obs;
    obs.truth = theta;
    obs.samples.reserve(static_cast<std::size_t>(config.k));
    for (int i = 0; i < config.k; ++i) obs.samples.push_back(std::polar(a, theta * i + config.phi));
    return obs;
}

ObservationVector generate(const SignalConfig& config, double theta, RandomStream& rng) {
    ObservationVector obs = generate_noiseless(config, theta);
    std::normal_distribution<double> noise(0.0, std::sqrt(config.sigma2));
    for (auto& x : obs.samples) {
        const double re = noise(rng);
        const double im = noise(rng);
        x += std::complex<double>(re, im);
    }
    return obs;
}

double ambiguity_at(const SignalConfig& config, const ObservationVector& obs,
                    const VonMisesPrior& prior, double theta) {
    // Horner evaluation of sum_k x_k z^k with z = e^{-i theta}.
    const std::complex<double> z = std::polar(1.0, -theta);
    std::complex<double> acc = 0.0;
    for (auto it = obs.samples.rbegin(); it != obs.samples.rend(); ++it) acc = acc * z + *it;
    const double data = 2.0 * config.snr / config.amplitude() *
                        (acc * std::polar(1.0, -config.phi)).real();
    return data + prior.kappa() * std::cos(theta - prior.mu());
}

std::vector<double> ambiguity(const SignalConfig& config, const ObservationVector& obs,
                              const VonMisesPrior& prior, std::span<const double> theta_grid) {
    config.validate();
    if (obs.samples.size() != static_cast<std::size_t>(config.k))
        throw std::invalid_argument("ambiguity: observation length differs from K");
    std::vector<double> out;
    out.reserve(theta_grid.size());
    for (double theta : theta_grid) {
        if (!(theta >= -kPi && theta <= kPi)) throw std::domain_error("ambiguity: grid value outside [-pi, pi]");
        out.push_back(ambiguity_at(config, obs, prior, theta));
    }
    return out;
}

}  // namespace freqbound
