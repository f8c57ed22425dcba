#pragma once

#include <complex>
#include <span>
#include <vector>

#include "freqbound/prior.hpp"
#include "freqbound/random.hpp"

namespace freqbound {

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Observation model x_k = A exp(i(theta k + phi)) + n_k, k = 0..K-1, with
/// complex white noise of variance sigma2 per quadrature component.
struct SignalConfig {
    int k = 20;
    double snr = 1.0;     ///< linear, A^2 / (2 sigma2)
    double phi = 0.0;     ///< known carrier phase, rad
    double sigma2 = 1.0;

    /// A = sqrt(2 sigma2 snr); derived, never stored.
    double amplitude() const { return std::sqrt(2.0 * sigma2 * snr); }
    void validate() const;
};

struct ObservationVector {
    std::vector<std::complex<double>> samples;
    double truth = 0.0;  ///< generating normalized frequency, rad
};

/// Linear SNR from carrier-to-noise density: 10^{cn0/10} / bandwidth.
double snr_from_cn0(double cn0_dbhz, double bandwidth_hz);
double cn0_from_snr(double snr, double bandwidth_hz);

ObservationVector generate(const SignalConfig& config, double theta, RandomStream& rng);

/// Noise-free samples A exp(i(theta k + phi)).
ObservationVector generate_noiseless(const SignalConfig& config, double theta);

/// Log-posterior surface (up to a theta-free constant) on each grid point:
/// 2 K snr Re{e^{-i phi} (1/K) sum_k (x_k / A) e^{-i theta k}} + kappa cos(theta - mu).
/// Samples are scaled by 1/A so that the data term is the exact log-likelihood.
std::vector<double> ambiguity(const SignalConfig& config, const ObservationVector& obs,
                              const VonMisesPrior& prior, std::span<const double> theta_grid);

/// Single-point version of `ambiguity`.
double ambiguity_at(const SignalConfig& config, const ObservationVector& obs,
                    const VonMisesPrior& prior, double theta);

}  // namespace freqbound
