#pragma once

#include <cstdint>
#include <optional>

#include "freqbound/prior.hpp"
#include "freqbound/signal.hpp"

namespace freqbound {

enum class ErrorMode { Wrapped, Linear };

struct McConfig {
    int trials = 10000;
    int grid_size = 4096;
    bool refine = true;
    std::uint64_t seed = 0;
    ErrorMode error_mode = ErrorMode::Wrapped;
    /// When set, every trial uses this frequency instead of a prior draw.
    std::optional<double> fixed_theta;

    void validate() const;
};

struct McResult {
    double mse = 0.0;           ///< rad^2
    double rmse_db = 0.0;       ///< 10 log10(mse)
    double mse_stderr = 0.0;    ///< standard error of the mean squared error
    int trials_used = 0;
    double outlier_fraction = 0.0;  ///< share of trials with |error| > pi/2
};

/// MAP frequency estimate: maximizes `ambiguity_at` over the grid
/// theta_m = -pi + 2 pi m / grid_size, then (if `refine`) by golden section
/// within one grid cell of the best node. Result lies in [-pi, pi).
double map_estimate(const SignalConfig& config, const VonMisesPrior& prior,
                    const ObservationVector& obs, int grid_size = 4096, bool refine = true);

/// Shortest signed arc from truth to estimate, in [-pi, pi).
double wrap_error(double estimate, double truth);

/// Bayesian MSE of the MAP estimator. Trial t uses derive_stream(seed, t), so
/// the result does not depend on the number of threads.
McResult run_monte_carlo(const SignalConfig& config, const VonMisesPrior& prior, const McConfig& mc);

}  // namespace freqbound
