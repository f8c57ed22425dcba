#pragma once

#include <span>
#include <string>
#include <vector>

#include "freqbound/numerics.hpp"
#include "freqbound/prior.hpp"
#include "freqbound/signal.hpp"
#include "freqbound/testpoints.hpp"

namespace freqbound {

/// One test point: offset h (rad) and its exponent s.
struct PointSpec {
    double h;
    double s;
};

/// One density factor p^{weight}(theta + offset) of a cross term.
struct ShiftedFactor {
    double weight;
    double offset;
};

/// The three factors of numerator term `term` (1..4) of [Q]_ij:
///   1: p^{1-si-sj}(t) p^{si}(t+hi) p^{sj}(t+hj)
///   2: p^{si-sj}(t)   p^{sj}(t+hj) p^{1-si}(t-hi)
///   3: p^{sj-si}(t)   p^{si}(t+hi) p^{1-sj}(t-hj)
///   4: p^{si+sj-1}(t) p^{1-si}(t-hi) p^{1-sj}(t-hj)
/// The weights always sum to one.
std::array<ShiftedFactor, 3> cross_term_factors(int term, double s_i, double s_j, double h_i,
                                                double h_j);

/// Interval of theta on which every shifted argument theta + offset lies in
/// [-pi, pi]. Empty when lo > hi.
struct Support {
    double lo;
    double hi;
    bool empty() const { return lo > hi; }
};
Support cross_term_support(int term, double h_i, double h_j);

/// Log of the data-side expectation for the denominator factor of point i:
/// -s(1-s) 2 K snr (1 - D(h)/K), D the kernel sum_k cos(h k).
double data_exponent(double s, double h, int k, double snr);

/// Log of int_{-pi}^{pi-h} p^{1-s}(t) p^{s}(t+h) dt.
double prior_exponent(const VonMisesPrior& prior, double s, double h,
                      const QuadratureSpec& quad = {});

/// Data-side log expectation of numerator term `term`, written out with the
/// kernel D at h_i, h_j, h_i - h_j and h_i + h_j.
double cross_data_exponent(int term, double s_i, double s_j, double h_i, double h_j, int k,
                           double snr);

/// Prior-side log integral of numerator term `term` over its support;
/// -infinity when the support is empty.
double cross_prior_exponent(int term, const VonMisesPrior& prior, double s_i, double s_j,
                            double h_i, double h_j, const QuadratureSpec& quad = {});

/// Single element [Q]_ij. Throws OverflowError if the factored exponent
/// exceeds 700.
double q_element(PointSpec i, PointSpec j, const VonMisesPrior& prior, const SignalConfig& config,
                 const QuadratureSpec& quad = {});

struct QMatrix {
    Matrix q;
    std::vector<double> h;
    double s = 0.5;
};

/// Full R x R matrix for a point set with shared exponent.
QMatrix assemble_q(const VonMisesPrior& prior, const SignalConfig& config,
                   const TestPointSet& points, const QuadratureSpec& quad = {});

struct WwbResult {
    double mse_bound = 0.0;  ///< rad^2
    double db = 0.0;         ///< 10 log10(mse_bound)
    std::vector<std::size_t> dropped_points;  ///< indices into the input set

    int k = 0;
    double snr = 0.0;
    double mu = 0.0;
    double kappa = 0.0;
    double s = 0.5;
    std::string trio;
};

/// H Q^{-1} H^T for a fixed point set. Points whose rows overflow or make Q
/// numerically singular are dropped and listed in `dropped_points`.
WwbResult wwb_value(const VonMisesPrior& prior, const SignalConfig& config,
                    const TestPointSet& points, const QuadratureSpec& quad = {});

struct SOptimization {
    double s_best = 0.5;
    WwbResult result;
    std::vector<std::pair<double, double>> evaluated;  ///< (s, bound) per successful grid point
    std::vector<std::string> warnings;                 ///< one per skipped grid point
};

/// Grid search over the shared exponent. Ties (within 1e-9 relative) go to the
/// s closest to 0.5, then to the smaller s.
SOptimization optimize_s(const VonMisesPrior& prior, const SignalConfig& config,
                         const TestPointSet& points, std::span<const double> s_grid,
                         const QuadratureSpec& quad = {});

/// {0.1, 0.2, ..., 0.9}.
std::vector<double> default_s_grid();

}  // namespace freqbound
