#pragma once

#include <string>

#include "freqbound/prior.hpp"

namespace freqbound {

enum class BoundKind { WWB, BCRB, ZZB, MAP };

/// "WWB", "BCRB", "ZZB", "MAP".
std::string kind_name(BoundKind kind);
/// Case-insensitive inverse of kind_name; throws std::invalid_argument.
BoundKind parse_kind(const std::string& text);

struct BoundPoint {
    BoundKind kind = BoundKind::WWB;
    int k = 0;
    double snr = 0.0;
    double mse_bound = 0.0;
    double db = 0.0;
};

/// snr K (K-1)(2K-1) / 3, i.e. 2 snr sum_k k^2 with samples at t = 0..K-1.
double fisher_information(int k, double snr);

/// 1 / (J_F + kappa I1(kappa)/I0(kappa)). Throws std::domain_error when the
/// denominator vanishes (K = 1 with a uniform prior).
double bcrb(const VonMisesPrior& prior, int k, double snr);

/// Closed-form Ziv-Zakai bound
///   J_F^{-1} P(1.5, K snr / 2) + prior_variance 2 Q(sqrt(K snr)),
/// P the regularized lower gamma and Q the standard normal tail. K >= 2.
double zzb(const VonMisesPrior& prior, int k, double snr);

BoundPoint bcrb_point(const VonMisesPrior& prior, int k, double snr);
BoundPoint zzb_point(const VonMisesPrior& prior, int k, double snr);

}  // namespace freqbound
