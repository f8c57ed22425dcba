#include "freqbound/bounds.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "freqbound/numerics.hpp"
#include "freqbound/signal.hpp"

namespace freqbound {

namespace {

void check_args(int k, double snr, int min_k) {
    if (k < min_k) throw std::invalid_argument("K must be >= " + std::to_string(min_k));
    if (!(snr > 0.0) || !std::isfinite(snr)) throw std::invalid_argument("snr must be positive");
}

}  // namespace

std::string kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::WWB: return "WWB";
        case BoundKind::BCRB: return "BCRB";
        case BoundKind::ZZB: return "ZZB";
        case BoundKind::MAP: return "MAP";
    }
    return "?";
}

BoundKind parse_kind(const std::string& text) {
    std::string upper = text;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto kind : {BoundKind::WWB, BoundKind::BCRB, BoundKind::ZZB, BoundKind::MAP})
        if (kind_name(kind) == upper) return kind;
    throw std::invalid_argument("unknown bound kind '" + text + "'");
}

double fisher_information(int k, double snr) {
    check_args(k, snr, 1);
    const double kk = k;
    return snr * kk * (kk - 1.0) * (2.0 * kk - 1.0) / 3.0;
}

double bcrb(const VonMisesPrior& prior, int k, double snr) {
    const double denominator = fisher_information(k, snr) + prior.kappa() * prior.bessel_ratio();
    if (!(denominator > 0.0)) throw std::domain_error("bcrb: zero total information");
    return 1.0 / denominator;
}

double zzb(const VonMisesPrior& prior, int k, double snr) {
    check_args(k, snr, 2);
    const double ksnr = k * snr;
    return regularized_lower_gamma(1.5, 0.5 * ksnr) / fisher_information(k, snr) +
           prior.prior_variance() * 2.0 * normal_tail(std::sqrt(ksnr));
}

BoundPoint bcrb_point(const VonMisesPrior& prior, int k, double snr) {
    const double v = bcrb(prior, k, snr);
    return {BoundKind::BCRB, k, snr, v, to_db(v)};
}

BoundPoint zzb_point(const VonMisesPrior& prior, int k, double snr) {
    const double v = zzb(prior, k, snr);
    return {BoundKind::ZZB, k, snr, v, to_db(v)};
}

}  // namespace freqbound
