#include "freqbound/wwb.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace freqbound {

namespace {

constexpr double kMaxResidualExponent = 700.0;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_term(int term) {
    if (term < 1 || term > 4) throw std::invalid_argument("cross term index must be 1..4");
}

void check_point(double h, double s) {
    if (!(h > 0.0 && h <= kPi)) throw std::domain_error("test point h must lie in (0, pi]");
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("exponent s must lie in (0, 1)");
}

// log int_{support} prod_m p^{a_m}(t + d_m) dt for weights summing to one.
// The weighted cosines collapse to |c| cos(t + arg c) with c = sum a_m e^{i(d_m - mu)}.
double log_shifted_product_integral(const VonMisesPrior& prior,
                                    std::span<const ShiftedFactor> factors, Support support,
                                    const QuadratureSpec& quad) {
    if (support.empty()) return kNegInf;
    std::complex<double> c = 0.0;
    for (const auto& f : factors) c += f.weight * std::polar(1.0, f.offset - prior.mu());
    const double amplitude = prior.kappa() * std::abs(c);
    const double phase = std::arg(c);
    // Factor e^{amplitude} out so the integrand stays in (0, 1].
    const double integral = integrate(
        [amplitude, phase](double t) { return std::exp(amplitude * (std::cos(t + phase) - 1.0)); },
        support.lo, support.hi, quad);
    if (!(integral > 0.0)) return kNegInf;
    return std::log(integral) + amplitude - prior.log_normalizer();
}

}  // namespace

std::array<ShiftedFactor, 3> cross_term_factors(int term, double s_i, double s_j, double h_i,
                                                double h_j) {
    check_term(term);
    switch (term) {
        case 1: return {{{1.0 - s_i - s_j, 0.0}, {s_i, h_i}, {s_j, h_j}}};
        case 2: return {{{s_i - s_j, 0.0}, {s_j, h_j}, {1.0 - s_i, -h_i}}};
        case 3: return {{{s_j - s_i, 0.0}, {s_i, h_i}, {1.0 - s_j, -h_j}}};
        default: return {{{s_i + s_j - 1.0, 0.0}, {1.0 - s_i, -h_i}, {1.0 - s_j, -h_j}}};
    }
}

Support cross_term_support(int term, double h_i, double h_j) {
    check_term(term);
    const auto factors = cross_term_factors(term, 0.5, 0.5, h_i, h_j);
    double max_offset = 0.0;
    double min_offset = 0.0;
    for (const auto& f : factors) {
        max_offset = std::max(max_offset, f.offset);
        min_offset = std::min(min_offset, f.offset);
    }
    return {-kPi - min_offset, kPi - max_offset};
}

double data_exponent(double s, double h, int k, double snr) {
    return -s * (1.0 - s) * 2.0 * k * snr * (1.0 - dirichlet_kernel(h, k) / k);
}

double prior_exponent(const VonMisesPrior& prior, double s, double h, const QuadratureSpec& quad) {
    check_point(h, s);
    const std::array<ShiftedFactor, 2> factors{{{1.0 - s, 0.0}, {s, h}}};
    return log_shifted_product_integral(prior, factors, {-kPi, kPi - h}, quad);
}

double cross_data_exponent(int term, double s_i, double s_j, double h_i, double h_j, int k,
                           double snr) {
    check_term(term);
    const double kk = k;
    const double d_i = dirichlet_kernel(h_i, k);
    const double d_j = dirichlet_kernel(h_j, k);
    switch (term) {
        case 1: {
            const double w = s_i + s_j - 1.0;
            return snr * (kk * (w * w + s_i * s_i + s_j * s_j - 1.0) +
                          2.0 * s_i * s_j * dirichlet_kernel(h_i - h_j, k) -
                          2.0 * w * s_i * d_i - 2.0 * w * s_j * d_j);
        }
        case 2: {
            const double a = s_i - 1.0;
            const double b = s_i - s_j;
            return snr * (kk * (s_j * s_j + a * a + b * b - 1.0) -
                          2.0 * s_j * a * dirichlet_kernel(h_i + h_j, k) +
                          2.0 * s_j * b * d_j - 2.0 * a * b * d_i);
        }
        case 3: {
            const double a = s_j - 1.0;
            const double b = s_j - s_i;
            return snr * (kk * (s_i * s_i + a * a + b * b - 1.0) -
                          2.0 * s_i * a * dirichlet_kernel(h_i + h_j, k) +
                          2.0 * s_i * b * d_i - 2.0 * a * b * d_j);
        }
        default: {
            const double w = s_i + s_j - 1.0;
            const double a = s_i - 1.0;
            const double b = s_j - 1.0;
            return snr * (kk * (w * w + a * a + b * b - 1.0) - 2.0 * w * a * d_i -
                          2.0 * w * b * d_j + 2.0 * a * b * dirichlet_kernel(h_i - h_j, k));
        }
    }
}

double cross_prior_exponent(int term, const VonMisesPrior& prior, double s_i, double s_j,
                            double h_i, double h_j, const QuadratureSpec& quad) {
    const auto factors = cross_term_factors(term, s_i, s_j, h_i, h_j);
    return log_shifted_product_integral(prior, factors, cross_term_support(term, h_i, h_j), quad);
}

namespace {

double single_log_expectation(PointSpec p, const VonMisesPrior& prior, const SignalConfig& config,
                              const QuadratureSpec& quad) {
    return data_exponent(p.s, p.h, config.k, config.snr) + prior_exponent(prior, p.s, p.h, quad);
}

// [Q]_ij given the log denominators of both points.
double q_element_from_logs(PointSpec i, PointSpec j, double log_den_i, double log_den_j,
                           const VonMisesPrior& prior, const SignalConfig& config,
                           const QuadratureSpec& quad) {
    if (i.h < j.h) {
        std::swap(i, j);
        std::swap(log_den_i, log_den_j);
    }
    std::array<double, 4> exponents{};
    for (int term = 1; term <= 4; ++term) {
        const double gamma = cross_prior_exponent(term, prior, i.s, j.s, i.h, j.h, quad);
        exponents[static_cast<std::size_t>(term - 1)] =
            gamma == kNegInf ? kNegInf
                             : cross_data_exponent(term, i.s, j.s, i.h, j.h, config.k, config.snr) + gamma;
    }
    const double top = *std::max_element(exponents.begin(), exponents.end());
    if (top == kNegInf) return 0.0;
    const double residual = top - log_den_i - log_den_j;
    if (residual > kMaxResidualExponent) {
        std::ostringstream os;
        os << "q_element: exponent " << residual << " exceeds " << kMaxResidualExponent
           << " (h_i = " << i.h << ", h_j = " << j.h << ")";
        throw OverflowError(os.str());
    }
    const auto scaled = [&](std::size_t n) {
        return exponents[n] == kNegInf ? 0.0 : std::exp(exponents[n] - top);
    };
    const double numerator = scaled(0) - scaled(1) - scaled(2) + scaled(3);
    return std::exp(residual) * numerator;
}

void validate_points(const TestPointSet& points) {
    if (points.h.empty()) throw std::invalid_argument("wwb: at least one test point required");
    for (double h : points.h) check_point(h, points.s);
}

}  // namespace

double q_element(PointSpec i, PointSpec j, const VonMisesPrior& prior, const SignalConfig& config,
                 const QuadratureSpec& quad) {
    config.validate();
    check_point(i.h, i.s);
    check_point(j.h, j.s);
    return q_element_from_logs(i, j, single_log_expectation(i, prior, config, quad),
                               single_log_expectation(j, prior, config, quad), prior, config, quad);
}

QMatrix assemble_q(const VonMisesPrior& prior, const SignalConfig& config,
                   const TestPointSet& points, const QuadratureSpec& quad) {
    config.validate();
    validate_points(points);
    const std::size_t r = points.size();
    std::vector<double> log_den(r);
    for (std::size_t i = 0; i < r; ++i)
        log_den[i] = single_log_expectation({points.h[i], points.s}, prior, config, quad);

    QMatrix out{Matrix(r), points.h, points.s};
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) {
            const double v = q_element_from_logs({points.h[i], points.s}, {points.h[j], points.s},
                                                 log_den[i], log_den[j], prior, config, quad);
            out.q(i, j) = v;
            out.q(j, i) = v;
        }
    return out;
}

WwbResult wwb_value(const VonMisesPrior& prior, const SignalConfig& config,
                    const TestPointSet& points, const QuadratureSpec& quad) {
    config.validate();
    validate_points(points);
    const std::size_t r = points.size();

    std::vector<double> log_den(r);
    for (std::size_t i = 0; i < r; ++i)
        log_den[i] = single_log_expectation({points.h[i], points.s}, prior, config, quad);

    // Rows that overflow carry no usable information: their contribution
    // h^2 / Q_ii is below e^{-700}. Drop them before the solve.
    std::vector<bool> dropped(r, false);
    Matrix q(r);
    const auto element = [&](std::size_t i, std::size_t j) {
        return q_element_from_logs({points.h[i], points.s}, {points.h[j], points.s}, log_den[i],
                                   log_den[j], prior, config, quad);
    };
    for (std::size_t i = 0; i < r; ++i) {
        try {
            q(i, i) = element(i, i);
        } catch (const OverflowError&) {
            dropped[i] = true;
        }
    }
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            if (dropped[i] || dropped[j]) continue;
            try {
                q(i, j) = q(j, i) = element(i, j);
            } catch (const OverflowError&) {
                dropped[j] = true;  // the farther of the pair
            }
        }

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < r; ++i)
        if (!dropped[i]) active.push_back(i);

    WwbResult result;
    result.k = config.k;
    result.snr = config.snr;
    result.mu = prior.mu();
    result.kappa = prior.kappa();
    result.s = points.s;
    result.trio = points.trio;

    while (!active.empty()) {
        Matrix sub(active.size());
        std::vector<double> hv(active.size());
        for (std::size_t a = 0; a < active.size(); ++a) {
            hv[a] = points.h[active[a]];
            for (std::size_t b = 0; b < active.size(); ++b) sub(a, b) = q(active[a], active[b]);
        }
        try {
            const auto x = spd_solve(sub, hv);
            double bound = 0.0;
            for (std::size_t a = 0; a < hv.size(); ++a) bound += hv[a] * x[a];
            if (!(bound > 0.0) || !std::isfinite(bound))
                throw NumericalError("wwb_value: non-positive quadratic form");
            result.mse_bound = bound;
            result.db = to_db(bound);
            break;
        } catch (const SingularMatrixError& e) {
            dropped[active[e.index()]] = true;
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(e.index()));
        }
    }
    if (active.empty()) throw NumericalError("wwb_value: every test point was dropped");

    for (std::size_t i = 0; i < r; ++i)
        if (dropped[i]) result.dropped_points.push_back(i);
    return result;
}

std::vector<double> default_s_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

SOptimization optimize_s(const VonMisesPrior& prior, const SignalConfig& config,
                         const TestPointSet& points, std::span<const double> s_grid,
                         const QuadratureSpec& quad) {
    if (s_grid.empty()) throw std::invalid_argument("optimize_s: empty s grid");
    for (double s : s_grid)
        if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("optimize_s: s values must lie in (0, 1)");

    constexpr double kTieTolerance = 1e-9;
    const auto preferred = [](double a, double b) {
        const double da = std::abs(a - 0.5);
        const double db = std::abs(b - 0.5);
        if (std::abs(da - db) > 1e-12) return da < db;
        return a < b;
    };

    SOptimization out;
    bool have = false;
    for (double s : s_grid) {
        TestPointSet trial = points;
        trial.s = s;
        WwbResult r;
        try {
            r = wwb_value(prior, config, trial, quad);
        } catch (const NumericalError& e) {
            out.warnings.push_back("s = " + std::to_string(s) + ": " + e.what());
            continue;
        }
        out.evaluated.emplace_back(s, r.mse_bound);
        const double best = out.result.mse_bound;
        const bool better = !have || r.mse_bound > best * (1.0 + kTieTolerance);
        const bool tie = have && std::abs(r.mse_bound - best) <= kTieTolerance * best;
        if (better || (tie && preferred(s, out.s_best))) {
            out.s_best = s;
            out.result = r;
            have = true;
        }
    }
    if (!have) throw NumericalError("optimize_s: every grid value failed");
    return out;
}

}  // namespace freqbound
