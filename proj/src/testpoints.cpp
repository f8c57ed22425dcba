#include "freqbound/testpoints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "freqbound/numerics.hpp"

namespace freqbound {

namespace {

constexpr double kDedupTolerance = 1e-6;

// Golden-section maximization of f on [a, b] down to `tol`.
template <class F>
double golden_max(F&& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

char kind_letter(PointKind kind) {
    switch (kind) {
        case PointKind::Close: return 'C';
        case PointKind::Sidelobe: return 'S';
        case PointKind::Even: return 'E';
    }
    return '?';
}

void TestPointConfig::validate() const {
    if (c_count < 0 || s_count < 0 || e_count < 0)
        throw std::invalid_argument("TestPointConfig: counts must be non-negative");
    if (c_count + s_count + e_count < 1)
        throw std::invalid_argument("TestPointConfig: at least one test point required");
    if (c_count > 2) throw std::invalid_argument("TestPointConfig: only two close points exist");
    if (!(s_exponent > 0.0 && s_exponent < 1.0))
        throw std::invalid_argument("TestPointConfig: s must lie in (0, 1)");
}

std::string TestPointConfig::trio() const {
    std::ostringstream os;
    os << c_count << '/' << s_count << '/' << e_count;
    return os.str();
}

TestPointConfig TestPointConfig::parse(const std::string& text, double s_exponent) {
    std::string normalized = text;
    std::replace(normalized.begin(), normalized.end(), '/', ',');
    std::istringstream is(normalized);
    TestPointConfig cfg;
    char sep1 = 0;
    char sep2 = 0;
    if (!(is >> cfg.c_count >> sep1 >> cfg.s_count >> sep2 >> cfg.e_count) || sep1 != ',' || sep2 != ',')
        throw std::invalid_argument("test-point trio must look like C,S,E (got '" + text + "')");
    is >> std::ws;
    if (!is.eof()) throw std::invalid_argument("test-point trio has trailing text: '" + text + "'");
    cfg.s_exponent = s_exponent;
    cfg.validate();
    return cfg;
}

std::array<double, 2> close_points() { return {0.001 * kPi, 0.01 * kPi}; }

std::vector<double> sidelobe_points(int k, int grid_per_k) {
    if (k < 2) throw std::invalid_argument("sidelobe_points: K must be >= 2 (no side lobes otherwise)");
    if (grid_per_k < 64) throw std::invalid_argument("sidelobe_points: grid_per_k must be >= 64");
    const auto kernel = [k](double h) { return dirichlet_kernel(h, k); };

    const int steps = grid_per_k * k;
    const double step = kPi / steps;
    std::vector<double> values(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) values[static_cast<std::size_t>(i)] = kernel(i * step);

    // Skip the main lobe: start at the first grid point where the kernel is <= 0.
    std::size_t start = 1;
    while (start < values.size() && values[start] > 0.0) ++start;

    std::vector<double> peaks;
    for (std::size_t i = start + 1; i < values.size(); ++i) {
        const bool last = i + 1 == values.size();
        const bool rising = values[i] > values[i - 1];
        const bool peak = last ? rising : rising && values[i] >= values[i + 1];
        if (!peak || values[i] <= 0.0) continue;
        const double lo = (static_cast<double>(i) - 1.0) * step;
        if (last) {
            // pi is a stationary point of the even, 2 pi periodic kernel.
            peaks.push_back(kPi);
            continue;
        }
        const double hi = (static_cast<double>(i) + 1.0) * step;
        const double h = golden_max(kernel, lo, hi, 1e-9);
        if (kernel(h) > 0.0) peaks.push_back(h);
    }
    return peaks;
}

std::vector<double> even_points(int n) {
    if (n < 1) throw std::invalid_argument("even_points: n must be >= 1");
    if (n == 1) return {0.1 * kPi};
    std::vector<double> out(static_cast<std::size_t>(n));
    const double spacing = 0.9 * kPi / (n - 1);
    for (int m = 0; m < n; ++m) out[static_cast<std::size_t>(m)] = 0.1 * kPi + m * spacing;
    out.back() = kPi;
    return out;
}

TestPointSet build(const TestPointConfig& config, int k) {
    config.validate();
    std::vector<std::pair<double, PointKind>> candidates;

    const auto close = close_points();
    for (int i = 0; i < config.c_count; ++i)
        candidates.emplace_back(close[static_cast<std::size_t>(i)], PointKind::Close);

    if (config.s_count > 0) {
        const auto lobes = sidelobe_points(k);
        if (static_cast<std::size_t>(config.s_count) > lobes.size()) {
            std::ostringstream os;
            os << "build: " << config.s_count << " side-lobe points requested but K = " << k
               << " has only " << lobes.size();
            throw std::invalid_argument(os.str());
        }
        for (int i = 0; i < config.s_count; ++i)
            candidates.emplace_back(lobes[static_cast<std::size_t>(i)], PointKind::Sidelobe);
    }

    if (config.e_count > 0)
        for (double h : even_points(config.e_count)) candidates.emplace_back(h, PointKind::Even);

    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    TestPointSet set;
    set.s = config.s_exponent;
    set.trio = config.trio();
    for (const auto& [h, kind] : candidates) {
        if (!set.h.empty() && h - set.h.back() < kDedupTolerance) continue;
        set.h.push_back(h);
        set.provenance.push_back(kind);
    }
    return set;
}

}  // namespace freqbound
