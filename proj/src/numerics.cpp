#include "freqbound/numerics.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace freqbound {

namespace {

constexpr double kBesselSeriesLimit = 15.0;
constexpr double kBesselMaxArg = 500.0;

void check_bessel_arg(double x, const char* name) {
    if (!std::isfinite(x) || x < 0.0 || x > kBesselMaxArg) {
        std::ostringstream os;
        os << name << ": argument " << x << " outside [0, " << kBesselMaxArg << "]";
        throw std::domain_error(os.str());
    }
}

// Power series for I_nu, nu in {0, 1}: sum_m (x/2)^{2m+nu} / (m! (m+nu)!).
double bessel_series(int order, double x) {
    const double q = 0.25 * x * x;
    double term = order == 0 ? 1.0 : 0.5 * x;
    double sum = term;
    for (int m = 1; m < 1000; ++m) {
        term *= q / (static_cast<double>(m) * (m + order));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// Bracketed factor of the large-argument expansion
// I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k.
double bessel_asymptotic_factor(int order, double x) {
    const double mu4 = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu4 - odd * odd) / (k * 8.0 * x);
        if (std::abs(term) >= previous) break;  // expansion started to diverge
        sum += term;
        previous = std::abs(term);
        if (previous < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

void QuadratureSpec::validate() const {
    if (node_count < 16) throw std::invalid_argument("QuadratureSpec: node_count must be >= 16");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6))
        throw std::invalid_argument("QuadratureSpec: rel_tol must lie in (0, 1e-6]");
}

double bessel_i0(double x) {
    check_bessel_arg(x, "bessel_i0");
    if (x < kBesselSeriesLimit) return bessel_series(0, x);
    return std::exp(x) / std::sqrt(kTwoPi * x) * bessel_asymptotic_factor(0, x);
}

double bessel_i1(double x) {
    check_bessel_arg(x, "bessel_i1");
    if (x < kBesselSeriesLimit) return bessel_series(1, x);
    return std::exp(x) / std::sqrt(kTwoPi * x) * bessel_asymptotic_factor(1, x);
}

double log_bessel_i0(double x) {
    check_bessel_arg(x, "log_bessel_i0");
    if (x < kBesselSeriesLimit) return std::log(bessel_series(0, x));
    return x - 0.5 * std::log(kTwoPi * x) + std::log(bessel_asymptotic_factor(0, x));
}

double bessel_i1_over_i0(double x) {
    check_bessel_arg(x, "bessel_i1_over_i0");
    if (x == 0.0) return 0.0;
    if (x < kBesselSeriesLimit) return bessel_series(1, x) / bessel_series(0, x);
    return bessel_asymptotic_factor(1, x) / bessel_asymptotic_factor(0, x);
}

double dirichlet_kernel(double h, int k) {
    if (k < 1) throw std::invalid_argument("dirichlet_kernel: K must be >= 1");
    if (!std::isfinite(h)) throw std::domain_error("dirichlet_kernel: h must be finite");
    // The sum is 2 pi periodic in h; reducing keeps the only singular point at 0.
    const double r = std::remainder(h, kTwoPi);
    const double half_sin = std::sin(0.5 * r);
    if (std::abs(half_sin) < 1e-8) {
        double sum = 0.0;
        for (int i = 0; i < k; ++i) sum += std::cos(r * i);
        return sum;
    }
    return std::cos(0.5 * r * (k - 1)) * std::sin(0.5 * r * k) / half_sin;
}

double normal_tail(double z) {
    if (std::isnan(z)) throw std::domain_error("normal_tail: z is NaN");
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double regularized_lower_gamma(double a, double z) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::domain_error("regularized_lower_gamma: a must be positive");
    if (!(z >= 0.0)) throw std::domain_error("regularized_lower_gamma: z must be >= 0");
    if (z == 0.0) return 0.0;
    if (std::isinf(z)) return 1.0;

    // ln Gamma(1.5) = ln(sqrt(pi)/2) exactly; lgamma otherwise.
    const double log_gamma_a = a == 1.5 ? std::log(0.5 * std::sqrt(kPi)) : std::lgamma(a);
    const double log_prefactor = -z + a * std::log(z) - log_gamma_a;

    if (z < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= z / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-17) break;
        }
        return std::min(1.0, sum * std::exp(log_prefactor));
    }

    // Modified Lentz evaluation of the continued fraction for the upper tail.
    constexpr double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::max(0.0, 1.0 - std::exp(log_prefactor) * f);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::without(std::size_t index) const {
    if (index >= n_) throw std::out_of_range("Matrix::without: index out of range");
    Matrix out(n_ - 1);
    for (std::size_t i = 0, oi = 0; i < n_; ++i) {
        if (i == index) continue;
        for (std::size_t j = 0, oj = 0; j < n_; ++j) {
            if (j == index) continue;
            out(oi, oj++) = (*this)(i, j);
        }
        ++oi;
    }
    return out;
}

std::vector<double> Matrix::multiply(std::span<const double> v) const {
    if (v.size() != n_) throw std::invalid_argument("Matrix::multiply: size mismatch");
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
}

std::vector<double> spd_solve(const Matrix& m, std::span<const double> v) {
    const std::size_t n = m.size();
    if (v.size() != n) throw std::invalid_argument("spd_solve: size mismatch");
    if (n == 0) return {};
    if (n > 64) throw std::invalid_argument("spd_solve: at most 64 unknowns supported");

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = m(i, j);
            const double b = m(j, i);
            if (std::abs(a - b) > 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300}))
                throw std::invalid_argument("spd_solve: matrix is not symmetric");
        }

    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = m(i, i);
        if (!(d > 0.0) || !std::isfinite(d))
            throw SingularMatrixError(i, "spd_solve: non-positive diagonal at row " + std::to_string(i));
        scale[i] = 1.0 / std::sqrt(d);
    }

    // Cholesky of S M S (unit diagonal), lower triangle stored in `l`.
    constexpr double kPivotFloor = 1e-14;
    Matrix l(n);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = 1.0;
        for (std::size_t p = 0; p < j; ++p) pivot -= l(j, p) * l(j, p);
        if (!(pivot > kPivotFloor))
            throw SingularMatrixError(j, "spd_solve: pivot collapsed at row " + std::to_string(j));
        const double root = std::sqrt(pivot);
        l(j, j) = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = scale[i] * m(i, j) * scale[j];
            for (std::size_t p = 0; p < j; ++p) acc -= l(i, p) * l(j, p);
            l(i, j) = acc / root;
        }
    }

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = scale[i] * v[i];
        for (std::size_t p = 0; p < i; ++p) acc -= l(i, p) * y[p];
        y[i] = acc / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t p = ii + 1; p < n; ++p) acc -= l(p, ii) * x[p];
        x[ii] = acc / l(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] *= scale[i];
    return x;
}

std::vector<double> valley_fill(std::span<const double> f) {
    std::vector<double> out(f.begin(), f.end());
    for (std::size_t i = out.size(); i-- > 1;) out[i - 1] = std::max(out[i - 1], out[i]);
    return out;
}

namespace detail {

void throw_quadrature_failure(double a, double b, int panels, double change) {
    std::ostringstream os;
    os << "integrate: no convergence on [" << a << ", " << b << "] after " << panels
       << " panels (last change " << change << ")";
    throw ConvergenceError(os.str());
}

}  // namespace detail

}  // namespace freqbound
