#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace freqbound {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Base class for numerical failures (non-convergence, singularity, overflow).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Raised by spd_solve when a factorization pivot collapses. `index` is the
/// row at which the collapse was detected.
class SingularMatrixError : public NumericalError {
public:
    SingularMatrixError(std::size_t index, const std::string& what)
        : NumericalError(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Composite Gauss-Legendre settings. `node_count` is the number of panels of
/// the base evaluation; the convergence check doubles it.
struct QuadratureSpec {
    int node_count = 32;
    double rel_tol = 1e-12;

    void validate() const;
};

double bessel_i0(double x);
double bessel_i1(double x);

/// ln I0(x), finite over the whole admissible range.
double log_bessel_i0(double x);

/// I1(x)/I0(x) without forming either factor for large x.
double bessel_i1_over_i0(double x);

/// Sum_{k=0}^{K-1} cos(h k).
double dirichlet_kernel(double h, int k);

double normal_tail(double z);
double regularized_lower_gamma(double a, double z);

/// Dense row-major square matrix. Only what the bound assembly needs.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    /// Copy with row/column `index` removed.
    Matrix without(std::size_t index) const;

    std::vector<double> multiply(std::span<const double> v) const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Solves M x = v for symmetric positive definite M via a Jacobi-scaled
/// Cholesky factorization. Throws SingularMatrixError when a scaled pivot
/// falls below 1e-14 (the scaled matrix has unit diagonal).
std::vector<double> spd_solve(const Matrix& m, std::span<const double> v);

/// Running maximum from the right: out[i] = max_{j >= i} f[j].
std::vector<double> valley_fill(std::span<const double> f);

namespace detail {

// 10-point Gauss-Legendre rule on [-1, 1] (positive half; rule is symmetric).
inline constexpr std::array<double, 5> kGlNodes = {
    0.1488743389816312108848260, 0.4333953941292471907992659,
    0.6794095682990244062343274, 0.8650633666889845107320967,
    0.9739065285171717200779640};
inline constexpr std::array<double, 5> kGlWeights = {
    0.2955242247147528701738930, 0.2692667193099963550912269,
    0.2190863625159820439955349, 0.1494513491505805931457763,
    0.0666713443086881375935688};

struct PanelSums {
    double value;
    double magnitude;
};

template <class F>
PanelSums composite_gauss_legendre(F& f, double a, double b, int panels) {
    const double width = (b - a) / panels;
    const double half = 0.5 * width;
    double value = 0.0;
    double magnitude = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double centre = a + (p + 0.5) * width;
        double pv = 0.0;
        double pm = 0.0;
        for (std::size_t n = 0; n < kGlNodes.size(); ++n) {
            const double dx = half * kGlNodes[n];
            const double f1 = f(centre - dx);
            const double f2 = f(centre + dx);
            pv += kGlWeights[n] * (f1 + f2);
            pm += kGlWeights[n] * (std::abs(f1) + std::abs(f2));
        }
        value += pv * half;
        magnitude += pm * half;
    }
    return {value, magnitude};
}

[[noreturn]] void throw_quadrature_failure(double a, double b, int panels, double change);

}  // namespace detail

/// Composite 10-point Gauss-Legendre integral of f over [a, b].
///
/// The result at `node_count` panels is compared with the result at twice as
/// many; one further doubling is tried before giving up. Convergence is
/// measured relative to the integral of |f|, so sign-changing and vanishing
/// integrands are handled uniformly.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (!(a <= b)) throw std::invalid_argument("integrate: require a <= b");
    if (a == b) return 0.0;

    int panels = spec.node_count;
    auto coarse = detail::composite_gauss_legendre(f, a, b, panels);
    double change = 0.0;
    for (int attempt = 0; attempt < 2; ++attempt) {
        panels *= 2;
        const auto fine = detail::composite_gauss_legendre(f, a, b, panels);
        change = std::abs(fine.value - coarse.value);
        if (!std::isfinite(fine.value)) break;
        if (change <= spec.rel_tol * fine.magnitude) return fine.value;
        coarse = fine;
    }
    detail::throw_quadrature_failure(a, b, panels, change);
}

}  // namespace freqbound
