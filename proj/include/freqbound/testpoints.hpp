#pragma once

#include <array>
#include <string>
#include <vector>

namespace freqbound {

enum class PointKind { Close, Sidelobe, Even };

char kind_letter(PointKind kind);

/// Counts of close (C), side-lobe (S) and evenly spaced (E) test points, plus
/// the exponent s shared by all of them.
struct TestPointConfig {
    int c_count = 2;
    int s_count = 9;
    int e_count = 10;
    double s_exponent = 0.5;

    void validate() const;
    /// "C/S/E", e.g. "2/9/10".
    std::string trio() const;
    /// Parses "C,S,E" or "C/S/E".
    static TestPointConfig parse(const std::string& text, double s_exponent = 0.5);
};

struct TestPointSet {
    std::vector<double> h;               ///< strictly increasing, in (0, pi]
    std::vector<PointKind> provenance;   ///< parallel to h
    double s = 0.5;
    std::string trio;

    std::size_t size() const noexcept { return h.size(); }
};

/// {0.001 pi, 0.01 pi}.
std::array<double, 2> close_points();

/// Positive local maxima of the noise-free kernel sum_k cos(h k) on
/// (first null, pi], ordered outward from the main lobe. Peaks are bracketed
/// on a grid of step pi / (grid_per_k K), grid_per_k >= 64, then refined by
/// golden section to 1e-8 rad. Throws for K < 2.
std::vector<double> sidelobe_points(int k, int grid_per_k = 128);

/// n points spaced linearly over [0.1 pi, pi], endpoints included.
std::vector<double> even_points(int n);

/// Union of the first C close points, the S innermost side lobes and E even
/// points, sorted, with points within 1e-6 rad of a kept point dropped.
TestPointSet build(const TestPointConfig& config, int k);

}  // namespace freqbound
