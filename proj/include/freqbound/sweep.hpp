#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqbound/bounds.hpp"
#include "freqbound/map_sim.hpp"
#include "freqbound/numerics.hpp"
#include "freqbound/testpoints.hpp"

namespace freqbound {

/// Invalid sweep specification. `field()` names the offending field.
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Numerical failure at one grid point; the message names the point.
class SweepPointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(const std::string& text);

struct SnrRange {
    double start = -20.0;
    double stop = 10.0;
    double step = 1.0;

    /// start, start + step, ... up to stop (inclusive within step * 1e-9).
    std::vector<double> values() const;
};

struct SweepSpec {
    SnrRange snr_db;
    std::vector<int> k_values{20};
    std::vector<double> kappa_values{1.0};
    std::vector<double> mu_values{0.0};
    /// When non-empty, these (mu, kappa) pairs replace the mu x kappa product.
    std::vector<std::pair<double, double>> prior_pairs;
    std::vector<BoundKind> kinds{BoundKind::WWB};
    std::vector<TestPointConfig> trios{TestPointConfig{}};
    /// Fixed s values, or the search grid when `optimize_s` is set.
    std::vector<double> s_values{0.5};
    bool optimize_s = false;

    std::uint64_t seed = 0;
    int trials = 10000;
    int grid_size = 4096;
    bool refine = true;
    ErrorMode error_mode = ErrorMode::Wrapped;
    std::optional<double> fixed_theta;  ///< MAP trials at one frequency instead of prior draws
    QuadratureSpec quad;
    std::optional<double> f_int;  ///< Hz; adds rmse_hz / cn0_dbhz to `extra`

    /// Throws SpecError naming the first invalid field.
    void validate() const;
};

/// Parameter grids of the published figures (6, 7, 8, 11, 12, 13).
/// Figure 7 needs `kappa`; figure 13 uses `k` (default 20).
SweepSpec figure_preset(int figure, std::optional<double> kappa = std::nullopt,
                        std::optional<int> k = std::nullopt);

struct SweepRow {
    BoundKind kind = BoundKind::WWB;
    double snr_db = 0.0;
    int k = 0;
    double kappa = 0.0;
    double mu = 0.0;
    std::optional<double> s;  ///< WWB only
    std::string trio;         ///< WWB only
    double value = 0.0;       ///< rad^2
    double value_db = 0.0;
    std::string extra = "{}";  ///< compact JSON object

    bool operator==(const SweepRow&) const = default;
};

/// Evaluates the Cartesian product of the spec's axes. Rows are sorted by
/// (kind, K, kappa, mu, snr, trio, s). MAP points draw their seed from the
/// global seed and the point's coordinates only.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Writes CSV (header plus one line per row) or a JSON array of objects.
/// Numbers carry 17 significant digits.
void emit(const std::vector<SweepRow>& rows, OutputFormat format, std::ostream& out);
/// As above, to a file; throws std::runtime_error naming the path on failure.
void emit(const std::vector<SweepRow>& rows, OutputFormat format, const std::string& path);

std::string csv_header();
/// Inverse of CSV `emit`.
std::vector<SweepRow> parse_csv(std::istream& in);

/// "%.17g".
std::string format_number(double v);

}  // namespace freqbound
