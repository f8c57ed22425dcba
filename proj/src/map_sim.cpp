#include "freqbound/map_sim.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "freqbound/numerics.hpp"
#include "freqbound/parallel.hpp"
#include "freqbound/random.hpp"

namespace freqbound {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class DftWorkspace {
public:
    explicit DftWorkspace(int n) : n_(n) {
        std::lock_guard lock(planner_mutex());
        in_ = fftw_alloc_complex(static_cast<std::size_t>(n));
        out_ = fftw_alloc_complex(static_cast<std::size_t>(n));
        plan_ = fftw_plan_dft_1d(n, in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~DftWorkspace() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    DftWorkspace(const DftWorkspace&) = delete;
    DftWorkspace& operator=(const DftWorkspace&) = delete;

    int size() const { return n_; }
    fftw_complex* in() { return in_; }
    const fftw_complex* out() const { return out_; }
    void execute() { fftw_execute(plan_); }

private:
    int n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

DftWorkspace& workspace(int n) {
    thread_local std::unique_ptr<DftWorkspace> ws;
    if (!ws || ws->size() != n) {
        ws.reset();
        ws = std::make_unique<DftWorkspace>(n);
    }
    return *ws;
}

double wrap_angle(double x) {
    double r = std::fmod(x + kPi, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r - kPi;
}

template <class F>
double golden_maximize(F&& f, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-12) {
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

void McConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("McConfig: trials must be >= 1");
    if (grid_size < 64) throw std::invalid_argument("McConfig: grid_size must be >= 64");
    if (fixed_theta && !(*fixed_theta >= -kPi && *fixed_theta <= kPi))
        throw std::invalid_argument("McConfig: fixed theta outside [-pi, pi]");
}

double wrap_error(double estimate, double truth) {
    if (!std::isfinite(estimate) || !std::isfinite(truth))
        throw std::domain_error("wrap_error: arguments must be finite");
    return wrap_angle(estimate - truth);
}

double map_estimate(const SignalConfig& config, const VonMisesPrior& prior,
                    const ObservationVector& obs, int grid_size, bool refine) {
    if (grid_size < 64) throw std::invalid_argument("map_estimate: grid_size must be >= 64");
    config.validate();
    if (obs.samples.size() != static_cast<std::size_t>(config.k))
        throw std::invalid_argument("map_estimate: observation length differs from K");

    // sum_k x_k e^{-i theta_m k} with theta_m = -pi + 2 pi m / N is the DFT of
    // x_k (-1)^k, folded modulo N when K > N.
    auto& ws = workspace(grid_size);
    fftw_complex* in = ws.in();
    for (int m = 0; m < grid_size; ++m) in[m][0] = in[m][1] = 0.0;
    for (int i = 0; i < config.k; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        const int slot = i % grid_size;
        in[slot][0] += sign * obs.samples[static_cast<std::size_t>(i)].real();
        in[slot][1] += sign * obs.samples[static_cast<std::size_t>(i)].imag();
    }
    ws.execute();

    const double scale = 2.0 * config.snr / config.amplitude();
    const double cphi = std::cos(config.phi);
    const double sphi = std::sin(config.phi);
    const double step = kTwoPi / grid_size;
    const fftw_complex* out = ws.out();
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < grid_size; ++m) {
        const double theta = -kPi + step * m;
        // Re{e^{-i phi} X} = cos(phi) Re X + sin(phi) Im X
        const double data = scale * (cphi * out[m][0] + sphi * out[m][1]);
        const double value = data + prior.kappa() * std::cos(theta - prior.mu());
        if (value > best_value) {
            best_value = value;
            best = m;
        }
    }
    const double coarse = -kPi + step * best;
    if (!refine) return coarse;

    const auto objective = [&](double theta) { return ambiguity_at(config, obs, prior, theta); };
    const double fine = golden_maximize(objective, coarse - step, coarse + step);
    return wrap_angle(objective(fine) >= objective(coarse) ? fine : coarse);
}

McResult run_monte_carlo(const SignalConfig& config, const VonMisesPrior& prior, const McConfig& mc) {
    config.validate();
    mc.validate();
    const auto n = static_cast<std::size_t>(mc.trials);
    std::vector<double> errors(n);
    parallel_for(n, [&](std::size_t t) {
        auto rng = derive_stream(mc.seed, t);
        const double theta = mc.fixed_theta ? *mc.fixed_theta : prior.sample(rng);
        const auto obs = generate(config, theta, rng);
        const double estimate = map_estimate(config, prior, obs, mc.grid_size, mc.refine);
        errors[t] = mc.error_mode == ErrorMode::Wrapped ? wrap_error(estimate, theta) : estimate - theta;
    });

    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t outliers = 0;
    for (double e : errors) {
        const double e2 = e * e;
        sum += e2;
        sum_sq += e2 * e2;
        if (std::abs(e) > 0.5 * kPi) ++outliers;
    }
    const double dn = static_cast<double>(n);
    McResult result;
    result.trials_used = mc.trials;
    result.mse = sum / dn;
    result.rmse_db = to_db(result.mse);
    if (n > 1) {
        const double variance = std::max(0.0, (sum_sq - dn * result.mse * result.mse) / (dn - 1.0));
        result.mse_stderr = std::sqrt(variance / dn);
    }
    result.outlier_fraction = static_cast<double>(outliers) / dn;
    return result;
}

}  // namespace freqbound
