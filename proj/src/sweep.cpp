#include "freqbound/sweep.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "freqbound/parallel.hpp"
#include "freqbound/prior.hpp"
#include "freqbound/random.hpp"
#include "freqbound/signal.hpp"
#include "freqbound/wwb.hpp"

namespace freqbound {

namespace {

constexpr double kMinSnrDb = -45.0;
constexpr double kMaxSnrDb = 30.0;
constexpr int kMaxK = 10000;

std::uint64_t bits_of(double v) {
    std::uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

// Seed for one MAP grid point, a function of the global seed and the
// point's coordinates only.
std::uint64_t point_seed(std::uint64_t seed, int k, double kappa, double mu, double snr_db) {
    std::uint64_t h = mix_seed(seed);
    for (std::uint64_t part : {static_cast<std::uint64_t>(k), bits_of(kappa), bits_of(mu), bits_of(snr_db)})
        h = mix_seed(h ^ part);
    return h;
}

// Minimal JSON object writer; keeps number formatting under our control.
class JsonObject {
public:
    JsonObject& number(const std::string& key, double v) {
        field(key);
        body_ += std::isfinite(v) ? format_number(v) : "null";
        return *this;
    }
    JsonObject& integer(const std::string& key, long long v) {
        field(key);
        body_ += std::to_string(v);
        return *this;
    }
    JsonObject& integers(const std::string& key, const std::vector<std::size_t>& v) {
        field(key);
        body_ += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) body_ += ',';
            body_ += std::to_string(v[i]);
        }
        body_ += ']';
        return *this;
    }
    std::string str() const { return "{" + body_ + "}"; }

private:
    void field(const std::string& key) {
        if (!body_.empty()) body_ += ',';
        body_ += '"' + key + "\":";
    }
    std::string body_;
};

std::string point_label(BoundKind kind, int k, double kappa, double mu, double snr_db,
                        const std::string& trio) {
    std::ostringstream os;
    os << kind_name(kind) << " at K=" << k << ", kappa=" << kappa << ", mu=" << mu
       << ", snr_db=" << snr_db;
    if (!trio.empty()) os << ", trio=" << trio;
    return os.str();
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw SpecError("format", "expected csv or json, got '" + text + "'");
}

std::vector<double> SnrRange::values() const {
    std::vector<double> out;
    const double span = stop - start;
    const auto count = static_cast<long>(std::floor(span / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

void SweepSpec::validate() const {
    const auto in_snr_range = [](double v) { return v >= kMinSnrDb && v <= kMaxSnrDb; };
    if (!std::isfinite(snr_db.start) || !in_snr_range(snr_db.start))
        throw SpecError("snr_start", "must lie in [-45, 30] dB");
    if (!std::isfinite(snr_db.stop) || !in_snr_range(snr_db.stop))
        throw SpecError("snr_stop", "must lie in [-45, 30] dB");
    if (snr_db.stop < snr_db.start) throw SpecError("snr_stop", "must not be below snr_start");
    if (!(snr_db.step > 0.0) || !std::isfinite(snr_db.step)) throw SpecError("snr_step", "must be > 0");

    if (kinds.empty()) throw SpecError("kinds", "must not be empty");
    const auto wants = [&](BoundKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };
    const int min_k = (wants(BoundKind::WWB) || wants(BoundKind::ZZB)) ? 2 : 1;
    if (k_values.empty()) throw SpecError("k_values", "must not be empty");
    for (int k : k_values)
        if (k < min_k || k > kMaxK)
            throw SpecError("k_values", "K must lie in [" + std::to_string(min_k) + ", " +
                                            std::to_string(kMaxK) + "] for the requested bounds");

    if (prior_pairs.empty()) {
        if (kappa_values.empty()) throw SpecError("kappa_values", "must not be empty");
        if (mu_values.empty()) throw SpecError("mu_values", "must not be empty");
    }
    for (double kappa : kappa_values)
        if (!(kappa >= 0.0 && kappa <= 500.0)) throw SpecError("kappa_values", "kappa must lie in [0, 500]");
    for (double mu : mu_values)
        if (!(mu >= -kPi && mu <= kPi)) throw SpecError("mu_values", "mu must lie in [-pi, pi]");
    for (const auto& [mu, kappa] : prior_pairs) {
        if (!(mu >= -kPi && mu <= kPi)) throw SpecError("prior_pairs", "mu must lie in [-pi, pi]");
        if (!(kappa >= 0.0 && kappa <= 500.0)) throw SpecError("prior_pairs", "kappa must lie in [0, 500]");
    }

    if (wants(BoundKind::WWB)) {
        if (trios.empty()) throw SpecError("trios", "must not be empty");
        for (const auto& t : trios) {
            try {
                t.validate();
            } catch (const std::invalid_argument& e) {
                throw SpecError("trios", e.what());
            }
        }
        if (s_values.empty()) throw SpecError("s_values", "must not be empty");
        for (double s : s_values)
            if (!(s > 0.0 && s < 1.0)) throw SpecError("s_values", "s must lie in (0, 1)");
    }
    if (trials < 1) throw SpecError("trials", "must be >= 1");
    if (grid_size < 64) throw SpecError("grid_size", "must be >= 64");
    try {
        quad.validate();
    } catch (const std::invalid_argument& e) {
        throw SpecError("quad_nodes", e.what());
    }
    if (fixed_theta && !(*fixed_theta >= -kPi && *fixed_theta <= kPi))
        throw SpecError("fixed_theta", "must lie in [-pi, pi]");
    if (f_int && !(*f_int > 0.0 && std::isfinite(*f_int))) throw SpecError("f_int", "must be > 0");
}

SweepSpec figure_preset(int figure, std::optional<double> kappa, std::optional<int> k) {
    SweepSpec spec;
    spec.snr_db = {-20.0, 10.0, 1.0};
    spec.k_values = {k.value_or(20)};
    spec.mu_values = {0.0};
    spec.trios = {TestPointConfig{2, 9, 10}};
    spec.s_values = {0.5};
    switch (figure) {
        case 6:
            spec.kinds = {BoundKind::WWB};
            if (!k) spec.k_values = {20, 40, 60};
            spec.kappa_values = {2.0};
            spec.s_values = {0.1, 0.5};
            break;
        case 7:
            if (!kappa) throw SpecError("kappa", "figure 7 requires --kappa (the caption does not state it)");
            spec.kinds = {BoundKind::WWB};
            spec.trios = {TestPointConfig{2, 9, 0}, TestPointConfig{2, 9, 10}};
            break;
        case 8:
            if (kappa) throw SpecError("kappa", "figure 8 fixes its (mu, kappa) pairs");
            spec.kinds = {BoundKind::WWB};
            spec.trios.clear();
            for (int n : {1, 3, 5, 7, 9}) spec.trios.push_back(TestPointConfig{2, n, 0});
            spec.prior_pairs = {{0.0, 1.0},      {0.0, 5.0},     {0.0, 20.0},
                                {kPi / 2, 1.0},  {-kPi / 2, 1.0}, {kPi / 2, 5.0}};
            break;
        case 11:
            spec.kinds = {BoundKind::WWB, BoundKind::BCRB, BoundKind::MAP};
            spec.kappa_values = {0.0, 1.0, 2.0, 5.0, 20.0};
            break;
        case 12:
            spec.kinds = {BoundKind::WWB, BoundKind::ZZB};
            spec.kappa_values = {0.0, 1.0, 2.0, 5.0, 20.0};
            break;
        case 13:
            spec.kinds = {BoundKind::WWB, BoundKind::ZZB, BoundKind::MAP};
            spec.kappa_values = {1.0};
            break;
        default:
            throw SpecError("figure", "supported presets are 6, 7, 8, 11, 12, 13");
    }
    if (kappa) spec.kappa_values = {*kappa};
    return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();

    std::vector<std::pair<double, double>> priors = spec.prior_pairs;  // (mu, kappa)
    if (priors.empty())
        for (double kappa : spec.kappa_values)
            for (double mu : spec.mu_values) priors.emplace_back(mu, kappa);

    // Point sets depend only on (trio, K); build them once up front.
    std::map<std::pair<std::size_t, int>, TestPointSet> point_sets;
    const bool wants_wwb = std::find(spec.kinds.begin(), spec.kinds.end(), BoundKind::WWB) != spec.kinds.end();
    if (wants_wwb)
        for (std::size_t t = 0; t < spec.trios.size(); ++t)
            for (int k : spec.k_values) {
                try {
                    point_sets.emplace(std::pair{t, k}, build(spec.trios[t], k));
                } catch (const std::invalid_argument& e) {
                    throw SpecError("trios", e.what());
                }
            }

    struct Task {
        BoundKind kind;
        int k;
        double mu;
        double kappa;
        double snr_db;
        std::size_t trio;
    };
    std::vector<Task> tasks;
    const auto snrs = spec.snr_db.values();
    for (BoundKind kind : spec.kinds)
        for (int k : spec.k_values)
            for (const auto& [mu, kappa] : priors)
                for (double snr_db : snrs) {
                    if (kind == BoundKind::WWB)
                        for (std::size_t t = 0; t < spec.trios.size(); ++t)
                            tasks.push_back({kind, k, mu, kappa, snr_db, t});
                    else
                        tasks.push_back({kind, k, mu, kappa, snr_db, 0});
                }

    std::vector<std::vector<SweepRow>> results(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t index) {
        const Task& task = tasks[index];
        const VonMisesPrior prior(task.mu, task.kappa);
        SignalConfig config;
        config.k = task.k;
        config.snr = from_db(task.snr_db);
        const std::string trio = task.kind == BoundKind::WWB ? spec.trios[task.trio].trio() : "";

        SweepRow base;
        base.kind = task.kind;
        base.snr_db = task.snr_db;
        base.k = task.k;
        base.kappa = task.kappa;
        base.mu = task.mu;
        base.trio = trio;

        auto finish = [&](SweepRow row, double value, JsonObject extra) {
            row.value = value;
            row.value_db = to_db(value);
            if (spec.f_int) {
                extra.number("rmse_hz", std::sqrt(value) * *spec.f_int / kTwoPi);
                extra.number("cn0_dbhz", task.snr_db + to_db(*spec.f_int));
            }
            row.extra = extra.str();
            results[index].push_back(std::move(row));
        };

        try {
            switch (task.kind) {
                case BoundKind::WWB: {
                    TestPointSet points = point_sets.at({task.trio, task.k});
                    if (spec.optimize_s) {
                        const auto opt = optimize_s(prior, config, points, spec.s_values, spec.quad);
                        SweepRow row = base;
                        row.s = opt.s_best;
                        JsonObject extra;
                        extra.integers("dropped_points", opt.result.dropped_points)
                            .integer("s_failures", static_cast<long long>(opt.warnings.size()));
                        finish(row, opt.result.mse_bound, extra);
                    } else {
                        for (double s : spec.s_values) {
                            points.s = s;
                            const auto r = wwb_value(prior, config, points, spec.quad);
                            SweepRow row = base;
                            row.s = s;
                            JsonObject extra;
                            extra.integers("dropped_points", r.dropped_points);
                            finish(row, r.mse_bound, extra);
                        }
                    }
                    break;
                }
                case BoundKind::BCRB:
                    finish(base, bcrb(prior, task.k, config.snr), JsonObject{});
                    break;
                case BoundKind::ZZB:
                    finish(base, zzb(prior, task.k, config.snr), JsonObject{});
                    break;
                case BoundKind::MAP: {
                    McConfig mc;
                    mc.trials = spec.trials;
                    mc.grid_size = spec.grid_size;
                    mc.refine = spec.refine;
                    mc.error_mode = spec.error_mode;
                    mc.fixed_theta = spec.fixed_theta;
                    mc.seed = point_seed(spec.seed, task.k, task.kappa, task.mu, task.snr_db);
                    const auto r = run_monte_carlo(config, prior, mc);
                    JsonObject extra;
                    extra.number("mse_stderr", r.mse_stderr)
                        .integer("trials", r.trials_used)
                        .number("outlier_fraction", r.outlier_fraction);
                    finish(base, r.mse, extra);
                    break;
                }
            }
        } catch (const NumericalError& e) {
            throw SweepPointError(point_label(task.kind, task.k, task.kappa, task.mu, task.snr_db, trio) +
                                  ": " + e.what());
        }
    });

    std::vector<SweepRow> rows;
    for (auto& r : results)
        for (auto& row : r) rows.push_back(std::move(row));
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.kind, a.k, a.kappa, a.mu, a.snr_db, a.trio, a.s) <
               std::tie(b.kind, b.k, b.kappa, b.mu, b.snr_db, b.trio, b.s);
    });
    return rows;
}

std::string csv_header() { return "kind,snr_db,k,kappa,mu_rad,s,trio,value_rad2,value_db,extra"; }

void emit(const std::vector<SweepRow>& rows, OutputFormat format, std::ostream& out) {
    if (rows.empty()) throw std::invalid_argument("emit: empty table");
    if (format == OutputFormat::Csv) {
        out << csv_header() << '\n';
        for (const auto& r : rows) {
            out << kind_name(r.kind) << ',' << format_number(r.snr_db) << ',' << r.k << ','
                << format_number(r.kappa) << ',' << format_number(r.mu) << ','
                << (r.s ? format_number(*r.s) : "") << ',' << csv_quote(r.trio) << ','
                << format_number(r.value) << ',' << format_number(r.value_db) << ','
                << csv_quote(r.extra) << '\n';
        }
        return;
    }
    out << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << "  {\"kind\":" << json_string(kind_name(r.kind)) << ",\"snr_db\":" << format_number(r.snr_db)
            << ",\"k\":" << r.k << ",\"kappa\":" << format_number(r.kappa)
            << ",\"mu_rad\":" << format_number(r.mu)
            << ",\"s\":" << (r.s ? format_number(*r.s) : "null")
            << ",\"trio\":" << (r.trio.empty() ? "null" : json_string(r.trio))
            << ",\"value_rad2\":" << format_number(r.value)
            << ",\"value_db\":" << format_number(r.value_db) << ",\"extra\":" << r.extra << '}'
            << (i + 1 < rows.size() ? "," : "") << '\n';
    }
    out << "]\n";
}

void emit(const std::vector<SweepRow>& rows, OutputFormat format, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    emit(rows, format, file);
    file.flush();
    if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_csv_record(std::istream& in, bool& ok) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    ok = any;
    fields.push_back(std::move(field));
    return fields;
}

double parse_double(const std::string& s, const char* column) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty())
        throw std::runtime_error(std::string("parse_csv: bad number in column ") + column + ": '" + s + "'");
    return v;
}

}  // namespace

std::vector<SweepRow> parse_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("parse_csv: empty input");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != csv_header()) throw std::runtime_error("parse_csv: unexpected header");
    std::vector<SweepRow> rows;
    for (;;) {
        bool ok = false;
        const auto f = split_csv_record(in, ok);
        if (!ok) break;
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 10) throw std::runtime_error("parse_csv: expected 10 fields");
        SweepRow r;
        r.kind = parse_kind(f[0]);
        r.snr_db = parse_double(f[1], "snr_db");
        r.k = static_cast<int>(parse_double(f[2], "k"));
        r.kappa = parse_double(f[3], "kappa");
        r.mu = parse_double(f[4], "mu_rad");
        if (!f[5].empty()) r.s = parse_double(f[5], "s");
        r.trio = f[6];
        r.value = parse_double(f[7], "value_rad2");
        r.value_db = parse_double(f[8], "value_db");
        r.extra = f[9];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace freqbound
