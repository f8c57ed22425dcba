// freqbound: Bayesian bounds and MAP Monte Carlo for circular frequency estimation.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "freqbound/sweep.hpp"
#include "freqbound/testpoints.hpp"

using namespace freqbound;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitSpec = 2;
constexpr int kExitNumeric = 3;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    int quad_nodes = 32;
    std::optional<double> f_int;
    std::string config_file;
};

struct AxisOptions {
    double snr_db = 0.0;
    std::optional<double> snr_start, snr_stop;
    double snr_step = 1.0;
    std::optional<std::string> k;
    std::optional<std::string> kappa;
    std::optional<std::string> mu;
    std::string trio = "2,9,10";
    std::optional<std::string> s;
    bool optimize_s = false;
    int trials = 10000;
    int grid_size = 4096;
    bool no_refine = false;
    bool linear_error = false;
    std::optional<double> fixed_theta;
    std::string kinds = "WWB";
    std::optional<int> figure;
};

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& field) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        std::size_t used = 0;
        T v{};
        try {
            if constexpr (std::is_same_v<T, int>)
                v = std::stoi(item, &used);
            else
                v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw SpecError(field, "cannot parse '" + item + "'");
        out.push_back(v);
    }
    return out;
}

template <class T>
T single(const std::vector<T>& values, const std::string& field) {
    if (values.size() != 1) throw SpecError(field, "a figure preset takes exactly one value");
    return values.front();
}

// Trio lists are separated by ';' or whitespace since a trio itself may use commas.
std::vector<TestPointConfig> parse_trios(const std::string& text) {
    std::vector<TestPointConfig> out;
    std::string normalized = text;
    std::replace(normalized.begin(), normalized.end(), ' ', ';');
    for (const auto& item : split_list(normalized, ';')) {
        try {
            out.push_back(TestPointConfig::parse(item));
        } catch (const std::invalid_argument& e) {
            throw SpecError("trio", e.what());
        }
    }
    return out;
}

void add_signal_axes(CLI::App* cmd, AxisOptions& a) {
    cmd->add_option("--k", a.k, "Sample count(s), comma separated");
    cmd->add_option("--kappa", a.kappa, "Prior concentration(s)");
    cmd->add_option("--mu", a.mu, "Prior mean(s), rad");
}

void add_single_snr(CLI::App* cmd, AxisOptions& a) {
    cmd->add_option("--snr-db", a.snr_db, "SNR in dB");
}

void add_wwb_options(CLI::App* cmd, AxisOptions& a) {
    cmd->add_option("--trio", a.trio, "Test point counts C,S,E (';' between several)");
    cmd->add_option("--s", a.s, "Exponent s, or the search grid with --optimize-s");
    cmd->add_flag("--optimize-s", a.optimize_s, "Grid search s over --s values (default grid 0.1..0.9)");
}

void add_mc_options(CLI::App* cmd, AxisOptions& a) {
    cmd->add_option("--trials", a.trials, "Monte Carlo trials");
    cmd->add_option("--grid-size", a.grid_size, "MAP search grid size");
    cmd->add_flag("--no-refine", a.no_refine, "Disable golden-section refinement");
    cmd->add_flag("--linear-error", a.linear_error, "Score estimate - truth without wrapping");
    cmd->add_option("--fixed-theta", a.fixed_theta, "Use this frequency in every trial");
}

SweepSpec build_spec(const std::string& command, const AxisOptions& a, const GlobalOptions& g) {
    SweepSpec spec;
    if (command == "sweep" && a.figure) {
        std::optional<double> kappa;
        std::optional<int> k;
        if (a.kappa) kappa = single(parse_list<double>(*a.kappa, "kappa"), "kappa");
        if (a.k) k = single(parse_list<int>(*a.k, "k"), "k");
        spec = figure_preset(*a.figure, kappa, k);
    } else {
        spec.k_values = parse_list<int>(a.k.value_or("20"), "k");
        spec.kappa_values = parse_list<double>(a.kappa.value_or("1"), "kappa");
        spec.mu_values = parse_list<double>(a.mu.value_or("0"), "mu");
        spec.trios = parse_trios(a.trio);
        spec.optimize_s = a.optimize_s;
        if (a.s) spec.s_values = parse_list<double>(*a.s, "s");
        else if (spec.optimize_s) spec.s_values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        if (command == "sweep") {
            spec.kinds.clear();
            for (const auto& name : split_list(a.kinds)) {
                try {
                    spec.kinds.push_back(parse_kind(name));
                } catch (const std::invalid_argument& e) {
                    throw SpecError("kinds", e.what());
                }
            }
        } else {
            spec.kinds = {parse_kind(command == "map-sim" ? "MAP" : command)};
            spec.snr_db = {a.snr_db, a.snr_db, 1.0};
        }
    }
    if (command == "sweep") {
        if (a.snr_start) spec.snr_db.start = *a.snr_start;
        if (a.snr_stop) spec.snr_db.stop = *a.snr_stop;
        spec.snr_db.step = a.snr_step;
    }
    spec.seed = g.seed;
    spec.trials = a.trials;
    spec.grid_size = a.grid_size;
    spec.refine = !a.no_refine;
    spec.error_mode = a.linear_error ? ErrorMode::Linear : ErrorMode::Wrapped;
    spec.fixed_theta = a.fixed_theta;
    spec.quad.node_count = g.quad_nodes;
    spec.f_int = g.f_int;
    return spec;
}

void write_output(const GlobalOptions& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(g.out, std::ios::binary);
    if (!file) throw std::ios_base::failure("cannot open '" + g.out + "' for writing");
    file << text;
    if (!file) throw std::ios_base::failure("write to '" + g.out + "' failed");
}

std::string testpoints_table(const TestPointSet& set, OutputFormat format) {
    std::ostringstream os;
    if (format == OutputFormat::Csv) {
        os << "h_rad,h_over_pi,provenance\n";
        for (std::size_t i = 0; i < set.size(); ++i)
            os << format_number(set.h[i]) << ',' << format_number(set.h[i] / kPi) << ','
               << kind_letter(set.provenance[i]) << '\n';
    } else {
        os << "[\n";
        for (std::size_t i = 0; i < set.size(); ++i)
            os << "  {\"h_rad\":" << format_number(set.h[i]) << ",\"h_over_pi\":"
               << format_number(set.h[i] / kPi) << ",\"provenance\":\"" << kind_letter(set.provenance[i])
               << "\"}" << (i + 1 < set.size() ? "," : "") << '\n';
        os << "]\n";
    }
    return os.str();
}

// Reads key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecError("config_file", path + ":" + std::to_string(number) + ": expected key=value");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

bool has_long_option(const CLI::App* app, const std::string& name) {
    for (const auto* opt : app->get_options())
        if (opt->check_lname(name)) return true;
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian lower bounds and MAP Monte Carlo for circular frequency estimation"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Global random seed");
    app.add_option("--out", g.out, "Output path (default stdout)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--quad-nodes", g.quad_nodes, "Quadrature panels (>= 16)");
    app.add_option("--f-int", g.f_int, "Integration rate in Hz; adds Hz columns to extra");
    app.add_option("--config-file", g.config_file, "Flat key=value file mirroring the flags");

    AxisOptions a;
    auto* wwb = app.add_subcommand("wwb", "Weiss-Weinstein bound");
    auto* bcrb = app.add_subcommand("bcrb", "Bayesian Cramer-Rao bound");
    auto* zzb = app.add_subcommand("zzb", "Ziv-Zakai bound");
    auto* mapsim = app.add_subcommand("map-sim", "MAP estimator Monte Carlo");
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep or figure preset");
    auto* tp = app.add_subcommand("testpoints", "Print a test point set");
    for (auto* cmd : {wwb, bcrb, zzb, mapsim, sweep, tp}) cmd->fallthrough();

    for (auto* cmd : {wwb, bcrb, zzb, mapsim}) {
        add_signal_axes(cmd, a);
        add_single_snr(cmd, a);
    }
    add_wwb_options(wwb, a);
    add_mc_options(mapsim, a);

    add_signal_axes(sweep, a);
    add_wwb_options(sweep, a);
    add_mc_options(sweep, a);
    sweep->add_option("--snr-start", a.snr_start, "First SNR, dB");
    sweep->add_option("--snr-stop", a.snr_stop, "Last SNR, dB");
    sweep->add_option("--snr-step", a.snr_step, "SNR step, dB");
    sweep->add_option("--kinds", a.kinds, "Subset of WWB,BCRB,ZZB,MAP");
    sweep->add_option("--figure", a.figure, "Preset: 6, 7, 8, 11, 12 or 13");

    std::string tp_config = "2,9,10";
    int tp_k = 20;
    tp->add_option("--k", tp_k, "Sample count");
    tp->add_option("--config", tp_config, "Counts C,S,E");

    // Config file values go in front of the real arguments so that flags win.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string file_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config-file" && i + 1 < args.size()) file_path = args[i + 1];
        else if (args[i].rfind("--config-file=", 0) == 0) file_path = args[i].substr(14);
    }
    try {
        if (!file_path.empty()) {
            auto sub_it = std::find_if(args.begin(), args.end(), [&](const std::string& s) {
                return app.get_subcommand_no_throw(s) != nullptr;
            });
            CLI::App* sub = sub_it == args.end() ? nullptr : app.get_subcommand(*sub_it);
            std::vector<std::string> injected;
            for (const auto& [key, value] : read_config_file(file_path)) {
                if (key == "config-file") continue;
                const bool known = has_long_option(&app, key) || (sub && has_long_option(sub, key));
                if (!known) continue;  // keys for other subcommands
                injected.push_back("--" + key + "=" + value);
            }
            if (sub_it != args.end()) args.insert(sub_it + 1, injected.begin(), injected.end());
            else args.insert(args.begin(), injected.begin(), injected.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitSpec;
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSpec;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }

    try {
        const OutputFormat format = parse_format(g.format);
        if (tp->parsed()) {
            const auto set = build(TestPointConfig::parse(tp_config), tp_k);
            write_output(g, testpoints_table(set, format));
            return 0;
        }
        std::string command;
        for (auto* cmd : {wwb, bcrb, zzb, mapsim, sweep})
            if (cmd->parsed()) command = cmd->get_name();
        const SweepSpec spec = build_spec(command, a, g);
        const auto rows = run_sweep(spec);
        std::ostringstream os;
        emit(rows, format, os);
        write_output(g, os.str());
        return 0;
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSpec;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSpec;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSpec;
    }
}
