// Command-line front end: single-scenario reports, sweeps and figure presets.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "diamond/config.hpp"
#include "diamond/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> schemes;
    std::optional<std::string> phase_mode;
    std::optional<std::string> quality;
};

diamond::search::GridQuality quality_or(const CommonFlags& f, diamond::search::GridQuality fallback) {
    if (!f.quality) return fallback;
    const auto q = diamond::parse_quality(*f.quality);
    if (!q) throw diamond::ConfigError("--grid-quality must be fast, default or fine");
    return *q;
}

void apply_flags(diamond::SweepSpec& spec, const CommonFlags& f) {
    if (f.seed) spec.seed = *f.seed;
    if (f.schemes) spec.schemes = diamond::parse_scheme_list(*f.schemes);
    if (f.phase_mode) spec.phase_mode = diamond::parse_phase_mode(*f.phase_mode);
    spec.quality = quality_or(f, spec.quality);
    diamond::validate(spec);
}

std::string format_params(const diamond::RateResult& r) {
    std::string out;
    for (const auto& [k, v] : r.params) {
        if (!out.empty()) out += ';';
        out += k + '=' + diamond::format_number(v);
    }
    return out;
}

int run_rates(const std::string& path, const CommonFlags& f) {
    const auto sc = diamond::scenario_from_config(diamond::KeyValues::load(path));
    const auto schemes = diamond::parse_scheme_list(f.schemes.value_or("all"));
    const diamond::EvalOptions eo{quality_or(f, diamond::search::GridQuality::standard), f.seed.value_or(1)};
    std::cout << "scheme,rate,lambda,converged,params\n";
    bool numerical_failure = false;
    for (auto s : schemes) {
        const auto r = diamond::compute_rate(s, sc, eo);
        if (!std::isfinite(r.rate)) numerical_failure = true;
        std::cout << diamond::to_string(s) << ',' << diamond::format_number(r.rate) << ','
                  << diamond::format_number(r.lambda) << ',' << (r.converged ? 1 : 0) << ',' << format_params(r) << '\n';
    }
    return numerical_failure ? kExitNumerical : 0;
}

int write_sweep(const diamond::SweepSpec& spec, const std::string& out_path) {
    const auto rows = diamond::run_sweep(spec);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw diamond::ConfigError(out_path + ": cannot open for writing");
    diamond::write_csv(out, spec, rows);
    if (!out) throw diamond::ConfigError(out_path + ": write failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Achievable rates of the half-duplex diamond relay channel with conferencing relays"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", flags.seed, "Seed for phase draws and randomized optimizers");
        cmd->add_option("--schemes", flags.schemes, "Comma-separated subset of upper,df,pcf,fcf,ccf,af");
        cmd->add_option("--phase-mode", flags.phase_mode, "zero or seeded");
        cmd->add_option("--grid-quality", flags.quality, "fast, default or fine");
    };

    std::string config_path, out_path, figure;
    auto* rates = app.add_subcommand("rates", "Rates of every scheme for one scenario");
    rates->add_option("config", config_path, "Scenario file")->required();
    add_common(rates);

    auto* sweep = app.add_subcommand("sweep", "Sweep described by a sweep file");
    sweep->add_option("sweep-file", config_path, "Sweep file")->required();
    sweep->add_option("-o,--output", out_path, "CSV output path")->required();
    add_common(sweep);

    auto* reproduce = app.add_subcommand("reproduce", "Built-in figure preset");
    reproduce->add_option("figure", figure, "fig3, fig4a or fig4b")
        ->required()
        ->check(CLI::IsMember({"fig3", "fig4a", "fig4b"}));
    reproduce->add_option("-o,--output", out_path, "CSV output path")->required();
    add_common(reproduce);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*rates) return run_rates(config_path, flags);
        diamond::SweepSpec spec = *sweep ? diamond::sweep_spec_from_config(diamond::KeyValues::load(config_path))
                                         : diamond::preset(figure);
        apply_flags(spec, flags);
        return write_sweep(spec, out_path);
    } catch (const diamond::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const diamond::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const diamond::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}
