#pragma once

// Rate evaluation for any scheme, the relay-position and conferencing-rate
// sweeps with their presets, and CSV output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "diamond/af.hpp"
#include "diamond/bounds.hpp"
#include "diamond/cf.hpp"
#include "diamond/config.hpp"
#include "diamond/df.hpp"
#include "diamond/model.hpp"
#include "diamond/rate.hpp"
#include "diamond/search.hpp"

namespace diamond {

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvalOptions {
    search::GridQuality quality = search::GridQuality::standard;
    std::uint64_t seed = 1;
};

inline AfOptions af_options(const EvalOptions& e) {
    AfOptions o;
    o.seed = e.seed;
    if (e.quality == search::GridQuality::fast) {
        o.n_starts = 24;
        o.n_draws = 200;
    } else if (e.quality == search::GridQuality::fine) {
        o.n_starts = 128;
        o.n_draws = 1000;
    }
    return o;
}

inline RateResult compute_rate(Scheme scheme, const Scenario& sc, const EvalOptions& e = {}) {
    const auto so = search::SearchOptions::for_quality(e.quality);
    switch (scheme) {
        case Scheme::upper: return upper_bound_result(sc);
        case Scheme::df: return df_rate(sc, DfOptions{so});
        case Scheme::pcf: return pcf_rate(sc, CfOptions{so});
        case Scheme::fcf: return fcf_rate(sc, CfOptions{so});
        case Scheme::ccf: return ccf_rate(sc, CfOptions{so});
        case Scheme::af: return af_rate(sc, af_options(e));
    }
    throw std::invalid_argument("unknown scheme");
}

inline std::optional<search::GridQuality> parse_quality(const std::string& s) {
    if (s == "fast") return search::GridQuality::fast;
    if (s == "default" || s == "standard") return search::GridQuality::standard;
    if (s == "fine") return search::GridQuality::fine;
    return std::nullopt;
}

inline std::string quality_name(search::GridQuality q) {
    switch (q) {
        case search::GridQuality::fast: return "fast";
        case search::GridQuality::standard: return "default";
        case search::GridQuality::fine: return "fine";
    }
    return "?";
}

/// Comma-separated scheme list, returned in canonical order.
inline std::vector<Scheme> parse_scheme_list(const std::string& list) {
    std::set<Scheme> chosen;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
        if (item == "all") {
            chosen.insert(std::begin(kAllSchemes), std::end(kAllSchemes));
            continue;
        }
        const auto s = parse_scheme(item);
        if (!s) throw ConfigError("unknown scheme '" + item + "'");
        chosen.insert(*s);
    }
    if (chosen.empty()) throw ConfigError("scheme list is empty");
    std::vector<Scheme> out;
    for (Scheme s : kAllSchemes)
        if (chosen.contains(s)) out.push_back(s);
    return out;
}

enum class SweepKind { position, conferencing };

struct SweepSpec {
    SweepKind kind = SweepKind::conferencing;
    double start = 0.0;
    double stop = 6.0;
    int steps = 25;
    double gamma_db = 10.0;  // conferencing sweeps
    double tgamma_db = 10.0;
    double c = 0.5;  // position sweeps
    double ps = 1.0;
    double pr = 1.0;
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    std::uint64_t seed = 1;
    PhaseMode phase_mode = PhaseMode::seeded_uniform;
    int phase_draws = 32;
    bool baselines = true;  // emit no-conferencing DF and CF columns
    search::GridQuality quality = search::GridQuality::standard;

    std::vector<double> grid() const { return search::linear_grid(start, stop, steps); }
};

inline void validate(const SweepSpec& s) {
    if (s.steps < 2) throw ConfigError("sweep: steps must be at least 2");
    if (s.schemes.empty()) throw ConfigError("sweep: no schemes requested");
    if (s.phase_draws < 1) throw ConfigError("sweep: phase_draws must be at least 1");
    if (!(s.ps > 0.0) || !(s.pr > 0.0)) throw ConfigError("sweep: ps and pr must be positive");
    if (s.kind == SweepKind::position) {
        if (!(std::abs(s.start) < 1.0) || !(std::abs(s.stop) < 1.0))
            throw ConfigError("sweep: position range must lie inside (-1, 1)");
        if (!(s.c >= 0.0)) throw ConfigError("sweep: c must be nonnegative");
    } else if (!(s.start >= 0.0) || !(s.stop >= 0.0)) {
        throw ConfigError("sweep: conferencing range must be nonnegative");
    }
}

inline SweepSpec preset(const std::string& name) {
    SweepSpec s;
    if (name == "fig3") {
        s.kind = SweepKind::position;
        s.start = -0.95;
        s.stop = 0.95;
        s.steps = 39;
        s.c = 0.5;
    } else if (name == "fig4a" || name == "fig4b") {
        s.kind = SweepKind::conferencing;
        s.start = 0.0;
        s.stop = 6.0;
        s.steps = 25;
        s.gamma_db = name == "fig4a" ? 30.0 : 10.0;
        s.tgamma_db = name == "fig4a" ? 10.0 : 30.0;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected fig3, fig4a or fig4b)");
    }
    return s;
}

inline PhaseMode parse_phase_mode(const std::string& s) {
    if (s == "zero") return PhaseMode::zero;
    if (s == "seeded" || s == "seeded_uniform") return PhaseMode::seeded_uniform;
    throw ConfigError("unknown phase mode '" + s + "' (expected zero or seeded)");
}

inline std::string phase_mode_name(PhaseMode m) { return m == PhaseMode::zero ? "zero" : "seeded"; }

inline SweepSpec sweep_spec_from_config(const KeyValues& kv) {
    kv.require_known({"preset", "kind", "start", "stop", "steps", "gamma_db", "tgamma_db", "c", "ps", "pr", "schemes",
                      "seed", "phase_mode", "phase_draws", "baselines", "grid_quality"});
    SweepSpec s;
    if (kv.has("preset")) {
        s = preset(kv.text("preset"));
    } else {
        const std::string kind = kv.text("kind");
        if (kind == "position")
            s.kind = SweepKind::position;
        else if (kind == "conferencing")
            s.kind = SweepKind::conferencing;
        else
            throw ConfigError(kv.where(kv.line_of("kind")) + ": kind must be position or conferencing");
        s.start = kv.number("start");
        s.stop = kv.number("stop");
        s.steps = static_cast<int>(kv.integer("steps"));
    }
    if (kv.has("start")) s.start = kv.number("start");
    if (kv.has("stop")) s.stop = kv.number("stop");
    if (kv.has("steps")) s.steps = static_cast<int>(kv.integer("steps"));
    s.gamma_db = kv.number_or("gamma_db", s.gamma_db);
    s.tgamma_db = kv.number_or("tgamma_db", s.tgamma_db);
    s.c = kv.number_or("c", s.c);
    s.ps = kv.number_or("ps", s.ps);
    s.pr = kv.number_or("pr", s.pr);
    if (kv.has("schemes")) s.schemes = parse_scheme_list(kv.text("schemes"));
    if (kv.has("seed")) s.seed = static_cast<std::uint64_t>(kv.integer("seed"));
    if (kv.has("phase_mode")) s.phase_mode = parse_phase_mode(kv.text("phase_mode"));
    if (kv.has("phase_draws")) s.phase_draws = static_cast<int>(kv.integer("phase_draws"));
    if (kv.has("baselines")) s.baselines = kv.text("baselines") != "0" && kv.text("baselines") != "false";
    if (kv.has("grid_quality")) {
        const auto q = parse_quality(kv.text("grid_quality"));
        if (!q) throw ConfigError(kv.where(kv.line_of("grid_quality")) + ": grid_quality must be fast, default or fine");
        s.quality = *q;
    }
    validate(s);
    return s;
}

struct SweepRow {
    double x = 0.0;
    std::map<Scheme, double> rate;
    std::map<Scheme, double> lambda;
    double df_base = NAN;
    double cf_base = NAN;
    std::vector<std::string> flags;
};

/// Seed of the k-th phase draw; independent of the sweep point so every
/// point sees the same phase realizations.
inline std::uint64_t phase_seed(std::uint64_t seed, int k) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline bool phase_sensitive(Scheme s) { return s == Scheme::af || s == Scheme::ccf; }

inline Scenario sweep_scenario(const SweepSpec& spec, double x) {
    if (spec.kind == SweepKind::position) return scenario_from_geometry({x, PhaseMode::zero, 0}, spec.ps, spec.pr, spec.c);
    return scenario_from_snrs(spec.gamma_db, spec.tgamma_db, spec.ps, spec.pr, x);
}

inline SweepRow evaluate_point(const SweepSpec& spec, double x, const std::map<std::string, double>* cached_base) {
    const Scenario sc = sweep_scenario(spec, x);
    EvalOptions eo{spec.quality, spec.seed};
    SweepRow row;
    row.x = x;
    for (Scheme scheme : spec.schemes) {
        double rate = 0.0, lambda = 0.0;
        bool ok = true;
        if (phase_sensitive(scheme) && spec.phase_mode == PhaseMode::seeded_uniform) {
            for (int k = 0; k < spec.phase_draws; ++k) {
                const std::uint64_t ps = phase_seed(spec.seed, k);
                const RateResult r = compute_rate(scheme, with_random_phases(sc, ps), {spec.quality, ps});
                rate += r.rate;
                lambda += r.lambda;
                ok = ok && r.converged;
            }
            rate /= spec.phase_draws;
            lambda /= spec.phase_draws;
        } else {
            const RateResult r = compute_rate(scheme, sc, eo);
            rate = r.rate;
            lambda = r.lambda;
            ok = r.converged;
        }
        if (!std::isfinite(rate)) throw NumericalFailure(std::string(to_string(scheme)) + " rate is not finite");
        row.rate[scheme] = rate;
        row.lambda[scheme] = lambda;
        if (!ok) row.flags.emplace_back(to_string(scheme));
    }
    if (spec.baselines) {
        const auto so = search::SearchOptions::for_quality(spec.quality);
        const bool want_df = row.rate.contains(Scheme::df);
        const bool want_cf = row.rate.contains(Scheme::pcf);
        if (cached_base) {
            if (want_df) row.df_base = cached_base->at("df");
            if (want_cf) row.cf_base = cached_base->at("cf");
        } else {
            if (want_df) row.df_base = df_baseline_rate(sc, DfOptions{so}).rate;
            if (want_cf) row.cf_base = cf_baseline_rate(sc, CfOptions{so}).rate;
        }
    }
    return row;
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    validate(spec);
    std::optional<std::map<std::string, double>> base;
    if (spec.kind == SweepKind::conferencing && spec.baselines) {
        // The no-conferencing baselines do not depend on the sweep variable.
        const Scenario sc = sweep_scenario(spec, 0.0);
        const auto so = search::SearchOptions::for_quality(spec.quality);
        base = std::map<std::string, double>{{"df", df_baseline_rate(sc, DfOptions{so}).rate},
                                             {"cf", cf_baseline_rate(sc, CfOptions{so}).rate}};
    }
    std::vector<SweepRow> rows;
    for (double x : spec.grid()) rows.push_back(evaluate_point(spec, x, base ? &*base : nullptr));
    return rows;
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    out << "# seed=" << spec.seed << " phase_mode=" << phase_mode_name(spec.phase_mode)
        << " phase_draws=" << spec.phase_draws << " grid_quality=" << quality_name(spec.quality) << '\n';
    out << 'x';
    for (Scheme s : spec.schemes) out << ',' << to_string(s);
    for (Scheme s : spec.schemes)
        if (s != Scheme::upper) out << ",lambda_" << to_string(s);
    const bool has_upper = !spec.schemes.empty() && spec.schemes.front() == Scheme::upper;
    if (has_upper) out << ",lambda_star";
    const bool df_base = spec.baselines && std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::df) != spec.schemes.end();
    const bool cf_base = spec.baselines && std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::pcf) != spec.schemes.end();
    if (df_base) out << ",df_base";
    if (cf_base) out << ",cf_base";
    out << ",flags\n";
    for (const auto& r : rows) {
        out << format_number(r.x);
        for (Scheme s : spec.schemes) out << ',' << format_number(r.rate.at(s));
        for (Scheme s : spec.schemes)
            if (s != Scheme::upper) out << ',' << format_number(r.lambda.at(s));
        if (has_upper) out << ',' << format_number(r.lambda.at(Scheme::upper));
        if (df_base) out << ',' << format_number(r.df_base);
        if (cf_base) out << ',' << format_number(r.cf_base);
        out << ',';
        for (std::size_t i = 0; i < r.flags.size(); ++i) out << (i ? ";" : "") << r.flags[i];
        out << '\n';
    }
}

}  // namespace diamond
