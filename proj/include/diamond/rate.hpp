#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace diamond {

enum class Scheme { upper, df, pcf, fcf, ccf, af };

inline constexpr Scheme kAllSchemes[] = {Scheme::upper, Scheme::df, Scheme::pcf, Scheme::fcf, Scheme::ccf, Scheme::af};

inline std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::upper: return "upper";
        case Scheme::df: return "df";
        case Scheme::pcf: return "pcf";
        case Scheme::fcf: return "fcf";
        case Scheme::ccf: return "ccf";
        case Scheme::af: return "af";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
    for (Scheme s : kAllSchemes)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

/// Outcome of one rate computation. `lambda` is the first-hop time fraction
/// at the optimum; `params` records the remaining optimizer variables.
struct RateResult {
    Scheme scheme = Scheme::upper;
    double rate = 0.0;  // bits/s/Hz
    double lambda = 0.5;
    std::map<std::string, double> params;
    bool converged = true;
    std::string note;
};

}  // namespace diamond
