#pragma once

// Half-duplex Gaussian diamond relay channel: scenario record, link SNRs and
// the planar geometry used by the position sweeps.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace diamond {

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised for scenario values that violate the model's domain.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Link gains are amplitude gains over unit-variance noise; powers are
/// linear and noise-normalized. Conferencing capacities are in bits/s/Hz.
struct Scenario {
    Complex h1{0.0, 0.0};  // source -> relay 1
    Complex h2{0.0, 0.0};  // source -> relay 2
    Complex g1{0.0, 0.0};  // relay 1 -> destination
    Complex g2{0.0, 0.0};  // relay 2 -> destination
    double ps = 1.0;
    double pr = 1.0;
    double c12 = 0.0;  // relay 1 -> relay 2
    double c21 = 0.0;  // relay 2 -> relay 1

    Scenario with_conferencing(double c) const {
        Scenario s = *this;
        s.c12 = c;
        s.c21 = c;
        return s;
    }
};

inline bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void validate(const Scenario& s) {
    if (!(finite(s.h1) && finite(s.h2) && finite(s.g1) && finite(s.g2)))
        throw ValidationError("scenario: channel gains must be finite");
    if (!(s.ps > 0.0) || !std::isfinite(s.ps)) throw ValidationError("scenario: ps must be positive and finite");
    if (!(s.pr > 0.0) || !std::isfinite(s.pr)) throw ValidationError("scenario: pr must be positive and finite");
    if (!(s.c12 >= 0.0) || std::isnan(s.c12)) throw ValidationError("scenario: c12 must be nonnegative");
    if (!(s.c21 >= 0.0) || std::isnan(s.c21)) throw ValidationError("scenario: c21 must be nonnegative");
}

/// Linear received SNRs of the four links.
struct LinkSnrs {
    double gamma1 = 0.0;   // first hop, relay 1
    double gamma2 = 0.0;   // first hop, relay 2
    double tgamma1 = 0.0;  // second hop, relay 1
    double tgamma2 = 0.0;  // second hop, relay 2

    double gamma(int relay) const { return relay == 1 ? gamma1 : gamma2; }
    double tgamma(int relay) const { return relay == 1 ? tgamma1 : tgamma2; }
};

inline LinkSnrs snrs(const Scenario& s) {
    return {std::norm(s.h1) * s.ps, std::norm(s.h2) * s.ps, std::norm(s.g1) * s.pr, std::norm(s.g2) * s.pr};
}

inline void require_relay_index(int relay) {
    if (relay != 1 && relay != 2) throw std::out_of_range("relay index must be 1 or 2");
}

enum class PhaseMode { zero, seeded_uniform };

/// Relays sit on the unit circle at (d, -sqrt(1-d^2)) and (d, +sqrt(1-d^2));
/// the source is at (-1, 0) and the destination at (1, 0).
struct Geometry {
    double d = 0.0;
    PhaseMode phase_mode = PhaseMode::zero;
    std::uint64_t seed = 0;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline constexpr Point kSourcePosition{-1.0, 0.0};
inline constexpr Point kDestinationPosition{1.0, 0.0};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Same magnitudes, fresh uniform phases on all four gains.
inline Scenario with_random_phases(Scenario s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
    s.h1 = std::polar(std::abs(s.h1), uni(rng));
    s.h2 = std::polar(std::abs(s.h2), uni(rng));
    s.g1 = std::polar(std::abs(s.g1), uni(rng));
    s.g2 = std::polar(std::abs(s.g2), uni(rng));
    return s;
}

inline Scenario scenario_from_geometry(const Geometry& g, double ps, double pr, double c) {
    if (!(std::abs(g.d) < 1.0)) throw ValidationError("geometry: |d| must be < 1");
    const double y = std::sqrt(1.0 - g.d * g.d);
    const Point relay1{g.d, -y};
    const Point relay2{g.d, y};

    Scenario s;
    s.h1 = Complex(1.0 / distance(kSourcePosition, relay1), 0.0);
    s.h2 = Complex(1.0 / distance(kSourcePosition, relay2), 0.0);
    s.g1 = Complex(1.0 / distance(relay1, kDestinationPosition), 0.0);
    s.g2 = Complex(1.0 / distance(relay2, kDestinationPosition), 0.0);
    if (g.phase_mode == PhaseMode::seeded_uniform) s = with_random_phases(s, g.seed);
    s.ps = ps;
    s.pr = pr;
    s.c12 = c;
    s.c21 = c;
    validate(s);
    return s;
}

/// Symmetric scenario with real positive gains hitting the requested SNRs.
inline Scenario scenario_from_snrs(double gamma_db, double tgamma_db, double ps, double pr, double c) {
    if (!(ps > 0.0) || !(pr > 0.0)) throw ValidationError("scenario: ps and pr must be positive");
    const double h = std::sqrt(db_to_linear(gamma_db) / ps);
    const double g = std::sqrt(db_to_linear(tgamma_db) / pr);
    Scenario s;
    s.h1 = s.h2 = Complex(h, 0.0);
    s.g1 = s.g2 = Complex(g, 0.0);
    s.ps = ps;
    s.pr = pr;
    s.c12 = c;
    s.c21 = c;
    validate(s);
    return s;
}

}  // namespace diamond
