#pragma once

// Second-hop region of a two-user Gaussian MAC with a common message and
// optional encoder conferencing. Relay i splits its power into a private part
// (fraction alpha for relay 1, beta for relay 2) and a common part that adds
// coherently at the destination:
//
//   R1        <= lb * log2(1 + alpha*tg1) + C12
//   R2        <= lb * log2(1 + beta*tg2) + C21
//   R1 + R2   <= lb * log2(1 + alpha*tg1 + beta*tg2) + C12 + C21
//   R_total   <= lb * log2(1 + tg1 + tg2 + 2*sqrt((1-alpha)(1-beta)*tg1*tg2))
//
// with lb the second-hop time fraction. Membership is decided exactly by
// maximizing the coherent product (1-alpha)(1-beta) over the power splits
// allowed by the private constraints.

#include <algorithm>
#include <cmath>
#include <limits>

namespace diamond::mac {

inline constexpr double kSlack = 1e-12;

struct MacChannel {
    double lambda_bar = 0.5;  // second-hop time fraction
    double tgamma1 = 0.0;
    double tgamma2 = 0.0;
    double c12 = 0.0;  // conferencing budget usable for R1
    double c21 = 0.0;  // conferencing budget usable for R2
};

/// Smallest private fraction that carries `rate` given a conferencing budget.
inline double required_fraction(double rate, double budget, double lambda_bar, double tgamma) {
    const double excess = rate - budget;
    if (excess <= 0.0) return 0.0;
    if (!(lambda_bar > 0.0) || !(tgamma > 0.0)) return std::numeric_limits<double>::infinity();
    return std::expm1(excess / lambda_bar * std::log(2.0)) / tgamma;
}

/// max (1-a)(1-b) over a in [a0,1], b in [b0,1], a*tg1 + b*tg2 >= s.
/// Returns -1 when the set is empty.
inline double max_common_product(double a0, double b0, double s, double tg1, double tg2) {
    if (a0 > 1.0 + kSlack || b0 > 1.0 + kSlack) return -1.0;
    a0 = std::clamp(a0, 0.0, 1.0);
    b0 = std::clamp(b0, 0.0, 1.0);
    if (a0 * tg1 + b0 * tg2 >= s) return (1.0 - a0) * (1.0 - b0);
    if (tg1 + tg2 < s * (1.0 - kSlack)) return -1.0;
    // The optimum lies on the line a*tg1 + b*tg2 = s.
    if (tg2 <= 0.0) return (1.0 - std::min(1.0, s / tg1)) * (1.0 - b0);
    if (tg1 <= 0.0) return (1.0 - a0) * (1.0 - std::min(1.0, s / tg2));
    const double k = tg1 / tg2;
    const double c = 1.0 - s / tg2;
    const double lo = std::max(a0, (s - tg2) / tg1);
    const double hi = std::min(1.0, (s - b0 * tg2) / tg1);
    if (lo > hi) return (1.0 - hi) * std::max(0.0, c + k * hi);
    const double a = std::clamp((k - c) / (2.0 * k), lo, hi);
    return (1.0 - a) * std::max(0.0, c + k * a);
}

inline double coherent_term(const MacChannel& m, double product) {
    const double coh = m.tgamma1 + m.tgamma2 + 2.0 * std::sqrt(std::max(0.0, product) * m.tgamma1 * m.tgamma2);
    return m.lambda_bar * std::log2(1.0 + coh);
}

/// Largest total rate admissible by the coherent constraint once the private
/// constraints (r1, r2, and their sum r12) are honoured; -inf if they cannot be.
inline double max_total_rate(const MacChannel& m, double r1, double r2, double r12) {
    const double a0 = required_fraction(r1, m.c12, m.lambda_bar, m.tgamma1);
    const double b0 = required_fraction(r2, m.c21, m.lambda_bar, m.tgamma2);
    double s = 0.0;
    const double excess = r12 - m.c12 - m.c21;
    if (excess > 0.0) {
        if (!(m.lambda_bar > 0.0)) return -std::numeric_limits<double>::infinity();
        s = std::expm1(excess / m.lambda_bar * std::log(2.0));
    }
    const double p = max_common_product(a0, b0, s, m.tgamma1, m.tgamma2);
    if (p < 0.0) return -std::numeric_limits<double>::infinity();
    return coherent_term(m, p);
}

inline bool contains(const MacChannel& m, double r1, double r2, double r12, double r_total) {
    return r_total <= max_total_rate(m, r1, r2, r12) + kSlack;
}

}  // namespace diamond::mac
