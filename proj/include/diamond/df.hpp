#pragma once

// Decode-and-forward with one common and two private messages. First hop:
// superposition plus dirty-paper coding, with each relay decoding from its own
// observation and the compressed observation conferenced by the other relay.
// Second hop: MAC with a common message. The achievable rate is the largest
// sum rate in the intersection of the two regions.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "diamond/mac.hpp"
#include "diamond/model.hpp"
#include "diamond/rate.hpp"
#include "diamond/search.hpp"

namespace diamond {

enum class EncodingOrder { pi12, pi21 };  // pi_ij: relay i's private message is encoded first

/// Interference term in the denominator of the non-DPC-protected private rate.
/// `printed` uses the other relay's *own* power fraction times gamma (as in the
/// published expression); `interference` uses the interfering message's power.
enum class PrivateRateForm { printed, interference };

struct DfParams {
    double lambda = 0.5;
    double mu_bar = 1.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    EncodingOrder order = EncodingOrder::pi21;
};

struct RegionPoint {
    double r0 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;

    double sum() const { return r0 + r1 + r2; }
};

/// Conferencing compression-noise variances; +inf means no conferencing.
struct DfNoise {
    double sigma12_sq = kInf;
    double sigma21_sq = kInf;
};

/// Variance of the compression noise on relay i's conferenced observation at
/// the smallest value the link C_{i,3-i} = c supports during the first hop.
inline double df_compression_noise(double lambda, double c, const LinkSnrs& s, int relay) {
    require_relay_index(relay);
    if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("df_compression_noise: lambda must lie in (0,1)");
    if (c <= 0.0) return kInf;
    const double other = relay == 1 ? s.gamma2 : s.gamma1;
    return (1.0 + s.gamma1 + s.gamma2) / ((other + 1.0) * std::expm1(c / lambda * std::log(2.0)));
}

inline DfNoise df_noise(double lambda, const Scenario& sc, const LinkSnrs& s) {
    return {df_compression_noise(lambda, sc.c12, s, 1), df_compression_noise(lambda, sc.c21, s, 2)};
}

namespace detail {

/// x / (1 + sigma^2) with the infinite-noise sentinel mapping to exactly 0.
inline double attenuate(double x, double sigma_sq) { return std::isinf(sigma_sq) ? 0.0 : x / (1.0 + sigma_sq); }

}  // namespace detail

/// Corner of the first-hop rate region for one power split and order.
inline RegionPoint bc_region_point(const DfParams& p, const LinkSnrs& s, const DfNoise& n,
                                   PrivateRateForm form = PrivateRateForm::printed) {
    using detail::attenuate;
    // Effective SNR per unit power at each relay after combining its own
    // observation with the conferenced one.
    const double s1 = s.gamma1 + attenuate(s.gamma2, n.sigma21_sq);
    const double s2 = s.gamma2 + attenuate(s.gamma1, n.sigma12_sq);
    const double priv = p.mu1 + p.mu2;
    const double common1 = p.mu_bar * s1 / (priv * s1 + 1.0);
    const double common2 = p.mu_bar * s2 / (priv * s2 + 1.0);

    RegionPoint pt;
    pt.r0 = p.lambda * std::log2(1.0 + std::min(common1, common2));
    if (p.order == EncodingOrder::pi21) {
        pt.r1 = p.lambda * std::log2(1.0 + p.mu1 * s1);
        const double interf = form == PrivateRateForm::printed
                                  ? p.mu1 * s.gamma2 + 1.0 + attenuate(p.mu2 * s.gamma1, n.sigma12_sq)
                                  : 1.0 + p.mu1 * s2;
        pt.r2 = p.lambda * std::log2(1.0 + p.mu2 * s2 / interf);
    } else {
        pt.r2 = p.lambda * std::log2(1.0 + p.mu2 * s2);
        const double interf = form == PrivateRateForm::printed
                                  ? p.mu2 * s.gamma1 + 1.0 + attenuate(p.mu1 * s.gamma2, n.sigma21_sq)
                                  : 1.0 + p.mu2 * s1;
        pt.r1 = p.lambda * std::log2(1.0 + p.mu1 * s1 / interf);
    }
    return pt;
}

inline bool mac_region_contains(const RegionPoint& pt, double lambda, double alpha, double beta, const LinkSnrs& s) {
    const double lb = 1.0 - lambda;
    const double tol = mac::kSlack;
    if (pt.r1 > lb * std::log2(1.0 + alpha * s.tgamma1) + tol) return false;
    if (pt.r2 > lb * std::log2(1.0 + beta * s.tgamma2) + tol) return false;
    if (pt.r1 + pt.r2 > lb * std::log2(1.0 + alpha * s.tgamma1 + beta * s.tgamma2) + tol) return false;
    const double coh =
        s.tgamma1 + s.tgamma2 + 2.0 * std::sqrt(std::max(0.0, (1.0 - alpha) * (1.0 - beta)) * s.tgamma1 * s.tgamma2);
    return pt.sum() <= lb * std::log2(1.0 + coh) + tol;
}

struct DfOptions {
    search::SearchOptions search{};
    bool conferencing = true;  // false forces the infinite-noise sentinels
    PrivateRateForm form = PrivateRateForm::interference;
};

/// Largest r0+r1+r2 with r <= bc componentwise inside the second-hop region.
/// Also reports the private rates used so the power split can be recovered.
struct DfAllocation {
    double total = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

inline DfAllocation max_sum_in_intersection(const RegionPoint& bc, const mac::MacChannel& m,
                                            const search::SearchOptions& opt) {
    // Best coherent total for a private sum p, optimizing its split.
    auto coherent_for = [&](double p, double* r1_out) {
        const double lo = std::max(0.0, p - bc.r2);
        const double hi = std::min(bc.r1, p);
        if (lo > hi) return -std::numeric_limits<double>::infinity();
        auto f = [&](double r1) { return mac::max_total_rate(m, r1, p - r1, p); };
        search::Maximum best{lo, f(lo)};
        if (hi > lo) {
            const auto grid = search::linear_grid(lo, hi, std::max(2, opt.mac_split_points));
            best = search::grid_then_golden(f, grid, opt.x_tolerance * std::max(1.0, hi - lo));
        }
        if (r1_out) *r1_out = best.x;
        return best.value;
    };

    DfAllocation out;
    double r1 = 0.0;
    const double m0 = coherent_for(0.0, &r1);
    if (bc.r0 >= m0) {
        out.total = m0;
        return out;
    }
    const double pmax = bc.r1 + bc.r2;
    const double mtop = coherent_for(pmax, &r1);
    if (bc.r0 + pmax <= mtop) {
        out.total = bc.r0 + pmax;
        out.r1 = r1;
        out.r2 = pmax - r1;
        return out;
    }
    auto good = [&](double p) { return bc.r0 + p <= coherent_for(p, nullptr); };
    const double p = search::bisect_boundary(good, 0.0, pmax, opt.bisection_iterations);
    out.total = bc.r0 + p;
    coherent_for(p, &r1);
    out.r1 = r1;
    out.r2 = p - r1;
    return out;
}

namespace detail {

// With private rates pinned to their first-hop caps (any slack private rate
// can be traded for a smaller private power fraction, which only raises the
// common rate and the other private rate), the sum rate at a power split is
// min(r0 + r1 + r2, best coherent total for (r1, r2)).
struct DfEvaluator {
    const Scenario& sc;
    LinkSnrs s;
    const DfOptions& opt;

    DfNoise noise(double lambda) const { return opt.conferencing ? df_noise(lambda, sc, s) : DfNoise{}; }

    mac::MacChannel channel(double lambda) const { return {1.0 - lambda, s.tgamma1, s.tgamma2, 0.0, 0.0}; }

    DfParams params(double lambda, double mu1, double mu2, EncodingOrder order) const {
        DfParams p;
        p.lambda = lambda;
        p.mu1 = mu1;
        p.mu2 = mu2;
        p.mu_bar = std::max(0.0, 1.0 - mu1 - mu2);
        p.order = order;
        return p;
    }

    double value(double lambda, double mu1, double mu2, EncodingOrder order) const {
        if (!(lambda > 0.0 && lambda < 1.0)) return search::kNegInf;
        if (mu1 < 0.0 || mu2 < 0.0 || mu1 + mu2 > 1.0 + 1e-15) return search::kNegInf;
        const RegionPoint bc = bc_region_point(params(lambda, mu1, mu2, order), s, noise(lambda), opt.form);
        const double coherent = mac::max_total_rate(channel(lambda), bc.r1, bc.r2, bc.r1 + bc.r2);
        return std::min(bc.sum(), coherent);
    }
};

struct DfCandidate {
    double value = search::kNegInf;
    std::size_t lambda_index = 0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    EncodingOrder order = EncodingOrder::pi21;
};

}  // namespace detail

inline RateResult df_rate(const Scenario& sc, const DfOptions& opt = {}) {
    validate(sc);
    detail::DfEvaluator ev{sc, snrs(sc), opt};
    RateResult res;
    res.scheme = Scheme::df;
    if (ev.s.tgamma1 + ev.s.tgamma2 <= 0.0 || ev.s.gamma1 + ev.s.gamma2 <= 0.0) {
        res.note = "dead hop";
        return res;
    }

    const auto& so = opt.search;
    const auto lambdas = search::lambda_grid(so.lambda_points);
    const int steps = so.simplex_steps;
    const double step = 1.0 / steps;
    const double tol = so.x_tolerance;

    // Coarse scan over (lambda, order, simplex). Each (order, split) cell keeps
    // its best lambda; refinement starts from the best few cells.
    std::vector<detail::DfCandidate> cells;
    for (EncodingOrder order : {EncodingOrder::pi21, EncodingOrder::pi12}) {
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; i + j <= steps; ++j) {
                detail::DfCandidate cell{search::kNegInf, 0, i * step, j * step, order};
                for (std::size_t li = 0; li < lambdas.size(); ++li) {
                    const double v = ev.value(lambdas[li], cell.mu1, cell.mu2, order);
                    if (v > cell.value) {
                        cell.value = v;
                        cell.lambda_index = li;
                    }
                }
                if (cell.value > search::kNegInf) cells.push_back(cell);
            }
        }
    }
    if (cells.empty()) {
        res.note = "no feasible point";
        res.converged = false;
        return res;
    }
    std::stable_sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
    std::vector<detail::DfCandidate> starts(cells.begin(),
                                            cells.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(
                                                cells.size(), static_cast<std::size_t>(so.refine_starts))));

    struct Point {
        double value, lambda, mu1, mu2;
        EncodingOrder order;
    };
    Point best{starts.front().value, lambdas[starts.front().lambda_index], starts.front().mu1, starts.front().mu2,
               starts.front().order};

    for (const auto& c : starts) {
        // Nested golden-section: lambda outermost, then mu1, then mu2.
        auto max_mu2 = [&](double lambda, double mu1, double* arg) {
            const double lo = std::max(0.0, c.mu2 - step);
            const double hi = std::max(lo, std::min(1.0 - mu1, c.mu2 + step));
            auto f = [&](double m2) { return ev.value(lambda, mu1, m2, c.order); };
            search::Maximum m{lo, f(lo)};
            if (hi > lo) {
                const auto g = search::golden_section(f, lo, hi, tol);
                if (g.value > m.value) m = g;
                const double fh = f(hi);
                if (fh > m.value) m = {hi, fh};
            }
            if (arg) *arg = m.x;
            return m.value;
        };
        auto max_mu1 = [&](double lambda, double* arg) {
            const double lo = std::max(0.0, c.mu1 - step);
            const double hi = std::min(1.0, c.mu1 + step);
            auto f = [&](double m1) { return max_mu2(lambda, m1, nullptr); };
            search::Maximum m{lo, f(lo)};
            const auto g = search::golden_section(f, lo, hi, tol);
            if (g.value > m.value) m = g;
            const double fh = f(hi);
            if (fh > m.value) m = {hi, fh};
            if (arg) *arg = m.x;
            return m.value;
        };
        const std::size_t li = c.lambda_index;
        const double lam_lo = li == 0 ? 0.5 * lambdas.front() : lambdas[li - 1];
        const double lam_hi = li + 1 == lambdas.size() ? 0.5 * (1.0 + lambdas.back()) : lambdas[li + 1];
        const auto lam = search::golden_section([&](double l) { return max_mu1(l, nullptr); }, lam_lo, lam_hi, tol);
        if (lam.value > best.value) {
            double mu1 = 0.0, mu2 = 0.0;
            max_mu1(lam.x, &mu1);
            max_mu2(lam.x, mu1, &mu2);
            const double v = ev.value(lam.x, mu1, mu2, c.order);
            if (v > best.value) best = {v, lam.x, mu1, mu2, c.order};
        }
    }

    const DfParams p = ev.params(best.lambda, best.mu1, best.mu2, best.order);
    const DfNoise n = ev.noise(best.lambda);
    const RegionPoint bc = bc_region_point(p, ev.s, n, opt.form);
    res.rate = best.value;
    res.lambda = best.lambda;
    res.params = {{"mu_bar", p.mu_bar},
                  {"mu1", p.mu1},
                  {"mu2", p.mu2},
                  {"order_pi12", best.order == EncodingOrder::pi12 ? 1.0 : 0.0},
                  {"r0", std::max(0.0, best.value - bc.r1 - bc.r2)},
                  {"r1", bc.r1},
                  {"r2", bc.r2},
                  {"sigma12_sq", n.sigma12_sq},
                  {"sigma21_sq", n.sigma21_sq}};
    return res;
}

/// Decode-and-forward without conferencing (infinite compression noise).
inline RateResult df_baseline_rate(const Scenario& sc, DfOptions opt = {}) {
    opt.conferencing = false;
    return df_rate(sc, opt);
}

}  // namespace diamond
