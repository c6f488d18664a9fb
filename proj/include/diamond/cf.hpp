#pragma once

// Compress-and-forward with conferencing. Relay i forwards a compression
// Yhat_i = Y_i + Nhat_i with Var(Nhat_i) = sigma_i^2. Three ways to spend the
// conferencing links:
//
//   PCF  conferencing enlarges the second-hop MAC (partial cooperation);
//   FCF  relays exchange bin indices and act as one transmitter (full cooperation);
//   CCF  each relay compresses its own observation jointly with the one it
//        receives over the conferencing link.
//
// Optimizers work in u = 1/sigma^2, in which every rate expression is
// increasing. The objective is increasing too, so for each time fraction and
// direction in the (u1, u2) quadrant the optimum sits on the feasibility
// frontier, found by bisection along the ray.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "diamond/bounds.hpp"
#include "diamond/df.hpp"
#include "diamond/mac.hpp"
#include "diamond/model.hpp"
#include "diamond/rate.hpp"
#include "diamond/search.hpp"

namespace diamond {

struct CfParams {
    double lambda = 0.5;
    double sigma1_sq = 1.0;
    double sigma2_sq = 1.0;
    double alpha = 1.0;  // private power fraction, relay 1 (PCF only)
    double beta = 1.0;   // private power fraction, relay 2 (PCF only)
};

inline double inverse_or_zero(double sigma_sq) { return std::isinf(sigma_sq) ? 0.0 : 1.0 / sigma_sq; }

namespace cf {

// Per-unit-time informations (bits) as functions of u_i = 1/sigma_i^2.

/// I(X; Yhat1, Yhat2)
inline double objective_bits(const LinkSnrs& s, double u1, double u2) {
    return std::log2(1.0 + s.gamma1 * u1 / (1.0 + u1) + s.gamma2 * u2 / (1.0 + u2));
}

/// I(Yhat1; Y1 | Yhat2)
inline double wz1_bits(const LinkSnrs& s, double u1, double u2) {
    return std::log2(1.0 + u1 * (1.0 + s.gamma1 * (1.0 + u2) / (1.0 + u2 + s.gamma2 * u2)));
}

/// I(Yhat2; Y2 | Yhat1)
inline double wz2_bits(const LinkSnrs& s, double u1, double u2) {
    return std::log2(1.0 + u2 * (1.0 + s.gamma2 * (1.0 + u1) / (1.0 + u1 + s.gamma1 * u1)));
}

/// I(Yhat1, Yhat2; Y1, Y2)
inline double joint_bits(const LinkSnrs& s, double u1, double u2) {
    return std::log2(1.0 + (1.0 + s.gamma1) * u1 + (1.0 + s.gamma2) * u2 + (1.0 + s.gamma1 + s.gamma2) * u1 * u2);
}

inline double coherent_bits(const LinkSnrs& s) { return coherent_mac_cut(s); }

struct Optimum {
    double value = 0.0;
    double lambda = 0.5;
    double u1 = 0.0;
    double u2 = 0.0;
};

inline constexpr double kRayMin = 1e-12;
inline constexpr double kRayMax = 1e12;

/// Maximizes lambda * obj(lambda, u1, u2) over lambda in (0,1) and u >= 0
/// subject to feasible(lambda, u1, u2). Both must be monotone in u: obj
/// increasing, feasible set closed downward.
template <class Obj, class Feasible>
class CompressionSearch {
public:
    CompressionSearch(Obj obj, Feasible feasible, const search::SearchOptions& opt)
        : obj_(std::move(obj)), feasible_(std::move(feasible)), opt_(opt) {}

    /// Best value along the ray (1-phi, phi) at a fixed lambda.
    Optimum on_ray(double lambda, double phi) const {
        Optimum o{0.0, lambda, 0.0, 0.0};
        const double d1 = 1.0 - phi, d2 = phi;
        auto ok = [&](double t) { return feasible_(lambda, t * d1, t * d2); };
        double good, bad;
        if (ok(1.0)) {
            good = 1.0;
            bad = 2.0;
            while (bad <= kRayMax && ok(bad)) {
                good = bad;
                bad *= 2.0;
            }
            if (bad > kRayMax) bad = good;
        } else {
            bad = 1.0;
            good = 0.5;
            while (good >= kRayMin && !ok(good)) {
                bad = good;
                good *= 0.5;
            }
            if (good < kRayMin) return o;
        }
        if (bad > good) {
            const double lg = search::bisect_boundary([&](double x) { return ok(std::exp(x)); }, std::log(good),
                                                      std::log(bad), opt_.bisection_iterations);
            good = std::exp(lg);
        }
        o.u1 = good * d1;
        o.u2 = good * d2;
        o.value = lambda * obj_(lambda, o.u1, o.u2);
        return o;
    }

    Optimum run() const {
        const auto lambdas = search::lambda_grid(opt_.lambda_points);
        const auto phis = search::linear_grid(0.0, 1.0, std::max(3, opt_.boundary_scan_points));
        const double tol = opt_.x_tolerance;

        struct Cell {
            double value;
            std::size_t li, pj;
        };
        std::vector<Cell> cells;
        cells.reserve(lambdas.size() * phis.size());
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            for (std::size_t j = 0; j < phis.size(); ++j) cells.push_back({on_ray(lambdas[i], phis[j]).value, i, j});
        std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.value > b.value; });

        const Cell& top = cells.front();
        Optimum best = on_ray(lambdas[top.li], phis[top.pj]);
        if (!(best.value > 0.0)) return best;

        const std::size_t n_starts = std::min<std::size_t>(cells.size(), static_cast<std::size_t>(opt_.refine_starts));
        for (std::size_t k = 0; k < n_starts; ++k) {
            const Cell& c = cells[k];
            const double lam_lo = c.li == 0 ? 0.5 * lambdas.front() : lambdas[c.li - 1];
            const double lam_hi = c.li + 1 == lambdas.size() ? 0.5 * (1.0 + lambdas.back()) : lambdas[c.li + 1];
            const double phi_lo = phis[c.pj == 0 ? 0 : c.pj - 1];
            const double phi_hi = phis[c.pj + 1 == phis.size() ? c.pj : c.pj + 1];
            auto best_phi = [&](double lambda) {
                auto f = [&](double phi) { return on_ray(lambda, phi).value; };
                search::Maximum m = search::golden_section(f, phi_lo, phi_hi, tol);
                for (double edge : {phi_lo, phi_hi}) {
                    const double v = f(edge);
                    if (v > m.value) m = {edge, v};
                }
                return m;
            };
            const auto lam = search::golden_section([&](double l) { return best_phi(l).value; }, lam_lo, lam_hi, tol);
            const Optimum o = on_ray(lam.x, best_phi(lam.x).x);
            if (o.value > best.value) best = o;
        }
        return best;
    }

private:
    Obj obj_;
    Feasible feasible_;
    search::SearchOptions opt_;
};

template <class Obj, class Feasible>
Optimum maximize_compression(Obj obj, Feasible feasible, const search::SearchOptions& opt) {
    return CompressionSearch<Obj, Feasible>(std::move(obj), std::move(feasible), opt).run();
}

}  // namespace cf

/// lambda * I(X; Yhat1, Yhat2)
inline double pcf_objective(double lambda, double sigma1_sq, double sigma2_sq, const LinkSnrs& s) {
    return lambda * cf::objective_bits(s, inverse_or_zero(sigma1_sq), inverse_or_zero(sigma2_sq));
}

/// Left-hand sides of the three binning constraints.
struct CfConstraintLhs {
    double wz1 = 0.0;
    double wz2 = 0.0;
    double joint = 0.0;
};

inline CfConstraintLhs cf_constraint_lhs(double lambda, double sigma1_sq, double sigma2_sq, const LinkSnrs& s) {
    const double u1 = inverse_or_zero(sigma1_sq), u2 = inverse_or_zero(sigma2_sq);
    return {lambda * cf::wz1_bits(s, u1, u2), lambda * cf::wz2_bits(s, u1, u2), lambda * cf::joint_bits(s, u1, u2)};
}

/// The PCF constraints at fixed private fractions (alpha, beta) of the
/// conferencing-enlarged MAC.
inline bool pcf_feasible(const CfParams& p, double lambda, const LinkSnrs& s, double c12, double c21) {
    const double lb = 1.0 - lambda;
    const auto lhs = cf_constraint_lhs(lambda, p.sigma1_sq, p.sigma2_sq, s);
    const double tol = mac::kSlack;
    if (lhs.wz1 > lb * std::log2(1.0 + p.alpha * s.tgamma1) + c12 + tol) return false;
    if (lhs.wz2 > lb * std::log2(1.0 + p.beta * s.tgamma2) + c21 + tol) return false;
    const double sum_cap = lb * std::log2(1.0 + p.alpha * s.tgamma1 + p.beta * s.tgamma2) + c12 + c21;
    const double coh = s.tgamma1 + s.tgamma2 +
                       2.0 * std::sqrt(std::max(0.0, (1.0 - p.alpha) * (1.0 - p.beta)) * s.tgamma1 * s.tgamma2);
    return lhs.joint <= std::min(sum_cap, lb * std::log2(1.0 + coh)) + tol;
}

struct CfOptions {
    search::SearchOptions search{};
};

namespace detail {

inline RateResult cf_result(Scheme scheme, const cf::Optimum& o) {
    RateResult r;
    r.scheme = scheme;
    r.rate = std::max(0.0, o.value);
    r.lambda = o.lambda;
    r.params = {{"sigma1_sq", o.u1 > 0.0 ? 1.0 / o.u1 : kInf}, {"sigma2_sq", o.u2 > 0.0 ? 1.0 / o.u2 : kInf}};
    return r;
}

inline bool dead_first_hop(const LinkSnrs& s) { return s.gamma1 + s.gamma2 <= 0.0; }
inline bool dead_second_hop(const LinkSnrs& s) { return s.tgamma1 + s.tgamma2 <= 0.0; }

}  // namespace detail

/// Partial-cooperation CF: the best (alpha, beta) for each candidate point is
/// found exactly by the MAC membership test.
inline RateResult pcf_rate(const Scenario& sc, const CfOptions& opt = {}) {
    validate(sc);
    const LinkSnrs s = snrs(sc);
    if (detail::dead_first_hop(s) || detail::dead_second_hop(s)) return detail::cf_result(Scheme::pcf, {});
    auto obj = [&](double, double u1, double u2) { return cf::objective_bits(s, u1, u2); };
    auto feasible = [&](double lambda, double u1, double u2) {
        const mac::MacChannel m{1.0 - lambda, s.tgamma1, s.tgamma2, sc.c12, sc.c21};
        const double j = lambda * cf::joint_bits(s, u1, u2);
        return mac::contains(m, lambda * cf::wz1_bits(s, u1, u2), lambda * cf::wz2_bits(s, u1, u2), j, j);
    };
    return detail::cf_result(Scheme::pcf, cf::maximize_compression(obj, feasible, opt.search));
}

/// Traditional CF over a MAC without conferencing or common message.
inline RateResult cf_baseline_rate(const Scenario& sc, const CfOptions& opt = {}) {
    validate(sc);
    const LinkSnrs s = snrs(sc);
    if (detail::dead_first_hop(s) || detail::dead_second_hop(s)) return detail::cf_result(Scheme::pcf, {});
    auto obj = [&](double, double u1, double u2) { return cf::objective_bits(s, u1, u2); };
    auto feasible = [&](double lambda, double u1, double u2) {
        const double lb = 1.0 - lambda;
        const double tol = mac::kSlack;
        return lambda * cf::wz1_bits(s, u1, u2) <= lb * std::log2(1.0 + s.tgamma1) + tol &&
               lambda * cf::wz2_bits(s, u1, u2) <= lb * std::log2(1.0 + s.tgamma2) + tol &&
               lambda * cf::joint_bits(s, u1, u2) <= lb * std::log2(1.0 + s.tgamma1 + s.tgamma2) + tol;
    };
    return detail::cf_result(Scheme::pcf, cf::maximize_compression(obj, feasible, opt.search));
}

/// PCF with unlimited conferencing: only the coherent sum constraint remains.
inline RateResult pcf_reduced_rate(const Scenario& sc, const CfOptions& opt = {}) {
    validate(sc);
    const LinkSnrs s = snrs(sc);
    if (detail::dead_first_hop(s) || detail::dead_second_hop(s)) return detail::cf_result(Scheme::pcf, {});
    const double coh = cf::coherent_bits(s);
    auto obj = [&](double, double u1, double u2) { return cf::objective_bits(s, u1, u2); };
    auto feasible = [&](double lambda, double u1, double u2) {
        return lambda * cf::joint_bits(s, u1, u2) <= (1.0 - lambda) * coh + mac::kSlack;
    };
    return detail::cf_result(Scheme::pcf, cf::maximize_compression(obj, feasible, opt.search));
}

/// Smallest compression noise at relay i that its bin index, sent at rate
/// c over the conferencing link, lets the other relay resolve.
inline double fcf_noise_bound(double lambda, double c, const LinkSnrs& s, int relay) {
    return df_compression_noise(lambda, c, s, relay);
}

/// Full-cooperation CF; zero when either conferencing link is absent.
inline RateResult fcf_rate(const Scenario& sc, const CfOptions& opt = {}) {
    validate(sc);
    const LinkSnrs s = snrs(sc);
    RateResult zero = detail::cf_result(Scheme::fcf, {});
    if (sc.c12 <= 0.0 || sc.c21 <= 0.0) return zero;
    if (detail::dead_first_hop(s) || detail::dead_second_hop(s)) return zero;
    const double coh = cf::coherent_bits(s);
    auto obj = [&](double, double u1, double u2) { return cf::objective_bits(s, u1, u2); };
    auto feasible = [&](double lambda, double u1, double u2) {
        if (u1 * fcf_noise_bound(lambda, sc.c12, s, 1) > 1.0 + mac::kSlack) return false;
        if (u2 * fcf_noise_bound(lambda, sc.c21, s, 2) > 1.0 + mac::kSlack) return false;
        return lambda * cf::joint_bits(s, u1, u2) <= (1.0 - lambda) * coh + mac::kSlack;
    };
    return detail::cf_result(Scheme::fcf, cf::maximize_compression(obj, feasible, opt.search));
}

struct FcfThreshold {
    double c12 = 0.0;
    double c21 = 0.0;
    double lambda = 0.5;  // time fraction of the traditional-CF optimum
};

/// Conferencing rates above which the traditional-CF optimum satisfies the
/// FCF noise bounds.
inline FcfThreshold fcf_threshold(const Scenario& sc, const CfOptions& opt = {}) {
    validate(sc);
    const LinkSnrs s = snrs(sc);
    if (!(s.gamma1 > 0.0) || !(s.gamma2 > 0.0))
        throw ValidationError("fcf_threshold: undefined for a zero first-hop SNR");
    const RateResult cf = cf_baseline_rate(sc.with_conferencing(0.0), opt);
    const double lam = cf.lambda;
    auto threshold = [&](int relay) {
        const double sigma_sq = cf.params.at(relay == 1 ? "sigma1_sq" : "sigma2_sq");
        const double other = relay == 1 ? s.gamma2 : s.gamma1;
        return lam * std::log2(1.0 + (1.0 + s.gamma1 + s.gamma2) * inverse_or_zero(sigma_sq) / (other + 1.0));
    };
    return {threshold(1), threshold(2), lam};
}

/// Linear combiner of the conferenced compression:
///   Yhat1 = a Y1 + b Yhat21 + V1,  Yhat2 = c Y2 + d Yhat12 + V2,
/// Yhat12 = Y1 + N12 and Yhat21 = Y2 + N21 over the conferencing links.
struct CcfCombiner {
    Complex a{1.0, 0.0}, b{0.0, 0.0}, c{1.0, 0.0}, d{0.0, 0.0};
    double sigma1_sq = 1.0;  // Var(V1)
    double sigma2_sq = 1.0;  // Var(V2)
    double conf_noise12 = kInf;  // Var(N12)
    double conf_noise21 = kInf;  // Var(N21)
};

/// The fixed combiner a = d = conj(h1), b = c = conj(h2). A link without
/// capacity carries nothing, so its coefficient is zeroed.
inline CcfCombiner ccf_fixed_combiner(const Scenario& sc, double lambda, double sigma1_sq, double sigma2_sq) {
    const LinkSnrs s = snrs(sc);
    CcfCombiner k;
    k.a = std::conj(sc.h1);
    k.b = std::conj(sc.h2);
    k.c = std::conj(sc.h2);
    k.d = std::conj(sc.h1);
    k.sigma1_sq = sigma1_sq;
    k.sigma2_sq = sigma2_sq;
    k.conf_noise12 = df_compression_noise(lambda, sc.c12, s, 1);
    k.conf_noise21 = df_compression_noise(lambda, sc.c21, s, 2);
    if (std::isinf(k.conf_noise21)) k.b = 0.0;
    if (std::isinf(k.conf_noise12)) k.d = 0.0;
    return k;
}

/// Closed-form pieces of the CCF rate for one combiner.
struct CcfTerms {
    double hat1_sq = 0.0;  // total noise variance in Yhat1
    double hat2_sq = 0.0;
    double det = 0.0;      // det Cov(Yhat1, Yhat2)
    double det_given_x = 0.0;
    double objective = 0.0;  // I(X; Yhat1, Yhat2)
    double c1 = 0.0;         // I(Yhat1; Y1, Yhat21 | Yhat2)
    double c2 = 0.0;         // I(Yhat2; Y2, Yhat12 | Yhat1)
    double c3 = 0.0;         // I(Yhat1, Yhat2; Y1, Y2, Yhat12, Yhat21)
};

namespace detail {

inline double forwarded_noise(const Complex& coeff, double conf_noise) {
    if (coeff == Complex(0.0, 0.0)) return 0.0;
    return std::norm(coeff) * (1.0 + conf_noise);
}

}  // namespace detail

inline CcfTerms ccf_terms(const CcfCombiner& k, const Scenario& sc) {
    const double p = sc.ps;
    const Complex s1 = k.a * sc.h1 + k.b * sc.h2;
    const Complex s2 = k.d * sc.h1 + k.c * sc.h2;
    const Complex rho = k.a * std::conj(k.d) + k.b * std::conj(k.c);
    CcfTerms t;
    t.hat1_sq = std::norm(k.a) + detail::forwarded_noise(k.b, k.conf_noise21) + k.sigma1_sq;
    t.hat2_sq = std::norm(k.c) + detail::forwarded_noise(k.d, k.conf_noise12) + k.sigma2_sq;
    t.det_given_x = t.hat1_sq * t.hat2_sq - std::norm(rho);
    t.det = std::norm(s1) * p * t.hat2_sq + std::norm(s2) * p * t.hat1_sq + t.det_given_x -
            2.0 * std::real(s1 * std::conj(s2) * std::conj(rho) * p);
    t.objective = std::log2(t.det / t.det_given_x);
    t.c1 = std::log2(t.det / (k.sigma1_sq * (std::norm(s2) * p + t.hat2_sq)));
    t.c2 = std::log2(t.det / (k.sigma2_sq * (std::norm(s1) * p + t.hat1_sq)));
    t.c3 = std::log2(t.det / (k.sigma1_sq * k.sigma2_sq));
    return t;
}

namespace detail {

inline double ccf_sigma(double u) { return 1.0 / std::max(u, 1e-15); }

}  // namespace detail

/// Conferenced-compression CF with the fixed combiner.
inline RateResult ccf_rate(const Scenario& sc, const CfOptions& opt = {}) {
    validate(sc);
    const LinkSnrs s = snrs(sc);
    RateResult zero = detail::cf_result(Scheme::ccf, {});
    if (detail::dead_first_hop(s) || detail::dead_second_hop(s)) return zero;
    const double cap1 = std::log2(1.0 + s.tgamma1);
    const double cap2 = std::log2(1.0 + s.tgamma2);
    const double cap12 = std::log2(1.0 + s.tgamma1 + s.tgamma2);

    auto terms = [&](double lambda, double u1, double u2) {
        return ccf_terms(ccf_fixed_combiner(sc, lambda, detail::ccf_sigma(u1), detail::ccf_sigma(u2)), sc);
    };
    auto obj = [&](double lambda, double u1, double u2) { return terms(lambda, u1, u2).objective; };
    auto feasible = [&](double lambda, double u1, double u2) {
        const CcfTerms t = terms(lambda, u1, u2);
        const double lb = 1.0 - lambda;
        const double tol = mac::kSlack;
        return lambda * t.c1 <= lb * cap1 + tol && lambda * t.c2 <= lb * cap2 + tol && lambda * t.c3 <= lb * cap12 + tol;
    };
    const cf::Optimum o = cf::maximize_compression(obj, feasible, opt.search);
    RateResult r = detail::cf_result(Scheme::ccf, o);
    const CcfCombiner k = ccf_fixed_combiner(sc, o.lambda, detail::ccf_sigma(o.u1), detail::ccf_sigma(o.u2));
    r.params["conf_noise12"] = k.conf_noise12;
    r.params["conf_noise21"] = k.conf_noise21;
    return r;
}

}  // namespace diamond
