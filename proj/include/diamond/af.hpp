#pragma once

// Amplify-and-forward with AF conferencing. Relay i transmits
//   x_i = a_ii y_i + a_{3-i,i} y_{3-i,i},   y_{3-i,i} = y_{3-i} + n_{3-i,i},
// and the destination sees one scalar channel with SNR gamma_AF. With
// a = [a11, a12, a21, a22] the SNR is a^H R a Ps / (a^H Q a + 1) and relay i's
// power is a^H P_i a <= Pr.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "diamond/model.hpp"
#include "diamond/rate.hpp"

namespace diamond {

using Vector4c = Eigen::Matrix<Complex, 4, 1>;
using Matrix4c = Eigen::Matrix<Complex, 4, 4>;

struct AfCombiner {
    Complex a11{0.0, 0.0};
    Complex a12{0.0, 0.0};  // relay 2 weight on the signal conferenced from relay 1
    Complex a21{0.0, 0.0};  // relay 1 weight on the signal conferenced from relay 2
    Complex a22{0.0, 0.0};

    Vector4c vec() const { return Vector4c(a11, a12, a21, a22); }
    static AfCombiner from(const Vector4c& v) { return {v(0), v(1), v(2), v(3)}; }
};

struct AfConfNoise {
    double sigma12_sq = kInf;  // on y_12 = y_1 + n_12, received by relay 2
    double sigma21_sq = kInf;  // on y_21 = y_2 + n_21, received by relay 1
};

/// Variance of the noise on the signal relay i receives over the
/// conferencing link from relay 3-i, whose capacity is c.
inline double af_conf_noise(double c, const LinkSnrs& s, int relay) {
    require_relay_index(relay);
    if (!(c > 0.0)) return kInf;
    const double other = relay == 1 ? s.gamma2 : s.gamma1;
    return (other + 1.0) / std::expm1(c / 2.0 * std::log(2.0));
}

inline AfConfNoise af_conf_noise(const Scenario& sc) {
    const LinkSnrs s = snrs(sc);
    return {af_conf_noise(sc.c12, s, 2), af_conf_noise(sc.c21, s, 1)};
}

/// Relay powers E|x_1|^2 and E|x_2|^2 of a combiner.
inline std::array<double, 2> af_relay_powers(const AfCombiner& a, const Scenario& sc) {
    const LinkSnrs s = snrs(sc);
    const AfConfNoise n = af_conf_noise(sc);
    auto term = [](const Complex& coeff, double var) { return coeff == Complex(0.0, 0.0) ? 0.0 : std::norm(coeff) * var; };
    return {term(a.a11, s.gamma1 + 1.0) + term(a.a21, s.gamma2 + 1.0 + n.sigma21_sq),
            term(a.a22, s.gamma2 + 1.0) + term(a.a12, s.gamma1 + 1.0 + n.sigma12_sq)};
}

/// End-to-end SNR at the destination. A nonzero weight on a conferencing
/// link without capacity makes the noise infinite and the SNR 0.
inline double af_snr(const AfCombiner& a, const Scenario& sc) {
    const AfConfNoise n = af_conf_noise(sc);
    const Complex sig = a.a11 * sc.h1 * sc.g1 + a.a12 * sc.h1 * sc.g2 + a.a21 * sc.h2 * sc.g1 + a.a22 * sc.h2 * sc.g2;
    auto conf = [](const Complex& coeff, double var) { return coeff == Complex(0.0, 0.0) ? 0.0 : std::norm(coeff) * var; };
    const double noise = std::norm(a.a11 * sc.g1 + a.a12 * sc.g2) + std::norm(a.a21 * sc.g1 + a.a22 * sc.g2) +
                         conf(a.a21 * sc.g1, n.sigma21_sq) + conf(a.a12 * sc.g2, n.sigma12_sq) + 1.0;
    if (std::isinf(noise)) return 0.0;
    return std::norm(sig) * sc.ps / noise;
}

inline double af_rate_from_snr(double gamma) { return 0.5 * std::log2(1.0 + gamma); }

struct AfMatrices {
    Vector4c b;
    Matrix4c R;
    Matrix4c Q;
    Eigen::Vector4d p1;  // diagonal of P1 (relay 1 power form)
    Eigen::Vector4d p2;  // diagonal of P2 (relay 2 power form)
    std::array<bool, 4> active{true, true, true, true};  // coordinates that may be nonzero
};

/// Coordinates whose conferencing noise is infinite are inactive and their
/// rows and columns are zero.
inline AfMatrices af_matrices(const Scenario& sc) {
    const LinkSnrs s = snrs(sc);
    const AfConfNoise n = af_conf_noise(sc);
    const Complex g1 = sc.g1, g2 = sc.g2;
    AfMatrices m;
    m.b << std::conj(sc.h1 * g1), std::conj(sc.h1 * g2), std::conj(sc.h2 * g1), std::conj(sc.h2 * g2);
    m.R = m.b * m.b.adjoint();
    m.active = {true, !std::isinf(n.sigma12_sq), !std::isinf(n.sigma21_sq), true};
    const double s12 = m.active[1] ? n.sigma12_sq : 0.0;
    const double s21 = m.active[2] ? n.sigma21_sq : 0.0;
    m.Q.setZero();
    m.Q(0, 0) = std::norm(g1);
    m.Q(0, 1) = std::conj(g1) * g2;
    m.Q(1, 0) = g1 * std::conj(g2);
    m.Q(1, 1) = std::norm(g2) * (1.0 + s12);
    m.Q(2, 2) = std::norm(g1) * (1.0 + s21);
    m.Q(2, 3) = std::conj(g1) * g2;
    m.Q(3, 2) = g1 * std::conj(g2);
    m.Q(3, 3) = std::norm(g2);
    m.p1 << s.gamma1 + 1.0, 0.0, s.gamma2 + 1.0 + s21, 0.0;
    m.p2 << 0.0, s.gamma1 + 1.0 + s12, 0.0, s.gamma2 + 1.0;
    for (int k = 0; k < 4; ++k) {
        if (m.active[static_cast<std::size_t>(k)]) continue;
        m.R.row(k).setZero();
        m.R.col(k).setZero();
        m.Q.row(k).setZero();
        m.Q.col(k).setZero();
        m.p1(k) = m.p2(k) = 0.0;
    }
    return m;
}

struct AfOptions {
    int n_starts = 64;
    int n_draws = 500;
    int ascent_iterations = 400;
    double relative_tolerance = 1e-6;
    std::uint64_t seed = 0;
};

struct AfSolution {
    AfCombiner combiner;
    double gamma = 0.0;
    RateResult result;
};

namespace detail {

// Relay 1 owns coordinates {0, 2}, relay 2 owns {1, 3}.
inline constexpr std::array<std::array<int, 2>, 2> kRelayBlocks{{{0, 2}, {1, 3}}};

/// The problem in whitened coordinates z = D^{1/2} a, where D holds the
/// per-coordinate power weights, so each relay's constraint is a ball of
/// radius sqrt(Pr).
struct Whitened {
    Matrix4c R;  // includes Ps
    Matrix4c Q;
    Eigen::Vector4d scale;  // a = scale .* z
    std::array<bool, 4> active{};
    double radius = 1.0;

    explicit Whitened(const Scenario& sc) {
        const AfMatrices m = af_matrices(sc);
        active = m.active;
        radius = std::sqrt(sc.pr);
        for (int k = 0; k < 4; ++k) {
            const double w = m.p1(k) + m.p2(k);
            scale(k) = active[static_cast<std::size_t>(k)] && w > 0.0 ? 1.0 / std::sqrt(w) : 0.0;
        }
        R = scale.asDiagonal() * (m.R * sc.ps) * scale.asDiagonal();
        Q = scale.asDiagonal() * m.Q * scale.asDiagonal();
    }

    Vector4c to_a(const Vector4c& z) const { return scale.cast<Complex>().cwiseProduct(z); }

    void project(Vector4c& z) const {
        for (int k = 0; k < 4; ++k)
            if (!active[static_cast<std::size_t>(k)]) z(k) = 0.0;
        for (const auto& blk : kRelayBlocks) {
            const double norm = std::sqrt(std::norm(z(blk[0])) + std::norm(z(blk[1])));
            if (norm > radius) {
                z(blk[0]) *= radius / norm;
                z(blk[1]) *= radius / norm;
            }
        }
    }

    /// Scales each relay's pair onto its power boundary.
    void make_tight(Vector4c& z) const {
        for (const auto& blk : kRelayBlocks) {
            const double norm = std::sqrt(std::norm(z(blk[0])) + std::norm(z(blk[1])));
            if (norm > 0.0) {
                z(blk[0]) *= radius / norm;
                z(blk[1]) *= radius / norm;
            }
        }
    }

    double snr(const Vector4c& z) const {
        const double num = std::real(z.dot(R * z));
        const double den = std::real(z.dot(Q * z)) + 1.0;
        return std::max(0.0, num / den);
    }
};

inline Vector4c random_complex_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    Vector4c v;
    for (int k = 0; k < 4; ++k) v(k) = Complex(nd(rng), nd(rng));
    return v;
}

/// Projected gradient ascent with backtracking. `grad` returns an ascent
/// direction (the conjugate Wirtinger gradient).
template <class F, class G>
Vector4c ascend(const Whitened& w, F&& f, G&& grad, Vector4c z, int iterations) {
    w.project(z);
    double fz = f(z);
    double step = 1.0;
    for (int it = 0; it < iterations; ++it) {
        const Vector4c g = grad(z);
        if (g.norm() == 0.0) break;
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
            Vector4c cand = z + step * g;
            w.project(cand);
            const double fc = f(cand);
            if (fc > fz) {
                const double gain = fc - fz;
                z = cand;
                fz = fc;
                moved = true;
                step *= 2.0;
                if (gain <= 1e-15 * std::max(1.0, std::abs(fz))) it = iterations;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return z;
}

/// Maximizes z^H M z over the two balls from fixed starts (plus optional
/// warm starts); returns the argmax per start in start order.
inline std::vector<Vector4c> maximize_form(const Whitened& w, const Matrix4c& m, const std::vector<Vector4c>& starts,
                                           int iterations) {
    auto f = [&](const Vector4c& z) { return std::real(z.dot(m * z)); };
    auto g = [&](const Vector4c& z) -> Vector4c { return m * z; };
    std::vector<Vector4c> out;
    out.reserve(starts.size());
    for (const auto& s : starts) out.push_back(ascend(w, f, g, s, iterations));
    return out;
}

inline std::vector<Vector4c> seeded_starts(const Whitened& w, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Vector4c> starts;
    starts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vector4c z = random_complex_vector(rng);
        w.project(z);
        w.make_tight(z);
        starts.push_back(z);
    }
    return starts;
}

}  // namespace detail

/// Bisection on the SNR level t. Level t is certified when some feasible z
/// has z^H (R - tQ) z >= t, found by multistart ascent on that form. The best
/// certificates seed a Gaussian randomization with per-relay tight rescaling.
inline AfSolution af_optimize(const Scenario& sc, const AfOptions& opt = {}) {
    validate(sc);
    const LinkSnrs s = snrs(sc);
    AfSolution sol;
    sol.result.scheme = Scheme::af;
    sol.result.lambda = 0.5;
    const detail::Whitened w(sc);
    if (s.gamma1 + s.gamma2 <= 0.0 || s.tgamma1 + s.tgamma2 <= 0.0) {
        sol.result.note = "dead hop";
        return sol;
    }

    const std::vector<Vector4c> starts = detail::seeded_starts(w, opt.n_starts, opt.seed);
    Vector4c incumbent = Vector4c::Zero();
    double incumbent_snr = 0.0;
    std::vector<Vector4c> certificates;

    auto certify = [&](double t) {
        std::vector<Vector4c> all = starts;
        if (incumbent.norm() > 0.0) all.push_back(incumbent);
        const Matrix4c m = w.R - t * w.Q;
        const auto found = detail::maximize_form(w, m, all, opt.ascent_iterations);
        std::vector<Vector4c> ok;
        for (const auto& z : found) {
            if (std::real(z.dot(m * z)) >= t) ok.push_back(z);
            const double v = w.snr(z);
            if (v > incumbent_snr) {
                incumbent_snr = v;
                incumbent = z;
            }
        }
        return ok;
    };

    double lo = 0.0;
    double hi = std::max(s.gamma1 + s.gamma2, 1e-12);
    int doublings = 0;
    for (auto c = certify(hi); !c.empty() && doublings < 60; c = certify(hi), ++doublings) {
        lo = hi;
        certificates = c;
        hi *= 2.0;
    }
    int iterations = 0;
    while (hi - lo > opt.relative_tolerance * hi && iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        auto c = certify(mid);
        if (!c.empty()) {
            lo = mid;
            certificates = std::move(c);
        } else {
            hi = mid;
        }
        ++iterations;
    }

    // Randomization around the certificate cone.
    int draws_improving = 0;
    if (!certificates.empty()) {
        Matrix4c a_star = Matrix4c::Zero();
        for (const auto& z : certificates) a_star += z * z.adjoint();
        a_star /= static_cast<double>(certificates.size());
        Eigen::SelfAdjointEigenSolver<Matrix4c> eig(a_star);
        const Eigen::Vector4d d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        const Matrix4c shape = eig.eigenvectors() * d.cast<Complex>().asDiagonal();
        std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
        for (int i = 0; i < opt.n_draws; ++i) {
            Vector4c z = shape * detail::random_complex_vector(rng);
            w.project(z);
            w.make_tight(z);
            const double v = w.snr(z);
            if (v > incumbent_snr) {
                incumbent_snr = v;
                incumbent = z;
                ++draws_improving;
            }
        }
    }

    sol.combiner = AfCombiner::from(w.to_a(incumbent));
    sol.gamma = af_snr(sol.combiner, sc);
    sol.result.rate = af_rate_from_snr(sol.gamma);
    sol.result.converged = !certificates.empty() || lo == 0.0;
    sol.result.params = {{"gamma_af", sol.gamma},
                         {"certified_t", lo},
                         {"bracket_hi", hi},
                         {"randomization_gains", static_cast<double>(draws_improving)}};
    if (certificates.empty()) sol.result.note = "no positive certificate";
    return sol;
}

inline RateResult af_rate(const Scenario& sc, const AfOptions& opt = {}) { return af_optimize(sc, opt).result; }

/// Direct multistart ascent on the SNR ratio.
inline std::pair<AfCombiner, double> af_multistart_oracle(const Scenario& sc, int n_starts, std::uint64_t seed,
                                                          int iterations = 1000) {
    validate(sc);
    const detail::Whitened w(sc);
    auto f = [&](const Vector4c& z) { return w.snr(z); };
    auto g = [&](const Vector4c& z) -> Vector4c {
        const Vector4c rz = w.R * z, qz = w.Q * z;
        const double num = std::real(z.dot(rz));
        const double den = std::real(z.dot(qz)) + 1.0;
        return (rz * den - qz * num) / (den * den);
    };
    const auto starts = detail::seeded_starts(w, std::max(1, n_starts), seed);
    Vector4c best = Vector4c::Zero();
    double best_snr = 0.0;
    for (const auto& s0 : starts) {
        const Vector4c z = detail::ascend(w, f, g, s0, iterations);
        const double v = f(z);
        if (v > best_snr) {
            best_snr = v;
            best = z;
        }
    }
    const AfCombiner a = AfCombiner::from(w.to_a(best));
    return {a, af_snr(a, sc)};
}

struct MonteCarloSnr {
    double snr = 0.0;
    double residual_power = 0.0;  // mean |y - k x|^2
};

/// Simulates the AF chain sample by sample. `noise_scale` multiplies every
/// noise standard deviation (0 gives a noiseless chain).
inline MonteCarloSnr af_monte_carlo(const AfCombiner& a, const Scenario& sc, std::int64_t n_samples,
                                    std::uint64_t seed, double noise_scale = 1.0) {
    validate(sc);
    const AfConfNoise n = af_conf_noise(sc);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    auto cn = [&](double var) { return std::sqrt(var) * Complex(nd(rng), nd(rng)); };
    auto conf = [&](const Complex& coeff, double var) {
        return coeff == Complex(0.0, 0.0) ? Complex(0.0, 0.0) : noise_scale * cn(var);
    };
    const Complex k = a.a11 * sc.h1 * sc.g1 + a.a12 * sc.h1 * sc.g2 + a.a21 * sc.h2 * sc.g1 + a.a22 * sc.h2 * sc.g2;
    if ((a.a12 != Complex(0.0, 0.0) && std::isinf(n.sigma12_sq)) ||
        (a.a21 != Complex(0.0, 0.0) && std::isinf(n.sigma21_sq)))
        return {0.0, kInf};
    double residual = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const Complex x = cn(sc.ps);
        const Complex y1 = sc.h1 * x + noise_scale * cn(1.0);
        const Complex y2 = sc.h2 * x + noise_scale * cn(1.0);
        const Complex y12 = y1 + conf(a.a12, n.sigma12_sq);
        const Complex y21 = y2 + conf(a.a21, n.sigma21_sq);
        const Complex x1 = a.a11 * y1 + a.a21 * y21;
        const Complex x2 = a.a22 * y2 + a.a12 * y12;
        const Complex y = sc.g1 * x1 + sc.g2 * x2 + noise_scale * cn(1.0);
        residual += std::norm(y - k * x);
    }
    MonteCarloSnr out;
    out.residual_power = n_samples > 0 ? residual / static_cast<double>(n_samples) : 0.0;
    const double signal = std::norm(k) * sc.ps;
    out.snr = signal == 0.0 ? 0.0 : signal / out.residual_power;
    return out;
}

inline double af_monte_carlo_snr(const AfCombiner& a, const Scenario& sc, std::int64_t n_samples, std::uint64_t seed) {
    return af_monte_carlo(a, sc, n_samples, seed).snr;
}

}  // namespace diamond
