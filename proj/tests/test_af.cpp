#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "diamond/af.hpp"
#include "diamond/bounds.hpp"
#include "oracles.hpp"

using namespace diamond;

namespace {

AfCombiner random_combiner(std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    return {{nd(rng), nd(rng)}, {nd(rng), nd(rng)}, {nd(rng), nd(rng)}, {nd(rng), nd(rng)}};
}

double quadratic_form_snr(const AfCombiner& a, const Scenario& sc) {
    const AfMatrices m = af_matrices(sc);
    const Vector4c v = a.vec();
    return std::real(v.dot(m.R * v)) * sc.ps / (std::real(v.dot(m.Q * v)) + 1.0);
}

Scenario single_relay(double g, double tg) {
    Scenario sc = scenario_from_snrs(g, tg, 1.0, 1.0, 0.0);
    sc.h2 = 0.0;
    sc.g2 = 0.0;
    return sc;
}

}  // namespace

TEST(AfConfNoise, ExactArithmetic) {
    const LinkSnrs s{5.0, 3.0, 1.0, 1.0};
    EXPECT_NEAR(af_conf_noise(2.0, s, 1), 4.0, 1e-14);
    EXPECT_TRUE(std::isinf(af_conf_noise(0.0, s, 1)));
    EXPECT_LT(af_conf_noise(200.0, s, 2), 1e-25);
}

TEST(AfSnr, ZeroCombiner) {
    EXPECT_EQ(af_snr({}, scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 2.0)), 0.0);
}

TEST(AfSnr, ClassicalTwoHop) {
    const Scenario sc = single_relay(10.0, 7.0);
    const LinkSnrs s = snrs(sc);
    AfCombiner a;
    a.a11 = std::sqrt(sc.pr / (s.gamma1 + 1.0));
    EXPECT_NEAR(af_snr(a, sc), s.gamma1 * s.tgamma1 / (1.0 + s.gamma1 + s.tgamma1), 1e-12);
}

TEST(AfSnr, UnusableConferencingLinkGivesZero) {
    const Scenario sc = scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 0.0);
    AfCombiner a;
    a.a11 = 0.1;
    a.a12 = 0.1;
    EXPECT_EQ(af_snr(a, sc), 0.0);
}

TEST(AfMatrices, QuadraticFormIdentity) {
    std::mt19937_64 rng(201);
    for (int i = 0; i < 1000; ++i) {
        Scenario sc = oracle::random_scenario(rng, -5.0, 30.0, 4.0);
        sc.c12 += 0.01;
        sc.c21 += 0.01;
        const AfCombiner a = random_combiner(rng);
        const double direct = af_snr(a, sc);
        EXPECT_NEAR(quadratic_form_snr(a, sc), direct, 1e-12 * std::max(1.0, direct));
    }
}

TEST(AfMatrices, PowerFormsMatchRelayPowers) {
    std::mt19937_64 rng(202);
    for (int i = 0; i < 100; ++i) {
        Scenario sc = oracle::random_scenario(rng, 0.0, 20.0, 3.0);
        sc.c12 += 0.01;
        sc.c21 += 0.01;
        const AfCombiner a = random_combiner(rng);
        const AfMatrices m = af_matrices(sc);
        const Vector4c v = a.vec();
        const auto p = af_relay_powers(a, sc);
        EXPECT_NEAR(v.cwiseAbs2().dot(m.p1), p[0], 1e-10 * p[0]);
        EXPECT_NEAR(v.cwiseAbs2().dot(m.p2), p[1], 1e-10 * p[1]);
    }
}

TEST(AfMatrices, Layout) {
    const Scenario sc = scenario_from_snrs(0.0, 0.0, 1.0, 1.0, 2.0);
    const AfMatrices m = af_matrices(sc);
    const Complex g1g2 = std::conj(sc.g1) * sc.g2;
    EXPECT_NEAR(std::abs(m.Q(0, 1) - g1g2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.Q(2, 3) - g1g2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.Q(0, 2)), 0.0, 1e-15);
    const Vector4c e1 = Vector4c::Unit(0);
    EXPECT_NEAR(std::real(e1.dot(m.Q * e1)), std::norm(sc.g1), 1e-15);
}

TEST(AfMatrices, ZeroCapacityDeactivatesConferencing) {
    const AfMatrices m = af_matrices(scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 0.0));
    EXPECT_FALSE(m.active[1]);
    EXPECT_FALSE(m.active[2]);
    EXPECT_EQ(m.Q.row(1).norm(), 0.0);
    EXPECT_EQ(m.R.col(2).norm(), 0.0);
}

TEST(AfOptimize, DeadSecondHop) {
    Scenario sc = scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 2.0);
    sc.g1 = 0.0;
    sc.g2 = 0.0;
    EXPECT_EQ(af_rate(sc).rate, 0.0);
}

TEST(AfOptimize, SingleRelayOptimum) {
    for (double g : {0.0, 10.0, 25.0})
        for (double tg : {0.0, 10.0, 25.0}) {
            const Scenario sc = single_relay(g, tg);
            const LinkSnrs s = snrs(sc);
            const double target = s.gamma1 * s.tgamma1 / (1.0 + s.gamma1 + s.tgamma1);
            EXPECT_NEAR(af_optimize(sc).gamma, target, 0.005 * target);
        }
}

TEST(AfOptimize, AgreesWithMultistartOracle) {
    const Scenario sc = scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 2.0);
    const double opt = af_optimize(sc).gamma;
    const double ref = af_multistart_oracle(sc, 200, 7).second;
    EXPECT_NEAR(opt, ref, 0.02 * ref);
}

TEST(AfOptimize, MatchesTwoDimensionalGridWithoutConferencing) {
    std::mt19937_64 rng(203);
    const Scenario sc = oracle::random_scenario(rng, 5.0, 20.0, 0.0);
    const LinkSnrs s = snrs(sc);
    const double m1 = std::sqrt(sc.pr / (s.gamma1 + 1.0)), m2 = std::sqrt(sc.pr / (s.gamma2 + 1.0));
    const double align = std::arg(sc.h1 * sc.g1) - std::arg(sc.h2 * sc.g2);
    double best = 0.0;
    for (int i = 0; i <= 1000; ++i)
        for (int j = 0; j <= 1000; ++j) {
            AfCombiner a;
            a.a11 = m1 * i / 1000.0;
            a.a22 = std::polar(m2 * j / 1000.0, align);
            best = std::max(best, af_snr(a, sc));
        }
    const double opt = af_optimize(sc).gamma;
    EXPECT_GE(opt, best * (1.0 - 1e-6));
    EXPECT_NEAR(opt, best, 0.005 * best);
    EXPECT_NEAR(af_multistart_oracle(sc, 32, 1).second, best, 0.005 * best);
}

TEST(AfOptimize, RespectsPowerConstraints) {
    std::mt19937_64 rng(204);
    for (int i = 0; i < 10; ++i) {
        const Scenario sc = oracle::random_scenario(rng, 0.0, 30.0, 4.0);
        const AfSolution sol = af_optimize(sc);
        const auto p = af_relay_powers(sol.combiner, sc);
        EXPECT_LE(p[0], sc.pr * (1.0 + 1e-9));
        EXPECT_LE(p[1], sc.pr * (1.0 + 1e-9));
        EXPECT_NEAR(sol.gamma, af_snr(sol.combiner, sc), 1e-9 * std::max(1.0, sol.gamma));
    }
}

TEST(AfOptimize, Deterministic) {
    const Scenario sc = with_random_phases(scenario_from_snrs(12.0, 8.0, 1.0, 1.0, 1.5), 99);
    const AfSolution a = af_optimize(sc), b = af_optimize(sc);
    EXPECT_EQ(a.gamma, b.gamma);
    EXPECT_EQ(a.combiner.a12, b.combiner.a12);
    const auto o1 = af_multistart_oracle(sc, 16, 3), o2 = af_multistart_oracle(sc, 16, 3);
    EXPECT_EQ(o1.second, o2.second);
}

TEST(AfOptimize, PhaseCovariance) {
    std::mt19937_64 rng(205);
    for (int i = 0; i < 5; ++i) {
        const Scenario sc = oracle::random_scenario(rng, 0.0, 25.0, 3.0);
        Scenario rot = sc;
        const Complex u = std::polar(1.0, 0.3 + i);
        rot.h1 *= u;
        rot.g1 *= std::conj(u);
        const double a = af_optimize(sc).gamma, b = af_optimize(rot).gamma;
        EXPECT_NEAR(a, b, 0.005 * a);
    }
}

TEST(AfOptimize, DominatesNoConferencingOptimum) {
    std::mt19937_64 rng(206);
    for (int i = 0; i < 5; ++i) {
        const Scenario sc = oracle::random_scenario(rng, 0.0, 25.0, 3.0);
        EXPECT_GE(af_optimize(sc).gamma, af_optimize(sc.with_conferencing(0.0)).gamma * (1.0 - 1e-6));
    }
}

TEST(AfOptimize, HalfDuplexCeiling) {
    std::mt19937_64 rng(207);
    for (int i = 0; i < 20; ++i) {
        const Scenario sc = oracle::random_scenario(rng, 0.0, 30.0, 4.0);
        const LinkSnrs s = snrs(sc);
        EXPECT_LE(af_rate(sc).rate, 0.5 * std::log2(1.0 + s.gamma1 + s.gamma2) + 1e-9);
    }
}

TEST(AfMonteCarlo, MatchesClosedForm) {
    std::mt19937_64 rng(208);
    const Scenario sc = scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 2.0);
    for (int i = 0; i < 3; ++i) {
        const AfCombiner a = random_combiner(rng);
        const double ref = af_snr(a, sc);
        EXPECT_NEAR(af_monte_carlo_snr(a, sc, 1000000, 1000 + i), ref, 0.015 * ref);
    }
}

TEST(AfMonteCarlo, NoiselessChainHasNoResidual) {
    std::mt19937_64 rng(209);
    const Scenario sc = scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 2.0);
    const auto mc = af_monte_carlo(random_combiner(rng), sc, 1000, 5, 0.0);
    EXPECT_LT(mc.residual_power, 1e-9);
}

TEST(AfMonteCarlo, ZeroCombiner) {
    EXPECT_EQ(af_monte_carlo_snr({}, scenario_from_snrs(10.0, 10.0, 1.0, 1.0, 2.0), 1000, 1), 0.0);
}
